// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fdss/function_space.hpp"

namespace fdss {

// K >= 2 groups of functions on one grid. Observations are stored pooled and
// group-contiguous: group k occupies pooled indices [offset(k), offset(k+1)).
class GroupedSample {
 public:
  // values: m x n, column j is pooled observation j.
  GroupedSample(GridDomain domain, Eigen::MatrixXd values, std::vector<std::size_t> sizes);
  GroupedSample(GridDomain domain, const std::vector<std::vector<GridFunction>>& groups);

  const GridDomain& domain() const noexcept { return domain_; }
  std::size_t groups() const noexcept { return sizes_.size(); }
  std::size_t total() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  std::size_t grid_size() const noexcept { return domain_.size(); }
  std::size_t group_size(std::size_t k) const noexcept { return sizes_[k]; }
  std::span<const std::size_t> sizes() const noexcept { return sizes_; }
  std::size_t offset(std::size_t k) const noexcept { return offsets_[k]; }
  std::size_t min_group_size() const noexcept;
  // Group label of pooled observation j.
  std::size_t group_of(std::size_t j) const noexcept;

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  // Embedded coefficients sqrt(h) * values, m x n.
  Eigen::MatrixXd coefficients() const;

  GridFunction observation(std::size_t k, std::size_t i) const;
  GridFunction pooled(std::size_t j) const;
  std::vector<GridFunction> pooled_functions() const;

  // Same pooled observations regrouped: group k receives the pooled indices
  // order[offset(k) .. offset(k) + new_sizes[k]).
  GroupedSample regroup(std::span<const std::size_t> order,
                        std::vector<std::size_t> new_sizes) const;

  // Optional human-readable group labels (CSV ingestion); defaults to "1".."K".
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<std::string> labels);

 private:
  GridDomain domain_;
  Eigen::MatrixXd values_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::string> labels_;
};

}  // namespace fdss
