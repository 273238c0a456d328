// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/sample.hpp"

#include <algorithm>
#include <cmath>

#include "fdss/error.hpp"

namespace fdss {
namespace {

std::vector<std::string> default_labels(std::size_t k) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) {
    labels.push_back(std::to_string(i + 1));
  }
  return labels;
}

Eigen::MatrixXd stack(const GridDomain& domain,
                      const std::vector<std::vector<GridFunction>>& groups) {
  std::size_t n = 0;
  for (const auto& g : groups) {
    n += g.size();
  }
  Eigen::MatrixXd values(domain.size(), n);
  Eigen::Index column = 0;
  for (const auto& g : groups) {
    for (const auto& f : g) {
      require_same_domain(domain, f.domain());
      for (std::size_t i = 0; i < f.size(); ++i) {
        values(static_cast<Eigen::Index>(i), column) = f[i];
      }
      ++column;
    }
  }
  return values;
}

std::vector<std::size_t> sizes_of(const std::vector<std::vector<GridFunction>>& groups) {
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    sizes.push_back(g.size());
  }
  return sizes;
}

}  // namespace

GroupedSample::GroupedSample(GridDomain domain, Eigen::MatrixXd values,
                             std::vector<std::size_t> sizes)
    : domain_(domain), values_(std::move(values)), sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw InputError("K >= 2 required, got " + std::to_string(sizes_.size()) + " group(s)");
  }
  std::size_t n = 0;
  offsets_.reserve(sizes_.size() + 1);
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (sizes_[k] == 0) {
      throw InputError("group " + std::to_string(k + 1) + " is empty");
    }
    offsets_.push_back(n);
    n += sizes_[k];
  }
  offsets_.push_back(n);
  if (static_cast<std::size_t>(values_.rows()) != domain_.size()) {
    throw InputError("sample rows do not match the grid size");
  }
  if (static_cast<std::size_t>(values_.cols()) != n) {
    throw InputError("sample has " + std::to_string(values_.cols()) +
                     " observations but group sizes add up to " + std::to_string(n));
  }
  if (!values_.allFinite()) {
    throw InputError("sample contains non-finite values");
  }
  labels_ = default_labels(sizes_.size());
}

GroupedSample::GroupedSample(GridDomain domain,
                             const std::vector<std::vector<GridFunction>>& groups)
    : GroupedSample(domain, stack(domain, groups), sizes_of(groups)) {}

std::size_t GroupedSample::min_group_size() const noexcept {
  return *std::min_element(sizes_.begin(), sizes_.end());
}

std::size_t GroupedSample::group_of(std::size_t j) const noexcept {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), j);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

Eigen::MatrixXd GroupedSample::coefficients() const {
  return values_ * std::sqrt(domain_.weight());
}

GridFunction GroupedSample::observation(std::size_t k, std::size_t i) const {
  return pooled(offsets_[k] + i);
}

GridFunction GroupedSample::pooled(std::size_t j) const {
  const auto col = values_.col(static_cast<Eigen::Index>(j));
  return GridFunction(domain_, std::vector<double>(col.data(), col.data() + col.size()));
}

std::vector<GridFunction> GroupedSample::pooled_functions() const {
  std::vector<GridFunction> out;
  out.reserve(total());
  for (std::size_t j = 0; j < total(); ++j) {
    out.push_back(pooled(j));
  }
  return out;
}

GroupedSample GroupedSample::regroup(std::span<const std::size_t> order,
                                     std::vector<std::size_t> new_sizes) const {
  std::size_t n = 0;
  for (auto s : new_sizes) {
    n += s;
  }
  if (order.size() < n) {
    throw InputError("regroup order is shorter than the requested sizes");
  }
  Eigen::MatrixXd values(values_.rows(), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    values.col(static_cast<Eigen::Index>(j)) = values_.col(static_cast<Eigen::Index>(order[j]));
  }
  return GroupedSample(domain_, std::move(values), std::move(new_sizes));
}

void GroupedSample::set_labels(std::vector<std::string> labels) {
  if (labels.size() != sizes_.size()) {
    throw InputError("label count does not match group count");
  }
  labels_ = std::move(labels);
}

}  // namespace fdss
