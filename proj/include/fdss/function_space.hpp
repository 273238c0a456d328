// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Discretized L2[a, b]. Functions are sampled at cell midpoints
// t_i = a + (i + 1/2) h, h = (b - a) / m, and integrated with the midpoint
// rule. All quadrature weights equal h, so the map c_i = sqrt(h) x_i is an
// isometry onto Euclidean R^m and every operator is a plain matrix.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fdss {

class GridDomain {
 public:
  GridDomain(double a, double b, std::size_t m);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t size() const noexcept { return m_; }
  double length() const noexcept { return b_ - a_; }
  // Quadrature weight of every grid point.
  double weight() const noexcept { return (b_ - a_) / static_cast<double>(m_); }
  // Grid point i, 0-based.
  double point(std::size_t i) const noexcept {
    return a_ + (static_cast<double>(i) + 0.5) * weight();
  }
  std::vector<double> points() const;
  // Index of the grid point closest to t (clamped to the grid).
  std::size_t nearest_index(double t) const noexcept;

  friend bool operator==(const GridDomain&, const GridDomain&) = default;

 private:
  double a_;
  double b_;
  std::size_t m_;
};

class GridFunction {
 public:
  GridFunction(GridDomain domain, std::vector<double> values);

  static GridFunction zero(const GridDomain& domain);
  static GridFunction constant(const GridDomain& domain, double value);
  static GridFunction sample(const GridDomain& domain,
                             const std::function<double(double)>& f);

  const GridDomain& domain() const noexcept { return domain_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double c) noexcept;

  friend GridFunction operator+(GridFunction x, const GridFunction& y) { return x += y; }
  friend GridFunction operator-(GridFunction x, const GridFunction& y) { return x -= y; }
  friend GridFunction operator*(GridFunction x, double c) { return x *= c; }
  friend GridFunction operator*(double c, GridFunction x) { return x *= c; }
  friend GridFunction operator-(GridFunction x) { return x *= -1.0; }

 private:
  GridDomain domain_;
  std::vector<double> values_;
};

// Throws InputError when the two domains differ.
void require_same_domain(const GridDomain& x, const GridDomain& y);

double inner_product(const GridFunction& x, const GridFunction& y);
double l2_norm(const GridFunction& x);

std::vector<double> to_coefficients(const GridFunction& x);
GridFunction from_coefficients(const GridDomain& domain, std::span<const double> coefficients);

// Element of the product space H^K.
class HTuple {
 public:
  explicit HTuple(std::vector<GridFunction> parts);

  std::size_t size() const noexcept { return parts_.size(); }
  const GridFunction& operator[](std::size_t k) const noexcept { return parts_[k]; }
  const std::vector<GridFunction>& parts() const noexcept { return parts_; }
  double squared_norm() const;

 private:
  std::vector<GridFunction> parts_;
};

}  // namespace fdss
