// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdss/error.hpp"

namespace fdss {

GridDomain::GridDomain(double a, double b, std::size_t m) : a_(a), b_(b), m_(m) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw InputError("grid domain requires finite a < b, got [" + std::to_string(a) +
                     ", " + std::to_string(b) + "]");
  }
  if (m < 2) {
    throw InputError("grid domain requires at least 2 points, got " + std::to_string(m));
  }
}

std::vector<double> GridDomain::points() const {
  std::vector<double> t(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    t[i] = point(i);
  }
  return t;
}

std::size_t GridDomain::nearest_index(double t) const noexcept {
  const double position = (t - a_) / weight() - 0.5;
  if (!(position > 0.0)) {
    return 0;
  }
  const auto index = static_cast<std::size_t>(std::lround(position));
  return std::min(index, m_ - 1);
}

GridFunction::GridFunction(GridDomain domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  if (values_.size() != domain_.size()) {
    throw InputError("grid function has " + std::to_string(values_.size()) +
                     " values but the domain has " + std::to_string(domain_.size()) +
                     " points");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError("grid function value " + std::to_string(i) + " is not finite");
    }
  }
}

GridFunction GridFunction::zero(const GridDomain& domain) {
  return GridFunction(domain, std::vector<double>(domain.size(), 0.0));
}

GridFunction GridFunction::constant(const GridDomain& domain, double value) {
  return GridFunction(domain, std::vector<double>(domain.size(), value));
}

GridFunction GridFunction::sample(const GridDomain& domain,
                                  const std::function<double(double)>& f) {
  std::vector<double> values(domain.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = f(domain.point(i));
  }
  return GridFunction(domain, std::move(values));
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_domain(domain_, other.domain_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += other.values_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_domain(domain_, other.domain_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] -= other.values_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator*=(double c) noexcept {
  for (double& v : values_) {
    v *= c;
  }
  return *this;
}

void require_same_domain(const GridDomain& x, const GridDomain& y) {
  if (!(x == y)) {
    throw InputError("grid domain mismatch");
  }
}

double inner_product(const GridFunction& x, const GridFunction& y) {
  require_same_domain(x.domain(), y.domain());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i] * y[i];
  }
  return x.domain().weight() * sum;
}

double l2_norm(const GridFunction& x) { return std::sqrt(inner_product(x, x)); }

std::vector<double> to_coefficients(const GridFunction& x) {
  const double scale = std::sqrt(x.domain().weight());
  std::vector<double> c(x.values().begin(), x.values().end());
  for (double& v : c) {
    v *= scale;
  }
  return c;
}

GridFunction from_coefficients(const GridDomain& domain, std::span<const double> coefficients) {
  const double scale = std::sqrt(domain.weight());
  std::vector<double> values(coefficients.begin(), coefficients.end());
  for (double& v : values) {
    v /= scale;
  }
  return GridFunction(domain, std::move(values));
}

HTuple::HTuple(std::vector<GridFunction> parts) : parts_(std::move(parts)) {
  for (std::size_t k = 1; k < parts_.size(); ++k) {
    require_same_domain(parts_[0].domain(), parts_[k].domain());
  }
}

double HTuple::squared_norm() const {
  double sum = 0.0;
  for (const auto& part : parts_) {
    sum += inner_product(part, part);
  }
  return sum;
}

}  // namespace fdss
