// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/process.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "fdss/error.hpp"
#include "fdss/rng.hpp"

namespace fdss {
namespace {

bool is_t(ProcessKind kind) {
  return kind == ProcessKind::t_process || kind == ProcessKind::squared_t;
}

std::string format_number(double x) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return {buffer, result.ptr};
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last) {
    throw InputError("invalid " + std::string(what) + " '" + std::string(text) +
                     "' in process specification");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

ProcessSpec parse_base(std::string_view text) {
  ProcessSpec spec;
  bool squared = false;
  if (text.size() > 2 && text.substr(text.size() - 2) == "^2") {
    squared = true;
    text.remove_suffix(2);
  }
  if (text == "sbm") {
    spec.kind = squared ? ProcessKind::squared_sbm : ProcessKind::sbm;
  } else if (text == "gbm" && !squared) {
    spec.kind = ProcessKind::gbm;
  } else if (text.size() > 1 && text.front() == 't') {
    const double df = parse_number(text.substr(1), "degrees of freedom");
    if (df != std::floor(df) || df < 1.0 || df > 1e6) {
      throw InputError("t process degrees of freedom must be a positive integer, got '" +
                       std::string(text.substr(1)) + "'");
    }
    spec.kind = squared ? ProcessKind::squared_t : ProcessKind::t_process;
    spec.df = static_cast<int>(df);
  } else {
    throw InputError("unknown process '" + std::string(text) +
                     "' (expected sbm, gbm, t<df>, sbm^2, t<df>^2 or contaminated(...))");
  }
  return spec;
}

}  // namespace

void validate(const ProcessSpec& spec) {
  if (is_t(spec.kind) && spec.df < 1) {
    throw InputError("t process needs df >= 1");
  }
  if (spec.contamination) {
    const auto& c = *spec.contamination;
    if (!(c.p >= 0.0 && c.p <= 1.0)) {
      throw InputError("contamination probability must lie in [0, 1]");
    }
    if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
      throw InputError("contamination scale must be positive");
    }
  }
}

std::string to_string(const ProcessSpec& spec) {
  std::string base;
  switch (spec.kind) {
    case ProcessKind::sbm:
      base = "sbm";
      break;
    case ProcessKind::t_process:
      base = "t" + std::to_string(spec.df);
      break;
    case ProcessKind::gbm:
      base = "gbm";
      break;
    case ProcessKind::squared_sbm:
      base = "sbm^2";
      break;
    case ProcessKind::squared_t:
      base = "t" + std::to_string(spec.df) + "^2";
      break;
  }
  if (!spec.contamination) {
    return base;
  }
  return "contaminated(" + base + "," + format_number(spec.contamination->p) + "," +
         format_number(spec.contamination->scale) + ")";
}

ProcessSpec parse_process_spec(std::string_view text) {
  text = trim(text);
  constexpr std::string_view prefix = "contaminated(";
  if (text.substr(0, prefix.size()) != prefix) {
    ProcessSpec spec = parse_base(text);
    validate(spec);
    return spec;
  }
  if (text.back() != ')') {
    throw InputError("contaminated(...) is missing its closing parenthesis");
  }
  std::string_view inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
  const auto first = inner.find(',');
  const auto second = first == std::string_view::npos ? first : inner.find(',', first + 1);
  if (second == std::string_view::npos) {
    throw InputError("contaminated(...) expects (<base>,<p>,<s>)");
  }
  ProcessSpec spec = parse_base(trim(inner.substr(0, first)));
  Contamination c;
  c.p = parse_number(trim(inner.substr(first + 1, second - first - 1)), "mixing probability");
  c.scale = parse_number(trim(inner.substr(second + 1)), "contamination scale");
  spec.contamination = c;
  validate(spec);
  return spec;
}

Eigen::MatrixXd brownian_factor(const GridDomain& domain) {
  const auto m = static_cast<Eigen::Index>(domain.size());
  Eigen::MatrixXd kernel(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      kernel(i, j) = std::min(domain.point(static_cast<std::size_t>(i)),
                              domain.point(static_cast<std::size_t>(j)));
    }
    kernel(i, i) += kKernelJitter;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(kernel);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Brownian kernel matrix on [" + format_number(domain.a()) + ", " +
                         format_number(domain.b()) +
                         "] is not positive definite after jitter; the grid must lie in t > 0");
  }
  return llt.matrixL();
}

Eigen::MatrixXd simulate_path_matrix(const ProcessSpec& spec, const GridDomain& domain,
                                     std::size_t count, std::uint64_t seed, Exec exec) {
  validate(spec);
  const Eigen::MatrixXd factor = brownian_factor(domain);
  const auto m = static_cast<Eigen::Index>(domain.size());
  Eigen::MatrixXd paths(m, static_cast<Eigen::Index>(count));
  const auto total = static_cast<long>(count);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long j = 0; j < total; ++j) {
    const auto index = static_cast<std::uint64_t>(j);
    rng::Stream gaussian(seed, rng::Purpose::path_gaussian, index);
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      z(i) = gaussian.normal();
    }
    Eigen::VectorXd v = factor.triangularView<Eigen::Lower>() * z;
    if (is_t(spec.kind)) {
      rng::Stream chi(seed, rng::Purpose::path_chi_square, index);
      const double df = static_cast<double>(spec.df);
      v /= std::sqrt(chi.chi_square(df) / df);
    }
    switch (spec.kind) {
      case ProcessKind::gbm:
        v = v.array().exp().matrix();
        break;
      case ProcessKind::squared_sbm:
      case ProcessKind::squared_t:
        v = v.array().square().matrix();
        break;
      default:
        break;
    }
    if (spec.contamination) {
      rng::Stream coin(seed, rng::Purpose::path_contamination, index);
      if (coin.uniform() < spec.contamination->p) {
        v *= spec.contamination->scale;
      }
    }
    paths.col(static_cast<Eigen::Index>(j)) = v;
  }
  return paths;
}

std::vector<GridFunction> simulate_paths(const ProcessSpec& spec, const GridDomain& domain,
                                         std::size_t count, std::uint64_t seed, Exec exec) {
  const Eigen::MatrixXd paths = simulate_path_matrix(spec, domain, count, seed, exec);
  std::vector<GridFunction> out;
  out.reserve(count);
  for (Eigen::Index j = 0; j < paths.cols(); ++j) {
    out.emplace_back(domain, std::vector<double>(paths.col(j).data(),
                                                 paths.col(j).data() + paths.rows()));
  }
  return out;
}

double eta1(double t) noexcept { return t; }

double eta2(double t) noexcept { return (t - 0.25) * (0.75 - t); }

std::vector<GridFunction> shift_functions(const ShiftSpec& shift, const GridDomain& domain) {
  return {GridFunction::zero(domain),
          GridFunction::sample(domain, [&](double t) { return shift.c1 * eta1(t); }),
          GridFunction::sample(domain, [&](double t) { return shift.c2 * eta2(t); })};
}

GroupedSample shifted_sample(const GridDomain& domain, const Eigen::MatrixXd& noise,
                             std::span<const GridFunction> shifts,
                             std::vector<std::size_t> sizes) {
  if (shifts.size() != sizes.size()) {
    throw InputError("need one shift function per group");
  }
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (static_cast<std::size_t>(noise.cols()) != n ||
      static_cast<std::size_t>(noise.rows()) != domain.size()) {
    throw InputError("noise matrix does not match the group sizes and grid");
  }
  Eigen::MatrixXd values = noise;
  Eigen::Index start = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    require_same_domain(shifts[k].domain(), domain);
    const auto mu = shifts[k].values();
    const Eigen::Map<const Eigen::VectorXd> shift(mu.data(), static_cast<Eigen::Index>(mu.size()));
    values.middleCols(start, static_cast<Eigen::Index>(sizes[k])).colwise() += shift;
    start += static_cast<Eigen::Index>(sizes[k]);
  }
  return {domain, std::move(values), std::move(sizes)};
}

GroupedSample generate_grouped(const ProcessSpec& spec, const GridDomain& domain,
                               std::span<const GridFunction> shifts,
                               std::vector<std::size_t> sizes, std::uint64_t seed, Exec exec) {
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  return shifted_sample(domain, simulate_path_matrix(spec, domain, n, seed, exec), shifts,
                        std::move(sizes));
}

GroupedSample generate_grouped(const ProcessSpec& spec, const GridDomain& domain,
                               const ShiftSpec& shift, std::vector<std::size_t> sizes,
                               std::uint64_t seed, Exec exec) {
  if (sizes.size() != 3) {
    throw InputError("the (c1, c2) shift design has exactly 3 groups; pass explicit shifts for K = " +
                     std::to_string(sizes.size()));
  }
  const auto shifts = shift_functions(shift, domain);
  return generate_grouped(spec, domain, shifts, std::move(sizes), seed, exec);
}

}  // namespace fdss
