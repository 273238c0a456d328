// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Simulators for the error processes of the simulation study and the mean
// shifts added to them.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fdss/exec.hpp"
#include "fdss/function_space.hpp"
#include "fdss/sample.hpp"

namespace fdss {

enum class ProcessKind { sbm, t_process, gbm, squared_sbm, squared_t };

struct Contamination {
  double p = 0.25;     // probability of drawing the scaled process
  double scale = 5.0;  // s

  friend bool operator==(const Contamination&, const Contamination&) = default;
};

struct ProcessSpec {
  ProcessKind kind = ProcessKind::sbm;
  int df = 0;  // t kinds only
  std::optional<Contamination> contamination;

  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;
};

// Throws InputError on df < 1 for t kinds, p outside [0, 1] or s <= 0.
void validate(const ProcessSpec& spec);

// Text forms: sbm, gbm, t<df>, sbm^2, t<df>^2, and any of these wrapped as
// contaminated(<base>,<p>,<s>), e.g. "contaminated(sbm,0.25,5)".
std::string to_string(const ProcessSpec& spec);
ProcessSpec parse_process_spec(std::string_view text);

// Paths as columns of an m x count matrix. Path j uses streams keyed by
// (seed, purpose, j), so any prefix of a longer run is reproduced exactly.
Eigen::MatrixXd simulate_path_matrix(const ProcessSpec& spec, const GridDomain& domain,
                                     std::size_t count, std::uint64_t seed,
                                     Exec exec = Exec::parallel);
std::vector<GridFunction> simulate_paths(const ProcessSpec& spec, const GridDomain& domain,
                                         std::size_t count, std::uint64_t seed,
                                         Exec exec = Exec::parallel);

// Lower Cholesky factor of [min(t_i, t_j)] + 1e-12 I on the grid; throws
// NumericalError when the kernel matrix is not positive definite.
Eigen::MatrixXd brownian_factor(const GridDomain& domain);

inline constexpr double kKernelJitter = 1e-12;

struct ShiftSpec {
  double c1 = 0.0;
  double c2 = 0.0;
};

// eta_1(t) = t and eta_2(t) = (t - 0.25)(0.75 - t).
double eta1(double t) noexcept;
double eta2(double t) noexcept;

// (0, c1 eta_1, c2 eta_2) on the grid of `domain`.
std::vector<GridFunction> shift_functions(const ShiftSpec& shift, const GridDomain& domain);

// X_{ki} = mu_k + eps_{ki}; pooled observation j carries noise path j of
// (spec, seed), independent of the shifts (common random numbers).
GroupedSample generate_grouped(const ProcessSpec& spec, const GridDomain& domain,
                               std::span<const GridFunction> shifts,
                               std::vector<std::size_t> sizes, std::uint64_t seed,
                               Exec exec = Exec::parallel);
// Three-group design; sizes must have length 3.
GroupedSample generate_grouped(const ProcessSpec& spec, const GridDomain& domain,
                               const ShiftSpec& shift, std::vector<std::size_t> sizes,
                               std::uint64_t seed, Exec exec = Exec::parallel);

// Adds per-group shifts to an m x n noise matrix laid out in group order.
GroupedSample shifted_sample(const GridDomain& domain, const Eigen::MatrixXd& noise,
                             std::span<const GridFunction> shifts,
                             std::vector<std::size_t> sizes);

}  // namespace fdss
