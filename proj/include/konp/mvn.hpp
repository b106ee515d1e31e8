#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace konp {

struct MvnOptions {
  double accuracy = 5e-4;  // target standard error
  std::uint64_t seed = 0x6d766e;
  std::size_t max_evaluations = 4'000'000;
};

struct MvnResult {
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t evaluations = 0;
};

/// P(lower < V < upper) for V ~ N(0, correlation), by Genz's separation of
/// variables with randomly shifted rank-1 lattice rules. Infinite bounds are
/// allowed. A semidefinite matrix is handled by treating dependent coordinates
/// as deterministic. Throws ValidationError if the matrix is not PSD or d > 8.
MvnResult mvn_rectangle(const Eigen::MatrixXd& correlation, std::span<const double> lower,
                        std::span<const double> upper, const MvnOptions& options = {});

}  // namespace konp
