#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace stor {

/// First n points of the Sobol sequence in dim <= 3 dimensions, mapped
/// affinely into [lo, hi] per dimension. The sequence starts at index 1
/// (first point is the midpoint). seed != 0 applies a digital-shift
/// scramble, deterministic per seed; seed == 0 leaves the sequence plain.
Eigen::MatrixXd gen_sobol(int dim, Eigen::Index n, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi, std::uint64_t seed = 0);

/// Latin hypercube sample: one point uniformly inside each of n equal
/// strata per dimension, strata randomly permuted across dimensions.
Eigen::MatrixXd gen_lhs(int dim, Eigen::Index n, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi, std::uint64_t seed);

}  // namespace stor
