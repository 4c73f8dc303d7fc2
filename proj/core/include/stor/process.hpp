#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "stor/rng.hpp"
#include "stor/time_grid.hpp"

namespace stor {

enum class ProcessKind {
    LogMeanReverting,    ///< dX = a(mean - X) dt + sigma X dW, floored above 0
    OrnsteinUhlenbeck,   ///< dX = a(mean - X) dt + sigma dW
};

/// Exogenous one-factor dynamics, Euler discretized. Shocks are Brownian:
/// dW over a step has variance dt.
struct ExoProcessSpec {
    ProcessKind kind = ProcessKind::LogMeanReverting;
    double alpha = 0.0;       ///< mean-reversion speed, >= 0
    double mean_level = 0.0;  ///< long-run level
    double sigma = 0.0;       ///< volatility, >= 0
    double x0 = 0.0;          ///< initial value; > 0 for the log-mean-reverting kind

    void validate() const;

    /// Positivity floor for the log-mean-reverting kind.
    double floor_eps() const { return 1e-6 * mean_level; }
};

/// One Euler transition with standard normal draw z.
double step_exogenous(const ExoProcessSpec& spec, double x, double dt, double z);

/// Simulate n full trajectories on the grid; row i is path i over steps
/// 0..K. Bit-reproducible for a fixed (seed, stream) regardless of thread
/// count: the draw for (path, step) is addressed directly.
Eigen::MatrixXd simulate_paths(const ExoProcessSpec& spec, const TimeGrid& grid, int n,
                               std::uint64_t seed, std::uint64_t stream = 0, int threads = 1);

/// Paths first..first+count-1 of the same addressed ensemble; row i holds
/// global path first+i. Lets large scenario sets stream in blocks without
/// changing any draw.
Eigen::MatrixXd simulate_path_block(const ExoProcessSpec& spec, const TimeGrid& grid,
                                    Eigen::Index first, Eigen::Index count, std::uint64_t seed,
                                    std::uint64_t stream = 0, int threads = 1);

/// One-step transitions from a vector of starting values at step k:
/// out[i] = step from x[i] using the draw addressed by
/// (seed, step=k, path=i, replicate=rep).
void step_many(const ExoProcessSpec& spec, const Eigen::VectorXd& x, double dt, int k,
               std::uint64_t seed, std::uint64_t rep, Eigen::VectorXd& out);

}  // namespace stor
