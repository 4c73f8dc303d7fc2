#include "stor/process.hpp"

#include <cmath>
#include <stdexcept>

#include "stor/common.hpp"

namespace stor {

void ExoProcessSpec::validate() const {
    if (alpha < 0.0 || sigma < 0.0) throw std::invalid_argument("ExoProcessSpec: alpha and sigma must be >= 0");
    if (kind == ProcessKind::LogMeanReverting && !(x0 > 0.0))
        throw std::invalid_argument("ExoProcessSpec: log-mean-reverting start must be > 0");
    if (!std::isfinite(alpha) || !std::isfinite(mean_level) || !std::isfinite(sigma) || !std::isfinite(x0))
        throw std::invalid_argument("ExoProcessSpec: non-finite parameter");
}

double step_exogenous(const ExoProcessSpec& spec, double x, double dt, double z) {
    if (!std::isfinite(x) || !std::isfinite(z)) throw std::invalid_argument("step_exogenous: non-finite input");
    if (!(dt > 0.0)) throw std::invalid_argument("step_exogenous: dt must be > 0");
    const double base = x + spec.alpha * (spec.mean_level - x) * dt;
    const double sq = std::sqrt(dt);
    if (spec.kind == ProcessKind::LogMeanReverting) {
        if (!(x > 0.0)) throw std::invalid_argument("step_exogenous: log-mean-reverting state must be > 0");
        const double next = base + spec.sigma * x * sq * z;
        const double eps = spec.floor_eps();
        return next > eps ? next : eps;
    }
    return base + spec.sigma * sq * z;
}

Eigen::MatrixXd simulate_paths(const ExoProcessSpec& spec, const TimeGrid& grid, int n,
                               std::uint64_t seed, std::uint64_t stream, int threads) {
    return simulate_path_block(spec, grid, 0, n, seed, stream, threads);
}

Eigen::MatrixXd simulate_path_block(const ExoProcessSpec& spec, const TimeGrid& grid,
                                    Eigen::Index first, Eigen::Index count, std::uint64_t seed,
                                    std::uint64_t stream, int threads) {
    spec.validate();
    if (count < 1 || first < 0) throw std::invalid_argument("simulate_path_block: bad range");
    const double dt = grid.dt();
    Eigen::MatrixXd paths(count, grid.K + 1);
    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t i) {
        const auto path = static_cast<std::uint64_t>(first) + i;
        double x = spec.x0;
        paths(static_cast<Eigen::Index>(i), 0) = x;
        for (int k = 0; k < grid.K; ++k) {
            const double z = rng::normal(rng::Key{seed, static_cast<std::uint64_t>(k), path, stream}, 0);
            x = step_exogenous(spec, x, dt, z);
            paths(static_cast<Eigen::Index>(i), k + 1) = x;
        }
    });
    return paths;
}

void step_many(const ExoProcessSpec& spec, const Eigen::VectorXd& x, double dt, int k,
               std::uint64_t seed, std::uint64_t rep, Eigen::VectorXd& out) {
    out.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double z = rng::normal(
            rng::Key{seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i), rep}, 0);
        out[i] = step_exogenous(spec, x[i], dt, z);
    }
}

}  // namespace stor
