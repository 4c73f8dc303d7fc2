#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <string>

#include "stor/process.hpp"
#include "stor/time_grid.hpp"

namespace stor {

/// Inventory vector; at most two coordinates (two-facility case).
using InvVec = std::array<double, 2>;

/// Joint system state at one time step.
struct StateSample {
    double exo = 0.0;  ///< exogenous factor (price or residual demand)
    InvVec inv{0.0, 0.0};
    int regime = 0;  ///< current regime index
};

/// Outcome of committing to a regime over one step.
struct StepResult {
    InvVec next_inv{0.0, 0.0};
    double control = 0.0;  ///< inventory rate a(c)
    double profit = 0.0;   ///< step profit, excluding switching cost
};

/// A storage problem: regimes, admissibility, inventory transition,
/// stepwise profit, switching costs, and terminal payoff. Immutable after
/// construction; all operations are pure.
class Problem {
public:
    virtual ~Problem() = default;

    virtual std::string name() const = 0;
    virtual int num_regimes() const = 0;
    virtual int inv_dim() const = 0;
    virtual double inv_min(int coord) const = 0;
    virtual double inv_max(int coord) const = 0;
    /// The do-nothing / generator-off regime (tie-break preference).
    virtual int idle_regime() const = 0;
    /// Human-facing regime label (e.g. -1 / 0 / +1).
    virtual std::string regime_name(int idx) const = 0;

    const Eigen::MatrixXd& switching_cost() const { return switch_cost_; }
    bool has_switching_costs() const { return switch_cost_.cwiseAbs().maxCoeff() > 0.0; }

    /// Inventory transition, control and step profit for moving to
    /// next_regime. Precondition: next_regime admissible.
    virtual StepResult apply_regime(const StateSample& s, int next_regime, double dt) const = 0;

    /// Bitmask of admissible next regimes (bit i = regime i).
    virtual std::uint16_t admissible_mask(const StateSample& s, double dt) const = 0;

    virtual double terminal_payoff(double exo, const InvVec& inv) const = 0;

    /// Whether committing to next_regime from s is a stress event worth
    /// counting during valuation (e.g. a microgrid blackout). Default none.
    virtual bool step_stress(const StateSample&, int, double) const { return false; }

    /// Parameter hash tying policies and scenario databases to the problem.
    virtual std::uint64_t hash() const = 0;

    virtual ExoProcessSpec exo_spec() const = 0;
    virtual TimeGrid default_grid() const = 0;
    /// Default initial condition for valuation: (x0, I0, m0).
    virtual StateSample initial_state() const = 0;

protected:
    void set_switching_cost(Eigen::MatrixXd k);

    Eigen::MatrixXd switch_cost_;
};

inline void Problem::set_switching_cost(Eigen::MatrixXd k) {
    if (k.rows() != k.cols()) throw std::invalid_argument("switching cost matrix must be square");
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        if (k(i, i) != 0.0) throw std::invalid_argument("switching cost diagonal must be zero");
        for (Eigen::Index j = 0; j < k.cols(); ++j)
            if (!(k(i, j) >= 0.0) || !std::isfinite(k(i, j)))
                throw std::invalid_argument("switching costs must be finite and >= 0");
    }
    switch_cost_ = std::move(k);
}

}  // namespace stor
