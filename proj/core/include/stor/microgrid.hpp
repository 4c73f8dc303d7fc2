#pragma once

#include "stor/problem.hpp"

namespace stor {

/// Microgrid with battery plus a switchable diesel generator balancing a
/// stochastic residual demand. Pure-cost problem: step profit and terminal
/// payoff are both <= 0.
struct MicrogridSpec {
    double i_max = 10.0;   ///< battery capacity (kWh)
    double b_min = -6.0;   ///< max battery discharge power (kW)
    double b_max = 6.0;    ///< max battery charge power (kW)
    double c1 = 5.0;       ///< curtailment cost per unit surplus
    double c2 = 1e6;       ///< blackout cost per unit shortfall
    double gamma = 0.9;    ///< diesel cost exponent
    double start_cost = 10.0;     ///< K(off, on)
    double terminal_slope = 200.0;
    double i0 = 5.0;       ///< initial charge; terminal penalty anchor

    void validate() const;
};

/// Regime 0 = generator off, 1 = generator on. Both regimes are always
/// admissible: the battery output clamps keep inventory feasible.
class MicrogridProblem : public Problem {
public:
    MicrogridProblem(MicrogridSpec spec, ExoProcessSpec process, TimeGrid grid);

    static constexpr int kOff = 0;
    static constexpr int kOn = 1;

    std::string name() const override { return "microgrid"; }
    int num_regimes() const override { return 2; }
    int inv_dim() const override { return 1; }
    double inv_min(int) const override { return 0.0; }
    double inv_max(int) const override { return spec_.i_max; }
    int idle_regime() const override { return kOff; }
    std::string regime_name(int idx) const override { return idx == kOff ? "off" : "on"; }

    StepResult apply_regime(const StateSample& s, int next_regime, double dt) const override;
    std::uint16_t admissible_mask(const StateSample&, double) const override { return 0b11; }
    /// Blackout: the dispatch leaves unmet demand (negative imbalance).
    bool step_stress(const StateSample& s, int next_regime, double dt) const override {
        return dispatch(s, next_regime, dt).imbalance < -1e-9;
    }
    double terminal_payoff(double exo, const InvVec& inv) const override;
    std::uint64_t hash() const override;

    ExoProcessSpec exo_spec() const override { return process_; }
    TimeGrid default_grid() const override { return grid_; }
    StateSample initial_state() const override { return {process_.x0, {spec_.i0, 0.0}, kOn}; }

    /// Power imbalance of the last applied step (exposed for diagnostics).
    struct Dispatch {
        double diesel = 0.0;
        double battery = 0.0;
        double imbalance = 0.0;
    };
    Dispatch dispatch(const StateSample& s, int next_regime, double dt) const;

    const MicrogridSpec& spec() const { return spec_; }

private:
    MicrogridSpec spec_;
    ExoProcessSpec process_;
    TimeGrid grid_;
};

}  // namespace stor
