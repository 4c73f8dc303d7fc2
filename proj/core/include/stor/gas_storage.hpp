#pragma once

#include <utility>

#include "stor/problem.hpp"

namespace stor {

/// Facility constants for the gas storage case. Rate functions derive from
/// cavern hydrodynamics: withdrawal speeds up and injection slows down as
/// the cavern fills, with injection impossible at capacity (k3 + I_max = k4).
struct GasStorageSpec {
    double k1 = 2040.41;
    double k2 = 7.3e5;
    double k3 = 500.0;
    double k4 = 2500.0;
    double k5 = 620.5;  ///< gas lost while injecting (net rate = c_inj - k5)
    double i_max = 2000.0;
    double price_multiplier = 1e3;  ///< $/MMBtu quoted price to $/MMcf cash flows
    double penalty_target = 1000.0;
    double penalty_slope = 2.0;

    void validate() const;
};

/// (withdrawal rate c_wdr(I) <= 0, gross injection rate c_inj(I) >= 0).
std::pair<double, double> gas_rates(const GasStorageSpec& spec, double inventory);

/// Single-cavern gas storage. Regime indices 0/1/2 map to labels -1
/// (withdraw), 0 (store), +1 (inject).
class GasStorageProblem : public Problem {
public:
    GasStorageProblem(GasStorageSpec spec, ExoProcessSpec process, TimeGrid grid,
                      Eigen::MatrixXd switching_cost = Eigen::MatrixXd::Zero(3, 3),
                      double i0 = 1000.0);

    static constexpr int kWithdraw = 0;
    static constexpr int kStore = 1;
    static constexpr int kInject = 2;

    std::string name() const override { return "gas"; }
    int num_regimes() const override { return 3; }
    int inv_dim() const override { return 1; }
    double inv_min(int) const override { return 0.0; }
    double inv_max(int) const override { return spec_.i_max; }
    int idle_regime() const override { return kStore; }
    std::string regime_name(int idx) const override;

    StepResult apply_regime(const StateSample& s, int next_regime, double dt) const override;
    std::uint16_t admissible_mask(const StateSample& s, double dt) const override;
    double terminal_payoff(double exo, const InvVec& inv) const override;
    std::uint64_t hash() const override;

    ExoProcessSpec exo_spec() const override { return process_; }
    TimeGrid default_grid() const override { return grid_; }
    StateSample initial_state() const override { return {process_.x0, {i0_, 0.0}, kStore}; }

    const GasStorageSpec& spec() const { return spec_; }

private:
    GasStorageSpec spec_;
    ExoProcessSpec process_;
    TimeGrid grid_;
    double i0_;
};

/// Two identical, independently operated caverns sharing one price process.
/// Regime index r encodes the per-cavern pair (r / 3, r % 3) with the
/// single-cavern labels above; values and penalties add across caverns.
class TwoCavernProblem : public Problem {
public:
    TwoCavernProblem(GasStorageSpec spec, ExoProcessSpec process, TimeGrid grid, double i0 = 1000.0);

    std::string name() const override { return "gas-two-cavern"; }
    int num_regimes() const override { return 9; }
    int inv_dim() const override { return 2; }
    double inv_min(int) const override { return 0.0; }
    double inv_max(int) const override { return spec_.i_max; }
    int idle_regime() const override { return 4; }  // (store, store)
    std::string regime_name(int idx) const override;

    StepResult apply_regime(const StateSample& s, int next_regime, double dt) const override;
    std::uint16_t admissible_mask(const StateSample& s, double dt) const override;
    double terminal_payoff(double exo, const InvVec& inv) const override;
    std::uint64_t hash() const override;

    ExoProcessSpec exo_spec() const override { return process_; }
    TimeGrid default_grid() const override { return grid_; }
    StateSample initial_state() const override { return {process_.x0, {i0_, i0_}, idle_regime()}; }

private:
    GasStorageProblem single_;  // per-cavern mechanics
    GasStorageSpec spec_;
    ExoProcessSpec process_;
    TimeGrid grid_;
    double i0_;
};

}  // namespace stor
