#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "stor/gas_storage.hpp"
#include "stor/policy_io.hpp"
#include "stor/solver.hpp"
#include "stor/valuation.hpp"

using namespace stor;

namespace {

GasStorageProblem noiseless_gas(Eigen::MatrixXd costs = Eigen::MatrixXd::Zero(3, 3)) {
    ExoProcessSpec proc;
    proc.kind = ProcessKind::LogMeanReverting;
    proc.alpha = 2.38;
    proc.mean_level = 6.0;
    proc.sigma = 0.0;  // deterministic price path
    proc.x0 = 5.0;
    return GasStorageProblem(GasStorageSpec{}, proc, TimeGrid(0.009, 3, 0.10), std::move(costs));
}

/// Exhaustive dynamic program over every admissible regime sequence.
double brute_force_value(const Problem& p, const TimeGrid& grid, const Eigen::VectorXd& price,
                         int k, const InvVec& inv, int regime) {
    if (k == grid.K) return p.terminal_payoff(price[k], inv);
    const double dt = grid.dt();
    const StateSample s{price[k], inv, regime};
    const auto mask = p.admissible_mask(s, dt);
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < p.num_regimes(); ++j) {
        if (((mask >> j) & 1) == 0) continue;
        const StepResult r = p.apply_regime(s, j, dt);
        const double v = r.profit - p.switching_cost()(regime, j) +
                         std::exp(-grid.r * dt) *
                             brute_force_value(p, grid, price, k + 1, r.next_inv, j);
        best = std::max(best, v);
    }
    return best;
}

/// Inventory values reachable at each step under any admissible sequence.
std::vector<std::vector<double>> reachable_levels(const Problem& p, const TimeGrid& grid,
                                                  const Eigen::VectorXd& price) {
    std::vector<std::set<double>> sets(static_cast<std::size_t>(grid.K) + 1);
    std::set<std::pair<double, int>> frontier{{p.initial_state().inv[0], p.initial_state().regime}};
    sets[0].insert(p.initial_state().inv[0]);
    for (int k = 0; k < grid.K; ++k) {
        std::set<std::pair<double, int>> next;
        for (const auto& [inv, m] : frontier) {
            const StateSample s{price[k], {inv, 0.0}, m};
            const auto mask = p.admissible_mask(s, grid.dt());
            for (int j = 0; j < p.num_regimes(); ++j) {
                if (((mask >> j) & 1) == 0) continue;
                const StepResult r = p.apply_regime(s, j, grid.dt());
                next.insert({r.next_inv[0], j});
                sets[static_cast<std::size_t>(k) + 1].insert(r.next_inv[0]);
            }
        }
        frontier = std::move(next);
    }
    std::vector<std::vector<double>> out;
    for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
    return out;
}

/// Schedule whose step-k level table is exactly the reachable inventory set
/// at k+1, with a constant per-level fit. On a deterministic price path the
/// regression then reproduces the value function with no approximation.
BudgetSchedule exact_schedule(const std::vector<std::vector<double>>& levels, int K) {
    BudgetSchedule sched;
    for (int k = 0; k < K; ++k) {
        StepPlan plan;
        plan.design.kind = DesignKind::Conventional;
        plan.design.levels = levels[static_cast<std::size_t>(k) + 1];
        plan.design.n_reps = 1;
        plan.regression.method = "piecewise-poly";
        plan.regression.degree = 0;
        sched.steps.push_back(plan);
    }
    return sched;
}

}  // namespace

TEST_CASE("noiseless three-step solve matches the exhaustive dynamic program") {
    const auto gas = noiseless_gas();
    const TimeGrid grid = gas.default_grid();
    const Eigen::MatrixXd pilot = simulate_paths(gas.exo_spec(), grid, 1, 7);
    const Eigen::VectorXd price = pilot.row(0);

    const auto levels = reachable_levels(gas, grid, price);
    const auto sched = exact_schedule(levels, grid.K);
    const PolicyStore policy = backward_solve(gas, grid, sched, {}, &pilot);

    const StateSample s0 = gas.initial_state();
    const double want = brute_force_value(gas, grid, price, 0, s0.inv, s0.regime);
    const auto [regime, got] = regime_argmax(gas, policy, 0, s0);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));

    // the forward pass along the single deterministic scenario agrees too
    const ScenarioDB db(gas.exo_spec(), grid, 1, 7);
    const ValuationResult val = forward_value(gas, policy, db);
    CHECK(val.estimate == doctest::Approx(want).epsilon(1e-10));
    CHECK(val.std_error == 0.0);
}

TEST_CASE("noiseless solve with switching costs matches the dynamic program") {
    Eigen::MatrixXd costs = Eigen::MatrixXd::Zero(3, 3);
    // cost depends on the target regime
    for (int m = 0; m < 3; ++m) {
        if (m != 2) costs(m, 2) = 15000.0;
        if (m != 0) costs(m, 0) = 5000.0;
    }
    const auto gas = noiseless_gas(costs);
    const TimeGrid grid = gas.default_grid();
    const Eigen::MatrixXd pilot = simulate_paths(gas.exo_spec(), grid, 1, 7);
    const Eigen::VectorXd price = pilot.row(0);

    const auto levels = reachable_levels(gas, grid, price);
    const PolicyStore policy = backward_solve(gas, grid, exact_schedule(levels, grid.K), {}, &pilot);
    CHECK_FALSE(policy.step(0).shared);  // switching costs force per-regime fits

    const StateSample s0 = gas.initial_state();
    const double want = brute_force_value(gas, grid, price, 0, s0.inv, s0.regime);
    const auto [regime, got] = regime_argmax(gas, policy, 0, s0);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("zero switching costs collapse to one shared regression") {
    const auto gas = noiseless_gas();
    CHECK(use_shared_regression(gas));
    const TimeGrid grid = gas.default_grid();
    const Eigen::MatrixXd pilot = simulate_paths(gas.exo_spec(), grid, 1, 7);
    const Eigen::VectorXd price = pilot.row(0);
    const auto sched = exact_schedule(reachable_levels(gas, grid, price), grid.K);

    const PolicyStore shared = backward_solve(gas, grid, sched, {}, &pilot);
    SolveOptions split;
    split.force_split = true;
    const PolicyStore per_regime = backward_solve(gas, grid, sched, split, &pilot);
    CHECK(shared.step(1).shared);
    CHECK_FALSE(per_regime.step(1).shared);

    // with a deterministic price the split fits see identical responses
    for (int k = 0; k < grid.K; ++k)
        for (double inv : reachable_levels(gas, grid, price)[static_cast<std::size_t>(k) + 1])
            for (int m = 0; m < 3; ++m) {
                Eigen::RowVectorXd s(2);
                s << price[k], inv;
                CHECK(per_regime.q(k, m).predict(s) ==
                      doctest::Approx(shared.q(k, 0).predict(s)).epsilon(1e-12));
            }
}

TEST_CASE("terminal-step responses reproduce the terminal payoff") {
    const auto gas = noiseless_gas();
    const TimeGrid grid = gas.default_grid();
    const Eigen::MatrixXd pilot = simulate_paths(gas.exo_spec(), grid, 1, 7);
    const Eigen::VectorXd price = pilot.row(0);
    // dense explicit level table at the last step
    std::vector<double> dense;
    for (double i = 0.0; i <= 2000.0; i += 40.0) dense.push_back(i);
    auto levels = reachable_levels(gas, grid, price);
    levels[static_cast<std::size_t>(grid.K)] = dense;
    const PolicyStore policy = backward_solve(gas, grid, exact_schedule(levels, grid.K), {}, &pilot);
    for (const double inv : dense) {
        Eigen::RowVectorXd s(2);
        s << price[grid.K - 1], inv;
        CHECK(policy.q(grid.K - 1, 0).predict(s) ==
              doctest::Approx(gas.terminal_payoff(price[grid.K], {inv, 0.0})).epsilon(1e-12));
    }
}

TEST_CASE("stochastic solves are reproducible per seed and thread count") {
    ExoProcessSpec proc;
    proc.kind = ProcessKind::LogMeanReverting;
    proc.alpha = 2.38;
    proc.mean_level = 6.0;
    proc.sigma = 0.59;
    proc.x0 = 6.0;
    const GasStorageProblem gas(GasStorageSpec{}, proc, TimeGrid(0.06, 20, 0.10));
    const TimeGrid grid = gas.default_grid();
    const Eigen::MatrixXd pilot = simulate_paths(proc, grid, 60, 3);

    StepPlan plan;
    plan.design.kind = DesignKind::Conventional;
    plan.design.levels = adaptive_levels("uniform-6");
    plan.design.n_reps = 2;
    plan.regression.method = "piecewise-poly";
    plan.regression.degree = 2;
    const auto sched = BudgetSchedule::uniform(grid.K, plan);

    SolveOptions a, b, c, threaded;
    a.seed = b.seed = threaded.seed = 11;
    c.seed = 12;
    threaded.threads = 4;
    SolveReport report;
    const auto pa = backward_solve(gas, grid, sched, a, &pilot, nullptr, &report);
    const auto pb = backward_solve(gas, grid, sched, b, &pilot);
    const auto pc = backward_solve(gas, grid, sched, c, &pilot);
    const auto pt = backward_solve(gas, grid, sched, threaded, &pilot);

    Eigen::RowVectorXd probe(2);
    probe << 6.1, 900.0;
    for (int k : {0, 7, 19}) {
        CHECK(pa.q(k, 0).predict(probe) == pb.q(k, 0).predict(probe));
        CHECK(pa.q(k, 0).predict(probe) == pt.q(k, 0).predict(probe));
        CHECK(pa.q(k, 0).predict(probe) != pc.q(k, 0).predict(probe));
    }
    CHECK(report.one_step_sims == static_cast<std::uint64_t>(grid.K) * 60 * 6 * 2);
    CHECK(report.step_rmse.size() == static_cast<std::size_t>(grid.K));
}

TEST_CASE("missing pilot inputs are reported") {
    const auto gas = noiseless_gas();
    const TimeGrid grid = gas.default_grid();
    StepPlan plan;
    plan.design.kind = DesignKind::Conventional;
    plan.design.levels = {0.0, 1000.0, 2000.0};
    plan.regression.method = "piecewise-poly";
    plan.regression.degree = 0;
    const auto sched = BudgetSchedule::uniform(grid.K, plan);
    CHECK_THROWS(backward_solve(gas, grid, sched));  // no pilot paths supplied
}
