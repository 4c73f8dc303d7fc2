#include <doctest.h>

#include <nlohmann/json.hpp>

#include "stor/common.hpp"
#include "stor/config.hpp"

using namespace stor;
using nlohmann::json;

TEST_CASE("experiment loading resolves presets and defaults") {
    const json cfg{{"problem", "gas"}, {"schedule", "conventional-pr1d-low"}};
    const Experiment e = load_experiment(cfg);
    CHECK(e.problem->name() == "gas");
    CHECK(e.grid.K == 1000);
    CHECK(e.grid.T == doctest::Approx(3.0));
    CHECK(e.grid.r == doctest::Approx(0.10));
    CHECK(e.schedule.pilot == PilotNeed::Paths);
    CHECK(e.schedule.pilot_paths == 1050);
    CHECK(e.schedule.schedule.num_steps() == 1000);
    CHECK(e.scenario_paths == 10000);
    CHECK(e.report_scale == doctest::Approx(1e-3));

    // per-step budget: 1050 pilot paths crossed with 10 levels, one rep
    const StepPlan& plan = e.schedule.schedule.at(500);
    CHECK(plan.design.kind == DesignKind::Conventional);
    CHECK(plan.design.levels.size() == 10);
    CHECK(plan.design.n_reps == 1);
    CHECK(plan.regression.method == "piecewise-poly");
    CHECK(plan.regression.degree == 3);
}

TEST_CASE("microgrid defaults differ from the gas case") {
    const json cfg{{"problem", "microgrid"}, {"schedule", "microgrid-conventional-pr2d"}};
    const Experiment e = load_experiment(cfg);
    CHECK(e.grid.K == 192);
    CHECK(e.grid.T == doctest::Approx(48.0));
    CHECK(e.grid.r == 0.0);
    CHECK(e.scenario_paths == 200000);
    CHECK(e.report_scale == doctest::Approx(1.0));
}

TEST_CASE("unknown keys are rejected with their path") {
    const json bad{{"problem", "gas"}, {"schedule", "conventional-pr1d-low"}, {"sedd", 4}};
    CHECK_THROWS_AS(load_experiment(bad), ConfigError);
    const json nested{{"problem", "gas"},
                      {"schedule", "conventional-pr1d-low"},
                      {"scenarios", {{"paths", 100}, {"n", 5}}}};
    CHECK_THROWS_AS(load_experiment(nested), ConfigError);
    const json badgrid{{"problem", "gas"},
                       {"schedule", "conventional-pr1d-low"},
                       {"grid", {{"K", 10}}}};
    CHECK_THROWS_AS(load_experiment(badgrid), ConfigError);
}

TEST_CASE("unknown presets raise configuration errors") {
    CHECK_THROWS_AS(load_experiment(json{{"problem", "oil"}, {"schedule", "conventional-pr1d-low"}}),
                    ConfigError);
    CHECK_THROWS_AS(load_experiment(json{{"problem", "gas"}, {"schedule", "fancy"}}), ConfigError);
    CHECK_THROWS_AS(make_problem("gas", json{{"k9", 1.0}}, default_grid("gas")), ConfigError);
}

TEST_CASE("overrides reach the problem parameters") {
    const TimeGrid grid = default_grid("gas");
    const auto base = make_problem("gas", {}, grid);
    const auto tweaked = make_problem("gas", json{{"k5", 700.0}}, grid);
    CHECK(base->hash() != tweaked->hash());
    const auto same = make_problem("gas", json{{"k5", 620.5}}, grid);
    CHECK(base->hash() == same->hash());
}

TEST_CASE("problem presets expose the expected shapes") {
    const auto grid = default_grid("gas");
    CHECK(make_problem("gas", {}, grid)->num_regimes() == 3);
    CHECK_FALSE(make_problem("gas", {}, grid)->has_switching_costs());
    CHECK(make_problem("gas-switching", {}, grid)->has_switching_costs());
    CHECK(make_problem("gas-two-cavern", {}, grid)->inv_dim() == 2);
    CHECK(make_problem("microgrid", {}, default_grid("microgrid"))->num_regimes() == 2);
}

TEST_CASE("config hash tracks content, grid overrides apply") {
    const json a{{"problem", "gas"}, {"schedule", "conventional-pr1d-low"}};
    json b = a;
    b["seed"] = 7;
    CHECK(load_experiment(a).config_hash != load_experiment(b).config_hash);

    json small = a;
    small["grid"] = {{"steps", 25}};
    const Experiment e = load_experiment(small);
    CHECK(e.grid.K == 25);
    CHECK(e.grid.T == doctest::Approx(3.0));
    CHECK(e.schedule.schedule.num_steps() == 25);
}

TEST_CASE("schedule presets carry their pilot requirements") {
    const auto grid = default_grid("gas");
    const auto gas = make_problem("gas", {}, grid);
    CHECK(make_schedule("spacefilling-gp2d-low", *gas, grid).pilot == PilotNeed::None);
    CHECK(make_schedule("mixture-gp2d-low", *gas, grid).pilot == PilotNeed::JointDist);
    CHECK(make_schedule("adaptive-pr1d-low", *gas, grid).pilot == PilotNeed::ExoDist);
    CHECK(make_schedule("dynamic-gp1d-low", *gas, grid).pilot == PilotNeed::ExoDist);

    // mixture component split: 60% probabilistic, 40% space filling
    const auto mix = make_schedule("mixture-gp2d-low", *gas, grid);
    const StepPlan& plan = mix.schedule.at(10);
    REQUIRE(plan.design.kind == DesignKind::Mixture);
    REQUIRE(plan.design.weights.size() == 2);
    CHECK(plan.design.weights[0] == doctest::Approx(0.6));
    CHECK(plan.design.weights[1] == doctest::Approx(0.4));
    CHECK(plan.design.components[0].kind == DesignKind::Probabilistic);
    CHECK(plan.design.components[1].kind == DesignKind::Lhs);
    CHECK(plan.regression.method == "gp");

    // per-level GP fits get much heavier noise regularization than joint fits
    CHECK(plan.regression.gp_noise_floor == doctest::Approx(1e-4));
    const auto conv_gp = make_schedule("conventional-gp1d-low", *gas, grid);
    CHECK(conv_gp.schedule.at(0).regression.method == "piecewise-gp");
    CHECK(conv_gp.schedule.at(0).regression.gp_noise_floor == doctest::Approx(1e-2));
}

TEST_CASE("dynamic schedules spend more near maturity") {
    const auto grid = default_grid("gas");
    const auto gas = make_problem("gas", {}, grid);
    const auto dyn = make_schedule("dynamic-gp1d-low", *gas, grid);
    const auto early = dyn.schedule.at(10);
    const auto late = dyn.schedule.at(grid.K - 1);
    const auto early_budget = static_cast<Eigen::Index>(early.design.n_sites) *
                              static_cast<Eigen::Index>(early.design.levels.size()) *
                              early.design.n_reps;
    const auto late_budget = static_cast<Eigen::Index>(late.design.n_sites) *
                             static_cast<Eigen::Index>(late.design.levels.size()) *
                             late.design.n_reps;
    CHECK(late_budget > early_budget);
    CHECK(early.design.levels.size() == 11);
    CHECK(late.design.levels.size() == 21);
}
