#include "stor/config.hpp"

#include <chrono>
#include <fstream>
#include <set>

#include "stor/common.hpp"
#include "stor/gas_storage.hpp"
#include "stor/microgrid.hpp"

namespace stor {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (allowed.find(key) == allowed.end())
            throw ConfigError(path + ": unknown key '" + key + "'");
}

Eigen::MatrixXd gas_switching_costs() {
    // cost depends only on the target regime: inject 15000, withdraw 5000
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(3, 3);
    k(GasStorageProblem::kStore, GasStorageProblem::kInject) = 15000.0;
    k(GasStorageProblem::kWithdraw, GasStorageProblem::kInject) = 15000.0;
    k(GasStorageProblem::kStore, GasStorageProblem::kWithdraw) = 5000.0;
    k(GasStorageProblem::kInject, GasStorageProblem::kWithdraw) = 5000.0;
    return k;
}

double take_number(nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const double v = j.at(key).get<double>();
    j.erase(key);
    return v;
}

}  // namespace

TimeGrid default_grid(const std::string& problem_preset) {
    if (problem_preset == "microgrid") return TimeGrid(48.0, 192, 0.0);
    return TimeGrid(3.0, 1000, 0.10);
}

std::shared_ptr<Problem> make_problem(const std::string& preset, const nlohmann::json& overrides,
                                      const TimeGrid& grid) {
    nlohmann::json ov = overrides.is_null() ? nlohmann::json::object() : overrides;
    if (!ov.is_object()) throw ConfigError("problem overrides: expected an object");

    if (preset == "gas" || preset == "gas-switching" || preset == "gas-two-cavern") {
        ExoProcessSpec proc;
        proc.kind = ProcessKind::LogMeanReverting;
        proc.alpha = take_number(ov, "alpha", 2.38);
        proc.mean_level = take_number(ov, "mean_level", 6.0);
        proc.sigma = take_number(ov, "sigma", 0.59);
        proc.x0 = take_number(ov, "x0", 6.0);
        GasStorageSpec spec;
        spec.k1 = take_number(ov, "k1", spec.k1);
        spec.k2 = take_number(ov, "k2", spec.k2);
        spec.k3 = take_number(ov, "k3", spec.k3);
        spec.k4 = take_number(ov, "k4", spec.k4);
        spec.k5 = take_number(ov, "k5", spec.k5);
        spec.i_max = take_number(ov, "i_max", spec.i_max);
        spec.penalty_target = take_number(ov, "penalty_target", spec.penalty_target);
        const double i0 = take_number(ov, "i0", 1000.0);
        if (!ov.empty()) reject_unknown_keys(ov, {}, "problem overrides");
        if (preset == "gas-two-cavern")
            return std::make_shared<TwoCavernProblem>(spec, proc, grid, i0);
        Eigen::MatrixXd costs = preset == "gas-switching" ? gas_switching_costs()
                                                          : Eigen::MatrixXd::Zero(3, 3);
        return std::make_shared<GasStorageProblem>(spec, proc, grid, std::move(costs), i0);
    }
    if (preset == "microgrid") {
        ExoProcessSpec proc;
        proc.kind = ProcessKind::OrnsteinUhlenbeck;
        proc.alpha = take_number(ov, "alpha", 0.5);
        proc.mean_level = take_number(ov, "mean_level", 0.0);
        proc.sigma = take_number(ov, "sigma", 2.0);
        proc.x0 = take_number(ov, "x0", 0.0);
        MicrogridSpec spec;
        spec.i_max = take_number(ov, "i_max", spec.i_max);
        spec.b_min = take_number(ov, "b_min", spec.b_min);
        spec.b_max = take_number(ov, "b_max", spec.b_max);
        spec.c1 = take_number(ov, "c1", spec.c1);
        spec.c2 = take_number(ov, "c2", spec.c2);
        spec.gamma = take_number(ov, "gamma", spec.gamma);
        spec.start_cost = take_number(ov, "start_cost", spec.start_cost);
        spec.i0 = take_number(ov, "i0", spec.i0);
        if (!ov.empty()) reject_unknown_keys(ov, {}, "problem overrides");
        return std::make_shared<MicrogridProblem>(spec, proc, grid);
    }
    throw ConfigError("unknown problem preset: " + preset +
                      " (known: gas, gas-switching, gas-two-cavern, microgrid)");
}

namespace {

RegressionSpec piecewise_poly(int degree) {
    RegressionSpec r;
    r.method = "piecewise-poly";
    r.degree = degree;
    return r;
}

RegressionSpec poly_spec(int degree) {
    RegressionSpec r;
    r.method = "poly";
    r.degree = degree;
    return r;
}

RegressionSpec gp_spec(int refit_interval) {
    RegressionSpec r;
    r.method = "gp";
    r.gp_restarts = 3;
    r.gp_max_iter = 80;
    r.gp_refit_interval = refit_interval;
    return r;
}

RegressionSpec piecewise_gp(int refit_interval) {
    RegressionSpec r = gp_spec(refit_interval);
    r.method = "piecewise-gp";
    // per-level datasets are small and price sites cluster near the spot, so
    // the per-level fits need much heavier noise regularization than the
    // joint space-filling GP to keep the backward recursion stable
    r.gp_noise_floor = 1e-2;
    return r;
}

DesignSpec conventional(const Problem& pb, int n_levels, int n_reps) {
    DesignSpec d;
    d.kind = DesignKind::Conventional;
    d.levels = adaptive_levels("uniform-" + std::to_string(n_levels), pb.inv_min(0), pb.inv_max(0));
    d.inv_dim = pb.inv_dim();
    d.n_reps = n_reps;
    return d;
}

// conservative space-filling box: fixed price range for gas, a wide
// residual-demand range for the microgrid
void space_filling_bounds(const Problem& pb, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
    const int dim = 1 + pb.inv_dim();
    lo.resize(dim);
    hi.resize(dim);
    if (pb.exo_spec().kind == ProcessKind::LogMeanReverting) {
        lo[0] = 2.0;
        hi[0] = 10.0;
    } else {
        lo[0] = -8.0;
        hi[0] = 8.0;
    }
    for (int c = 0; c < pb.inv_dim(); ++c) {
        lo[1 + c] = pb.inv_min(c);
        hi[1 + c] = pb.inv_max(c);
    }
}

DesignSpec lhs_design(const Problem& pb, Eigen::Index n_sites, int n_reps) {
    DesignSpec d;
    d.kind = DesignKind::Lhs;
    space_filling_bounds(pb, d.lo, d.hi);
    d.n_sites = n_sites;
    d.n_reps = n_reps;
    return d;
}

DesignSpec sobol_design(const Problem& pb, Eigen::Index n_sites, int n_reps) {
    DesignSpec d = lhs_design(pb, n_sites, n_reps);
    d.kind = DesignKind::Sobol;
    return d;
}

DesignSpec mixture_design(const Problem& pb, double w_prob, Eigen::Index n_sites, int n_reps) {
    DesignSpec prob;
    prob.kind = DesignKind::Probabilistic;
    DesignSpec lhs = lhs_design(pb, 1, 1);
    DesignSpec d;
    d.kind = DesignKind::Mixture;
    d.weights = {w_prob, 1.0 - w_prob};
    d.components = {prob, lhs};
    d.n_sites = n_sites;
    d.n_reps = n_reps;
    return d;
}

DesignSpec adaptive_design(const std::string& tier, Eigen::Index n_price, int n_reps) {
    DesignSpec d;
    d.kind = DesignKind::Adaptive1d;
    d.levels = adaptive_levels(tier);
    d.n_sites = n_price;
    d.n_reps = n_reps;
    return d;
}

}  // namespace

ResolvedSchedule make_schedule(const std::string& preset, const Problem& problem,
                               const TimeGrid& grid) {
    const int K = grid.K;
    ResolvedSchedule out;

    auto conv = [&](int n_paths, int n_levels, int n_reps, RegressionSpec reg) {
        out.schedule = BudgetSchedule::uniform(K, {conventional(problem, n_levels, n_reps), reg});
        out.pilot = PilotNeed::Paths;
        out.pilot_paths = n_paths;
    };

    if (preset == "conventional-pr1d-low") conv(1050, 10, 1, piecewise_poly(3));
    else if (preset == "conventional-pr1d-medium") conv(2100, 20, 1, piecewise_poly(3));
    else if (preset == "conventional-pr1d-large") conv(3400, 30, 1, piecewise_poly(3));
    else if (preset == "conventional-pr2d-low") conv(1050, 10, 1, poly_spec(3));
    else if (preset == "conventional-gp1d-low") conv(105, 10, 10, piecewise_gp(25));
    else if (preset == "spacefilling-gp2d-low") {
        out.schedule = BudgetSchedule::uniform(K, {lhs_design(problem, 500, 20), gp_spec(10)});
    } else if (preset == "mixture-gp2d-low") {
        out.schedule = BudgetSchedule::uniform(K, {mixture_design(problem, 0.6, 500, 20), gp_spec(10)});
        out.pilot = PilotNeed::JointDist;
    } else if (preset == "mixture-gp2d-medium") {
        out.schedule =
            BudgetSchedule::uniform(K, {mixture_design(problem, 0.6, 1000, 42), gp_spec(20)});
        out.pilot = PilotNeed::JointDist;
    } else if (preset == "mixture-gp2d-large") {
        out.schedule =
            BudgetSchedule::uniform(K, {mixture_design(problem, 0.6, 2000, 51), gp_spec(40)});
        out.pilot = PilotNeed::JointDist;
    } else if (preset == "adaptive-pr1d-low") {
        out.schedule = BudgetSchedule::uniform(K, {adaptive_design("11", 950, 1), piecewise_poly(3)});
        out.pilot = PilotNeed::ExoDist;
    } else if (preset == "dynamic-gp1d-low") {
        out.schedule = BudgetSchedule::threshold(K, std::min(K - 1, 900),
                                                 {adaptive_design("11", 74, 10), piecewise_gp(25)},
                                                 {adaptive_design("21", 150, 10), piecewise_gp(25)});
        out.pilot = PilotNeed::ExoDist;
    } else if (preset == "dynamic-gp1d-medium") {
        out.schedule = BudgetSchedule::threshold(K, std::min(K - 1, 900),
                                                 {adaptive_design("21", 168, 10), piecewise_gp(25)},
                                                 {adaptive_design("31", 340, 10), piecewise_gp(25)});
        out.pilot = PilotNeed::ExoDist;
    } else if (preset == "mixture-gp3d-10k") {
        out.schedule = BudgetSchedule::uniform(K, {mixture_design(problem, 0.5, 500, 21), gp_spec(50)});
        out.pilot = PilotNeed::JointDist;
    } else if (preset == "mixture-gp3d-40k") {
        out.schedule =
            BudgetSchedule::uniform(K, {mixture_design(problem, 0.5, 1000, 42), gp_spec(100)});
        out.pilot = PilotNeed::JointDist;
    } else if (preset == "mixture-gp3d-100k") {
        out.schedule =
            BudgetSchedule::uniform(K, {mixture_design(problem, 0.5, 2000, 51), gp_spec(200)});
        out.pilot = PilotNeed::JointDist;
    } else if (preset == "sobol-gp3d-10k") {
        out.schedule = BudgetSchedule::uniform(K, {sobol_design(problem, 500, 21), gp_spec(50)});
    } else if (preset == "microgrid-conventional-pr2d") {
        conv(1000, 10, 1, poly_spec(3));
    } else if (preset == "microgrid-spacefilling-pr2d") {
        out.schedule = BudgetSchedule::uniform(K, {lhs_design(problem, 10000, 1), poly_spec(3)});
    } else if (preset == "microgrid-mixture-pr2d") {
        out.schedule = BudgetSchedule::uniform(K, {mixture_design(problem, 0.5, 10000, 1), poly_spec(3)});
        out.pilot = PilotNeed::JointDist;
    } else if (preset == "microgrid-mixture-gp2d") {
        out.schedule = BudgetSchedule::uniform(K, {mixture_design(problem, 0.5, 500, 20), gp_spec(10)});
        out.pilot = PilotNeed::JointDist;
    } else {
        throw ConfigError("unknown schedule preset: " + preset);
    }
    return out;
}

Experiment load_experiment(const nlohmann::json& config) {
    reject_unknown_keys(config,
                        {"name", "problem", "overrides", "grid", "schedule", "seed", "threads",
                         "scenarios", "pilot", "output"},
                        "config");
    Experiment e;
    e.name = config.value("name", "experiment");
    const auto problem_preset = config.at("problem").get<std::string>();
    e.grid = default_grid(problem_preset);
    if (config.contains("grid")) {
        const auto& g = config["grid"];
        reject_unknown_keys(g, {"horizon", "steps", "rate"}, "config.grid");
        e.grid = TimeGrid(g.value("horizon", e.grid.T), g.value("steps", e.grid.K),
                          g.value("rate", e.grid.r));
    }
    e.problem = make_problem(problem_preset, config.value("overrides", nlohmann::json()), e.grid);
    e.schedule = make_schedule(config.at("schedule").get<std::string>(), *e.problem, e.grid);
    e.solve.seed = config.value("seed", 1);
    e.solve.threads = config.value("threads", 1);
    e.scenario_paths = problem_preset == "microgrid" ? 200000 : 10000;
    e.scenario_seed = 9001;
    if (config.contains("scenarios")) {
        const auto& s = config["scenarios"];
        reject_unknown_keys(s, {"paths", "seed"}, "config.scenarios");
        e.scenario_paths = s.value("paths", e.scenario_paths);
        e.scenario_seed = s.value("seed", e.scenario_seed);
    }
    if (config.contains("pilot")) {
        const auto& p = config["pilot"];
        reject_unknown_keys(p, {"seed"}, "config.pilot");
        e.pilot_seed = p.value("seed", e.pilot_seed);
    }
    e.output_dir = config.value("output", "out");
    if (problem_preset != "microgrid") {
        e.report_scale = 1e-3;
        e.report_unit = "thousands USD";
    }
    e.config_hash = fnv1a(config.dump());
    return e;
}

Experiment load_experiment_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError("config parse error in " + path + ": " + err.what());
    }
    return load_experiment(j);
}

namespace {

// cheap schedule powering the pilot solve behind probabilistic designs
ResolvedSchedule pilot_schedule(const Problem& problem, const TimeGrid& grid) {
    ResolvedSchedule out;
    out.pilot = PilotNeed::Paths;
    if (problem.inv_dim() == 1) {
        out.schedule =
            BudgetSchedule::uniform(grid.K, {conventional(problem, 11, 1), piecewise_poly(3)});
        out.pilot_paths = 500;
    } else {
        out.schedule = BudgetSchedule::uniform(grid.K, {conventional(problem, 7, 1), poly_spec(3)});
        out.pilot_paths = 300;
    }
    return out;
}

}  // namespace

PreparedInputs prepare_inputs(const Experiment& e) {
    PreparedInputs out;
    const PilotNeed need = e.schedule.pilot;
    if (need == PilotNeed::None) return out;

    if (need == PilotNeed::Paths) {
        out.pilot_paths = simulate_paths(e.problem->exo_spec(), e.grid, e.schedule.pilot_paths,
                                         e.pilot_seed, 1, e.solve.threads);
        return out;
    }

    const int n_dist = 1000;
    Eigen::MatrixXd exo =
        simulate_paths(e.problem->exo_spec(), e.grid, n_dist, e.pilot_seed, 1, e.solve.threads);
    if (need == PilotNeed::ExoDist) {
        out.marginals = EmpiricalMarginal::estimate(exo);
        return out;
    }

    // joint law: solve a cheap pilot policy, roll the pilot paths forward
    const ResolvedSchedule ps = pilot_schedule(*e.problem, e.grid);
    Eigen::MatrixXd pilot_exo = simulate_paths(e.problem->exo_spec(), e.grid, ps.pilot_paths,
                                               rng::derive(e.pilot_seed, 0x50494c4fu), 1,
                                               e.solve.threads);
    SolveOptions pilot_opts = e.solve;
    pilot_opts.seed = rng::derive(e.pilot_seed, 0x50534c56u);
    const PolicyStore pilot_policy =
        backward_solve(*e.problem, e.grid, ps.schedule, pilot_opts, &pilot_exo, nullptr);
    const std::vector<Eigen::MatrixXd> inv =
        forward_inventory_paths(*e.problem, pilot_policy, exo);
    EmpiricalMarginal m = EmpiricalMarginal::estimate(exo, inv);
    m.set_inv_bounds(e.problem->inv_min(0), e.problem->inv_max(0));
    out.marginals = std::move(m);
    return out;
}

PolicyStore solve_experiment(const Experiment& e, SolveReport* report) {
    const PreparedInputs in = prepare_inputs(e);
    return backward_solve(*e.problem, e.grid, e.schedule.schedule, e.solve,
                          in.pilot_paths ? &*in.pilot_paths : nullptr,
                          in.marginals ? &*in.marginals : nullptr, report);
}

RunOutcome run_experiment(const Experiment& e, PolicyStore* policy_out) {
    using clock = std::chrono::steady_clock;
    RunOutcome out;
    const auto t0 = clock::now();
    PolicyStore policy = solve_experiment(e, &out.report);
    const auto t1 = clock::now();
    const ScenarioDB db(e.problem->exo_spec(), e.grid, e.scenario_paths, e.scenario_seed);
    ForwardOptions fwd;
    fwd.threads = e.solve.threads;
    out.valuation = forward_value(*e.problem, policy, db, fwd);
    const auto t2 = clock::now();
    out.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.value_seconds = std::chrono::duration<double>(t2 - t1).count();
    if (policy_out != nullptr) *policy_out = std::move(policy);
    return out;
}

}  // namespace stor
