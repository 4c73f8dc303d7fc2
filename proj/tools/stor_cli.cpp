// Experiment runner: solve / value / benchmark / scenarios / export-policy /
// pilot subcommands around the stor_core library. All outputs are JSON or
// CSV files stamped with the resolved config hash.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "stor/common.hpp"
#include "stor/config.hpp"
#include "stor/gas_storage.hpp"
#include "stor/policy_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;  // 0 = keep the config's seed
    int threads = 1;
    bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_dry_run = false) {
    cmd->add_option("--config", a.config_path, "experiment config file (JSON)")->required();
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--seed", a.seed, "override the config's solver seed");
    cmd->add_option("--threads", a.threads, "worker threads");
    if (with_dry_run) cmd->add_flag("--dry-run", a.dry_run, "resolve and print budgets, no solve");
}

stor::Experiment load(const CommonArgs& a) {
    stor::Experiment e = stor::load_experiment_file(a.config_path);
    if (a.seed != 0) e.solve.seed = a.seed;
    e.solve.threads = a.threads;
    e.output_dir = a.out_dir;
    return e;
}

void write_json(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path);
    os << j.dump(2) << "\n";
    if (!os) throw stor::ConfigError("cannot write " + path.string());
}

json valuation_json(const stor::Experiment& e, const stor::RunOutcome& out) {
    const auto& v = out.valuation;
    return json{{"name", e.name},
                {"config_hash", e.config_hash},
                {"unit", e.report_unit},
                {"estimate", v.estimate * e.report_scale},
                {"std_error", v.std_error * e.report_scale},
                {"paths", v.path_values.size()},
                {"mean_switches", v.switch_counts.size() > 0
                                      ? v.switch_counts.cast<double>().mean()
                                      : 0.0},
                {"mean_terminal_inventory", v.mean_terminal_inventory},
                {"min_terminal_inventory", v.min_terminal_inventory},
                {"max_terminal_inventory", v.max_terminal_inventory},
                {"stress_fraction", v.stress_fraction},
                {"one_step_sims", out.report.one_step_sims},
                {"solve_seconds", out.solve_seconds},
                {"value_seconds", out.value_seconds}};
}

void write_path_values(const fs::path& path, const stor::ValuationResult& v, double scale) {
    std::ofstream os(path);
    os << "path,value,switches,terminal_inventory\n";
    for (Eigen::Index i = 0; i < v.path_values.size(); ++i)
        os << i << "," << v.path_values[i] * scale << "," << v.switch_counts[i] << ","
           << v.terminal_inventory[i] << "\n";
}

// one line per distinct consecutive plan block
void print_budgets(const stor::Experiment& e) {
    const auto& steps = e.schedule.schedule.steps;
    const int K = static_cast<int>(steps.size());
    auto describe = [&](const stor::StepPlan& p) {
        const auto& d = p.design;
        Eigen::Index sites = d.n_sites;
        if (d.kind == stor::DesignKind::Conventional || d.kind == stor::DesignKind::Adaptive1d) {
            Eigen::Index cells = 1;
            for (int c = 0; c < d.inv_dim; ++c) cells *= static_cast<Eigen::Index>(d.levels.size());
            const Eigen::Index base = d.kind == stor::DesignKind::Conventional
                                          ? static_cast<Eigen::Index>(e.schedule.pilot_paths)
                                          : d.n_sites;
            sites = base * (d.kind == stor::DesignKind::Adaptive1d
                                ? static_cast<Eigen::Index>(d.levels.size())
                                : cells);
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-12s %-14s sites=%lld reps=%d budget=%lld",
                      stor::to_string(d.kind).c_str(), p.regression.method.c_str(),
                      static_cast<long long>(sites), d.n_reps,
                      static_cast<long long>(sites * d.n_reps));
        return std::string(buf);
    };
    int start = 0;
    long long total = 0;
    for (int k = 0; k < K; ++k) {
        const std::string cur = describe(steps[static_cast<std::size_t>(k)]);
        total += std::stoll(cur.substr(cur.rfind('=') + 1));
        if (k + 1 == K || describe(steps[static_cast<std::size_t>(k + 1)]) != cur) {
            std::printf("steps %4d..%4d  %s\n", start, k, cur.c_str());
            start = k + 1;
        }
    }
    std::printf("total one-step simulations per regression pass: %lld\n", total);
}

int cmd_solve(const CommonArgs& a) {
    const stor::Experiment e = load(a);
    if (a.dry_run) {
        print_budgets(e);
        return 0;
    }
    stor::SolveReport report;
    const stor::PolicyStore policy = stor::solve_experiment(e, &report);
    const fs::path out(e.output_dir);
    stor::save_policy(policy, (out / "policy").string());
    json diag{{"name", e.name},
              {"config_hash", e.config_hash},
              {"one_step_sims", report.one_step_sims},
              {"step_rmse", report.step_rmse}};
    write_json(out / "solve.json", diag);
    std::printf("policy written to %s (%d steps, %llu one-step sims)\n",
                (out / "policy").string().c_str(), policy.num_steps(),
                static_cast<unsigned long long>(report.one_step_sims));
    return 0;
}

int cmd_value(const CommonArgs& a, const std::string& policy_dir,
              const std::string& scenario_file) {
    const stor::Experiment e = load(a);
    const stor::PolicyStore policy = stor::load_policy(policy_dir);
    const stor::ScenarioDB db =
        scenario_file.empty()
            ? stor::ScenarioDB(e.problem->exo_spec(), e.grid, e.scenario_paths, e.scenario_seed)
            : stor::ScenarioDB::load(scenario_file);
    stor::ForwardOptions fwd;
    fwd.threads = a.threads;
    stor::RunOutcome out;
    out.valuation = stor::forward_value(*e.problem, policy, db, fwd);
    const fs::path dir(e.output_dir);
    fs::create_directories(dir);
    write_json(dir / "valuation.json", valuation_json(e, out));
    write_path_values(dir / "path_values.csv", out.valuation, e.report_scale);
    std::printf("%s: %.2f (se %.2f) %s\n", e.name.c_str(),
                out.valuation.estimate * e.report_scale, out.valuation.std_error * e.report_scale,
                e.report_unit.c_str());
    return 0;
}

int cmd_scenarios(const CommonArgs& a, const std::string& file) {
    const stor::Experiment e = load(a);
    const stor::ScenarioDB db(e.problem->exo_spec(), e.grid, e.scenario_paths, e.scenario_seed);
    fs::path p(file);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    db.save(file, a.threads);
    std::printf("wrote %lld paths to %s (hash %016llx)\n", static_cast<long long>(db.n_paths()),
                file.c_str(), static_cast<unsigned long long>(db.hash()));
    return 0;
}

int cmd_pilot(const CommonArgs& a, const std::string& file) {
    const stor::Experiment e = load(a);
    stor::Experiment forced = e;
    if (forced.schedule.pilot == stor::PilotNeed::None ||
        forced.schedule.pilot == stor::PilotNeed::Paths)
        forced.schedule.pilot = stor::PilotNeed::ExoDist;
    const stor::PreparedInputs in = stor::prepare_inputs(forced);
    fs::path p(file);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(file);
    in.marginals->to_csv(os);
    std::printf("pilot marginal (%d samples, %d steps) written to %s\n",
                in.marginals->sample_count(), in.marginals->steps(), file.c_str());
    return 0;
}

int cmd_export_policy(const CommonArgs& a, const std::string& policy_dir,
                      std::vector<int> steps) {
    const stor::Experiment e = load(a);
    const stor::PolicyStore policy = stor::load_policy(policy_dir);
    const stor::Problem& pb = *e.problem;
    const int K = policy.num_steps();
    if (steps.empty()) steps = {K / 4, K / 2, 3 * K / 4};

    Eigen::VectorXd lo(1 + pb.inv_dim()), hi(1 + pb.inv_dim());
    if (pb.exo_spec().kind == stor::ProcessKind::LogMeanReverting) {
        lo[0] = 2.0;
        hi[0] = 10.0;
    } else {
        lo[0] = -8.0;
        hi[0] = 8.0;
    }
    const Eigen::VectorXd exo_grid = Eigen::VectorXd::LinSpaced(81, lo[0], hi[0]);
    const Eigen::VectorXd inv_grid = Eigen::VectorXd::LinSpaced(41, pb.inv_min(0), pb.inv_max(0));

    const fs::path dir(e.output_dir);
    fs::create_directories(dir);
    for (const int k : steps) {
        const Eigen::MatrixXi map =
            stor::control_map(pb, policy, k, exo_grid, inv_grid, pb.idle_regime());
        std::ofstream os(dir / ("control_map_k" + std::to_string(k) + ".csv"));
        os << "inventory\\exo";
        for (Eigen::Index j = 0; j < exo_grid.size(); ++j) os << "," << exo_grid[j];
        os << "\n";
        for (Eigen::Index i = 0; i < inv_grid.size(); ++i) {
            os << inv_grid[i];
            for (Eigen::Index j = 0; j < exo_grid.size(); ++j) os << "," << map(i, j);
            os << "\n";
        }
    }

    if (pb.name() == "gas") {
        std::vector<double> levels;
        for (Eigen::Index i = 0; i < inv_grid.size(); ++i) levels.push_back(inv_grid[i]);
        std::vector<int> all_steps;
        for (int k = 0; k < K; ++k) all_steps.push_back(k);
        const stor::BoundaryCurve b = stor::extract_boundaries(
            pb, policy, all_steps, levels, lo[0], hi[0], 161, stor::GasStorageProblem::kInject,
            stor::GasStorageProblem::kWithdraw, pb.idle_regime());
        std::ofstream os(dir / "boundaries.csv");
        os << "step,inventory,inject_below,withdraw_above\n";
        for (std::size_t s = 0; s < b.steps.size(); ++s)
            for (std::size_t l = 0; l < b.levels.size(); ++l)
                os << b.steps[s] << "," << b.levels[l] << "," << b.b_inj(s, l) << ","
                   << b.b_wdr(s, l) << "\n";
    }
    std::printf("policy exports written to %s\n", dir.string().c_str());
    return 0;
}

int cmd_benchmark(const CommonArgs& a) {
    std::ifstream is(a.config_path);
    if (!is) throw stor::ConfigError("cannot open config file: " + a.config_path);
    json matrix;
    is >> matrix;
    if (!matrix.contains("cells") || !matrix["cells"].is_array() || matrix["cells"].empty())
        throw stor::ConfigError("benchmark config: non-empty 'cells' array required");
    const int reps = matrix.value("reps", 1);
    if (reps < 1) throw stor::ConfigError("benchmark config: reps must be >= 1");
    const std::uint64_t master = matrix.value("seed", 1);

    json base = matrix;
    base.erase("cells");
    base.erase("reps");
    if (!base.contains("seed")) base["seed"] = 1;

    struct Row {
        std::string cell;
        int rep;
        double estimate, se, solve_s, value_s;
        std::uint64_t sims;
    };
    std::vector<Row> rows;
    std::vector<std::string> order;
    for (const auto& cell : matrix["cells"]) {
        json cfg = base;
        const std::string cell_name = cell.at("name").get<std::string>();
        for (const auto& [key, value] : cell.items())
            if (key != "name") cfg[key] = value;
        cfg["name"] = cell_name;
        order.push_back(cell_name);
        for (int rep = 0; rep < reps; ++rep) {
            cfg["seed"] = stor::rng::derive(master, stor::fnv1a(cell_name),
                                            static_cast<std::uint64_t>(rep));
            stor::Experiment e = stor::load_experiment(cfg);
            e.solve.threads = a.threads;
            if (a.dry_run) {
                std::printf("cell %-28s rep %d seed %llu\n", cell_name.c_str(), rep,
                            static_cast<unsigned long long>(e.solve.seed));
                continue;
            }
            const stor::RunOutcome out = stor::run_experiment(e);
            rows.push_back({cell_name, rep, out.valuation.estimate * e.report_scale,
                            out.valuation.std_error * e.report_scale, out.solve_seconds,
                            out.value_seconds, out.report.one_step_sims});
            std::printf("cell %-28s rep %d: %.2f (se %.2f)\n", cell_name.c_str(), rep,
                        rows.back().estimate, rows.back().se);
        }
    }
    if (a.dry_run) return 0;

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "benchmark_runs.csv");
        os << "cell,rep,estimate,std_error,solve_seconds,value_seconds,one_step_sims\n";
        for (const auto& r : rows)
            os << r.cell << "," << r.rep << "," << r.estimate << "," << r.se << "," << r.solve_s
               << "," << r.value_s << "," << r.sims << "\n";
    }
    {
        std::ofstream os(dir / "benchmark_summary.csv");
        os << "cell,reps,mean,sd,mean_solve_seconds\n";
        std::vector<std::string> seen;
        for (const auto& name : order) {
            if (std::find(seen.begin(), seen.end(), name) != seen.end()) continue;
            seen.push_back(name);
            double sum = 0, sum2 = 0, solve_s = 0;
            int n = 0;
            for (const auto& r : rows)
                if (r.cell == name) {
                    sum += r.estimate;
                    sum2 += r.estimate * r.estimate;
                    solve_s += r.solve_s;
                    ++n;
                }
            const double mean = sum / n;
            const double sd = n > 1 ? std::sqrt((sum2 - n * mean * mean) / (n - 1)) : 0.0;
            os << name << "," << n << "," << mean << "," << sd << "," << solve_s / n << "\n";
        }
    }
    std::printf("benchmark tables written to %s\n", dir.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic storage solver"};
    app.require_subcommand(1);

    CommonArgs solve_args, value_args, bench_args, scen_args, pilot_args, export_args;
    std::string policy_dir = "out/policy";
    std::string scenario_file;
    std::string db_file = "out/scenarios.bin";
    std::string pilot_file = "out/pilot.csv";
    std::vector<int> export_steps;

    auto* solve = app.add_subcommand("solve", "backward induction, writes a policy directory");
    add_common(solve, solve_args, true);

    auto* value = app.add_subcommand("value", "forward valuation of a stored policy");
    add_common(value, value_args);
    value->add_option("--policy", policy_dir, "policy directory");
    value->add_option("--scenarios", scenario_file, "scenario database file (default: lazy)");

    auto* bench = app.add_subcommand("benchmark", "run a design/regression cell matrix");
    add_common(bench, bench_args, true);

    auto* scen = app.add_subcommand("scenarios", "materialize the scenario database");
    add_common(scen, scen_args);
    scen->add_option("--file", db_file, "output file");

    auto* pilot = app.add_subcommand("pilot", "estimate and export the pilot marginal");
    add_common(pilot, pilot_args);
    pilot->add_option("--file", pilot_file, "output CSV");

    auto* exp = app.add_subcommand("export-policy", "control maps and switching boundaries");
    add_common(exp, export_args);
    exp->add_option("--policy", policy_dir, "policy directory");
    exp->add_option("--step", export_steps, "steps to export (default: quartiles)");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(solve_args);
        if (value->parsed()) return cmd_value(value_args, policy_dir, scenario_file);
        if (bench->parsed()) return cmd_benchmark(bench_args);
        if (scen->parsed()) return cmd_scenarios(scen_args, db_file);
        if (pilot->parsed()) return cmd_pilot(pilot_args, pilot_file);
        if (exp->parsed()) return cmd_export_policy(export_args, policy_dir, export_steps);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    } catch (const stor::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const stor::NumericalError& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
