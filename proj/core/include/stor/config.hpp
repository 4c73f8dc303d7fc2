#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "stor/solver.hpp"
#include "stor/valuation.hpp"

namespace stor {

/// What a schedule needs before the solve can start.
enum class PilotNeed {
    None,      ///< plain space-filling or explicit designs
    Paths,     ///< conventional designs consume a pilot price path matrix
    ExoDist,   ///< adaptive designs need the marginal price distribution
    JointDist, ///< probabilistic designs need the joint (exo, inventory) law
};

/// A schedule preset resolved against a problem and grid.
struct ResolvedSchedule {
    BudgetSchedule schedule;
    PilotNeed pilot = PilotNeed::None;
    int pilot_paths = 0;  ///< rows required in the pilot path matrix
};

/// A fully resolved experiment: problem, horizon, per-step plans, seeds.
struct Experiment {
    std::string name;
    std::shared_ptr<Problem> problem;
    TimeGrid grid{1.0, 1, 0.0};
    ResolvedSchedule schedule;
    SolveOptions solve;
    Eigen::Index scenario_paths = 10000;
    std::uint64_t scenario_seed = 9001;
    std::uint64_t pilot_seed = 77;
    std::string output_dir = "out";
    double report_scale = 1.0;  ///< multiply estimates for reporting
    std::string report_unit = "USD";
    std::uint64_t config_hash = 0;
};

/// Problem presets: gas, gas-switching, gas-two-cavern, microgrid.
/// Overrides may adjust process and facility scalars by name.
std::shared_ptr<Problem> make_problem(const std::string& preset, const nlohmann::json& overrides,
                                      const TimeGrid& grid);

TimeGrid default_grid(const std::string& problem_preset);

/// Named schedule presets (tiered design/regression pairs) resolved for a
/// problem. Unknown name -> ConfigError listing the known presets.
ResolvedSchedule make_schedule(const std::string& preset, const Problem& problem,
                               const TimeGrid& grid);

/// Schema-validated experiment loading; unknown keys are rejected with the
/// offending path.
Experiment load_experiment(const nlohmann::json& config);
Experiment load_experiment_file(const std::string& path);

/// Pilot artifacts required by the experiment's schedule. Runs a cheap
/// pilot solve when the joint distribution is needed.
struct PreparedInputs {
    std::optional<Eigen::MatrixXd> pilot_paths;
    std::optional<EmpiricalMarginal> marginals;
};
PreparedInputs prepare_inputs(const Experiment& e);

struct RunOutcome {
    ValuationResult valuation;
    SolveReport report;
    double solve_seconds = 0.0;
    double value_seconds = 0.0;
};

/// Solve then value on a fresh scenario database. policy_out, when
/// non-null, receives the solved policy.
RunOutcome run_experiment(const Experiment& e, PolicyStore* policy_out = nullptr);

/// Solve only (used by the CLI solve command).
PolicyStore solve_experiment(const Experiment& e, SolveReport* report = nullptr);

}  // namespace stor
