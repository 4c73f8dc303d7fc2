#include "stor/policy_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "stor/common.hpp"
#include "stor/gp.hpp"
#include "stor/loess.hpp"
#include "stor/piecewise.hpp"
#include "stor/poly.hpp"

namespace stor {

std::unique_ptr<Surrogate> surrogate_from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "poly") return PolySurrogate::from_json(j);
    if (kind == "piecewise-1d") return PiecewiseSurrogate::from_json(j);
    if (kind == "gp") return GPSurrogate::from_json(j);
    if (kind == "loess") return LoessSurrogate::from_json(j);
    throw ConfigError("unknown surrogate kind: " + kind);
}

namespace {

std::string step_filename(int k) {
    std::ostringstream os;
    os << "step_" << std::setw(5) << std::setfill('0') << k << ".json";
    return os.str();
}

nlohmann::json diagnostics_to_json(const FitDiagnostics& d) {
    nlohmann::json j{{"rmse", d.rmse}};
    if (d.gp_loglik) j["gp_loglik"] = *d.gp_loglik;
    if (d.gp_mean_sd) j["gp_mean_sd"] = *d.gp_mean_sd;
    return j;
}

FitDiagnostics diagnostics_from_json(const nlohmann::json& j) {
    FitDiagnostics d;
    d.rmse = j.at("rmse").get<double>();
    if (j.contains("gp_loglik")) d.gp_loglik = j["gp_loglik"].get<double>();
    if (j.contains("gp_mean_sd")) d.gp_mean_sd = j["gp_mean_sd"].get<double>();
    return d;
}

}  // namespace

void save_policy(const PolicyStore& policy, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const TimeGrid& g = policy.grid();
    // The step-k artifact approximates the continuation value seen from
    // t_k: a surrogate over (exogenous at k, inventory at k+1).
    nlohmann::json manifest{{"format", "stor-policy-1"},
                            {"problem_hash", policy.problem_hash()},
                            {"num_steps", policy.num_steps()},
                            {"num_regimes", policy.num_regimes()},
                            {"horizon", g.T},
                            {"rate", g.r},
                            {"site_convention", "exo at step k, inventory at step k+1"}};
    std::ofstream(fs::path(dir) / "manifest.json") << manifest.dump(2) << '\n';
    for (int k = 0; k < policy.num_steps(); ++k) {
        const StepArtifacts& a = policy.step(k);
        nlohmann::json step{{"k", a.k}, {"shared", a.shared}};
        for (const auto& s : a.q) step["q"].push_back(s->to_json());
        for (const auto& d : a.diagnostics) step["diagnostics"].push_back(diagnostics_to_json(d));
        std::ofstream(fs::path(dir) / step_filename(k)) << step.dump() << '\n';
    }
}

PolicyStore load_policy(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream mf(fs::path(dir) / "manifest.json");
    if (!mf) throw ConfigError("policy directory has no manifest: " + dir);
    nlohmann::json manifest;
    mf >> manifest;
    if (manifest.value("format", "") != "stor-policy-1")
        throw ConfigError("unrecognized policy format in " + dir);
    const auto num_steps = manifest.at("num_steps").get<int>();
    TimeGrid grid(manifest.at("horizon").get<double>(), num_steps, manifest.at("rate").get<double>());
    PolicyStore policy(manifest.at("problem_hash").get<std::uint64_t>(), grid,
                       manifest.at("num_regimes").get<int>());
    for (int k = 0; k < num_steps; ++k) {
        std::ifstream sf(fs::path(dir) / step_filename(k));
        if (!sf) throw ConfigError("policy directory missing step " + std::to_string(k));
        nlohmann::json step;
        sf >> step;
        StepArtifacts a;
        a.k = step.at("k").get<int>();
        a.shared = step.at("shared").get<bool>();
        for (const auto& q : step.at("q")) a.q.push_back(surrogate_from_json(q));
        if (step.contains("diagnostics"))
            for (const auto& d : step["diagnostics"]) a.diagnostics.push_back(diagnostics_from_json(d));
        policy.set_step(std::move(a));
    }
    return policy;
}

}  // namespace stor
