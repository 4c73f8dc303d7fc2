#include "stor/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "stor/common.hpp"
#include "stor/gp.hpp"
#include "stor/loess.hpp"
#include "stor/piecewise.hpp"
#include "stor/poly.hpp"

namespace stor {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Tie-break order: incumbent, idle, then ascending index.
void preference_order(int num_regimes, int current, int idle, std::vector<int>& out) {
    out.clear();
    out.push_back(current);
    if (idle != current) out.push_back(idle);
    for (int j = 0; j < num_regimes; ++j)
        if (j != current && j != idle) out.push_back(j);
}

// Per-regime GP warm-start bookkeeping (global fit plus per-level fits for
// the piecewise-GP scheme).
struct GpWarm {
    std::optional<GPHyper> global;
    std::map<std::size_t, GPHyper> per_level;
    int since_refit = std::numeric_limits<int>::max();
};

std::unique_ptr<GPSurrogate> fit_gp_step(const Dataset& data, const RegressionSpec& rs,
                                         std::uint64_t seed, std::optional<GPHyper>& warm,
                                         bool allow_refit) {
    GPConfig cfg;
    cfg.restarts = rs.gp_restarts;
    cfg.max_iter = rs.gp_max_iter;
    cfg.noise_floor = rs.gp_noise_floor;
    cfg.seed = seed;
    if (warm && !allow_refit)
        cfg.fixed = warm;
    else
        cfg.warm = warm;
    auto gp = fit_gp(data, cfg);
    // a constant-response fit (zero value-to-go above the penalty target near
    // the horizon, say) carries arbitrary hyperparameters; don't let it seed
    // steps where the response is no longer flat
    if ((data.y.array() - data.y.mean()).abs().maxCoeff() > 0.0)
        warm = gp->hyper();
    else
        warm.reset();
    return gp;
}

// Group design rows by exact inventory level and build per-level 1D
// datasets in the exogenous coordinate.
std::vector<Dataset> split_by_level(const Dataset& data, const std::vector<double>& levels) {
    std::vector<std::vector<Eigen::Index>> rows(levels.size());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double inv = data.x(i, 1);
        const auto it = std::lower_bound(levels.begin(), levels.end(), inv - 1e-9);
        if (it == levels.end() || std::abs(*it - inv) > 1e-9)
            throw NumericalError("piecewise fit: design inventory off the level table");
        rows[static_cast<std::size_t>(it - levels.begin())].push_back(i);
    }
    std::vector<Dataset> out(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (rows[j].empty())
            throw NumericalError("piecewise fit: empty level " + std::to_string(j));
        Dataset& d = out[j];
        d.x.resize(static_cast<Eigen::Index>(rows[j].size()), 1);
        d.y.resize(static_cast<Eigen::Index>(rows[j].size()));
        for (std::size_t r = 0; r < rows[j].size(); ++r) {
            d.x(static_cast<Eigen::Index>(r), 0) = data.x(rows[j][r], 0);
            d.y[static_cast<Eigen::Index>(r)] = data.y[rows[j][r]];
        }
    }
    return out;
}

std::unique_ptr<Surrogate> fit_step_surrogate(const RegressionSpec& rs, const Dataset& data,
                                              const std::vector<double>& levels,
                                              const Problem& problem, std::uint64_t seed,
                                              GpWarm& warm, FitDiagnostics& diag) {
    const bool refit = warm.since_refit >= rs.gp_refit_interval;
    std::unique_ptr<Surrogate> fitted;
    if (rs.method == "poly") {
        fitted = fit_poly(data, rs.degree);
    } else if (rs.method == "piecewise-poly") {
        fitted = fit_piecewise_1d(split_by_level(data, levels), rs.degree, levels);
    } else if (rs.method == "piecewise-gp") {
        auto per_level = split_by_level(data, levels);
        std::vector<std::unique_ptr<Surrogate>> fits;
        double loglik = 0.0, mean_sd = 0.0;
        for (std::size_t j = 0; j < per_level.size(); ++j) {
            std::optional<GPHyper> w;
            if (auto it = warm.per_level.find(j); it != warm.per_level.end()) w = it->second;
            auto gp = fit_gp_step(per_level[j], rs, rng::derive(seed, 0x4c564cu, j), w, refit);
            if (w)
                warm.per_level[j] = *w;
            else
                warm.per_level.erase(j);
            loglik += gp->log_likelihood();
            Eigen::VectorXd m, s;
            gp->predict_many_sd(per_level[j].x, m, s);
            mean_sd += s.mean();
            gp->release_factor();
            fits.push_back(std::move(gp));
        }
        diag.gp_loglik = loglik;
        diag.gp_mean_sd = mean_sd / static_cast<double>(per_level.size());
        fitted = std::make_unique<PiecewiseSurrogate>(levels, std::move(fits));
    } else if (rs.method == "gp") {
        auto gp = fit_gp_step(data, rs, seed, warm.global, refit);
        diag.gp_loglik = gp->log_likelihood();
        Eigen::VectorXd m, s;
        gp->predict_many_sd(data.x, m, s);
        diag.gp_mean_sd = s.mean();
        gp->release_factor();
        fitted = std::move(gp);
    } else if (rs.method == "loess") {
        Eigen::VectorXd scale = Eigen::VectorXd::Ones(data.dim());
        for (int c = 1; c < data.dim(); ++c) {
            const double span = problem.inv_max(c - 1) - problem.inv_min(c - 1);
            if (span > 0.0) scale[c] = 2.0 / span;  // inventory on the [0,2] scale
        }
        fitted = fit_loess(data, rs.span, rs.loess_degree, std::move(scale));
    } else {
        throw ConfigError("unknown regression method: " + rs.method);
    }
    warm.since_refit = refit ? 1 : warm.since_refit + 1;
    const Eigen::VectorXd resid = fitted->predict_many(data.x) - data.y;
    diag.rmse = std::sqrt(resid.squaredNorm() / static_cast<double>(data.n()));
    return fitted;
}

}  // namespace

Eigen::VectorXd batch_step_values(const Problem& problem, const PolicyStore& policy, int k,
                                  const Eigen::MatrixXd& states, int current_regime,
                                  std::vector<int>* best_regime) {
    const double dt = policy.grid().dt();
    const double disc = policy.grid().step_discount();
    const int num_j = problem.num_regimes();
    const int inv_dim = problem.inv_dim();
    const Eigen::Index n = states.rows();
    const Eigen::MatrixXd& cost = problem.switching_cost();

    Eigen::MatrixXd values = Eigen::MatrixXd::Constant(n, num_j, kNegInf);
    Eigen::MatrixXd qsites(n, 1 + inv_dim);
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(n));

    std::vector<std::uint16_t> masks(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        StateSample s{states(i, 0), {0.0, 0.0}, current_regime};
        for (int c = 0; c < inv_dim; ++c) s.inv[static_cast<std::size_t>(c)] = states(i, 1 + c);
        masks[static_cast<std::size_t>(i)] = problem.admissible_mask(s, dt);
    }

    for (int j = 0; j < num_j; ++j) {
        active.clear();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(masks[static_cast<std::size_t>(i)] >> j & 1u)) continue;
            StateSample s{states(i, 0), {0.0, 0.0}, current_regime};
            for (int c = 0; c < inv_dim; ++c) s.inv[static_cast<std::size_t>(c)] = states(i, 1 + c);
            const StepResult r = problem.apply_regime(s, j, dt);
            const auto row = static_cast<Eigen::Index>(active.size());
            qsites(row, 0) = s.exo;
            for (int c = 0; c < inv_dim; ++c) qsites(row, 1 + c) = r.next_inv[static_cast<std::size_t>(c)];
            values(i, j) = r.profit - cost(current_regime, j);
            active.push_back(i);
        }
        if (active.empty()) continue;
        const Eigen::VectorXd q =
            policy.q(k, j).predict_many(qsites.topRows(static_cast<Eigen::Index>(active.size())));
        for (std::size_t r = 0; r < active.size(); ++r)
            values(active[r], j) += disc * q[static_cast<Eigen::Index>(r)];
    }

    std::vector<int> order;
    preference_order(num_j, current_regime, problem.idle_regime(), order);
    Eigen::VectorXd best(n);
    if (best_regime != nullptr) best_regime->assign(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        double bv = kNegInf;
        int bj = -1;
        for (const int j : order) {
            if (values(i, j) > bv) {
                bv = values(i, j);
                bj = j;
            }
        }
        if (bj < 0) throw NumericalError("regime optimization: no admissible regime");
        best[i] = bv;
        if (best_regime != nullptr) (*best_regime)[static_cast<std::size_t>(i)] = bj;
    }
    return best;
}

PolicyStore::PolicyStore(std::uint64_t problem_hash, TimeGrid grid, int num_regimes)
    : problem_hash_(problem_hash), grid_(grid), num_regimes_(num_regimes) {
    steps_.resize(static_cast<std::size_t>(grid.K));
}

void PolicyStore::set_step(StepArtifacts a) {
    if (a.k < 0 || a.k >= num_steps()) throw std::out_of_range("PolicyStore: step out of range");
    const auto expect = a.shared ? 1u : static_cast<unsigned>(num_regimes_);
    if (a.q.size() != expect) throw std::invalid_argument("PolicyStore: surrogate count mismatch");
    steps_[static_cast<std::size_t>(a.k)] = std::move(a);
}

const StepArtifacts& PolicyStore::step(int k) const {
    if (k < 0 || k >= num_steps()) throw std::out_of_range("PolicyStore: step out of range");
    const auto& s = steps_[static_cast<std::size_t>(k)];
    if (s.q.empty()) throw std::logic_error("PolicyStore: step " + std::to_string(k) + " not fitted");
    return s;
}

const Surrogate& PolicyStore::q(int k, int regime) const {
    const auto& s = step(k);
    if (s.shared) return *s.q.front();
    if (regime < 0 || regime >= num_regimes_)
        throw std::out_of_range("PolicyStore: regime out of range");
    return *s.q[static_cast<std::size_t>(regime)];
}

bool PolicyStore::complete() const {
    for (const auto& s : steps_)
        if (s.q.empty()) return false;
    return true;
}

bool use_shared_regression(const Problem& problem) { return !problem.has_switching_costs(); }

std::pair<int, double> regime_argmax(const Problem& problem, const PolicyStore& policy, int k,
                                     const StateSample& s) {
    Eigen::MatrixXd states(1, 1 + problem.inv_dim());
    states(0, 0) = s.exo;
    for (int c = 0; c < problem.inv_dim(); ++c) states(0, 1 + c) = s.inv[static_cast<std::size_t>(c)];
    std::vector<int> regimes;
    const Eigen::VectorXd v = batch_step_values(problem, policy, k, states, s.regime, &regimes);
    return {regimes.front(), v[0]};
}

PolicyStore backward_solve(const Problem& problem, const TimeGrid& grid,
                           const BudgetSchedule& schedule, const SolveOptions& opts,
                           const Eigen::MatrixXd* pilot_paths, const EmpiricalMarginal* marginals,
                           SolveReport* report) {
    if (schedule.num_steps() != grid.K)
        throw ConfigError("backward_solve: schedule does not cover every step");
    const double dt = grid.dt();
    const int num_j = problem.num_regimes();
    const int inv_dim = problem.inv_dim();
    const bool shared = use_shared_regression(problem) && !opts.force_split;
    const int num_fits = shared ? 1 : num_j;
    const ExoProcessSpec exo = problem.exo_spec();

    PolicyStore policy(problem.hash(), grid, num_j);
    if (report != nullptr) {
        report->one_step_sims = 0;
        report->step_rmse.assign(static_cast<std::size_t>(grid.K), 0.0);
    }
    std::vector<GpWarm> warm(static_cast<std::size_t>(num_fits));
    const std::uint64_t design_seed = rng::derive(opts.seed, 0x44455347u);
    const std::uint64_t sim_seed = rng::derive(opts.seed, 0x53494d55u);

    for (int k = grid.K - 1; k >= 0; --k) {
        const StepPlan& plan = schedule.at(k);
        const Design design = generate_design(plan.design, k, design_seed, pilot_paths, marginals);
        const Eigen::Index ns = design.n_sites();
        const int nb = design.n_reps;
        const Eigen::Index rows = ns * nb;

        StepArtifacts art;
        art.k = k;
        art.shared = shared;
        if (opts.keep_designs) art.design = design;

        for (int f = 0; f < num_fits; ++f) {
            const int m = shared ? problem.idle_regime() : f;

            // One-step exogenous transitions, N_b replicates per site. A
            // conventional mesh is built from global pilot paths, so the
            // first replicate continues along the stored path; the fitted
            // surrogate is then queried exactly at its own training sites
            // instead of extrapolating, which keeps the backward recursion
            // stable for polynomial fits.
            const bool along_paths =
                plan.design.kind == DesignKind::Conventional && pilot_paths != nullptr;
            const Eigen::Index cells =
                along_paths ? ns / pilot_paths->rows() : 1;
            Eigen::MatrixXd states(rows, 1 + inv_dim);
            const Eigen::VectorXd x0 = design.sites.col(0);
            Eigen::VectorXd xn(ns);
            for (int b = 0; b < nb; ++b) {
                if (along_paths && b == 0) {
                    for (Eigen::Index i = 0; i < ns; ++i) xn[i] = (*pilot_paths)(i / cells, k + 1);
                } else {
                    step_many(exo, x0, dt, k, rng::derive(sim_seed, static_cast<std::uint64_t>(m)),
                              static_cast<std::uint64_t>(b), xn);
                }
                states.block(static_cast<Eigen::Index>(b) * ns, 0, ns, 1) = xn;
                states.block(static_cast<Eigen::Index>(b) * ns, 1, ns, inv_dim) =
                    design.sites.rightCols(inv_dim);
            }
            if (report != nullptr) report->one_step_sims += static_cast<std::uint64_t>(rows);

            // responses: terminal payoff at the last step, otherwise the
            // one-step optimization against the step-(k+1) surrogates
            Eigen::VectorXd resp(rows);
            if (k == grid.K - 1) {
                for (Eigen::Index i = 0; i < rows; ++i) {
                    InvVec inv{0.0, 0.0};
                    for (int c = 0; c < inv_dim; ++c) inv[static_cast<std::size_t>(c)] = states(i, 1 + c);
                    resp[i] = problem.terminal_payoff(states(i, 0), inv);
                }
            } else {
                resp = batch_step_values(problem, policy, k + 1, states, m, nullptr);
            }

            // pre-average replicates per site
            Dataset data;
            data.x = design.sites;
            data.y = Eigen::VectorXd::Zero(ns);
            for (int b = 0; b < nb; ++b)
                data.y += resp.segment(static_cast<Eigen::Index>(b) * ns, ns);
            data.y /= static_cast<double>(nb);

            FitDiagnostics diag;
            std::unique_ptr<Surrogate> fitted;
            try {
                fitted = fit_step_surrogate(plan.regression, data, plan.design.levels, problem,
                                            rng::derive(opts.seed, 0x46495455u,
                                                        static_cast<std::uint64_t>(k) * 16u +
                                                            static_cast<std::uint64_t>(f)),
                                            warm[static_cast<std::size_t>(f)], diag);
            } catch (const std::exception& e) {
                throw NumericalError("fit failed at step " + std::to_string(k) + " regime " +
                                     problem.regime_name(m) + ": " + e.what());
            }
            if (report != nullptr && f == 0) report->step_rmse[static_cast<std::size_t>(k)] = diag.rmse;
            art.q.push_back(std::move(fitted));
            art.diagnostics.push_back(diag);
        }
        policy.set_step(std::move(art));
    }
    return policy;
}

}  // namespace stor
