// End-to-end acceptance checks. Each criterion prints exactly one
// [PASS]/[FAIL] line; the exit status is the number of failed criteria.
// Usage: acceptance [N ...]   (run only the listed criteria)
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stor/config.hpp"
#include "stor/gas_storage.hpp"
#include "stor/gp.hpp"
#include "stor/microgrid.hpp"
#include "stor/rng.hpp"
#include "stor/sobol.hpp"
#include "stor/solver.hpp"
#include "stor/valuation.hpp"

using namespace stor;
using nlohmann::json;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Run {
    double estimate = 0.0;  ///< report units (thousands for gas)
    double se = 0.0;
    ValuationResult val;
};

Run run_preset(const std::string& problem, const std::string& schedule, std::uint64_t seed,
               std::uint64_t scenario_seed, Eigen::Index scenario_paths = 0) {
    json cfg{{"problem", problem}, {"schedule", schedule}, {"seed", seed}};
    cfg["scenarios"] = json{{"seed", scenario_seed}};
    if (scenario_paths > 0) cfg["scenarios"]["paths"] = scenario_paths;
    const Experiment e = load_experiment(cfg);
    const RunOutcome o = run_experiment(e);
    Run r;
    r.estimate = o.valuation.estimate * e.report_scale;
    r.se = o.valuation.std_error * e.report_scale;
    r.val = o.valuation;
    return r;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// mean / standard error of the mean
std::pair<double, double> mean_se(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (const double x : v) ss += (x - m) * (x - m);
    const auto n = static_cast<double>(v.size());
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

bool within(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

// ---------------------------------------------------------------- criterion 1

double dp_value(const Problem& p, const TimeGrid& grid, const Eigen::VectorXd& price, int k,
                const InvVec& inv, int regime) {
    if (k == grid.K) return p.terminal_payoff(price[k], inv);
    const double dt = grid.dt();
    const StateSample s{price[k], inv, regime};
    const auto mask = p.admissible_mask(s, dt);
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < p.num_regimes(); ++j) {
        if (((mask >> j) & 1) == 0) continue;
        const StepResult r = p.apply_regime(s, j, dt);
        best = std::max(best, r.profit - p.switching_cost()(regime, j) +
                                  std::exp(-grid.r * dt) *
                                      dp_value(p, grid, price, k + 1, r.next_inv, j));
    }
    return best;
}

bool criterion1(std::string& detail) {
    const double t0 = now_s();
    ExoProcessSpec proc;
    proc.kind = ProcessKind::LogMeanReverting;
    proc.alpha = 2.38;
    proc.mean_level = 6.0;
    proc.sigma = 0.0;
    proc.x0 = 9.0;
    GasStorageSpec spec;
    spec.penalty_target = 0.0;  // withdrawal is profitable, so the value is nonzero
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(3, 3, 25.0);
    cost.diagonal().setZero();
    const GasStorageProblem gas(spec, proc, TimeGrid(0.009, 3, 0.10), cost, 800.0);
    const TimeGrid grid = gas.default_grid();
    const Eigen::MatrixXd pilot = simulate_paths(proc, grid, 1, 7);
    const Eigen::VectorXd price = pilot.row(0);

    // reachable inventory values per step under any admissible sequence
    std::vector<std::set<double>> reach(static_cast<std::size_t>(grid.K) + 1);
    std::set<std::pair<double, int>> frontier{{gas.initial_state().inv[0], gas.initial_state().regime}};
    reach[0].insert(gas.initial_state().inv[0]);
    for (int k = 0; k < grid.K; ++k) {
        std::set<std::pair<double, int>> next;
        for (const auto& [inv, m] : frontier) {
            const StateSample s{price[k], {inv, 0.0}, m};
            const auto mask = gas.admissible_mask(s, grid.dt());
            for (int j = 0; j < 3; ++j) {
                if (((mask >> j) & 1) == 0) continue;
                const StepResult r = gas.apply_regime(s, j, grid.dt());
                next.insert({r.next_inv[0], j});
                reach[static_cast<std::size_t>(k) + 1].insert(r.next_inv[0]);
            }
        }
        frontier = std::move(next);
    }
    BudgetSchedule sched;
    for (int k = 0; k < grid.K; ++k) {
        StepPlan plan;
        plan.design.kind = DesignKind::Conventional;
        plan.design.levels.assign(reach[static_cast<std::size_t>(k) + 1].begin(),
                                  reach[static_cast<std::size_t>(k) + 1].end());
        plan.regression.method = "piecewise-poly";
        plan.regression.degree = 0;
        sched.steps.push_back(plan);
    }
    const PolicyStore policy = backward_solve(gas, grid, sched, {}, &pilot);
    const StateSample s0 = gas.initial_state();
    const double want = dp_value(gas, grid, price, 0, s0.inv, s0.regime);
    const double got = regime_argmax(gas, policy, 0, s0).second;
    const ScenarioDB db(proc, grid, 1, 7);
    const double fwd = forward_value(gas, policy, db).estimate;
    const double elapsed = now_s() - t0;
    char buf[256];
    std::snprintf(buf, sizeof buf, "dp=%.6f solve=%.6f fwd=%.6f rel=%.2e time=%.2fs", want, got,
                  fwd, std::max(std::abs(got - want), std::abs(fwd - want)) / std::abs(want),
                  elapsed);
    detail = buf;
    return within(got, want, 1e-10) && within(fwd, want, 1e-10) && elapsed < 1.0;
}

// ---------------------------------------------------------------- criteria 2+4

bool criterion2(std::string& detail, std::vector<double>& low_by_seed) {
    low_by_seed.clear();
    for (std::uint64_t s = 1; s <= 5; ++s)
        low_by_seed.push_back(run_preset("gas", "conventional-pr1d-low", s, 9000 + s).estimate);
    const auto [m, se] = mean_se(low_by_seed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean=%.1f se=%.1f target=4965 band=[4816.1, 5113.9]", m, se);
    detail = buf;
    return within(m, 4965.0, 0.03);
}

bool criterion4(std::string& detail, const std::vector<double>& low_by_seed) {
    std::vector<double> med, lrg, d_ml, d_lm;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        med.push_back(run_preset("gas", "conventional-pr1d-medium", s, 9000 + s).estimate);
        lrg.push_back(run_preset("gas", "conventional-pr1d-large", s, 9000 + s).estimate);
    }
    for (std::size_t i = 0; i < 5; ++i) {
        d_ml.push_back(med[i] - low_by_seed[i]);
        d_lm.push_back(lrg[i] - med[i]);
    }
    const auto [gap1, se1] = mean_se(d_ml);
    const auto [gap2, se2] = mean_se(d_lm);
    char buf[200];
    std::snprintf(buf, sizeof buf, "low=%.1f med=%.1f large=%.1f gaps=%.1f(se %.1f), %.1f(se %.1f)",
                  mean(low_by_seed), mean(med), mean(lrg), gap1, se1, gap2, se2);
    detail = buf;
    return gap1 > 2.0 * se1 && gap2 > 2.0 * se2;
}

// ---------------------------------------------------------------- criterion 3

bool criterion3(std::string& detail) {
    std::vector<double> mix, fill;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        mix.push_back(run_preset("gas", "mixture-gp2d-low", s, 9000 + s).estimate);
        fill.push_back(run_preset("gas", "spacefilling-gp2d-low", s, 9000 + s).estimate);
    }
    const double m_mix = mean(mix), m_fill = mean(fill);
    char buf[160];
    std::snprintf(buf, sizeof buf, "mixture=%.1f spacefilling=%.1f target=5137 band=[4982.9, 5291.1]",
                  m_mix, m_fill);
    detail = buf;
    return within(m_mix, 5137.0, 0.03) && m_mix > m_fill;
}

// ---------------------------------------------------------------- criterion 5

bool criterion5(std::string& detail) {
    std::vector<double> sw, nosw, dyn_gap;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        const double with_cost =
            run_preset("gas-switching", "conventional-pr1d-medium", s, 9000 + s).estimate;
        const double no_cost = run_preset("gas", "conventional-pr1d-medium", s, 9000 + s).estimate;
        sw.push_back(with_cost);
        nosw.push_back(no_cost);
        const double dyn_no = run_preset("gas", "dynamic-gp1d-medium", s, 9000 + s).estimate;
        const double dyn_sw =
            run_preset("gas-switching", "dynamic-gp1d-medium", s, 9000 + s).estimate;
        dyn_gap.push_back(dyn_no - dyn_sw);
    }
    const double m_sw = mean(sw);
    const double gap = mean(dyn_gap);
    bool ordered = true;
    for (std::size_t i = 0; i < sw.size(); ++i) ordered = ordered && sw[i] < nosw[i];
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "switching=%.1f (target 4901 +-3%%) paired-below=%s dyn-gap=%.1f (target 166+-60)",
                  m_sw, ordered ? "yes" : "no", gap);
    detail = buf;
    return within(m_sw, 4901.0, 0.03) && ordered && std::abs(gap - 166.0) <= 60.0;
}

// ---------------------------------------------------------------- criterion 6

bool criterion6(std::string& detail) {
    const char* two_presets[3] = {"mixture-gp3d-10k", "mixture-gp3d-40k", "mixture-gp3d-100k"};
    const char* one_presets[3] = {"mixture-gp2d-low", "mixture-gp2d-medium", "mixture-gp2d-large"};
    double gaps[3] = {0, 0, 0};
    double half0 = 0.0, single0 = 0.0;
    bool symmetric = true;
    double worst_asym = 0.0;
    for (int b = 0; b < 3; ++b) {
        json cfg{{"problem", "gas-two-cavern"}, {"schedule", two_presets[b]}, {"seed", 1}};
        cfg["scenarios"] = json{{"seed", 9001}};
        const Experiment e = load_experiment(cfg);
        PolicyStore policy(0, e.grid, 1);
        SolveReport rep;
        {
            // run solve+value keeping the policy for the symmetry probe
            PolicyStore* out = &policy;
            const auto t = run_experiment(e, out);
            const double half = 0.5 * t.valuation.estimate * e.report_scale;
            const double single =
                run_preset("gas", one_presets[b], 1, 9001).estimate;
            gaps[b] = single - half;
            if (b == 0) {
                half0 = half;
                single0 = single;
            }
            rep = t.report;
        }
        // surrogate symmetry in (I1, I2) on a probe grid, against 2x fit rmse
        for (int k : {e.grid.K / 4, e.grid.K / 2, 3 * e.grid.K / 4}) {
            const double tol = 2.0 * std::max(rep.step_rmse[static_cast<std::size_t>(k)], 1e-6);
            for (double p : {4.0, 6.0, 8.0})
                for (double a : {200.0, 900.0, 1700.0})
                    for (double bb : {400.0, 1300.0}) {
                        Eigen::RowVectorXd s1(3), s2(3);
                        s1 << p, a, bb;
                        s2 << p, bb, a;
                        const double diff =
                            std::abs(policy.q(k, 4).predict(s1) - policy.q(k, 4).predict(s2));
                        worst_asym = std::max(worst_asym, diff / tol);
                        if (diff > tol) symmetric = false;
                    }
        }
    }
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "half@10k=%.1f single@10k=%.1f gaps=%.1f/%.1f/%.1f asym(max, in rmse units)=%.2f",
                  half0, single0, gaps[0], gaps[1], gaps[2], 2.0 * worst_asym);
    detail = buf;
    return half0 < single0 && gaps[0] > gaps[1] && gaps[1] > gaps[2] && symmetric;
}

// ---------------------------------------------------------------- criterion 7

bool criterion7(std::string& detail) {
    const Run conv = run_preset("microgrid", "microgrid-conventional-pr2d", 1, 9001);
    const Run fill = run_preset("microgrid", "microgrid-spacefilling-pr2d", 1, 9001);
    const Run mixp = run_preset("microgrid", "microgrid-mixture-pr2d", 1, 9001);
    const Run mixg = run_preset("microgrid", "microgrid-mixture-gp2d", 1, 9001);
    const double worst_pr = std::max({conv.estimate, fill.estimate, mixp.estimate});
    const double blackout = std::max({conv.val.stress_fraction, fill.val.stress_fraction,
                                      mixp.val.stress_fraction, mixg.val.stress_fraction});
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "pr2d conv=%.1f fill=%.1f mix=%.1f gp=%.1f blackout=%.2e (target conv -153.6+-5%%)",
                  conv.estimate, fill.estimate, mixp.estimate, mixg.estimate, blackout);
    detail = buf;
    return within(conv.estimate, -153.6, 0.05) && mixg.estimate > worst_pr && blackout < 1e-3;
}

// ---------------------------------------------------------------- criterion 8

bool criterion8(std::string& detail) {
    // dense-solve reference for posterior mean and sd
    auto naive = [](const Dataset& d, const Eigen::RowVectorXd& site, double ell, double sf2,
                    double sn2, double jitter_std) {
        const Eigen::Index n = d.n();
        // the implementation standardizes y, so its jitter acts in y-variance units
        const double jitter = jitter_std * (d.y.array() - d.y.mean()).square().mean();
        Eigen::MatrixXd h(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double r = (d.x(i, 0) - d.x(j, 0)) / ell;
                h(i, j) = sf2 * std::exp(-0.5 * r * r);
            }
        h.diagonal().array() += sn2 + jitter;
        const Eigen::LLT<Eigen::MatrixXd> llt(h);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        const Eigen::VectorXd hy = llt.solve(d.y);
        const Eigen::VectorXd h1 = llt.solve(ones);
        const double beta0 = ones.dot(hy) / ones.dot(h1);
        Eigen::VectorXd ks(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = (site[0] - d.x(i, 0)) / ell;
            ks[i] = sf2 * std::exp(-0.5 * r * r);
        }
        const double m = beta0 + ks.dot(llt.solve(d.y - beta0 * ones));
        const double s2 = sf2 + sn2 + jitter - ks.dot(llt.solve(ks));
        return std::pair<double, double>{m, std::sqrt(std::max(s2, 0.0))};
    };

    double worst_mean = 0.0, worst_sd = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 20 + 6 * trial;  // <= 50
        Dataset d;
        d.x.resize(n, 1);
        d.y.resize(n);
        for (int i = 0; i < n; ++i) {
            d.x(i, 0) = 10.0 * i / (n - 1);
            d.y[i] = std::sin(d.x(i, 0)) +
                     0.1 * rng::normal(rng::Key{static_cast<std::uint64_t>(trial), 0,
                                                static_cast<std::uint64_t>(i), 0},
                                       0);
        }
        GPConfig cfg;
        GPHyper h;
        h.lengthscale = Eigen::VectorXd::Constant(1, 0.5 + 0.1 * trial);
        h.sf2 = 0.9;
        h.sn2 = 0.05 + 0.01 * trial;
        cfg.fixed = h;
        const auto gp = fit_gp(d, cfg);
        for (double x = 0.25; x < 10.0; x += 1.07) {
            Eigen::RowVectorXd s(1);
            s << x;
            const auto [gm, gs] = gp->predict_sd(s);
            const auto [nm, ns] = naive(d, s, h.lengthscale[0], h.sf2, h.sn2, cfg.jitter);
            worst_mean = std::max(worst_mean, std::abs(gm - nm) / std::max(1.0, std::abs(nm)));
            worst_sd = std::max(worst_sd, std::abs(gs - ns) / std::max(1e-6, ns));
        }
    }

    // posterior sd decreases in the replicate count at a fixed site
    bool sd_monotone = true;
    {
        GPConfig cfg;
        GPHyper h;
        h.lengthscale = Eigen::VectorXd::Constant(1, 2.0);
        h.sf2 = 1.0;
        h.sn2 = 0.09;
        cfg.fixed = h;
        Eigen::RowVectorXd site(1);
        site << 4.5;
        double prev = std::numeric_limits<double>::infinity();
        for (const int nb : {1, 2, 4, 8, 16}) {
            Dataset d;
            d.x.resize(10 * nb, 1);
            d.y.resize(10 * nb);
            for (int r = 0; r < nb; ++r)
                for (int i = 0; i < 10; ++i) {
                    d.x(r * 10 + i, 0) = i;
                    d.y[r * 10 + i] =
                        0.5 * i + 0.3 * rng::normal(rng::Key{77, static_cast<std::uint64_t>(r),
                                                             static_cast<std::uint64_t>(i), 0},
                                                    0);
                }
            const double sd = fit_gp(d, cfg)->predict_sd(site).second;
            sd_monotone = sd_monotone && sd < prev;
            prev = sd;
        }
    }

    // pre-averaged fit equals the raw-replicate fit for fixed hyperparameters
    double worst_avg = 0.0;
    {
        const int nb = 8;
        Dataset raw, avg;
        raw.x.resize(12 * nb, 1);
        raw.y.resize(12 * nb);
        avg.x.resize(12, 1);
        avg.y = Eigen::VectorXd::Zero(12);
        for (int i = 0; i < 12; ++i) {
            avg.x(i, 0) = i;
            for (int r = 0; r < nb; ++r) {
                raw.x(r * 12 + i, 0) = i;
                raw.y[r * 12 + i] =
                    std::cos(0.4 * i) + rng::normal(rng::Key{5, static_cast<std::uint64_t>(r),
                                                             static_cast<std::uint64_t>(i), 0},
                                                    0);
                avg.y[i] += raw.y[r * 12 + i];
            }
            avg.y[i] /= nb;
        }
        GPConfig craw, cavg;
        GPHyper h;
        h.lengthscale = Eigen::VectorXd::Constant(1, 1.5);
        h.sf2 = 1.0;
        h.sn2 = 0.4;
        craw.fixed = h;
        h.sn2 = 0.4 / nb;  // averaging scales the noise variance
        cavg.fixed = h;
        const auto graw = fit_gp(raw, craw);
        const auto gavg = fit_gp(avg, cavg);
        for (double x = 0.3; x < 11.0; x += 1.3) {
            Eigen::RowVectorXd s(1);
            s << x;
            worst_avg = std::max(worst_avg, std::abs(graw->predict(s) - gavg->predict(s)));
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "mean-err=%.2e sd-err=%.2e sd-monotone=%s preavg-err=%.2e",
                  worst_mean, worst_sd, sd_monotone ? "yes" : "no", worst_avg);
    detail = buf;
    return worst_mean < 1e-8 && worst_sd < 1e-8 && sd_monotone && worst_avg < 1e-6;
}

// ---------------------------------------------------------------- criterion 9

bool criterion9(std::string& detail) {
    bool lhs_ok = true;
    Eigen::VectorXd lo(2), hi(2);
    lo << 2.0, 0.0;
    hi << 10.0, 2000.0;
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const Eigen::Index n = 100;
        const Eigen::MatrixXd s = gen_lhs(2, n, lo, hi, seed);
        for (int dd = 0; dd < 2; ++dd) {
            std::set<Eigen::Index> strata;
            for (Eigen::Index i = 0; i < n; ++i)
                strata.insert(static_cast<Eigen::Index>((s(i, dd) - lo[dd]) / (hi[dd] - lo[dd]) *
                                                        static_cast<double>(n)));
            lhs_ok = lhs_ok && strata.size() == static_cast<std::size_t>(n);
        }
    }

    Eigen::VectorXd l1(2), h1(2);
    l1 << 0.0, 0.0;
    h1 << 1.0, 1.0;
    auto disc = [](const Eigen::MatrixXd& pts) {
        double worst = 0.0;
        for (int a = 1; a <= 8; ++a)
            for (int b = 1; b <= 8; ++b) {
                const double t1 = a / 8.0, t2 = b / 8.0;
                Eigen::Index in = 0;
                for (Eigen::Index i = 0; i < pts.rows(); ++i)
                    if (pts(i, 0) <= t1 && pts(i, 1) <= t2) ++in;
                worst = std::max(
                    worst, std::abs(static_cast<double>(in) / static_cast<double>(pts.rows()) -
                                    t1 * t2));
            }
        return worst;
    };
    int wins = 0;
    for (int t = 0; t < 20; ++t) {
        const auto seed = static_cast<std::uint64_t>(t + 1);
        Eigen::MatrixXd iid(256, 2);
        for (int i = 0; i < 256; ++i)
            for (int dd = 0; dd < 2; ++dd)
                iid(i, dd) = rng::uniform(rng::Key{seed, 1, static_cast<std::uint64_t>(i),
                                                   static_cast<std::uint64_t>(dd)},
                                          0);
        if (disc(gen_sobol(2, 256, l1, h1, seed)) < disc(iid)) ++wins;
    }

    const bool counts_ok = mixture_counts({0.6, 0.4}, 500) == std::vector<Eigen::Index>{300, 200} &&
                           mixture_counts({0.5, 0.5}, 501) == std::vector<Eigen::Index>{251, 250} &&
                           mixture_counts({0.6, 0.4}, 10000) ==
                               std::vector<Eigen::Index>{6000, 4000};
    char buf[160];
    std::snprintf(buf, sizeof buf, "lhs-exact=%s sobol-wins=%d/20 mixture-counts=%s",
                  lhs_ok ? "yes" : "no", wins, counts_ok ? "exact" : "off");
    detail = buf;
    return lhs_ok && wins >= 15 && counts_ok;
}

// --------------------------------------------------------------- criterion 10

bool criterion10(std::string& detail) {
    // noiseless price, one-path conventional design whose level table is a
    // batch of random inventories: the step-(K-1) fit then carries the
    // terminal payoff exactly at every (P_{K-1}, I) site.
    double worst = 0.0;
    int states = 0;
    rng::Engine eng(2024);
    for (const double x0 : {3.5, 5.0, 6.5, 9.0}) {
        ExoProcessSpec proc;
        proc.kind = ProcessKind::LogMeanReverting;
        proc.alpha = 2.38;
        proc.mean_level = 6.0;
        proc.sigma = 0.0;
        proc.x0 = x0;
        const GasStorageProblem gas(GasStorageSpec{}, proc, TimeGrid(0.009, 3, 0.10));
        const TimeGrid grid = gas.default_grid();
        const Eigen::MatrixXd pilot = simulate_paths(proc, grid, 1, 5);
        std::set<double> levels;
        while (levels.size() < 250) levels.insert(2000.0 * eng.uniform01());
        StepPlan plan;
        plan.design.kind = DesignKind::Conventional;
        plan.design.levels.assign(levels.begin(), levels.end());
        plan.regression.method = "piecewise-poly";
        plan.regression.degree = 0;
        const PolicyStore policy =
            backward_solve(gas, grid, BudgetSchedule::uniform(grid.K, plan), {}, &pilot);
        for (const double inv : plan.design.levels) {
            Eigen::RowVectorXd s(2);
            s << pilot(0, grid.K - 1), inv;
            const double got = policy.q(grid.K - 1, 0).predict(s);
            const double want = gas.terminal_payoff(pilot(0, grid.K), {inv, 0.0});
            worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
            ++states;
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "states=%d worst-rel-err=%.2e", states, worst);
    detail = buf;
    return states == 1000 && worst < 1e-12;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto wanted = [&](int c) { return only.empty() || only.count(c) > 0; };

    int failures = 0;
    std::vector<double> low_by_seed;
    auto report = [&](int c, const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] C%d %s: %s\n", ok ? "PASS" : "FAIL", c, name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    };

    std::string d;
    if (wanted(1)) report(1, "degenerate-problem oracle equivalence", criterion1(d), d);
    if (wanted(2) || wanted(4)) {
        const bool ok2 = criterion2(d, low_by_seed);
        if (wanted(2)) report(2, "conventional PR-1D low-budget anchor", ok2, d);
        if (wanted(4)) report(4, "budget monotonicity", criterion4(d, low_by_seed), d);
    }
    if (wanted(3)) report(3, "mixture GP-2D anchor and ordering", criterion3(d), d);
    if (wanted(5)) report(5, "switching costs", criterion5(d), d);
    if (wanted(6)) report(6, "two-cavern scaling and symmetry", criterion6(d), d);
    if (wanted(7)) report(7, "microgrid anchors", criterion7(d), d);
    if (wanted(8)) report(8, "gp posterior properties", criterion8(d), d);
    if (wanted(9)) report(9, "design properties", criterion9(d), d);
    if (wanted(10)) report(10, "terminal condition exactness", criterion10(d), d);
    return failures;
}
