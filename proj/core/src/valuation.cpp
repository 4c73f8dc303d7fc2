#include "stor/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "stor/common.hpp"

namespace stor {

namespace {
constexpr std::uint64_t kMagic = 0x5354525344423161ULL;  // "STRSDB1a"
}

std::uint64_t scenario_hash(const ExoProcessSpec& spec, const TimeGrid& grid) {
    std::uint64_t h = fnv1a("scenario");
    h = fnv1a_values({static_cast<double>(spec.kind), spec.alpha, spec.mean_level, spec.sigma,
                      spec.x0},
                     h);
    h = fnv1a_values({grid.T, static_cast<double>(grid.K), grid.r}, h);
    return h;
}

ScenarioDB::ScenarioDB(ExoProcessSpec spec, TimeGrid grid, Eigen::Index n_paths, std::uint64_t seed)
    : spec_(spec), grid_(grid), n_paths_(n_paths), seed_(seed),
      hash_(scenario_hash(spec, grid)) {
    spec_.validate();
    if (n_paths_ < 1) throw std::invalid_argument("ScenarioDB: need at least one path");
}

Eigen::MatrixXd ScenarioDB::block(Eigen::Index first, Eigen::Index count, int threads) const {
    if (first < 0 || count < 1 || first + count > n_paths_)
        throw std::out_of_range("ScenarioDB: block out of range");
    if (data_) return data_->middleRows(first, count);
    return simulate_path_block(spec_, grid_, first, count, seed_, 0, threads);
}

void ScenarioDB::save(const std::string& path, int threads) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("ScenarioDB: cannot open " + path);
    auto put_u64 = [&](std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); };
    put_u64(kMagic);
    put_u64(seed_);
    put_u64(hash_);
    put_u64(static_cast<std::uint64_t>(n_paths_));
    os.write(reinterpret_cast<const char*>(&spec_), sizeof(spec_));
    os.write(reinterpret_cast<const char*>(&grid_), sizeof(grid_));
    constexpr Eigen::Index kChunk = 20000;
    for (Eigen::Index first = 0; first < n_paths_; first += kChunk) {
        const Eigen::Index len = std::min(kChunk, n_paths_ - first);
        const Eigen::MatrixXd b = block(first, len, threads);
        // row-major on disk so sequential loads stream path by path
        for (Eigen::Index i = 0; i < len; ++i)
            os.write(reinterpret_cast<const char*>(Eigen::RowVectorXd(b.row(i)).data()),
                     static_cast<std::streamsize>(sizeof(double)) * b.cols());
    }
    if (!os) throw std::runtime_error("ScenarioDB: write failed for " + path);
}

ScenarioDB ScenarioDB::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("ScenarioDB: cannot open " + path);
    auto get_u64 = [&] {
        std::uint64_t v = 0;
        is.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    if (get_u64() != kMagic) throw std::runtime_error("ScenarioDB: bad file header in " + path);
    const std::uint64_t seed = get_u64();
    const std::uint64_t hash = get_u64();
    const auto n = static_cast<Eigen::Index>(get_u64());
    ExoProcessSpec spec;
    TimeGrid grid(1.0, 1, 0.0);
    is.read(reinterpret_cast<char*>(&spec), sizeof(spec));
    is.read(reinterpret_cast<char*>(&grid), sizeof(grid));
    ScenarioDB db(spec, grid, n, seed);
    if (db.hash_ != hash) throw std::runtime_error("ScenarioDB: manifest hash mismatch in " + path);
    Eigen::MatrixXd data(n, grid.K + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::RowVectorXd row(grid.K + 1);
        is.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double)) * row.size());
        data.row(i) = row;
    }
    if (!is) throw std::runtime_error("ScenarioDB: truncated file " + path);
    db.data_ = std::move(data);
    return db;
}

ValuationResult forward_value(const Problem& problem, const PolicyStore& policy,
                              const ScenarioDB& db, const ForwardOptions& opts) {
    if (policy.problem_hash() != problem.hash())
        throw std::invalid_argument("forward_value: policy was solved for a different problem");
    if (db.hash() != scenario_hash(problem.exo_spec(), policy.grid()))
        throw std::invalid_argument("forward_value: scenario database does not match the problem");
    if (!policy.complete()) throw std::invalid_argument("forward_value: incomplete policy");

    const TimeGrid& grid = policy.grid();
    const double dt = grid.dt();
    const int inv_dim = problem.inv_dim();
    const int num_j = problem.num_regimes();
    const Eigen::MatrixXd& cost = problem.switching_cost();
    const StateSample init = opts.initial.value_or(problem.initial_state());
    for (int c = 0; c < inv_dim; ++c) {
        const double v = init.inv[static_cast<std::size_t>(c)];
        if (v < problem.inv_min(c) || v > problem.inv_max(c))
            throw std::invalid_argument("forward_value: initial inventory out of bounds");
    }

    const Eigen::Index n = db.n_paths();
    ValuationResult res;
    res.path_values = Eigen::VectorXd::Zero(n);
    res.switch_counts = Eigen::VectorXi::Zero(n);
    res.terminal_inventory.resize(n);
    std::uint64_t stress = 0;

    std::vector<double> disc(static_cast<std::size_t>(grid.K) + 1);
    for (int s = 0; s <= grid.K; ++s) disc[static_cast<std::size_t>(s)] = grid.discount_to(s);

    std::vector<Eigen::Index> group;
    std::vector<int> best;
    for (Eigen::Index first = 0; first < n; first += opts.block) {
        const Eigen::Index len = std::min(opts.block, n - first);
        const Eigen::MatrixXd paths = db.block(first, len, opts.threads);
        Eigen::MatrixXd inv(len, inv_dim);
        for (int c = 0; c < inv_dim; ++c)
            inv.col(c).setConstant(init.inv[static_cast<std::size_t>(c)]);
        std::vector<int> regime(static_cast<std::size_t>(len), init.regime);

        for (int s = 0; s < grid.K; ++s) {
            for (int m = 0; m < num_j; ++m) {
                group.clear();
                for (Eigen::Index i = 0; i < len; ++i)
                    if (regime[static_cast<std::size_t>(i)] == m) group.push_back(i);
                if (group.empty()) continue;
                Eigen::MatrixXd states(static_cast<Eigen::Index>(group.size()), 1 + inv_dim);
                for (std::size_t r = 0; r < group.size(); ++r) {
                    const auto row = static_cast<Eigen::Index>(r);
                    states(row, 0) = paths(group[r], s);
                    for (int c = 0; c < inv_dim; ++c) states(row, 1 + c) = inv(group[r], c);
                }
                batch_step_values(problem, policy, s, states, m, &best);
                for (std::size_t r = 0; r < group.size(); ++r) {
                    const Eigen::Index i = group[r];
                    const int j = best[r];
                    StateSample st{states(static_cast<Eigen::Index>(r), 0), {0.0, 0.0}, m};
                    for (int c = 0; c < inv_dim; ++c)
                        st.inv[static_cast<std::size_t>(c)] = inv(i, c);
                    const StepResult step = problem.apply_regime(st, j, dt);
                    res.path_values[first + i] +=
                        disc[static_cast<std::size_t>(s)] * (step.profit - cost(m, j));
                    if (problem.step_stress(st, j, dt)) ++stress;
                    if (j != m) ++res.switch_counts[first + i];
                    for (int c = 0; c < inv_dim; ++c)
                        inv(i, c) = step.next_inv[static_cast<std::size_t>(c)];
                    regime[static_cast<std::size_t>(i)] = j;
                }
            }
        }
        for (Eigen::Index i = 0; i < len; ++i) {
            InvVec iv{0.0, 0.0};
            for (int c = 0; c < inv_dim; ++c) iv[static_cast<std::size_t>(c)] = inv(i, c);
            res.path_values[first + i] +=
                disc[static_cast<std::size_t>(grid.K)] * problem.terminal_payoff(paths(i, grid.K), iv);
            res.terminal_inventory[first + i] = inv(i, 0);
        }
    }

    res.estimate = res.path_values.mean();
    const double var =
        (res.path_values.array() - res.estimate).square().sum() / std::max<double>(1, n - 1);
    res.std_error = std::sqrt(var / static_cast<double>(n));
    res.mean_terminal_inventory = res.terminal_inventory.mean();
    res.min_terminal_inventory = res.terminal_inventory.minCoeff();
    res.max_terminal_inventory = res.terminal_inventory.maxCoeff();
    res.stress_fraction =
        static_cast<double>(stress) / (static_cast<double>(n) * static_cast<double>(grid.K));
    return res;
}

std::vector<Eigen::MatrixXd> forward_inventory_paths(const Problem& problem,
                                                     const PolicyStore& policy,
                                                     const Eigen::MatrixXd& paths,
                                                     std::optional<StateSample> initial) {
    const TimeGrid& grid = policy.grid();
    if (paths.cols() != grid.K + 1)
        throw std::invalid_argument("forward_inventory_paths: path columns must cover 0..K");
    const double dt = grid.dt();
    const int inv_dim = problem.inv_dim();
    const int num_j = problem.num_regimes();
    const Eigen::Index n = paths.rows();
    const StateSample init = initial.value_or(problem.initial_state());

    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(inv_dim));
    for (int c = 0; c < inv_dim; ++c) {
        out[static_cast<std::size_t>(c)].resize(n, grid.K + 1);
        out[static_cast<std::size_t>(c)].col(0).setConstant(init.inv[static_cast<std::size_t>(c)]);
    }
    Eigen::MatrixXd inv(n, inv_dim);
    for (int c = 0; c < inv_dim; ++c) inv.col(c).setConstant(init.inv[static_cast<std::size_t>(c)]);
    std::vector<int> regime(static_cast<std::size_t>(n), init.regime);
    std::vector<Eigen::Index> group;
    std::vector<int> best;
    for (int s = 0; s < grid.K; ++s) {
        for (int m = 0; m < num_j; ++m) {
            group.clear();
            for (Eigen::Index i = 0; i < n; ++i)
                if (regime[static_cast<std::size_t>(i)] == m) group.push_back(i);
            if (group.empty()) continue;
            Eigen::MatrixXd states(static_cast<Eigen::Index>(group.size()), 1 + inv_dim);
            for (std::size_t r = 0; r < group.size(); ++r) {
                states(static_cast<Eigen::Index>(r), 0) = paths(group[r], s);
                for (int c = 0; c < inv_dim; ++c)
                    states(static_cast<Eigen::Index>(r), 1 + c) = inv(group[r], c);
            }
            batch_step_values(problem, policy, s, states, m, &best);
            for (std::size_t r = 0; r < group.size(); ++r) {
                const Eigen::Index i = group[r];
                StateSample st{states(static_cast<Eigen::Index>(r), 0), {0.0, 0.0}, m};
                for (int c = 0; c < inv_dim; ++c) st.inv[static_cast<std::size_t>(c)] = inv(i, c);
                const StepResult step = problem.apply_regime(st, best[r], dt);
                for (int c = 0; c < inv_dim; ++c)
                    inv(i, c) = step.next_inv[static_cast<std::size_t>(c)];
                regime[static_cast<std::size_t>(i)] = best[r];
            }
        }
        for (int c = 0; c < inv_dim; ++c) out[static_cast<std::size_t>(c)].col(s + 1) = inv.col(c);
    }
    return out;
}

Eigen::MatrixXi control_map(const Problem& problem, const PolicyStore& policy, int k,
                            const Eigen::VectorXd& exo_grid, const Eigen::VectorXd& inv_grid,
                            int regime) {
    Eigen::MatrixXi out(inv_grid.size(), exo_grid.size());
    for (Eigen::Index r = 0; r < inv_grid.size(); ++r)
        for (Eigen::Index c = 0; c < exo_grid.size(); ++c) {
            StateSample s{exo_grid[c], {inv_grid[r], 0.0}, regime};
            out(r, c) = regime_argmax(problem, policy, k, s).first;
        }
    return out;
}

BoundaryCurve extract_boundaries(const Problem& problem, const PolicyStore& policy,
                                 const std::vector<int>& steps, const std::vector<double>& levels,
                                 double exo_lo, double exo_hi, int n_probe, int inject_regime,
                                 int withdraw_regime, int incumbent_regime) {
    if (n_probe < 2) throw std::invalid_argument("extract_boundaries: need >= 2 probe points");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    BoundaryCurve out;
    out.steps = steps;
    out.levels = levels;
    out.b_inj = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(steps.size()),
                                          static_cast<Eigen::Index>(levels.size()), nan);
    out.b_wdr = out.b_inj;
    for (std::size_t si = 0; si < steps.size(); ++si)
        for (std::size_t li = 0; li < levels.size(); ++li) {
            for (int p = 0; p < n_probe; ++p) {
                const double price =
                    exo_lo + (exo_hi - exo_lo) * static_cast<double>(p) / (n_probe - 1);
                StateSample s{price, {levels[li], 0.0}, incumbent_regime};
                const int j = regime_argmax(problem, policy, steps[si], s).first;
                const auto r = static_cast<Eigen::Index>(si);
                const auto c = static_cast<Eigen::Index>(li);
                if (j == inject_regime &&
                    (std::isnan(out.b_inj(r, c)) || price > out.b_inj(r, c)))
                    out.b_inj(r, c) = price;
                if (j == withdraw_regime &&
                    (std::isnan(out.b_wdr(r, c)) || price < out.b_wdr(r, c)))
                    out.b_wdr(r, c) = price;
            }
        }
    return out;
}

}  // namespace stor
