#include "stor/design.hpp"

#include <cmath>
#include <stdexcept>

#include "stor/common.hpp"
#include "stor/sobol.hpp"

namespace stor {

DesignKind design_kind_from_string(const std::string& s) {
    if (s == "grid-product") return DesignKind::GridProduct;
    if (s == "conventional") return DesignKind::Conventional;
    if (s == "sobol") return DesignKind::Sobol;
    if (s == "lhs") return DesignKind::Lhs;
    if (s == "probabilistic") return DesignKind::Probabilistic;
    if (s == "mixture") return DesignKind::Mixture;
    if (s == "adaptive-1d") return DesignKind::Adaptive1d;
    if (s == "explicit") return DesignKind::Explicit;
    throw ConfigError("unknown design kind: " + s);
}

std::string to_string(DesignKind k) {
    switch (k) {
        case DesignKind::GridProduct: return "grid-product";
        case DesignKind::Conventional: return "conventional";
        case DesignKind::Sobol: return "sobol";
        case DesignKind::Lhs: return "lhs";
        case DesignKind::Probabilistic: return "probabilistic";
        case DesignKind::Mixture: return "mixture";
        case DesignKind::Adaptive1d: return "adaptive-1d";
        case DesignKind::Explicit: return "explicit";
    }
    throw std::invalid_argument("bad DesignKind");
}

void DesignSpec::validate(int dim) const {
    if (n_sites < 1 || n_reps < 1) throw ConfigError("design: N_s and N_b must be >= 1");
    switch (kind) {
        case DesignKind::GridProduct:
        case DesignKind::Sobol:
        case DesignKind::Lhs:
            if (lo.size() != dim || hi.size() != dim || ((hi - lo).array() <= 0.0).any() ||
                !lo.allFinite() || !hi.allFinite())
                throw ConfigError("design: bounds must be finite with min < max per dimension");
            break;
        case DesignKind::Conventional:
        case DesignKind::Adaptive1d:
            if (levels.empty()) throw ConfigError("design: level table required");
            break;
        case DesignKind::Mixture: {
            if (components.empty() || components.size() != weights.size())
                throw ConfigError("design: mixture needs parallel weights and components");
            double sum = 0.0;
            for (const double w : weights) {
                if (!(w > 0.0)) throw ConfigError("design: mixture weights must be positive");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("design: mixture weights must sum to 1");
            for (const auto& c : components) c.validate(dim);
            break;
        }
        case DesignKind::Explicit:
            if (sites.rows() < 1 || sites.cols() != dim)
                throw ConfigError("design: explicit sites shape mismatch");
            break;
    }
}

Design gen_conventional(const Eigen::MatrixXd& paths, int k, const std::vector<double>& levels,
                        int inv_dim) {
    if (k < 0 || k >= paths.cols()) throw std::invalid_argument("gen_conventional: step out of range");
    if (levels.empty()) throw std::invalid_argument("gen_conventional: empty level set");
    if (inv_dim < 1 || inv_dim > 2) throw std::invalid_argument("gen_conventional: bad inv_dim");
    const Eigen::Index np = paths.rows();
    const auto ni = static_cast<Eigen::Index>(levels.size());
    Eigen::Index cells = 1;
    for (int c = 0; c < inv_dim; ++c) cells *= ni;
    Design d;
    d.k = k;
    d.sites.resize(np * cells, 1 + inv_dim);
    for (Eigen::Index p = 0; p < np; ++p)
        for (Eigen::Index cell = 0; cell < cells; ++cell) {
            const Eigen::Index row = p * cells + cell;
            d.sites(row, 0) = paths(p, k);
            Eigen::Index rem = cell;
            for (int c = inv_dim - 1; c >= 0; --c) {
                d.sites(row, 1 + c) = levels[static_cast<std::size_t>(rem % ni)];
                rem /= ni;
            }
        }
    return d;
}

Eigen::MatrixXd gen_probabilistic(const EmpiricalMarginal& marginals, int k_exo, int k_inv,
                                  Eigen::Index n, std::uint64_t seed) {
    if (k_exo > marginals.steps() || k_inv > marginals.steps())
        throw std::invalid_argument("gen_probabilistic: step beyond pilot horizon");
    const int d = 1 + marginals.inv_dim();
    Eigen::MatrixXd out(n, d);
    rng::Engine eng(rng::derive(seed, 0x50524f42u, static_cast<std::uint64_t>(k_exo)));
    std::vector<double> row(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < n; ++i) {
        marginals.sample_joint(k_exo, k_inv, eng, row.data());
        for (int c = 0; c < d; ++c) out(i, c) = row[static_cast<std::size_t>(c)];
    }
    return out;
}

std::vector<double> adaptive_levels(const std::string& tier, double i_min, double i_max) {
    auto range = [](std::vector<double>& v, double from, double step, double to) {
        for (double x = from; x <= to + 1e-9; x += step) v.push_back(x);
    };
    std::vector<double> v;
    if (tier == "11") {
        range(v, 0, 100, 200);
        range(v, 500, 250, 1500);
        range(v, 1800, 100, 2000);
    } else if (tier == "21") {
        range(v, 0, 50, 200);
        range(v, 400, 200, 800);
        range(v, 900, 50, 1100);
        range(v, 1200, 200, 1600);
        range(v, 1800, 50, 2000);
    } else if (tier == "31") {
        range(v, 0, 25, 100);
        v.push_back(150);
        range(v, 200, 100, 900);
        range(v, 950, 50, 1050);
        range(v, 1100, 100, 1800);
        v.push_back(1850);
        range(v, 1900, 25, 2000);
    } else if (tier.rfind("uniform-", 0) == 0) {
        const int n = std::stoi(tier.substr(8));
        if (n < 2) throw ConfigError("adaptive_levels: uniform tier needs >= 2 levels");
        for (int i = 0; i < n; ++i)
            v.push_back(i_min + (i_max - i_min) * static_cast<double>(i) / (n - 1));
        return v;
    } else {
        throw ConfigError("adaptive_levels: unknown tier " + tier);
    }
    return v;
}

std::vector<Eigen::Index> mixture_counts(const std::vector<double>& weights, Eigen::Index n) {
    std::vector<Eigen::Index> counts;
    Eigen::Index assigned = 0;
    for (const double w : weights) {
        const auto c = static_cast<Eigen::Index>(std::floor(w * static_cast<double>(n)));
        counts.push_back(c);
        assigned += c;
    }
    if (!counts.empty()) counts.front() += n - assigned;
    return counts;
}

Design generate_design(const DesignSpec& spec, int k, std::uint64_t seed,
                       const Eigen::MatrixXd* pilot_paths, const EmpiricalMarginal* marginals) {
    const std::uint64_t step_seed = rng::derive(seed, 0x44534e47u, static_cast<std::uint64_t>(k));
    Design d;
    d.k = k;
    d.n_reps = spec.n_reps;
    switch (spec.kind) {
        case DesignKind::Explicit:
            d.sites = spec.sites;
            return d;
        case DesignKind::Sobol:
            d.sites = gen_sobol(static_cast<int>(spec.lo.size()), spec.n_sites, spec.lo, spec.hi,
                                step_seed);
            return d;
        case DesignKind::Lhs:
            d.sites = gen_lhs(static_cast<int>(spec.lo.size()), spec.n_sites, spec.lo, spec.hi,
                              step_seed);
            return d;
        case DesignKind::GridProduct: {
            // equally spaced grid, site count rounded down to a per-dim count
            const auto dim = static_cast<int>(spec.lo.size());
            const auto per = static_cast<Eigen::Index>(
                std::round(std::pow(static_cast<double>(spec.n_sites), 1.0 / dim)));
            Eigen::Index total = 1;
            for (int c = 0; c < dim; ++c) total *= per;
            d.sites.resize(total, dim);
            for (Eigen::Index i = 0; i < total; ++i) {
                Eigen::Index rem = i;
                for (int c = dim - 1; c >= 0; --c) {
                    const Eigen::Index idx = rem % per;
                    rem /= per;
                    d.sites(i, c) =
                        per == 1 ? spec.lo[c]
                                 : spec.lo[c] + (spec.hi[c] - spec.lo[c]) *
                                                    static_cast<double>(idx) /
                                                    static_cast<double>(per - 1);
                }
            }
            return d;
        }
        case DesignKind::Conventional: {
            if (pilot_paths == nullptr)
                throw std::invalid_argument("generate_design: conventional kind needs pilot paths");
            Design c = gen_conventional(*pilot_paths, k, spec.levels, spec.inv_dim);
            c.n_reps = spec.n_reps;
            return c;
        }
        case DesignKind::Probabilistic: {
            if (marginals == nullptr)
                throw std::invalid_argument("generate_design: probabilistic kind needs marginals");
            // regression sites pair P_k with the next-step inventory
            const int k_inv = std::min(k + 1, marginals->steps());
            d.sites = gen_probabilistic(*marginals, k, k_inv, spec.n_sites, step_seed);
            return d;
        }
        case DesignKind::Adaptive1d: {
            if (marginals == nullptr)
                throw std::invalid_argument("generate_design: adaptive-1d kind needs marginals");
            const auto ni = static_cast<Eigen::Index>(spec.levels.size());
            const Eigen::Index np = spec.n_sites;
            rng::Engine eng(rng::derive(step_seed, 0x41445054u));
            d.sites.resize(np * ni, 2);
            for (Eigen::Index p = 0; p < np; ++p) {
                const double price = marginals->sample_exo(k, eng);
                for (Eigen::Index i = 0; i < ni; ++i) {
                    d.sites(p * ni + i, 0) = price;
                    d.sites(p * ni + i, 1) = spec.levels[static_cast<std::size_t>(i)];
                }
            }
            return d;
        }
        case DesignKind::Mixture: {
            const auto counts = mixture_counts(spec.weights, spec.n_sites);
            std::vector<Eigen::MatrixXd> parts;
            Eigen::Index total = 0;
            int cols = 0;
            for (std::size_t c = 0; c < counts.size(); ++c) {
                if (counts[c] == 0) continue;
                DesignSpec sub = spec.components[c];
                sub.n_sites = counts[c];
                sub.n_reps = 1;
                const Design part = generate_design(
                    sub, k, rng::derive(step_seed, 0x4d495854u, static_cast<std::uint64_t>(c)),
                    pilot_paths, marginals);
                total += part.sites.rows();
                cols = static_cast<int>(part.sites.cols());
                parts.push_back(part.sites);
            }
            d.sites.resize(total, cols);
            Eigen::Index row = 0;
            for (const auto& p : parts) {
                d.sites.middleRows(row, p.rows()) = p;
                row += p.rows();
            }
            return d;
        }
    }
    throw std::invalid_argument("generate_design: bad kind");
}

const StepPlan& BudgetSchedule::at(int k) const {
    if (k < 0 || k >= num_steps()) throw std::out_of_range("BudgetSchedule: step out of range");
    return steps[static_cast<std::size_t>(k)];
}

BudgetSchedule BudgetSchedule::uniform(int num_steps, StepPlan plan) {
    BudgetSchedule s;
    s.steps.assign(static_cast<std::size_t>(num_steps), std::move(plan));
    return s;
}

BudgetSchedule BudgetSchedule::threshold(int num_steps, int threshold, StepPlan below,
                                         StepPlan above) {
    BudgetSchedule s;
    s.steps.reserve(static_cast<std::size_t>(num_steps));
    for (int k = 0; k < num_steps; ++k) s.steps.push_back(k < threshold ? below : above);
    return s;
}

}  // namespace stor
