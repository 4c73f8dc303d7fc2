#include "stor/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "stor/common.hpp"
#include "stor/rng.hpp"

namespace stor {

namespace {

// Squared distances between rows of a and b after dividing coordinates by
// the lengthscales; a and b are already scaled.
Eigen::MatrixXd sq_dist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd d2 = -2.0 * a * b.transpose();
    d2.colwise() += a.rowwise().squaredNorm();
    d2.rowwise() += b.rowwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0);
}

Eigen::MatrixXd kernel(const Eigen::MatrixXd& x, const Eigen::VectorXd& ell, double sf2) {
    Eigen::MatrixXd xs = (x.array().rowwise() / ell.transpose().array()).matrix();
    Eigen::MatrixXd k = sq_dist(xs, xs);
    k = (sf2 * (-0.5 * k.array()).exp()).matrix();
    return k;
}

struct LikelihoodEval {
    double nll = std::numeric_limits<double>::infinity();
    double beta0 = 0.0;
    bool ok = false;
};

// Negative log marginal likelihood with beta0 profiled out.
LikelihoodEval eval_nll(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& ell, double sf2, double sn2, double jitter) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd h = kernel(x, ell, sf2);
    h.diagonal().array() += sn2 + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    LikelihoodEval out;
    if (llt.info() != Eigen::Success) return out;
    const Eigen::VectorXd hin_y = llt.solve(y);
    const Eigen::VectorXd hin_1 = llt.solve(Eigen::VectorXd::Ones(n));
    const double denom = hin_1.sum();
    out.beta0 = denom > 0.0 ? y.dot(hin_1) / denom : 0.0;
    const Eigen::VectorXd alpha = hin_y - out.beta0 * hin_1;
    double logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(l(i, i));
    out.nll = 0.5 * (y.array() - out.beta0).matrix().dot(alpha) + logdet +
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    out.ok = std::isfinite(out.nll);
    if (!out.ok) out.nll = std::numeric_limits<double>::infinity();
    return out;
}

// Nelder-Mead with box projection, on log-parameters.
Eigen::VectorXd nelder_mead(const Eigen::VectorXd& start, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, int max_iter,
                            const std::function<double(const Eigen::VectorXd&)>& f) {
    const Eigen::Index d = start.size();
    auto clamp = [&](Eigen::VectorXd v) {
        for (Eigen::Index i = 0; i < d; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
        return v;
    };
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> vals;
    pts.push_back(clamp(start));
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXd p = start;
        double step = 0.1 * (hi[i] - lo[i]);
        if (p[i] + step > hi[i]) step = -step;
        p[i] += step;
        pts.push_back(clamp(p));
    }
    for (const auto& p : pts) vals.push_back(f(p));
    std::vector<std::size_t> ord(pts.size());
    auto sort_pts = [&] {
        for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    };
    for (int it = 0; it < max_iter; ++it) {
        sort_pts();
        const double best = vals[ord.front()], worst = vals[ord.back()];
        if (std::isfinite(best) && worst - best < 1e-7 * (1.0 + std::abs(best))) break;
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i + 1 < ord.size(); ++i) centroid += pts[ord[i]];
        centroid /= static_cast<double>(d);
        const auto wi = ord.back();
        const Eigen::VectorXd refl = clamp(centroid + (centroid - pts[wi]));
        const double fr = f(refl);
        if (fr < vals[ord.front()]) {
            const Eigen::VectorXd exp_p = clamp(centroid + 2.0 * (centroid - pts[wi]));
            const double fe = f(exp_p);
            if (fe < fr) { pts[wi] = exp_p; vals[wi] = fe; }
            else { pts[wi] = refl; vals[wi] = fr; }
        } else if (fr < vals[ord[ord.size() - 2]]) {
            pts[wi] = refl;
            vals[wi] = fr;
        } else {
            const Eigen::VectorXd con = clamp(centroid + 0.5 * (pts[wi] - centroid));
            const double fc = f(con);
            if (fc < vals[wi]) { pts[wi] = con; vals[wi] = fc; }
            else {
                for (std::size_t i = 1; i < ord.size(); ++i) {
                    pts[ord[i]] = clamp(pts[ord.front()] + 0.5 * (pts[ord[i]] - pts[ord.front()]));
                    vals[ord[i]] = f(pts[ord[i]]);
                }
            }
        }
    }
    sort_pts();
    return pts[ord.front()];
}

}  // namespace

std::unique_ptr<GPSurrogate> fit_gp(const Dataset& data, const GPConfig& cfg) {
    data.validate();
    if (data.n() > cfg.train_cap) throw std::invalid_argument("fit_gp: training set exceeds cap");
    auto gp = std::unique_ptr<GPSurrogate>(new GPSurrogate());
    const Eigen::Index n = data.n();
    const int d = data.dim();

    gp->x_mean_ = data.x.colwise().mean();
    gp->x_sd_.resize(d);
    for (int j = 0; j < d; ++j) {
        const double var = (data.x.col(j).array() - gp->x_mean_[j]).square().mean();
        gp->x_sd_[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    gp->y_mean_ = data.y.mean();
    const double y_var = (data.y.array() - gp->y_mean_).square().mean();
    gp->y_sd_ = y_var > 0.0 ? std::sqrt(y_var) : 1.0;
    gp->x_ = ((data.x.rowwise() - gp->x_mean_.transpose()).array().rowwise() /
              gp->x_sd_.transpose().array())
                 .matrix();
    gp->y_ = ((data.y.array() - gp->y_mean_) / gp->y_sd_).matrix();
    gp->jitter_ = cfg.jitter;
    gp->nugget_cap_ = cfg.nugget_cap;

    // raw-scale hyperparameters to the standardized internal scale
    auto to_internal = [&](const GPHyper& h) {
        Eigen::VectorXd v(d + 2);
        for (int j = 0; j < d; ++j) v[j] = std::log(h.lengthscale[j] / gp->x_sd_[j]);
        v[d] = std::log(h.sf2 / (gp->y_sd_ * gp->y_sd_));
        v[d + 1] = std::log(std::max(h.sn2 / (gp->y_sd_ * gp->y_sd_), 1e-12));
        return v;
    };

    Eigen::VectorXd theta(d + 2);
    if (cfg.fixed) {
        theta = to_internal(*cfg.fixed);
    } else {
        const double y_std_var = gp->y_.squaredNorm() / static_cast<double>(n);
        Eigen::VectorXd lo(d + 2), hi(d + 2);
        for (int j = 0; j < d; ++j) {
            const double range = gp->x_.col(j).maxCoeff() - gp->x_.col(j).minCoeff();
            const double r = range > 0.0 ? range : 1.0;
            lo[j] = std::log(1e-2 * r);
            hi[j] = std::log(1e2 * r);
        }
        lo[d] = std::log(1e-6 * std::max(y_std_var, 1e-12));
        hi[d] = std::log(1e2 * std::max(y_std_var, 1e-12));
        // noise floor: responses are Monte Carlo averages, so genuinely
        // noise-free data never occurs, and an undersized nugget both lets
        // clustered sites drive the covariance singular and lets the mean
        // chase replicate noise. Inside a backward recursion that variance
        // compounds through the per-step maximization, so err on the smooth
        // side by default.
        lo[d + 1] = std::log(cfg.noise_floor * std::max(y_std_var, 1e-12));
        hi[d + 1] = hi[d];

        auto objective = [&](const Eigen::VectorXd& t) {
            Eigen::VectorXd ell = t.head(d).array().exp();
            return eval_nll(gp->x_, gp->y_, ell, std::exp(t[d]), std::exp(t[d + 1]), cfg.jitter).nll;
        };

        std::vector<Eigen::VectorXd> starts;
        if (cfg.warm) starts.push_back(to_internal(*cfg.warm));
        rng::Engine eng(rng::derive(cfg.seed, 0x675031u, 0));
        const int want = std::max(1, cfg.restarts);
        while (static_cast<int>(starts.size()) < want) {
            // stratified draw per coordinate (Latin hypercube over starts)
            Eigen::VectorXd s(d + 2);
            const auto idx = static_cast<double>(starts.size());
            for (Eigen::Index j = 0; j < s.size(); ++j) {
                const double u = (idx + eng.uniform01()) / static_cast<double>(want);
                s[j] = lo[j] + u * (hi[j] - lo[j]);
            }
            starts.push_back(std::move(s));
        }

        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : starts) {
            const Eigen::VectorXd t = nelder_mead(s, lo, hi, cfg.max_iter, objective);
            const double v = objective(t);
            if (v < best) {
                best = v;
                theta = t;
            }
        }
        if (!std::isfinite(best)) throw NumericalError("fit_gp: likelihood optimization failed");
    }

    gp->ell_ = theta.head(d).array().exp();
    gp->sf2_ = std::exp(theta[d]);
    // the floor applies to fixed/warm hyperparameters too: they may have been
    // estimated on a response whose scale no longer matches this dataset
    gp->sn2_ = std::max(std::exp(theta[d + 1]),
                        1e-4 * gp->y_.squaredNorm() / static_cast<double>(n));
    gp->factorize();
    return gp;
}

void GPSurrogate::factorize() {
    const Eigen::Index n = x_.rows();
    double sn2 = sn2_;
    for (;;) {
        Eigen::MatrixXd h = kernel(x_, ell_, sf2_);
        h.diagonal().array() += sn2 + jitter_;
        llt_.compute(h);
        if (llt_.info() == Eigen::Success) break;
        sn2 = sn2 > 0.0 ? sn2 * 10.0 : 10.0 * jitter_;
        if (sn2 > nugget_cap_) throw NumericalError("gp: covariance not positive definite");
    }
    sn2_ = sn2;
    const Eigen::VectorXd hin_y = llt_.solve(y_);
    const Eigen::VectorXd hin_1 = llt_.solve(Eigen::VectorXd::Ones(n));
    const double denom = hin_1.sum();
    beta0_ = denom > 0.0 ? y_.dot(hin_1) / denom : 0.0;
    alpha_ = hin_y - beta0_ * hin_1;
    double logdet = 0.0;
    const auto& l = llt_.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(l(i, i));
    loglik_ = -0.5 * (y_.array() - beta0_).matrix().dot(alpha_) - logdet -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    x_scaled_ = (x_.array().rowwise() / ell_.transpose().array()).matrix();
    has_factor_ = true;
}

double GPSurrogate::predict(const Eigen::RowVectorXd& site) const {
    return predict_many(site)[0];
}

Eigen::VectorXd GPSurrogate::predict_many(const Eigen::MatrixXd& sites) const {
    // block the cross-kernel so memory stays bounded for large site sets
    constexpr Eigen::Index kBlock = 8192;
    Eigen::VectorXd out(sites.rows());
    for (Eigen::Index start = 0; start < sites.rows(); start += kBlock) {
        const Eigen::Index len = std::min(kBlock, sites.rows() - start);
        Eigen::MatrixXd q =
            ((sites.middleRows(start, len).rowwise() - x_mean_.transpose()).array().rowwise() /
             (x_sd_.array() * ell_.array()).transpose())
                .matrix();
        Eigen::MatrixXd ks = sq_dist(q, x_scaled_);
        ks = (sf2_ * (-0.5 * ks.array()).exp()).matrix();
        out.segment(start, len) =
            (y_mean_ + y_sd_ * ((ks * alpha_).array() + beta0_)).matrix();
    }
    return out;
}

std::pair<double, double> GPSurrogate::predict_sd(const Eigen::RowVectorXd& site) const {
    Eigen::VectorXd mean(1), sd(1);
    predict_many_sd(site, mean, sd);
    return {mean[0], sd[0]};
}

void GPSurrogate::predict_many_sd(const Eigen::MatrixXd& sites, Eigen::VectorXd& mean,
                                  Eigen::VectorXd& sd) const {
    if (!has_factor_) throw NumericalError("gp: posterior sd unavailable after release_factor");
    Eigen::MatrixXd q = ((sites.rowwise() - x_mean_.transpose()).array().rowwise() /
                         (x_sd_.array() * ell_.array()).transpose())
                            .matrix();
    Eigen::MatrixXd ks = sq_dist(q, x_scaled_);
    ks = (sf2_ * (-0.5 * ks.array()).exp()).matrix();
    mean = ((((ks * alpha_).array() + beta0_) * y_sd_) + y_mean_).matrix();
    // s2 = kappa'(x,x) - H_* H^{-1} H_*^T, with kappa' including the nugget
    const Eigen::MatrixXd v = llt_.matrixL().solve(ks.transpose());
    sd.resize(sites.rows());
    for (Eigen::Index i = 0; i < sites.rows(); ++i) {
        const double s2 = sf2_ + sn2_ + jitter_ - v.col(i).squaredNorm();
        sd[i] = y_sd_ * std::sqrt(std::max(s2, 0.0));
    }
}

GPHyper GPSurrogate::hyper() const {
    GPHyper h;
    h.lengthscale = (ell_.array() * x_sd_.array()).matrix();
    h.sf2 = sf2_ * y_sd_ * y_sd_;
    h.sn2 = sn2_ * y_sd_ * y_sd_;
    return h;
}

double GPSurrogate::beta0() const { return y_mean_ + y_sd_ * beta0_; }

nlohmann::json GPSurrogate::to_json() const {
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); };
    std::vector<double> x_flat(x_.size());
    Eigen::Map<Eigen::MatrixXd>(x_flat.data(), x_.rows(), x_.cols()) = x_;
    return {{"kind", "gp"},
            {"n", x_.rows()},
            {"dim", dim()},
            {"x", std::move(x_flat)},
            {"y", vec(y_)},
            {"x_mean", vec(x_mean_)},
            {"x_sd", vec(x_sd_)},
            {"y_mean", y_mean_},
            {"y_sd", y_sd_},
            {"lengthscale", vec(ell_)},
            {"sf2", sf2_},
            {"sn2", sn2_},
            {"jitter", jitter_},
            {"nugget_cap", nugget_cap_}};
}

std::unique_ptr<GPSurrogate> GPSurrogate::from_json(const nlohmann::json& j) {
    auto gp = std::unique_ptr<GPSurrogate>(new GPSurrogate());
    const auto n = j.at("n").get<Eigen::Index>();
    const auto d = j.at("dim").get<int>();
    const auto x_flat = j.at("x").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(x_flat.size()) != n * d)
        throw ConfigError("gp surrogate: training matrix size mismatch");
    gp->x_ = Eigen::Map<const Eigen::MatrixXd>(x_flat.data(), n, d);
    auto vec = [&](const char* key) {
        const auto v = j.at(key).get<std::vector<double>>();
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
    };
    gp->y_ = vec("y");
    gp->x_mean_ = vec("x_mean");
    gp->x_sd_ = vec("x_sd");
    gp->y_mean_ = j.at("y_mean").get<double>();
    gp->y_sd_ = j.at("y_sd").get<double>();
    gp->ell_ = vec("lengthscale");
    gp->sf2_ = j.at("sf2").get<double>();
    gp->sn2_ = j.at("sn2").get<double>();
    gp->jitter_ = j.at("jitter").get<double>();
    gp->nugget_cap_ = j.at("nugget_cap").get<double>();
    if (gp->y_.size() != n || gp->ell_.size() != d)
        throw ConfigError("gp surrogate: payload size mismatch");
    gp->factorize();
    return gp;
}

}  // namespace stor
