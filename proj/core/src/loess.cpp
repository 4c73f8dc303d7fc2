#include "stor/loess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stor/common.hpp"
#include "stor/poly.hpp"

namespace stor {

LoessSurrogate::LoessSurrogate(Dataset data, double span, int degree, Eigen::VectorXd scale)
    : data_(std::move(data)), span_(span), degree_(degree), scale_(std::move(scale)) {
    data_.validate();
    if (!(span_ > 0.0) || span_ > 1.0) throw std::invalid_argument("loess: span outside (0,1]");
    if (degree_ < 0 || degree_ > 2) throw std::invalid_argument("loess: degree outside {0,1,2}");
    if (scale_.size() == 0) scale_ = Eigen::VectorXd::Ones(data_.dim());
    if (scale_.size() != data_.dim()) throw std::invalid_argument("loess: scale size mismatch");
    scaled_x_ = (data_.x.array().rowwise() * scale_.transpose().array()).matrix();
    const auto need = monomial_exponents(data_.dim(), degree_).rows();
    if (static_cast<Eigen::Index>(std::ceil(span_ * static_cast<double>(data_.n()))) < need)
        throw std::invalid_argument("loess: span window smaller than local coefficient count");
}

double LoessSurrogate::predict(const Eigen::RowVectorXd& site) const {
    const Eigen::Index n = data_.n();
    const int d = data_.dim();
    const Eigen::RowVectorXd q = (site.array() * scale_.transpose().array()).matrix();
    Eigen::VectorXd dist = (scaled_x_.rowwise() - q).rowwise().norm();

    const auto k = std::min<Eigen::Index>(
        n, static_cast<Eigen::Index>(std::ceil(span_ * static_cast<double>(n))));
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return dist[a] < dist[b]; });
    idx.resize(static_cast<std::size_t>(k));

    double lambda = 0.0;
    for (const auto i : idx) lambda = std::max(lambda, dist[i]);
    if (lambda == 0.0) {
        // all in-span neighbors coincide with the query site
        double s = 0.0;
        for (const auto i : idx) s += data_.y[i];
        return s / static_cast<double>(k);
    }

    Eigen::MatrixXd u(k, d);
    Eigen::VectorXd w(k), y(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        const auto i = idx[static_cast<std::size_t>(r)];
        u.row(r) = (scaled_x_.row(i) - q) / lambda;
        const double t = 1.0 - std::pow(dist[i] / lambda, 3);
        w[r] = t > 0.0 ? t * t * t : 0.0;
        y[r] = data_.y[i];
    }
    const Eigen::VectorXd sw = w.cwiseSqrt();

    for (int deg = degree_; deg >= 0; --deg) {
        const Eigen::MatrixXi exps = monomial_exponents(d, deg);
        if (k < exps.rows()) continue;
        const Eigen::MatrixXd basis = monomial_basis(u, exps);
        Eigen::MatrixXd a = basis.array().colwise() * sw.array();
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
        if (cod.rank() < a.cols() && deg > 0) continue;  // degenerate, drop degree
        const Eigen::VectorXd beta = cod.solve((y.array() * sw.array()).matrix());
        return beta[0];  // constant term: local coordinates centered at the query
    }
    throw NumericalError("loess: local fit failed at all degrees");
}

nlohmann::json LoessSurrogate::to_json() const {
    std::vector<double> x_flat(data_.x.size());
    Eigen::Map<Eigen::MatrixXd>(x_flat.data(), data_.x.rows(), data_.x.cols()) = data_.x;
    return {{"kind", "loess"},
            {"n", data_.n()},
            {"dim", data_.dim()},
            {"x", std::move(x_flat)},
            {"y", std::vector<double>(data_.y.begin(), data_.y.end())},
            {"span", span_},
            {"degree", degree_},
            {"scale", std::vector<double>(scale_.begin(), scale_.end())}};
}

std::unique_ptr<LoessSurrogate> LoessSurrogate::from_json(const nlohmann::json& j) {
    const auto n = j.at("n").get<Eigen::Index>();
    const auto d = j.at("dim").get<int>();
    const auto x_flat = j.at("x").get<std::vector<double>>();
    const auto y_v = j.at("y").get<std::vector<double>>();
    const auto scale_v = j.at("scale").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(x_flat.size()) != n * d ||
        static_cast<Eigen::Index>(y_v.size()) != n)
        throw ConfigError("loess surrogate: payload size mismatch");
    Dataset data;
    data.x = Eigen::Map<const Eigen::MatrixXd>(x_flat.data(), n, d);
    data.y = Eigen::Map<const Eigen::VectorXd>(y_v.data(), n);
    Eigen::VectorXd scale =
        Eigen::Map<const Eigen::VectorXd>(scale_v.data(), static_cast<Eigen::Index>(scale_v.size()));
    return std::make_unique<LoessSurrogate>(std::move(data), j.at("span").get<double>(),
                                            j.at("degree").get<int>(), std::move(scale));
}

std::unique_ptr<LoessSurrogate> fit_loess(const Dataset& data, double span, int degree,
                                          Eigen::VectorXd scale) {
    return std::make_unique<LoessSurrogate>(data, span, degree, std::move(scale));
}

Eigen::VectorXd fit_predict_loess(const Dataset& data, const Eigen::MatrixXd& sites, double span,
                                  int degree, Eigen::VectorXd scale) {
    return fit_loess(data, span, degree, std::move(scale))->predict_many(sites);
}

}  // namespace stor
