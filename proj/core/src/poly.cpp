#include "stor/poly.hpp"

#include <stdexcept>
#include <utility>

#include "stor/common.hpp"

namespace stor {

void Dataset::validate() const {
    if (x.rows() != y.size()) throw std::invalid_argument("Dataset: row count mismatch");
    if (x.rows() == 0) throw std::invalid_argument("Dataset: empty");
    if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("Dataset: non-finite entries");
}

Eigen::VectorXd Surrogate::predict_many(const Eigen::MatrixXd& sites) const {
    Eigen::VectorXd out(sites.rows());
    for (Eigen::Index i = 0; i < sites.rows(); ++i) out[i] = predict(sites.row(i));
    return out;
}

Eigen::MatrixXi monomial_exponents(int dim, int degree) {
    if (dim < 1 || degree < 0) throw std::invalid_argument("monomial_exponents: bad arguments");
    std::vector<Eigen::VectorXi> rows;
    Eigen::VectorXi cur = Eigen::VectorXi::Zero(dim);
    // Enumerate by total degree, then lexicographically within each grade.
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == dim - 1) {
            cur[pos] = remaining;
            rows.push_back(cur);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[pos] = e;
            self(self, pos + 1, remaining - e);
        }
    };
    for (int total = 0; total <= degree; ++total) rec(rec, 0, total);
    Eigen::MatrixXi out(static_cast<Eigen::Index>(rows.size()), dim);
    for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = rows[i].transpose();
    return out;
}

Eigen::MatrixXd monomial_basis(const Eigen::MatrixXd& x, const Eigen::MatrixXi& exps) {
    if (x.cols() != exps.cols()) throw std::invalid_argument("monomial_basis: dimension mismatch");
    Eigen::MatrixXd b = Eigen::MatrixXd::Ones(x.rows(), exps.rows());
    for (Eigen::Index j = 0; j < exps.rows(); ++j)
        for (Eigen::Index d = 0; d < exps.cols(); ++d)
            for (int e = 0; e < exps(j, d); ++e) b.col(j).array() *= x.col(d).array();
    return b;
}

PolySurrogate::PolySurrogate(int degree, Eigen::MatrixXi exps, Eigen::VectorXd beta,
                             Eigen::VectorXd lo, Eigen::VectorXd hi, bool rank_deficient)
    : degree_(degree),
      exps_(std::move(exps)),
      beta_(std::move(beta)),
      lo_(std::move(lo)),
      hi_(std::move(hi)),
      rank_deficient_(rank_deficient) {}

Eigen::MatrixXd PolySurrogate::standardize(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd z = x;
    for (Eigen::Index d = 0; d < z.cols(); ++d) {
        const double span = hi_[d] - lo_[d];
        if (span > 0.0)
            z.col(d) = (2.0 * (z.col(d).array() - lo_[d]) / span - 1.0).matrix();
        else
            z.col(d).setZero();  // degenerate dimension, constant input
    }
    return z;
}

double PolySurrogate::predict(const Eigen::RowVectorXd& site) const {
    return predict_many(site)[0];
}

Eigen::VectorXd PolySurrogate::predict_many(const Eigen::MatrixXd& sites) const {
    return monomial_basis(standardize(sites), exps_) * beta_;
}

nlohmann::json PolySurrogate::to_json() const {
    return {{"kind", "poly"},
            {"degree", degree_},
            {"dim", dim()},
            {"beta", std::vector<double>(beta_.begin(), beta_.end())},
            {"lo", std::vector<double>(lo_.begin(), lo_.end())},
            {"hi", std::vector<double>(hi_.begin(), hi_.end())},
            {"rank_deficient", rank_deficient_}};
}

std::unique_ptr<PolySurrogate> PolySurrogate::from_json(const nlohmann::json& j) {
    const int degree = j.at("degree").get<int>();
    const int dim = j.at("dim").get<int>();
    const auto beta_v = j.at("beta").get<std::vector<double>>();
    const auto lo_v = j.at("lo").get<std::vector<double>>();
    const auto hi_v = j.at("hi").get<std::vector<double>>();
    Eigen::MatrixXi exps = monomial_exponents(dim, degree);
    if (static_cast<Eigen::Index>(beta_v.size()) != exps.rows())
        throw ConfigError("poly surrogate: coefficient count mismatch");
    auto vec = [](const std::vector<double>& v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
    };
    return std::make_unique<PolySurrogate>(degree, std::move(exps), vec(beta_v), vec(lo_v), vec(hi_v),
                                           j.value("rank_deficient", false));
}

std::unique_ptr<PolySurrogate> fit_poly(const Dataset& data, int degree) {
    data.validate();
    Eigen::MatrixXi exps = monomial_exponents(data.dim(), degree);
    if (data.n() < exps.rows())
        throw std::invalid_argument("fit_poly: fewer rows than coefficients");
    Eigen::VectorXd lo = data.x.colwise().minCoeff();
    Eigen::VectorXd hi = data.x.colwise().maxCoeff();
    Eigen::MatrixXd z = data.x;
    for (Eigen::Index d = 0; d < z.cols(); ++d) {
        const double span = hi[d] - lo[d];
        if (span > 0.0)
            z.col(d) = (2.0 * (z.col(d).array() - lo[d]) / span - 1.0).matrix();
        else
            z.col(d).setZero();
    }
    const Eigen::MatrixXd basis = monomial_basis(z, exps);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(basis);
    const bool deficient = cod.rank() < basis.cols();
    Eigen::VectorXd beta = cod.solve(data.y);
    return std::make_unique<PolySurrogate>(degree, std::move(exps), std::move(beta), std::move(lo),
                                           std::move(hi), deficient);
}

}  // namespace stor
