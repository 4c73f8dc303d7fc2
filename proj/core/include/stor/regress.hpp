#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

namespace stor {

/// Training data for a continuation-value fit: N sites (rows of x) with one
/// response each. Responses may be pathwise samples or pre-averaged over
/// replicates; the fit does not care.
struct Dataset {
    Eigen::MatrixXd x;  ///< N x d
    Eigen::VectorXd y;  ///< N

    void validate() const;
    Eigen::Index n() const { return x.rows(); }
    int dim() const { return static_cast<int>(x.cols()); }
};

/// A fitted continuation-value approximation. Immutable; safe to share
/// across threads for prediction.
class Surrogate {
public:
    virtual ~Surrogate() = default;

    virtual std::string kind() const = 0;
    virtual int dim() const = 0;
    virtual double predict(const Eigen::RowVectorXd& site) const = 0;

    /// Row-wise prediction; overridden where a batched path is cheaper.
    virtual Eigen::VectorXd predict_many(const Eigen::MatrixXd& sites) const;

    virtual nlohmann::json to_json() const = 0;
};

/// Inverse of Surrogate::to_json. Throws ConfigError on unknown kind or
/// malformed payload.
std::unique_ptr<Surrogate> surrogate_from_json(const nlohmann::json& j);

/// Exponent rows for all monomials of total degree <= degree in dim
/// variables, graded lexicographic. C(degree+dim, dim) rows.
Eigen::MatrixXi monomial_exponents(int dim, int degree);

/// Vandermonde-style basis matrix for the given exponent table.
Eigen::MatrixXd monomial_basis(const Eigen::MatrixXd& x, const Eigen::MatrixXi& exps);

}  // namespace stor
