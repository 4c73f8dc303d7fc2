#pragma once

#include "stor/regress.hpp"

namespace stor {

/// Global polynomial regression over all monomials of total degree <= r.
/// Inputs are affinely mapped to [-1,1] per dimension before evaluation.
class PolySurrogate : public Surrogate {
public:
    PolySurrogate(int degree, Eigen::MatrixXi exps, Eigen::VectorXd beta,
                  Eigen::VectorXd lo, Eigen::VectorXd hi, bool rank_deficient);

    std::string kind() const override { return "poly"; }
    int dim() const override { return static_cast<int>(lo_.size()); }
    double predict(const Eigen::RowVectorXd& site) const override;
    Eigen::VectorXd predict_many(const Eigen::MatrixXd& sites) const override;
    nlohmann::json to_json() const override;

    int degree() const { return degree_; }
    const Eigen::VectorXd& coefficients() const { return beta_; }
    /// True when the design matrix was rank deficient and the minimum-norm
    /// solution was used.
    bool rank_deficient() const { return rank_deficient_; }

    static std::unique_ptr<PolySurrogate> from_json(const nlohmann::json& j);

private:
    Eigen::MatrixXd standardize(const Eigen::MatrixXd& x) const;

    int degree_;
    Eigen::MatrixXi exps_;
    Eigen::VectorXd beta_;
    Eigen::VectorXd lo_, hi_;  ///< per-dimension input range
    bool rank_deficient_;
};

std::unique_ptr<PolySurrogate> fit_poly(const Dataset& data, int degree);

}  // namespace stor
