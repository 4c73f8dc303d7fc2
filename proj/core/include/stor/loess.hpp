#pragma once

#include "stor/regress.hpp"

namespace stor {

/// Memory-based local polynomial regression (LOESS) with tri-cube weights.
/// The surrogate retains its training data; each prediction solves a small
/// weighted least-squares problem over the span-nearest neighbors.
class LoessSurrogate : public Surrogate {
public:
    /// scale multiplies each input dimension before distance computation
    /// (used to put inventory on the [0,2] scale while leaving the
    /// exogenous coordinate untouched).
    LoessSurrogate(Dataset data, double span, int degree, Eigen::VectorXd scale);

    std::string kind() const override { return "loess"; }
    int dim() const override { return data_.dim(); }
    double predict(const Eigen::RowVectorXd& site) const override;
    nlohmann::json to_json() const override;

    double span() const { return span_; }
    int degree() const { return degree_; }

    static std::unique_ptr<LoessSurrogate> from_json(const nlohmann::json& j);

private:
    Dataset data_;
    Eigen::MatrixXd scaled_x_;
    double span_;
    int degree_;
    Eigen::VectorXd scale_;
};

std::unique_ptr<LoessSurrogate> fit_loess(const Dataset& data, double span = 0.25, int degree = 2,
                                          Eigen::VectorXd scale = {});

/// Convenience wrapper: fit on data, evaluate at each row of sites.
Eigen::VectorXd fit_predict_loess(const Dataset& data, const Eigen::MatrixXd& sites,
                                  double span = 0.25, int degree = 2, Eigen::VectorXd scale = {});

}  // namespace stor
