#pragma once

#include <optional>

#include "stor/regress.hpp"

namespace stor {

/// Squared-exponential kernel hyperparameters, quoted on the original data
/// scale (lengthscales per input dimension, variances on the response
/// scale). The prior constant mean beta0 is always profiled analytically.
struct GPHyper {
    Eigen::VectorXd lengthscale;
    double sf2 = 1.0;  ///< signal variance
    double sn2 = 1e-2; ///< noise variance
};

struct GPConfig {
    int restarts = 5;       ///< multi-start count (first start is the warm start if given)
    int max_iter = 200;     ///< Nelder-Mead iterations per start
    double jitter = 1e-8;
    double nugget_cap = 1e2;        ///< escalation limit, response-variance units
    double noise_floor = 1e-4;      ///< MLE lower bound on sn2, response-variance units
    Eigen::Index train_cap = 2500;  ///< largest accepted training set
    std::uint64_t seed = 0;         ///< restart sampling seed
    std::optional<GPHyper> warm;    ///< first multi-start point
    std::optional<GPHyper> fixed;   ///< skip MLE, use these hyperparameters
};

class GPSurrogate : public Surrogate {
public:
    std::string kind() const override { return "gp"; }
    int dim() const override { return static_cast<int>(x_.cols()); }
    double predict(const Eigen::RowVectorXd& site) const override;
    Eigen::VectorXd predict_many(const Eigen::MatrixXd& sites) const override;
    nlohmann::json to_json() const override;

    /// (posterior mean, posterior sd) including the noise-free kernel
    /// variance kappa'(x,x) = sf2 + sn2 at the site itself.
    std::pair<double, double> predict_sd(const Eigen::RowVectorXd& site) const;
    void predict_many_sd(const Eigen::MatrixXd& sites, Eigen::VectorXd& mean,
                         Eigen::VectorXd& sd) const;

    /// Fitted hyperparameters on the original data scale; feed back as
    /// GPConfig::warm for the next refit.
    GPHyper hyper() const;
    /// Profiled prior mean on the original response scale.
    double beta0() const;
    /// Log marginal likelihood of the training data at the fitted
    /// hyperparameters (standardized response scale).
    double log_likelihood() const { return loglik_; }
    /// Final noise variance after any nugget escalation, standardized scale.
    double nugget() const { return sn2_; }

    /// Drop the cached Cholesky factor (N^2 memory). Mean prediction keeps
    /// working; sd queries throw until the surrogate is refactorized via
    /// serialization round-trip.
    void release_factor() { llt_ = {}; has_factor_ = false; }

    static std::unique_ptr<GPSurrogate> from_json(const nlohmann::json& j);

    friend std::unique_ptr<GPSurrogate> fit_gp(const Dataset& data, const GPConfig& cfg);

private:
    GPSurrogate() = default;
    void factorize();  ///< Cholesky of H with nugget escalation, then alpha

    // standardized training data and standardization parameters
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    Eigen::VectorXd x_mean_, x_sd_;
    double y_mean_ = 0.0, y_sd_ = 1.0;

    // hyperparameters on the standardized scale
    Eigen::VectorXd ell_;
    double sf2_ = 1.0, sn2_ = 1e-2, beta0_ = 0.0;
    double jitter_ = 1e-8, nugget_cap_ = 1e2;
    double loglik_ = 0.0;

    bool has_factor_ = false;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;    ///< H^{-1}(y - beta0)
    Eigen::MatrixXd x_scaled_; ///< training inputs divided by lengthscales
};

std::unique_ptr<GPSurrogate> fit_gp(const Dataset& data, const GPConfig& cfg = {});

}  // namespace stor
