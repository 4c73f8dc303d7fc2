#pragma once

#include <vector>

#include "stor/regress.hpp"

namespace stor {

/// Piecewise-continuous surrogate in (P, I): an independent 1D fit in P per
/// inventory level, linearly interpolated in I between bracketing levels.
/// Queries outside the level range clamp to the nearest level.
class PiecewiseSurrogate : public Surrogate {
public:
    PiecewiseSurrogate(std::vector<double> levels, std::vector<std::unique_ptr<Surrogate>> fits);

    std::string kind() const override { return "piecewise-1d"; }
    int dim() const override { return 2; }  ///< (P, I)
    double predict(const Eigen::RowVectorXd& site) const override;
    nlohmann::json to_json() const override;

    const std::vector<double>& levels() const { return levels_; }
    const Surrogate& level_fit(int j) const { return *fits_[j]; }
    /// True once any query clamped I outside [levels.front(), levels.back()].
    bool clamped() const { return clamped_; }

    static std::unique_ptr<PiecewiseSurrogate> from_json(const nlohmann::json& j);

private:
    std::vector<double> levels_;
    std::vector<std::unique_ptr<Surrogate>> fits_;  ///< one per level, input P only
    mutable bool clamped_ = false;
};

/// Independent degree-M_P polynomial per level. datasets[j] holds the
/// (P, response) pairs at inventory level levels[j].
std::unique_ptr<PiecewiseSurrogate> fit_piecewise_1d(const std::vector<Dataset>& datasets,
                                                     int degree, std::vector<double> levels);

}  // namespace stor
