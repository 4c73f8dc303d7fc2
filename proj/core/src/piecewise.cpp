#include "stor/piecewise.hpp"

#include <algorithm>
#include <stdexcept>

#include "stor/common.hpp"
#include "stor/poly.hpp"

namespace stor {

PiecewiseSurrogate::PiecewiseSurrogate(std::vector<double> levels,
                                       std::vector<std::unique_ptr<Surrogate>> fits)
    : levels_(std::move(levels)), fits_(std::move(fits)) {
    if (levels_.size() != fits_.size() || levels_.empty())
        throw std::invalid_argument("piecewise: level/fit count mismatch");
    if (!std::is_sorted(levels_.begin(), levels_.end()) ||
        std::adjacent_find(levels_.begin(), levels_.end()) != levels_.end())
        throw std::invalid_argument("piecewise: levels must be strictly increasing");
}

double PiecewiseSurrogate::predict(const Eigen::RowVectorXd& site) const {
    Eigen::RowVectorXd p(1);
    p[0] = site[0];
    double inv = site[1];
    if (inv < levels_.front() || inv > levels_.back()) {
        clamped_ = true;
        inv = std::clamp(inv, levels_.front(), levels_.back());
    }
    const auto it = std::lower_bound(levels_.begin(), levels_.end(), inv);
    const auto j = static_cast<std::size_t>(it - levels_.begin());
    if (it != levels_.end() && *it == inv) return fits_[j]->predict(p);
    const double delta = (inv - levels_[j - 1]) / (levels_[j] - levels_[j - 1]);
    return (1.0 - delta) * fits_[j - 1]->predict(p) + delta * fits_[j]->predict(p);
}

nlohmann::json PiecewiseSurrogate::to_json() const {
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& f : fits_) fits.push_back(f->to_json());
    return {{"kind", "piecewise-1d"}, {"levels", levels_}, {"fits", std::move(fits)}};
}

std::unique_ptr<PiecewiseSurrogate> PiecewiseSurrogate::from_json(const nlohmann::json& j) {
    auto levels = j.at("levels").get<std::vector<double>>();
    std::vector<std::unique_ptr<Surrogate>> fits;
    for (const auto& f : j.at("fits")) fits.push_back(surrogate_from_json(f));
    return std::make_unique<PiecewiseSurrogate>(std::move(levels), std::move(fits));
}

std::unique_ptr<PiecewiseSurrogate> fit_piecewise_1d(const std::vector<Dataset>& datasets,
                                                     int degree, std::vector<double> levels) {
    if (datasets.size() != levels.size())
        throw std::invalid_argument("fit_piecewise_1d: dataset/level count mismatch");
    std::vector<std::unique_ptr<Surrogate>> fits;
    for (std::size_t j = 0; j < datasets.size(); ++j) {
        if (datasets[j].n() == 0)
            throw std::invalid_argument("fit_piecewise_1d: empty dataset at level index " +
                                        std::to_string(j));
        fits.push_back(fit_poly(datasets[j], degree));
    }
    return std::make_unique<PiecewiseSurrogate>(std::move(levels), std::move(fits));
}

}  // namespace stor
