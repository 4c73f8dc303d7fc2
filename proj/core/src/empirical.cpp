#include "stor/empirical.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stor {

namespace {

// Half the mean inter-sample gap of one column: (max - min) / (2 (n - 1)).
double half_mean_gap(const Eigen::VectorXd& col) {
    if (col.size() < 2) return 0.0;
    return (col.maxCoeff() - col.minCoeff()) / (2.0 * static_cast<double>(col.size() - 1));
}

}  // namespace

EmpiricalMarginal EmpiricalMarginal::estimate(const Eigen::MatrixXd& pilot_exo,
                                              const std::vector<Eigen::MatrixXd>& pilot_inv) {
    if (pilot_exo.rows() == 0) throw std::invalid_argument("EmpiricalMarginal: empty pilot set");
    if (pilot_exo.rows() < 100) throw std::invalid_argument("EmpiricalMarginal: need at least 100 pilot paths");
    for (const auto& m : pilot_inv) {
        if (m.rows() != pilot_exo.rows() || m.cols() != pilot_exo.cols())
            throw std::invalid_argument("EmpiricalMarginal: inventory pilot shape mismatch");
    }
    EmpiricalMarginal em;
    em.exo_ = pilot_exo;
    em.inv_ = pilot_inv;
    em.compute_jitter();
    return em;
}

void EmpiricalMarginal::compute_jitter() {
    const int cols = static_cast<int>(exo_.cols());
    exo_jitter_.resize(cols);
    for (int k = 0; k < cols; ++k) exo_jitter_[k] = half_mean_gap(exo_.col(k));
    inv_jitter_.resize(inv_.size());
    for (std::size_t d = 0; d < inv_.size(); ++d) {
        inv_jitter_[d].resize(cols);
        for (int k = 0; k < cols; ++k) inv_jitter_[d][k] = half_mean_gap(inv_[d].col(k));
    }
}

void EmpiricalMarginal::set_inv_bounds(double lo, double hi) { inv_bounds_ = {lo, hi}; }

double EmpiricalMarginal::sample_exo(int k, rng::Engine& eng) const {
    if (k < 0 || k >= static_cast<int>(exo_.cols())) throw std::invalid_argument("EmpiricalMarginal: step out of range");
    const auto row = static_cast<Eigen::Index>(eng.below(exo_.rows()));
    const double u = 2.0 * eng.uniform01() - 1.0;
    return exo_(row, k) + u * exo_jitter_[k];
}

void EmpiricalMarginal::sample_joint(int k_exo, int k_inv, rng::Engine& eng, double* out) const {
    if (k_exo < 0 || k_exo >= static_cast<int>(exo_.cols()) || k_inv < 0 || k_inv >= static_cast<int>(exo_.cols()))
        throw std::invalid_argument("EmpiricalMarginal: step out of range");
    const auto row = static_cast<Eigen::Index>(eng.below(exo_.rows()));
    {
        const double u = 2.0 * eng.uniform01() - 1.0;
        out[0] = exo_(row, k_exo) + u * exo_jitter_[k_exo];
    }
    for (std::size_t d = 0; d < inv_.size(); ++d) {
        const double u = 2.0 * eng.uniform01() - 1.0;
        double v = inv_[d](row, k_inv) + u * inv_jitter_[d][k_inv];
        if (inv_bounds_) v = std::clamp(v, inv_bounds_->first, inv_bounds_->second);
        out[1 + d] = v;
    }
}

double EmpiricalMarginal::exo_median(int k) const {
    std::vector<double> col(exo_.rows());
    for (Eigen::Index i = 0; i < exo_.rows(); ++i) col[i] = exo_(i, k);
    const std::size_t mid = col.size() / 2;
    std::nth_element(col.begin(), col.begin() + mid, col.end());
    return col[mid];
}

void EmpiricalMarginal::to_csv(std::ostream& os, int coord) const {
    os << "step,sample\n";
    const Eigen::MatrixXd& m = coord < 0 ? exo_ : inv_.at(coord);
    os.precision(17);
    for (int k = 0; k < static_cast<int>(m.cols()); ++k)
        for (Eigen::Index i = 0; i < m.rows(); ++i) os << k << "," << m(i, k) << "\n";
}

EmpiricalMarginal EmpiricalMarginal::from_csv(std::istream& is) {
    std::string line;
    std::getline(is, line);  // header
    std::map<int, std::vector<double>> by_step;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int k = 0;
        char comma = 0;
        double v = 0.0;
        if (!(ss >> k >> comma >> v)) throw std::invalid_argument("EmpiricalMarginal: bad CSV line: " + line);
        by_step[k].push_back(v);
    }
    if (by_step.empty()) throw std::invalid_argument("EmpiricalMarginal: empty CSV");
    const std::size_t n = by_step.begin()->second.size();
    Eigen::MatrixXd exo(n, by_step.size());
    int col = 0;
    for (auto& [k, vals] : by_step) {
        if (k != col || vals.size() != n) throw std::invalid_argument("EmpiricalMarginal: ragged CSV");
        for (std::size_t i = 0; i < n; ++i) exo(i, col) = vals[i];
        ++col;
    }
    return estimate(exo);
}

}  // namespace stor
