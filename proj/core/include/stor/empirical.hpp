#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stor/rng.hpp"

namespace stor {

/// Per-time-step empirical distribution of the exogenous factor and,
/// when built from a pilot policy run, of the controlled inventory.
/// Sampling resamples pilot rows with replacement and adds uniform jitter
/// of half the mean inter-sample gap, so joint draws keep the pilot's
/// (exo, inventory) dependence.
class EmpiricalMarginal {
public:
    /// pilot_exo: n x (K+1); pilot_inv: zero or more n x (K+1) matrices,
    /// one per inventory coordinate. Requires n >= 100.
    static EmpiricalMarginal estimate(const Eigen::MatrixXd& pilot_exo,
                                      const std::vector<Eigen::MatrixXd>& pilot_inv = {});

    int steps() const { return static_cast<int>(exo_.cols()) - 1; }  ///< K
    int inv_dim() const { return static_cast<int>(inv_.size()); }
    int sample_count() const { return static_cast<int>(exo_.rows()); }

    /// Clip inventory draws (and stored samples on construction are expected
    /// to already satisfy these bounds).
    void set_inv_bounds(double lo, double hi);

    double sample_exo(int k, rng::Engine& eng) const;
    /// Joint draw: exogenous value at step k_exo and inventory coordinates at
    /// step k_inv, taken from one pilot row plus per-coordinate jitter.
    /// out must have room for 1 + inv_dim() values.
    void sample_joint(int k_exo, int k_inv, rng::Engine& eng, double* out) const;

    double exo_median(int k) const;
    double jitter_halfwidth_exo(int k) const { return exo_jitter_[k]; }

    /// (step, sample) CSV for one coordinate: -1 = exogenous, 0.. = inventory.
    void to_csv(std::ostream& os, int coord = -1) const;
    /// Rebuild an exogenous-only marginal from a (step, sample) CSV.
    static EmpiricalMarginal from_csv(std::istream& is);

private:
    EmpiricalMarginal() = default;
    void compute_jitter();

    Eigen::MatrixXd exo_;
    std::vector<Eigen::MatrixXd> inv_;
    std::vector<double> exo_jitter_;               // per step
    std::vector<std::vector<double>> inv_jitter_;  // per coord, per step
    std::optional<std::pair<double, double>> inv_bounds_;
};

}  // namespace stor
