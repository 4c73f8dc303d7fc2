#pragma once

#include <optional>
#include <string>

#include "stor/solver.hpp"

namespace stor {

/// Hash tying a scenario database to the process and grid it was built for.
std::uint64_t scenario_hash(const ExoProcessSpec& spec, const TimeGrid& grid);

/// A frozen set of out-of-sample exogenous paths. Paths are addressed by a
/// counter generator, so the database can stay lazy (regenerated in blocks
/// on demand) or be materialized to a binary file; both forms produce
/// identical values.
class ScenarioDB {
public:
    ScenarioDB(ExoProcessSpec spec, TimeGrid grid, Eigen::Index n_paths, std::uint64_t seed);

    Eigen::Index n_paths() const { return n_paths_; }
    const TimeGrid& grid() const { return grid_; }
    const ExoProcessSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t hash() const { return hash_; }

    /// Rows first..first+count-1 over steps 0..K.
    Eigen::MatrixXd block(Eigen::Index first, Eigen::Index count, int threads = 1) const;

    /// Binary columnar file: header manifest followed by path data.
    void save(const std::string& path, int threads = 1) const;
    static ScenarioDB load(const std::string& path);

private:
    ExoProcessSpec spec_;
    TimeGrid grid_;
    Eigen::Index n_paths_;
    std::uint64_t seed_;
    std::uint64_t hash_;
    std::optional<Eigen::MatrixXd> data_;  ///< present when loaded from disk
};

struct ValuationResult {
    double estimate = 0.0;   ///< mean discounted path value
    double std_error = 0.0;  ///< sample sd / sqrt(N')
    Eigen::VectorXd path_values;
    Eigen::VectorXi switch_counts;
    double mean_terminal_inventory = 0.0;
    double min_terminal_inventory = 0.0;
    double max_terminal_inventory = 0.0;
    Eigen::VectorXd terminal_inventory;  ///< first coordinate per path
    double stress_fraction = 0.0;        ///< flagged steps / total steps
};

struct ForwardOptions {
    Eigen::Index block = 20000;  ///< paths rolled forward per block
    int threads = 1;
    std::optional<StateSample> initial;  ///< defaults to the problem's
};

/// Roll every database path forward under the stored policy, accumulating
/// discounted step profits, switching costs, and the terminal payoff.
ValuationResult forward_value(const Problem& problem, const PolicyStore& policy,
                              const ScenarioDB& db, const ForwardOptions& opts = {});

/// Controlled inventory trajectories under the stored policy along the
/// given exogenous paths (n x K+1), one matrix per inventory coordinate.
/// Used to estimate the joint (exo, inventory) distribution for
/// probabilistic designs.
std::vector<Eigen::MatrixXd> forward_inventory_paths(const Problem& problem,
                                                     const PolicyStore& policy,
                                                     const Eigen::MatrixXd& paths,
                                                     std::optional<StateSample> initial = {});

/// Regime chosen at each probe point (rows: inventory grid, cols: price
/// grid) for incumbent regime m at step k.
Eigen::MatrixXi control_map(const Problem& problem, const PolicyStore& policy, int k,
                            const Eigen::VectorXd& exo_grid, const Eigen::VectorXd& inv_grid,
                            int regime);

/// Price thresholds bounding the no-action band, per step and inventory
/// level: b_inj(s, l) = sup of probe prices where inject is chosen,
/// b_wdr = inf where withdraw is chosen; NaN when the regime never appears.
struct BoundaryCurve {
    std::vector<int> steps;
    std::vector<double> levels;
    Eigen::MatrixXd b_inj;  ///< steps x levels
    Eigen::MatrixXd b_wdr;
};

BoundaryCurve extract_boundaries(const Problem& problem, const PolicyStore& policy,
                                 const std::vector<int>& steps, const std::vector<double>& levels,
                                 double exo_lo, double exo_hi, int n_probe, int inject_regime,
                                 int withdraw_regime, int incumbent_regime);

}  // namespace stor
