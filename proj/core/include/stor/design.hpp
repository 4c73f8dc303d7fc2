#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stor/empirical.hpp"

namespace stor {

enum class DesignKind {
    GridProduct,    ///< fixed grid in every coordinate
    Conventional,   ///< pilot price column x inventory level set
    Sobol,          ///< scrambled QMC over the bound box
    Lhs,            ///< Latin hypercube over the bound box
    Probabilistic,  ///< draws from the pilot empirical distribution
    Mixture,        ///< weighted union of component designs
    Adaptive1d,     ///< probabilistic in P crossed with a level table
    Explicit,       ///< caller-supplied site matrix
};

DesignKind design_kind_from_string(const std::string& s);
std::string to_string(DesignKind k);

/// Recipe for the design at one time step. Coordinate order is the
/// exogenous factor first, then inventory coordinates.
struct DesignSpec {
    DesignKind kind = DesignKind::Conventional;
    Eigen::VectorXd lo, hi;  ///< bound box (Sobol, LHS, GridProduct)
    Eigen::Index n_sites = 1;
    int n_reps = 1;
    std::vector<double> levels;  ///< inventory level table (-1D and conventional kinds)
    int inv_dim = 1;             ///< inventory coordinates the level set is crossed over
    std::vector<double> weights;
    std::vector<DesignSpec> components;  ///< mixture components, parallel to weights
    Eigen::MatrixXd sites;               ///< Explicit kind

    void validate(int dim) const;
};

/// Materialized design for one step: unique sites plus a uniform
/// replication count.
struct Design {
    Eigen::MatrixXd sites;  ///< N_s x d
    int n_reps = 1;
    int k = 0;

    Eigen::Index n_sites() const { return sites.rows(); }
    Eigen::Index budget() const { return sites.rows() * n_reps; }
};

/// Cartesian product of the k-th column of a pilot price path matrix with
/// an inventory level set (crossed over inv_dim inventory coordinates);
/// inventory varies fastest.
Design gen_conventional(const Eigen::MatrixXd& paths, int k, const std::vector<double>& levels,
                        int inv_dim = 1);

/// n joint draws from the pilot empirical distribution. k_exo / k_inv are
/// the marginal step indices for the exogenous and inventory coordinates.
Eigen::MatrixXd gen_probabilistic(const EmpiricalMarginal& marginals, int k_exo, int k_inv,
                                  Eigen::Index n, std::uint64_t seed);

/// Inventory level tables for the adaptive 1D designs: tiers "11", "21",
/// "31" are fixed tables; "uniform-n" is n equally spaced levels.
std::vector<double> adaptive_levels(const std::string& tier, double i_min = 0.0,
                                    double i_max = 2000.0);

/// Materialize the design at step k. pilot_paths feeds Conventional,
/// marginals feeds Probabilistic / Adaptive1d / mixture components.
Design generate_design(const DesignSpec& spec, int k, std::uint64_t seed,
                       const Eigen::MatrixXd* pilot_paths, const EmpiricalMarginal* marginals);

/// Per-component site counts for a mixture: floor(w_i * n) with the
/// remainder assigned to the first component.
std::vector<Eigen::Index> mixture_counts(const std::vector<double>& weights, Eigen::Index n);

/// How the continuation value is approximated at each step.
struct RegressionSpec {
    std::string method = "poly";  ///< poly | piecewise-poly | piecewise-gp | gp | loess
    int degree = 3;               ///< polynomial degree (global or per-level)
    double span = 0.25;           ///< loess
    int loess_degree = 2;
    int gp_restarts = 5;
    int gp_max_iter = 120;
    int gp_refit_interval = 1;    ///< re-estimate hyperparameters every n-th step
    double gp_noise_floor = 1e-4; ///< MLE lower bound on sn2, response-variance units
};

/// Per-step design/regression plan.
struct StepPlan {
    DesignSpec design;
    RegressionSpec regression;
};

/// Budget schedule: a plan for every step k = 0..K-1.
struct BudgetSchedule {
    std::vector<StepPlan> steps;

    const StepPlan& at(int k) const;
    int num_steps() const { return static_cast<int>(steps.size()); }

    /// Same plan at every step.
    static BudgetSchedule uniform(int num_steps, StepPlan plan);
    /// Threshold form: plan1 for k < threshold, plan2 for k >= threshold.
    static BudgetSchedule threshold(int num_steps, int threshold, StepPlan below, StepPlan above);
};

}  // namespace stor
