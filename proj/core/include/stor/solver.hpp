#pragma once

#include <optional>
#include <vector>

#include "stor/design.hpp"
#include "stor/problem.hpp"
#include "stor/regress.hpp"

namespace stor {

struct FitDiagnostics {
    double rmse = 0.0;  ///< in-sample residual RMSE on pre-averaged responses
    std::optional<double> gp_loglik;
    std::optional<double> gp_mean_sd;  ///< mean posterior sd over design sites
};

/// Everything fitted at one backward step: the per-regime continuation
/// surrogates q(k, P, I_next, m) plus fit diagnostics.
struct StepArtifacts {
    int k = 0;
    bool shared = false;  ///< single surrogate covers all regimes
    std::vector<std::unique_ptr<Surrogate>> q;
    std::vector<FitDiagnostics> diagnostics;
    std::optional<Design> design;  ///< retained only when requested
};

/// The solved policy: step artifacts for k = 0..K-1, tied to the problem
/// by its parameter hash.
class PolicyStore {
public:
    PolicyStore(std::uint64_t problem_hash, TimeGrid grid, int num_regimes);

    void set_step(StepArtifacts a);
    const StepArtifacts& step(int k) const;
    /// Continuation surrogate for holding regime m at step k.
    const Surrogate& q(int k, int regime) const;

    int num_steps() const { return static_cast<int>(steps_.size()); }
    bool complete() const;
    std::uint64_t problem_hash() const { return problem_hash_; }
    const TimeGrid& grid() const { return grid_; }
    int num_regimes() const { return num_regimes_; }

private:
    std::uint64_t problem_hash_;
    TimeGrid grid_;
    int num_regimes_;
    std::vector<StepArtifacts> steps_;  ///< indexed by k
};

/// Remark-3 reduction: all-zero switching costs collapse the per-regime
/// regressions into one.
bool use_shared_regression(const Problem& problem);

/// Best next regime and the resulting one-step value
///   max_j pi(P, I, j) - K(m, j) + e^{-r dt} q(k, P, I_next(j), j)
/// over admissible j. Ties prefer the incumbent regime, then the idle
/// regime, then the lowest index.
std::pair<int, double> regime_argmax(const Problem& problem, const PolicyStore& policy, int k,
                                     const StateSample& s);

/// Batched regime optimization over rows sharing one incumbent regime.
/// states row i is (exo, inventory...); returns the per-row best value and,
/// when best_regime is non-null, the per-row argmax.
Eigen::VectorXd batch_step_values(const Problem& problem, const PolicyStore& policy, int k,
                                  const Eigen::MatrixXd& states, int current_regime,
                                  std::vector<int>* best_regime);

struct SolveOptions {
    std::uint64_t seed = 1;
    int threads = 1;
    bool force_split = false;   ///< ignore the Remark-3 reduction
    bool keep_designs = false;  ///< retain design sites in the artifacts
};

struct SolveReport {
    std::uint64_t one_step_sims = 0;  ///< counted price transitions
    std::vector<double> step_rmse;    ///< first-regime fit RMSE per step
};

/// Backward induction over k = K-1..0. The schedule must provide a plan
/// for every step; conventional designs additionally need pilot paths and
/// probabilistic kinds need pilot marginals.
PolicyStore backward_solve(const Problem& problem, const TimeGrid& grid,
                           const BudgetSchedule& schedule, const SolveOptions& opts = {},
                           const Eigen::MatrixXd* pilot_paths = nullptr,
                           const EmpiricalMarginal* marginals = nullptr,
                           SolveReport* report = nullptr);

}  // namespace stor
