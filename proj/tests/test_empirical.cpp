#include <doctest.h>

#include <sstream>

#include "stor/empirical.hpp"
#include "stor/process.hpp"

using namespace stor;

namespace {

ExoProcessSpec gas_spec() {
    ExoProcessSpec s;
    s.kind = ProcessKind::LogMeanReverting;
    s.alpha = 2.38;
    s.mean_level = 6.0;
    s.sigma = 0.59;
    s.x0 = 6.0;
    return s;
}

}  // namespace

TEST_CASE("degenerate pilot reproduces the constant") {
    const Eigen::MatrixXd pilot = Eigen::MatrixXd::Constant(150, 11, 6.0);
    const auto m = EmpiricalMarginal::estimate(pilot);
    rng::Engine eng(1);
    for (int i = 0; i < 50; ++i) CHECK(m.sample_exo(4, eng) == doctest::Approx(6.0));
    CHECK(m.exo_median(7) == doctest::Approx(6.0));
}

TEST_CASE("medians track a drifting deterministic pilot") {
    auto spec = gas_spec();
    spec.sigma = 0.0;
    spec.x0 = 3.0;  // below the long-run level, so the path climbs
    const TimeGrid grid(3.0, 20, 0.0);
    const auto paths = simulate_paths(spec, grid, 120, 5);
    const auto m = EmpiricalMarginal::estimate(paths);
    CHECK(m.steps() == 20);
    double prev = m.exo_median(0);
    CHECK(prev == doctest::Approx(3.0));
    for (int k = 1; k <= 20; ++k) {
        const double cur = m.exo_median(k);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("samples stay near the pilot support") {
    const auto paths = simulate_paths(gas_spec(), TimeGrid(3.0, 10, 0.0), 500, 42);
    const auto m = EmpiricalMarginal::estimate(paths);
    const double lo = paths.col(6).minCoeff(), hi = paths.col(6).maxCoeff();
    const double slack = 2.0 * m.jitter_halfwidth_exo(6);
    rng::Engine eng(9);
    for (int i = 0; i < 2000; ++i) {
        const double x = m.sample_exo(6, eng);
        CHECK(x >= lo - slack);
        CHECK(x <= hi + slack);
    }
}

TEST_CASE("joint draws respect the pilot dependence and the bounds") {
    const int n = 200, K = 6;
    Eigen::MatrixXd exo(n, K + 1), inv(n, K + 1);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= K; ++k) {
            exo(i, k) = 4.0 + 0.02 * i;
            inv(i, k) = 10.0 * i;  // inventory perfectly tied to the path index
        }
    auto m = EmpiricalMarginal::estimate(exo, {inv});
    m.set_inv_bounds(0.0, 2000.0);
    CHECK(m.inv_dim() == 1);
    rng::Engine eng(3);
    double out[2];
    for (int t = 0; t < 500; ++t) {
        m.sample_joint(2, 3, eng, out);
        CHECK(out[1] >= 0.0);
        CHECK(out[1] <= 2000.0);
        // invert the exo draw back to its pilot row; the inventory draw must
        // come from the same row, up to jitter
        const double row = (out[0] - 4.0) / 0.02;
        CHECK(std::abs(out[1] - 10.0 * row) < 30.0);
    }
}

TEST_CASE("small pilots are rejected") {
    CHECK_THROWS(EmpiricalMarginal::estimate(Eigen::MatrixXd::Constant(50, 5, 1.0)));
}

TEST_CASE("csv round trip rebuilds the exogenous marginal") {
    const auto paths = simulate_paths(gas_spec(), TimeGrid(1.0, 4, 0.0), 120, 8);
    const auto m = EmpiricalMarginal::estimate(paths);
    std::stringstream ss;
    m.to_csv(ss);
    const auto back = EmpiricalMarginal::from_csv(ss);
    CHECK(back.steps() == m.steps());
    CHECK(back.sample_count() == m.sample_count());
    for (int k = 0; k <= 4; ++k)
        CHECK(back.exo_median(k) == doctest::Approx(m.exo_median(k)).epsilon(1e-9));
}
