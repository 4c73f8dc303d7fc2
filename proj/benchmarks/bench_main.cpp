#include <benchmark/benchmark.h>

#include "stor/config.hpp"
#include "stor/gp.hpp"
#include "stor/poly.hpp"
#include "stor/sobol.hpp"

namespace {

stor::Dataset synthetic_2d(Eigen::Index n, std::uint64_t seed) {
    stor::Dataset d;
    d.x.resize(n, 2);
    d.y.resize(n);
    stor::rng::Engine eng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = 2.0 + 8.0 * eng.uniform01();
        const double inv = 2000.0 * eng.uniform01();
        d.x(i, 0) = p;
        d.x(i, 1) = inv;
        d.y[i] = 1e3 * (p - 6.0) * (1.0 - inv / 2000.0) + 50.0 * eng.uniform01();
    }
    return d;
}

void bm_poly_fit(benchmark::State& state) {
    const stor::Dataset d = synthetic_2d(state.range(0), 7);
    for (auto _ : state) {
        auto fit = stor::fit_poly(d, 3);
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(bm_poly_fit)->Arg(1000)->Arg(10000);

void bm_gp_fit(benchmark::State& state) {
    const stor::Dataset d = synthetic_2d(state.range(0), 7);
    stor::GPConfig cfg;
    cfg.restarts = 2;
    cfg.max_iter = 60;
    for (auto _ : state) {
        auto fit = stor::fit_gp(d, cfg);
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(bm_gp_fit)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void bm_gp_predict(benchmark::State& state) {
    const stor::Dataset d = synthetic_2d(500, 7);
    stor::GPConfig cfg;
    cfg.restarts = 1;
    cfg.max_iter = 40;
    const auto gp = stor::fit_gp(d, cfg);
    const stor::Dataset q = synthetic_2d(state.range(0), 8);
    for (auto _ : state) {
        const Eigen::VectorXd v = gp->predict_many(q.x);
        benchmark::DoNotOptimize(v.sum());
    }
}
BENCHMARK(bm_gp_predict)->Arg(10000)->Unit(benchmark::kMillisecond);

void bm_sobol(benchmark::State& state) {
    Eigen::VectorXd lo(2), hi(2);
    lo << 2.0, 0.0;
    hi << 10.0, 2000.0;
    for (auto _ : state) {
        const Eigen::MatrixXd s = stor::gen_sobol(2, state.range(0), lo, hi, 42);
        benchmark::DoNotOptimize(s.sum());
    }
}
BENCHMARK(bm_sobol)->Arg(1024)->Arg(16384);

void bm_backward_step(benchmark::State& state) {
    // one full solve over a short horizon; per-iteration cost ~ K steps
    auto e = stor::load_experiment({{"problem", "gas"},
                                   {"schedule", "conventional-pr1d-low"},
                                   {"grid", {{"horizon", 3.0}, {"steps", 25}}}});
    for (auto _ : state) {
        stor::SolveReport rep;
        auto policy = stor::solve_experiment(e, &rep);
        benchmark::DoNotOptimize(policy.num_steps());
    }
}
BENCHMARK(bm_backward_step)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
