#include "stor/microgrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stor/common.hpp"

namespace stor {

void MicrogridSpec::validate() const {
    if (!(b_min < 0.0) || !(b_max > 0.0)) throw std::invalid_argument("MicrogridSpec: need B_min < 0 < B_max");
    if (!(c2 > c1)) throw std::invalid_argument("MicrogridSpec: need C2 > C1");
    if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("MicrogridSpec: need 0 < gamma <= 1");
    if (!(i_max > 0.0)) throw std::invalid_argument("MicrogridSpec: need I_max > 0");
    if (i0 < 0.0 || i0 > i_max) throw std::invalid_argument("MicrogridSpec: I0 outside [0, I_max]");
}

MicrogridProblem::MicrogridProblem(MicrogridSpec spec, ExoProcessSpec process, TimeGrid grid)
    : spec_(spec), process_(process), grid_(grid) {
    spec_.validate();
    process_.validate();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2, 2);
    k(kOff, kOn) = spec_.start_cost;
    set_switching_cost(std::move(k));
}

MicrogridProblem::Dispatch MicrogridProblem::dispatch(const StateSample& s, int next_regime, double dt) const {
    const double x = s.exo;
    const double inv = s.inv[0];
    const double headroom = (spec_.i_max - inv) / dt;
    Dispatch d;
    d.diesel = next_regime == kOn ? (x > 0.0 ? x : 0.0) + std::min(spec_.b_max, headroom) : 0.0;
    // Battery absorbs the surplus, subject to power and charge limits.
    double b = std::clamp(d.diesel - x, spec_.b_min, spec_.b_max);
    b = std::clamp(b, -inv / dt, headroom);
    d.battery = b;
    d.imbalance = d.diesel - x - b;
    return d;
}

StepResult MicrogridProblem::apply_regime(const StateSample& s, int next_regime, double dt) const {
    if (next_regime != kOff && next_regime != kOn) throw std::invalid_argument("microgrid: bad regime index");
    const Dispatch d = dispatch(s, next_regime, dt);
    StepResult out;
    out.control = d.battery;
    out.next_inv[0] = std::clamp(s.inv[0] + d.battery * dt, 0.0, spec_.i_max);
    const double s_pen = d.imbalance < 0.0 ? spec_.c2 : spec_.c1;
    // profit is a rate, so the per-step reward carries the dt factor
    // (switching costs and the terminal penalty are lump sums and do not)
    out.profit = (-std::pow(d.diesel, spec_.gamma) - std::abs(d.imbalance) * s_pen) * dt;
    return out;
}

double MicrogridProblem::terminal_payoff(double, const InvVec& inv) const {
    const double shortfall = spec_.i0 - inv[0];
    return shortfall > 0.0 ? -spec_.terminal_slope * shortfall : 0.0;
}

std::uint64_t MicrogridProblem::hash() const {
    std::uint64_t h = fnv1a(name());
    h = fnv1a_values({spec_.i_max, spec_.b_min, spec_.b_max, spec_.c1, spec_.c2, spec_.gamma,
                      spec_.start_cost, spec_.terminal_slope, spec_.i0},
                     h);
    h = fnv1a_values({static_cast<double>(process_.kind), process_.alpha, process_.mean_level,
                      process_.sigma, process_.x0},
                     h);
    h = fnv1a_values({grid_.T, static_cast<double>(grid_.K), grid_.r}, h);
    return h;
}

}  // namespace stor
