#include "stor/gas_storage.hpp"

#include <cmath>
#include <stdexcept>

#include "stor/common.hpp"

namespace stor {

void GasStorageSpec::validate() const {
    if (!(i_max > 0.0) || !(k1 > 0.0) || !(k2 > 0.0) || !(k3 > 0.0) || !(k4 > k3))
        throw std::invalid_argument("GasStorageSpec: invalid rate constants");
    if (k3 + i_max > k4 + 1e-9)
        throw std::invalid_argument("GasStorageSpec: requires k3 + I_max <= k4 (injection vanishes at capacity)");
}

std::pair<double, double> gas_rates(const GasStorageSpec& spec, double inventory) {
    if (!(inventory >= 0.0) || !(inventory <= spec.i_max))
        throw std::invalid_argument("gas_rates: inventory outside [0, I_max]");
    const double wdr = -spec.k1 * std::sqrt(inventory);
    const double arg = 1.0 / (inventory + spec.k3) - 1.0 / spec.k4;
    const double inj = spec.k2 * std::sqrt(arg > 0.0 ? arg : 0.0);
    return {wdr, inj};
}

GasStorageProblem::GasStorageProblem(GasStorageSpec spec, ExoProcessSpec process, TimeGrid grid,
                                     Eigen::MatrixXd switching_cost, double i0)
    : spec_(spec), process_(process), grid_(grid), i0_(i0) {
    spec_.validate();
    process_.validate();
    if (switching_cost.rows() != 3) throw std::invalid_argument("gas switching cost matrix must be 3x3");
    set_switching_cost(std::move(switching_cost));
}

std::string GasStorageProblem::regime_name(int idx) const {
    switch (idx) {
        case kWithdraw: return "-1";
        case kStore: return "0";
        case kInject: return "+1";
        default: throw std::invalid_argument("gas: bad regime index");
    }
}

StepResult GasStorageProblem::apply_regime(const StateSample& s, int next_regime, double dt) const {
    const double inv = s.inv[0];
    const auto [wdr, inj] = gas_rates(spec_, inv);
    StepResult out;
    switch (next_regime) {
        case kWithdraw:
            out.control = wdr;
            out.next_inv[0] = inv + wdr * dt;
            out.profit = -s.exo * spec_.price_multiplier * wdr * dt;  // sold volume
            break;
        case kStore:
            out.control = 0.0;
            out.next_inv[0] = inv;
            out.profit = 0.0;
            break;
        case kInject:
            // Pays for the gross rate; inventory only gains the net of the loss k5.
            out.control = inj - spec_.k5;
            out.next_inv[0] = inv + (inj - spec_.k5) * dt;
            out.profit = -s.exo * spec_.price_multiplier * inj * dt;
            break;
        default:
            throw std::invalid_argument("gas: bad regime index");
    }
    return out;
}

std::uint16_t GasStorageProblem::admissible_mask(const StateSample& s, double dt) const {
    const double inv = s.inv[0];
    const auto [wdr, inj] = gas_rates(spec_, inv);
    std::uint16_t mask = 1u << kStore;
    if (inv + wdr * dt >= 0.0) mask |= 1u << kWithdraw;
    const double net = inj - spec_.k5;
    if (net > 0.0 && inv + net * dt <= spec_.i_max) mask |= 1u << kInject;
    return mask;
}

double GasStorageProblem::terminal_payoff(double exo, const InvVec& inv) const {
    const double shortfall = spec_.penalty_target - inv[0];
    return shortfall > 0.0 ? -spec_.penalty_slope * exo * spec_.price_multiplier * shortfall : 0.0;
}

std::uint64_t GasStorageProblem::hash() const {
    std::uint64_t h = fnv1a(name());
    h = fnv1a_values({spec_.k1, spec_.k2, spec_.k3, spec_.k4, spec_.k5, spec_.i_max,
                      spec_.price_multiplier, spec_.penalty_target, spec_.penalty_slope},
                     h);
    h = fnv1a_values({static_cast<double>(process_.kind), process_.alpha, process_.mean_level,
                      process_.sigma, process_.x0},
                     h);
    h = fnv1a_values({grid_.T, static_cast<double>(grid_.K), grid_.r, i0_}, h);
    const auto& k = switch_cost_;
    h = fnv1a(k.data(), sizeof(double) * k.size(), h);
    return h;
}

TwoCavernProblem::TwoCavernProblem(GasStorageSpec spec, ExoProcessSpec process, TimeGrid grid, double i0)
    : single_(spec, process, grid, Eigen::MatrixXd::Zero(3, 3), i0),
      spec_(spec),
      process_(process),
      grid_(grid),
      i0_(i0) {
    set_switching_cost(Eigen::MatrixXd::Zero(9, 9));
}

std::string TwoCavernProblem::regime_name(int idx) const {
    if (idx < 0 || idx >= 9) throw std::invalid_argument("two-cavern: bad regime index");
    return "(" + single_.regime_name(idx / 3) + "," + single_.regime_name(idx % 3) + ")";
}

StepResult TwoCavernProblem::apply_regime(const StateSample& s, int next_regime, double dt) const {
    if (next_regime < 0 || next_regime >= 9) throw std::invalid_argument("two-cavern: bad regime index");
    StepResult out;
    out.control = 0.0;
    out.profit = 0.0;
    const int parts[2] = {next_regime / 3, next_regime % 3};
    for (int c = 0; c < 2; ++c) {
        StateSample sub{s.exo, {s.inv[c], 0.0}, 0};
        const StepResult r = single_.apply_regime(sub, parts[c], dt);
        out.next_inv[c] = r.next_inv[0];
        out.profit += r.profit;
    }
    return out;
}

std::uint16_t TwoCavernProblem::admissible_mask(const StateSample& s, double dt) const {
    std::uint16_t per[2];
    for (int c = 0; c < 2; ++c) {
        StateSample sub{s.exo, {s.inv[c], 0.0}, 0};
        per[c] = single_.admissible_mask(sub, dt);
    }
    std::uint16_t mask = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if ((per[0] >> a & 1u) && (per[1] >> b & 1u)) mask |= 1u << (3 * a + b);
    return mask;
}

double TwoCavernProblem::terminal_payoff(double exo, const InvVec& inv) const {
    return single_.terminal_payoff(exo, {inv[0], 0.0}) + single_.terminal_payoff(exo, {inv[1], 0.0});
}

std::uint64_t TwoCavernProblem::hash() const { return fnv1a(name(), single_.hash()); }

}  // namespace stor
