#pragma once

#include <cmath>
#include <stdexcept>

namespace stor {

/// Uniform time discretization of [0, T] with continuous discounting.
struct TimeGrid {
    double T = 0.0;   ///< horizon (years or hours)
    int K = 0;        ///< number of steps, >= 1
    double r = 0.0;   ///< continuous discount rate per unit time

    TimeGrid() = default;
    TimeGrid(double horizon, int steps, double rate) : T(horizon), K(steps), r(rate) {
        if (steps < 1 || !(horizon > 0.0)) throw std::invalid_argument("TimeGrid: need K >= 1 and T > 0");
        if (rate < 0.0) throw std::invalid_argument("TimeGrid: discount rate must be >= 0");
    }

    double dt() const { return T / K; }
    double time(int k) const { return k * dt(); }
    /// One-step discount factor e^{-r dt}.
    double step_discount() const { return std::exp(-r * dt()); }
    /// Discount factor from time 0 to step k.
    double discount_to(int k) const { return std::exp(-r * time(k)); }
};

}  // namespace stor
