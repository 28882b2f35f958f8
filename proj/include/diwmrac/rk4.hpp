#pragma once

// Classical fixed-step 4th-order Runge-Kutta over a flat state array.
// Fixed step keeps runs bit-reproducible and makes time a pure function
// of the step index; adaptive steppers would trade that away for speed
// the problem sizes here never need.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "diwmrac/errors.hpp"

namespace diwmrac {

template <std::size_t N>
using StateVector = std::array<double, N>;

/// One RK4 step of size h from (t, x). `deriv` is called as
/// deriv(t, state) -> StateVector<N> at the four classical stage points.
/// Throws SimulationError if any stage derivative is non-finite.
template <std::size_t N, typename Deriv>
StateVector<N> rk4_step(const Deriv& deriv, double t, const StateVector<N>& x, double h) {
    auto checked = [t](StateVector<N> d) {
        for (double v : d) {
            if (!std::isfinite(v))
                throw SimulationError("non-finite derivative at t = " + std::to_string(t));
        }
        return d;
    };

    const StateVector<N> k1 = checked(deriv(t, x));

    StateVector<N> mid = x;
    for (std::size_t i = 0; i < N; ++i) mid[i] = x[i] + 0.5 * h * k1[i];
    const StateVector<N> k2 = checked(deriv(t + 0.5 * h, mid));

    for (std::size_t i = 0; i < N; ++i) mid[i] = x[i] + 0.5 * h * k2[i];
    const StateVector<N> k3 = checked(deriv(t + 0.5 * h, mid));

    StateVector<N> end = x;
    for (std::size_t i = 0; i < N; ++i) end[i] = x[i] + h * k3[i];
    const StateVector<N> k4 = checked(deriv(t + h, end));

    StateVector<N> next = x;
    for (std::size_t i = 0; i < N; ++i)
        next[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return next;
}

} // namespace diwmrac
