#pragma once

// Bessel functions of the first kind, J_k(m), for integer order.
//
// A sinusoidal phase modulation exp(i m sin(Omega t)) spreads each comb line
// onto its neighbours with the Jacobi-Anger coefficients J_k(m), so these are
// the building blocks of every coupling matrix in comb_physics.hpp.
//
// Evaluation uses Miller's downward recurrence
//     J_{k-1}(x) = (2k / x) J_k(x) - J_{k+1}(x),
// started well above max(order, x) with arbitrary seeds and normalised with
// J_0 + 2 sum_{k>=1} J_{2k} = 1. The recurrence is stable downward for every
// order, and the start index below keeps the truncation error under 1e-13 on
// the supported range.

#include "combrc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace combrc {

inline constexpr int kMaxBesselOrder = 200;
inline constexpr double kMaxBesselArgument = 50.0;

namespace detail {

inline void check_bessel_domain(int order, double x)
{
    if (!(x >= 0.0 && x <= kMaxBesselArgument))
        throw DomainError("bessel_j: argument " + std::to_string(x) + " outside [0, 50]");
    if (std::abs(order) > kMaxBesselOrder)
        throw DomainError("bessel_j: |order| " + std::to_string(order) + " exceeds 200");
}

inline int miller_start(int max_order, double x)
{
    const double top = std::max(static_cast<double>(max_order), x);
    int start = static_cast<int>(top + 40.0 + std::sqrt(80.0 * std::max(top, 1.0)));
    return start + (start % 2);  // even, so the normalisation sum pairs up
}

}  // namespace detail

/// J_0(x) .. J_{max_order}(x) from a single downward sweep.
inline std::vector<double> bessel_j_table(int max_order, double x)
{
    detail::check_bessel_domain(max_order, x);
    if (max_order < 0)
        throw DomainError("bessel_j_table: max_order must be >= 0");

    std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }

    const int start = detail::miller_start(max_order, x);
    const double two_over_x = 2.0 / x;
    double next = 0.0;     // J_{k+1}
    double current = 1e-300;  // J_k, arbitrary seed
    double norm = 0.0;
    for (int k = start; k > 0; --k) {
        const double prev = k * two_over_x * current - next;  // J_{k-1}
        next = current;
        current = prev;
        if (std::abs(current) > 1e250) {
            // rescale everything accumulated so far
            constexpr double s = 1e-250;
            current *= s;
            next *= s;
            norm *= s;
            for (double& v : out)
                v *= s;
        }
        const int order = k - 1;
        if (order <= max_order)
            out[static_cast<std::size_t>(order)] = current;
        if (order > 0 && order % 2 == 0)
            norm += 2.0 * current;
    }
    norm += current;  // J_0

    for (double& v : out)
        v /= norm;
    return out;
}

/// J_order(x) for |order| <= 200 and 0 <= x <= 50. Negative orders use
/// J_{-k}(x) = (-1)^k J_k(x).
inline double bessel_j(int order, double x)
{
    detail::check_bessel_domain(order, x);
    const int k = std::abs(order);
    const double value = bessel_j_table(k, x)[static_cast<std::size_t>(k)];
    return (order < 0 && (k % 2) == 1) ? -value : value;
}

}  // namespace combrc
