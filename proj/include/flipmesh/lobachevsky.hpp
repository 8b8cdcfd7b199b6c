#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace flipmesh {

namespace detail {

inline constexpr int kClausenTerms = 30;

// Coefficients c_k of Cl2(x) = x - x ln|x| + x * sum_k c_k (x / 2pi)^(2k), valid for |x| < 2pi.
// c_k = 2 zeta(2k) / (2k (2k + 1)), i.e. |B_2k| (2pi)^(2k) / (2k (2k+1)!).
inline const std::array<double, kClausenTerms + 1>& clausen_coefficients()
{
    static const std::array<double, kClausenTerms + 1> table = [] {
        using std::numbers::pi;
        std::array<double, kClausenTerms + 1> c{};
        const double pi2 = pi * pi;
        const std::array<double, 6> closed_form = {0.0,
                                                   pi2 / 6.0,
                                                   pi2 * pi2 / 90.0,
                                                   pi2 * pi2 * pi2 / 945.0,
                                                   pi2 * pi2 * pi2 * pi2 / 9450.0,
                                                   pi2 * pi2 * pi2 * pi2 * pi2 / 93555.0};
        for (int k = 1; k <= kClausenTerms; ++k) {
            double zeta = 0.0;
            if (k < static_cast<int>(closed_form.size())) {
                zeta = closed_form[static_cast<std::size_t>(k)];
            } else {
                // n^-12 and beyond: 40 terms leave a tail below 1e-19
                for (int n = 40; n >= 1; --n)
                    zeta += std::pow(static_cast<double>(n), -2.0 * k);
            }
            c[static_cast<std::size_t>(k)] = 2.0 * zeta / (2.0 * k * (2.0 * k + 1.0));
        }
        return c;
    }();
    return table;
}

/// Clausen function Cl2 on the reduced range |x| <= pi.
inline double clausen2_reduced(double x)
{
    if (x == 0.0)
        return 0.0;
    const auto& c = clausen_coefficients();
    const double q = (x / (2.0 * std::numbers::pi)) * (x / (2.0 * std::numbers::pi));
    double series = 0.0;
    for (int k = kClausenTerms; k >= 1; --k)
        series = q * (c[static_cast<std::size_t>(k)] + series);
    return x - x * std::log(std::abs(x)) + x * series;
}

} // namespace detail

/// Lobachevsky function  L(theta) = -integral_0^theta ln|2 sin t| dt.
///
/// Odd and pi-periodic. The argument is reduced to [-pi/2, pi/2] and evaluated through
/// L(theta) = Cl2(2 theta) / 2, whose power series converges geometrically (ratio <= 1/4)
/// on that range. Absolute error is at the level of a few ulps.
inline double lobachevsky(double theta)
{
    if (!std::isfinite(theta))
        return std::numeric_limits<double>::quiet_NaN();
    const double reduced = std::remainder(theta, std::numbers::pi);
    return 0.5 * detail::clausen2_reduced(2.0 * reduced);
}

} // namespace flipmesh
