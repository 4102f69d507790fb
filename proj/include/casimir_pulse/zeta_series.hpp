#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "casimir_pulse/eigensolve.hpp"
#include "casimir_pulse/errors.hpp"
#include "casimir_pulse/summation.hpp"

namespace casimir_pulse {

namespace detail {

// B_{2k} for k = 1..8, the asymptotic coefficients of psi1 through the y^{-17} term.
// At y = 10 the first omitted term is below 4e-14 of f(y).
inline constexpr std::array<double, 8> bernoulli_even{
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0,
};

inline constexpr double trigamma_shift = 10.0;

// sum_k B_{2k} / y^{2k+1}; equals psi1(y) - 1/y - 1/(2y^2) asymptotically.
inline double trigamma_asymptotic_tail(double y) {
    const double inv2 = 1.0 / (y * y);
    double power = 1.0 / (y * y * y);
    double sum = 0.0;
    for (double b : bernoulli_even) {
        sum += b * power;
        power *= inv2;
    }
    return sum;
}

} // namespace detail

// psi^(1)(y) by upward recurrence to y >= 10 followed by the asymptotic series.
inline double trigamma(double y) {
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw DomainError("trigamma requires a positive finite argument");
    }
    double shifted = 0.0;
    while (y < detail::trigamma_shift) {
        shifted += 1.0 / (y * y);
        y += 1.0;
    }
    return shifted + 1.0 / y + 0.5 / (y * y) + detail::trigamma_asymptotic_tail(y);
}

// f(y) = psi1(1+y) + 1/(2y^2) - 1/y, computed without cancellation through
// f(y) = f(y+1) + 1/(2 y^2 (y+1)^2); every summand is positive.
inline double trigamma_remainder(double y) {
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw DomainError("f(y) requires a positive finite argument");
    }
    double shifted = 0.0;
    while (y < detail::trigamma_shift) {
        const double q = y * (y + 1.0);
        shifted += 0.5 / (q * q);
        y += 1.0;
    }
    return shifted + detail::trigamma_asymptotic_tail(y);
}

enum class ConstantName { A, B, C, B_minus_C, F_p, inv_Zp };

inline std::string to_string(ConstantName name) {
    switch (name) {
    case ConstantName::A: return "A";
    case ConstantName::B: return "B";
    case ConstantName::C: return "C";
    case ConstantName::B_minus_C: return "B_minus_C";
    case ConstantName::F_p: return "F_p";
    case ConstantName::inv_Zp: return "inv_Zp";
    }
    return "unknown";
}

// A truncated spectral series with its error budget. tail_bound covers the omitted
// terms j > j_max; rounding_bound covers term evaluation and summation error.
struct SpectralConstant {
    ConstantName name = ConstantName::F_p;
    double order = 0.0; // p for F_p and inv_Zp
    double chi = 0.0;
    double value = 0.0;
    std::size_t j_max = 0;
    double tail_bound = 0.0;
    double rounding_bound = 0.0;
    // Closed form, or the series route when value is itself the closed form.
    std::optional<double> reference;

    [[nodiscard]] double error_bound() const { return tail_bound + rounding_bound; }
};

namespace detail {

inline void require_table(double chi, const EigenTable& eigen) {
    if (!(chi > 0.0)) {
        throw DomainError("chi must be positive");
    }
    if (std::abs(eigen.chi - chi) > 1e-14 * chi) {
        throw DomainError("eigen table chi does not match the requested chi");
    }
}

// Omitted j > J have Z_j >= (j-1)pi >= J pi.
inline double root_power_tail(double p, std::size_t J) {
    return zeta_tail_bound(p, static_cast<double>(J)) / std::pow(std::numbers::pi, p);
}

inline constexpr double term_error = 64.0 * unit_roundoff;
inline constexpr double trigamma_term_error = 1e-12;

} // namespace detail

// F_p = chi^2 sum_j A_j^2 / Z_j^p.
inline SpectralConstant F_p(double chi, double p, const EigenTable& eigen) {
    detail::require_table(chi, eigen);
    if (!(p > 1.0)) {
        throw DomainError("F_p requires p > 1");
    }
    CompensatedSum<> sum;
    for (std::size_t i = 0; i < eigen.j_max; ++i) {
        sum += eigen.A2[i] / std::pow(eigen.Z[i], p);
    }
    SpectralConstant out;
    out.name = ConstantName::F_p;
    out.order = p;
    out.chi = chi;
    out.value = chi * chi * sum.value();
    out.j_max = eigen.j_max;
    out.tail_bound = chi * chi * detail::root_power_tail(p, eigen.j_max);
    out.rounding_bound = chi * chi * detail::term_error * sum.magnitude();
    if (p == 2.0) {
        out.reference = chi / 2.0;
    } else if (p == 4.0) {
        out.reference = 0.5;
    } else if (p == 6.0) {
        out.reference = 0.5 * (1.0 / chi + 1.0 / 3.0);
    }
    return out;
}

// sum_j 1 / Z_j^p.
inline SpectralConstant inverse_power_sum(double chi, double p, const EigenTable& eigen) {
    detail::require_table(chi, eigen);
    if (!(p > 1.0)) {
        throw DomainError("inverse power sums require p > 1");
    }
    CompensatedSum<> sum;
    for (double Z : eigen.Z) {
        sum += std::pow(Z, -p);
    }
    SpectralConstant out;
    out.name = ConstantName::inv_Zp;
    out.order = p;
    out.chi = chi;
    out.value = sum.value();
    out.j_max = eigen.j_max;
    out.tail_bound = detail::root_power_tail(p, eigen.j_max);
    out.rounding_bound = detail::term_error * sum.magnitude();
    if (p == 2.0) {
        out.reference = 0.5 + 1.0 / chi;
    } else if (p == 4.0) {
        out.reference = (1.0 + 4.0 / chi + 6.0 / (chi * chi)) / 6.0;
    }
    return out;
}

struct InversePowerSums {
    SpectralConstant sum2;
    SpectralConstant sum4;
};

inline InversePowerSums inverse_power_sums(double chi, const EigenTable& eigen) {
    return {inverse_power_sum(chi, 2.0, eigen), inverse_power_sum(chi, 4.0, eigen)};
}

// value = chi/pi; reference = (2 chi^2 / pi) sum_j A_j^2 / Z_j^2 with tail bound.
inline SpectralConstant constant_C(double chi, const EigenTable& eigen) {
    const auto f2 = F_p(chi, 2.0, eigen);
    SpectralConstant out;
    out.name = ConstantName::C;
    out.chi = chi;
    out.value = chi / std::numbers::pi;
    out.j_max = eigen.j_max;
    out.reference = 2.0 / std::numbers::pi * f2.value;
    out.tail_bound = 2.0 / std::numbers::pi * f2.tail_bound;
    out.rounding_bound = 2.0 / std::numbers::pi * f2.rounding_bound;
    return out;
}

// B = (2 chi^2 / pi^2) sum_j (A_j^2 / Z_j) [psi1(1 + Z_j/pi) + pi^2 / (2 Z_j^2)].
inline SpectralConstant constant_B(double chi, const EigenTable& eigen) {
    detail::require_table(chi, eigen);
    constexpr double pi = std::numbers::pi;
    CompensatedSum<> sum;
    for (std::size_t i = 0; i < eigen.j_max; ++i) {
        const double Z = eigen.Z[i];
        sum += eigen.A2[i] / Z * (trigamma(1.0 + Z / pi) + pi * pi / (2.0 * Z * Z));
    }
    const double prefactor = 2.0 * chi * chi / (pi * pi);
    const double J = static_cast<double>(eigen.j_max);
    SpectralConstant out;
    out.name = ConstantName::B;
    out.chi = chi;
    out.value = prefactor * sum.value();
    out.j_max = eigen.j_max;
    // A^2 <= 1 and psi1(1+y) <= 1/y bound each omitted term by (2chi^2/pi^3)(1/m^2 + 1/(2m^3)).
    out.tail_bound = 2.0 * chi * chi / (pi * pi * pi) * (zeta_tail_bound(2.0, J) + 0.5 * zeta_tail_bound(3.0, J));
    out.rounding_bound = prefactor * detail::trigamma_term_error * sum.magnitude();
    return out;
}

// B - C = (2 chi^2 / pi^2) sum_j (A_j^2 / Z_j) f(Z_j / pi), every term nonnegative.
inline SpectralConstant constant_B_minus_C(double chi, const EigenTable& eigen) {
    detail::require_table(chi, eigen);
    constexpr double pi = std::numbers::pi;
    CompensatedSum<> sum;
    for (std::size_t i = 0; i < eigen.j_max; ++i) {
        const double Z = eigen.Z[i];
        sum += eigen.A2[i] / Z * trigamma_remainder(Z / pi);
    }
    const double prefactor = 2.0 * chi * chi / (pi * pi);
    SpectralConstant out;
    out.name = ConstantName::B_minus_C;
    out.chi = chi;
    out.value = prefactor * sum.value();
    out.j_max = eigen.j_max;
    // f(y) <= 1/(6y^3) bounds each omitted term by chi^2 / (3 pi^3 m^4).
    out.tail_bound = chi * chi / (3.0 * pi * pi * pi) * zeta_tail_bound(4.0, static_cast<double>(eigen.j_max));
    out.rounding_bound = prefactor * detail::term_error * sum.magnitude();
    return out;
}

// Individual terms (2 chi^2 / pi^2)(A_j^2 / Z_j) f(Z_j / pi) for j = 1..count.
inline std::vector<double> b_minus_c_terms(double chi, const EigenTable& eigen, std::size_t count) {
    detail::require_table(chi, eigen);
    count = std::min(count, eigen.j_max);
    const double prefactor = 2.0 * chi * chi / (std::numbers::pi * std::numbers::pi);
    std::vector<double> terms(count);
    for (std::size_t i = 0; i < count; ++i) {
        terms[i] = prefactor * eigen.A2[i] / eigen.Z[i] * trigamma_remainder(eigen.Z[i] / std::numbers::pi);
    }
    return terms;
}

namespace detail {

// e - tan e; the series branch avoids cancellation for small offsets.
inline double offset_minus_tan(double e) {
    if (e < 1e-2) {
        const double e2 = e * e;
        return -e * e2 *
               (1.0 / 3.0 + e2 * (2.0 / 15.0 + e2 * (17.0 / 315.0 + e2 * (62.0 / 2835.0 + e2 * 1382.0 / 155925.0))));
    }
    return e - std::tan(e);
}

} // namespace detail

struct ConstantA {
    SpectralConstant constant;
    double offset_sum = 0.0; // sum_j (eps_j - tan eps_j), always negative
    double f3 = 0.0;
    // Bracket for the infinite series from the tail control; value lies between them.
    double lower = 0.0;
    double upper = 0.0;
};

// A = sum_j (eps_j - tan eps_j) + (chi + 1) F_3, over the first `terms` roots (all when 0).
inline ConstantA constant_A(double chi, const EigenTable& eigen, std::size_t terms = 0) {
    detail::require_table(chi, eigen);
    constexpr double pi = std::numbers::pi;
    const std::size_t J = (terms == 0) ? eigen.j_max : std::min(terms, eigen.j_max);
    CompensatedSum<> offsets;
    CompensatedSum<> f3;
    for (std::size_t i = 0; i < J; ++i) {
        offsets += detail::offset_minus_tan(eigen.eps[i]);
        f3 += eigen.A2[i] / (eigen.Z[i] * eigen.Z[i] * eigen.Z[i]);
    }
    const double Jd = static_cast<double>(J);
    const double zeta3_tail = zeta_tail_bound(3.0, Jd);
    ConstantA out;
    out.offset_sum = offsets.value();
    out.f3 = chi * chi * f3.value();
    const double partial = out.offset_sum + (chi + 1.0) * out.f3;
    // For j > J, eps_j < chi/((j-1)pi); once that is below 1, tan e - e <= (tan 1 - 1) e^3.
    const double offset_low = (chi / (Jd * pi) < 1.0)
                                  ? (1.0 - std::tan(1.0)) * std::pow(chi / pi, 3.0) * zeta3_tail
                                  : -std::numeric_limits<double>::infinity();
    const double f3_high = (chi + 1.0) * chi * chi * zeta3_tail / (pi * pi * pi);
    const double rounding = detail::term_error * (offsets.magnitude() + (chi + 1.0) * chi * chi * f3.magnitude());
    out.lower = partial + offset_low - rounding;
    out.upper = partial + f3_high + rounding;

    out.constant.name = ConstantName::A;
    out.constant.chi = chi;
    out.constant.value = partial;
    out.constant.j_max = J;
    out.constant.tail_bound = std::max(-offset_low, f3_high);
    out.constant.rounding_bound = rounding;
    return out;
}

struct HyperbolaFit {
    double b = 0.0;
    double rms_residual = 0.0;
};

// Least-squares b in B ~ sqrt(chi (chi - 2b)) / pi, restricted to b in [0, min(chi)/2].
inline HyperbolaFit fit_hyperbola(std::span<const double> chis, std::span<const double> values) {
    if (chis.size() != values.size() || chis.empty()) {
        throw DomainError("hyperbola fit needs matching nonempty samples");
    }
    double upper = chis[0];
    for (double c : chis) {
        upper = std::min(upper, c);
    }
    upper *= 0.5;
    const auto cost = [&](double b) {
        double s = 0.0;
        for (std::size_t i = 0; i < chis.size(); ++i) {
            const double model = std::sqrt(std::max(0.0, chis[i] * (chis[i] - 2.0 * b))) / std::numbers::pi;
            s += (values[i] - model) * (values[i] - model);
        }
        return s;
    };
    const auto [b, best] = boost::math::tools::brent_find_minima(cost, 0.0, upper, 40);
    return {b, std::sqrt(best / static_cast<double>(chis.size()))};
}

} // namespace casimir_pulse
