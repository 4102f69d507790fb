#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "casimir_pulse/eigensolve.hpp"
#include "casimir_pulse/errors.hpp"
#include "casimir_pulse/model.hpp"
#include "casimir_pulse/parallel.hpp"
#include "casimir_pulse/summation.hpp"

namespace casimir_pulse {

// Sign convention: A_j = +sqrt(A2_j) everywhere.
inline double overlap_coefficient(const EigenTable& eigen, std::size_t j, std::size_t n) {
    const double Z = eigen.root(j);
    const double numerator = 2.0 * eigen.chi * eigen.amplitude(j);
    if (n == 0) {
        return std::numbers::sqrt2 * eigen.chi * eigen.amplitude(j) / (Z * Z);
    }
    const double npi = static_cast<double>(n) * std::numbers::pi;
    return numerator / (eigen.root_minus_multiple(j, n) * (Z + npi));
}

// Y_{j,0} and Y_{j,n}, n = 1..n_max. Column n holds all j contiguously.
struct OverlapTable {
    EigenTablePtr eigen;
    std::size_t n_max = 0;
    std::vector<double> Y0;
    std::vector<double> Y;

    [[nodiscard]] std::size_t j_max() const { return eigen->j_max; }

    // All j for fixed n; n = 0 is the topological column.
    [[nodiscard]] std::span<const double> column(std::size_t n) const {
        if (n == 0) {
            return Y0;
        }
        if (n > n_max) {
            throw std::out_of_range("overlap column n exceeds n_max");
        }
        return std::span<const double>(Y).subspan((n - 1) * j_max(), j_max());
    }

    [[nodiscard]] double at(std::size_t j, std::size_t n) const {
        if (j < 1 || j > j_max()) {
            throw std::out_of_range("mode index j outside table");
        }
        return column(n)[j - 1];
    }
};

inline void require_consistent(const EigenTable& eigen, const ModelConfig& config) {
    if (std::abs(eigen.chi - config.chi()) > 1e-14 * config.chi()) {
        throw DomainError("eigen table chi does not match the model configuration");
    }
}

inline OverlapTable build_overlaps(EigenTablePtr eigen, const ModelConfig& config, std::size_t n_max,
                                   unsigned threads = 1) {
    require_consistent(*eigen, config);
    OverlapTable table;
    table.eigen = eigen;
    table.n_max = n_max;
    const std::size_t J = eigen->j_max;
    table.Y0.resize(J);
    table.Y.resize(n_max * J);
    for (std::size_t j = 1; j <= J; ++j) {
        table.Y0[j - 1] = overlap_coefficient(*eigen, j, 0);
    }
    parallel_for(n_max, threads, [&](std::size_t row) {
        for (std::size_t j = 1; j <= J; ++j) {
            table.Y[row * J + (j - 1)] = overlap_coefficient(*eigen, j, row + 1);
        }
    });
    return table;
}

// max over m, n <= max_index of |sum_j Y_{j,m} Y_{j,n} - delta_mn|.
inline double orthogonality_residual(const OverlapTable& table, std::size_t max_index) {
    max_index = std::min(max_index, table.n_max);
    double worst = 0.0;
    for (std::size_t m = 0; m <= max_index; ++m) {
        for (std::size_t n = m; n <= max_index; ++n) {
            const auto a = table.column(m);
            const auto b = table.column(n);
            CompensatedSum<> sum;
            for (std::size_t i = 0; i < a.size(); ++i) {
                sum += a[i] * b[i];
            }
            worst = std::max(worst, std::abs(sum.value() - (m == n ? 1.0 : 0.0)));
        }
    }
    return worst;
}

struct ModeValue {
    double re = 0.0;
    double im = 0.0;

    [[nodiscard]] double abs() const { return std::hypot(re, im); }
    friend ModeValue operator-(ModeValue a, ModeValue b) { return {a.re - b.re, a.im - b.im}; }
};

struct OutModeValue {
    ModeValue value;
    // Within 1e-3 L of a null line through the potential's former location;
    // the partial Fourier sum converges slowly there.
    bool near_light_cone = false;
};

// Spatial IN even eigenfunction sqrt(2/L) A_j [cos(kappa x) + (xi/kappa) sin(kappa |x|)].
inline double in_even_profile(std::size_t j, double x, const EigenTable& eigen, const ModelConfig& config) {
    const double L = config.L();
    const double Z = eigen.root(j);
    const double kappa = 2.0 * Z / L;
    const double ax = std::abs(x);
    return std::sqrt(2.0 / L) * eigen.amplitude(j) *
           (std::cos(kappa * x) + (eigen.chi / Z) * std::sin(kappa * ax));
}

namespace detail {

inline void require_on_circle(double x, double L) {
    if (!(std::abs(x) <= L / 2.0)) {
        throw DomainError("x must lie in [-L/2, L/2]");
    }
}

inline double distance_to_multiple(double u, double L) {
    return std::abs(u - L * std::round(u / L));
}

} // namespace detail

// (2 kappa_j)^{-1/2} u_even(j, x) e^{-i kappa_j t}. The IN form holds for t <= |x|.
inline ModeValue eval_in_even(std::size_t j, double x, double t, const EigenTable& eigen,
                              const ModelConfig& config) {
    require_consistent(eigen, config);
    detail::require_on_circle(x, config.L());
    if (t > std::abs(x)) {
        throw DomainError("IN mode form is not valid for t > |x|");
    }
    const double kappa = 2.0 * eigen.root(j) / config.L();
    const double amplitude = in_even_profile(j, x, eigen, config) / std::sqrt(2.0 * kappa);
    return {amplitude * std::cos(kappa * t), -amplitude * std::sin(kappa * t)};
}

// Partial sum over n = 0..n_max of c_n psi_even(n) + d_n conj(psi_even(n)),
// with the topological term c_0 psi_top + d_0 conj(psi_top). Holds for t >= -|x|.
inline OutModeValue eval_out_even(std::size_t j, double x, double t, const EigenTable& eigen,
                                  const ModelConfig& config, std::size_t n_max) {
    require_consistent(eigen, config);
    const double L = config.L();
    const double ell = config.ell();
    detail::require_on_circle(x, L);
    if (t < -std::abs(x)) {
        throw DomainError("OUT mode form is not valid for t < -|x|");
    }
    const double Z = eigen.root(j);
    const double kappa = 2.0 * Z / L;

    const double y0 = overlap_coefficient(eigen, j, 0);
    const double kl = kappa * ell;
    const double a = (1.0 + kl) * y0 / (2.0 * std::sqrt(kl));
    const double b = (1.0 - kl) * y0 / (2.0 * std::sqrt(kl));
    // psi_top = sqrt(ell / 2L) (1 - i t / ell)
    const double top = std::sqrt(ell / (2.0 * L));
    CompensatedSum<> re;
    CompensatedSum<> im;
    re += (a + b) * top;
    im += -(a - b) * top * t / ell;

    for (std::size_t n = 1; n <= n_max; ++n) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(n) / L;
        const double y = overlap_coefficient(eigen, j, n);
        const double scale = 0.5 * std::sqrt(k / kappa);
        const double c = scale * (1.0 + kappa / k) * y;
        // 1 - kappa/k = (n pi - Z) / (n pi), exact near resonance
        const double d = scale * (-eigen.root_minus_multiple(j, n) / (static_cast<double>(n) * std::numbers::pi)) * y;
        const double psi = std::sqrt(2.0 / L) * std::cos(k * x) / std::sqrt(2.0 * k);
        re += (c + d) * psi * std::cos(k * t);
        im += -(c - d) * psi * std::sin(k * t);
    }

    const double cone = std::min(detail::distance_to_multiple(x - t, L), detail::distance_to_multiple(x + t, L));
    return {{re.value(), im.value()}, cone < 1e-3 * L};
}

// Odd mode (2 k_n)^{-1/2} sqrt(2/L) sin(k_n x) e^{-i k_n t}; the potential never couples to it,
// so the same form holds on both regions.
inline ModeValue eval_odd(std::size_t n, double x, double t, const ModelConfig& config) {
    if (n < 1) {
        throw DomainError("odd modes start at n = 1");
    }
    const double L = config.L();
    detail::require_on_circle(x, L);
    const double k = 2.0 * std::numbers::pi * static_cast<double>(n) / L;
    const double amplitude = std::sqrt(2.0 / L) * std::sin(k * x) / std::sqrt(2.0 * k);
    return {amplitude * std::cos(k * t), -amplitude * std::sin(k * t)};
}

// max |IN - OUT partial sum| over points of the bow-tie region -|x| < t < |x|, |x| <= L/2.
inline double check_bowtie_equivalence(std::size_t j, std::span<const std::pair<double, double>> points,
                                       const EigenTable& eigen, const ModelConfig& config, std::size_t n_max,
                                       unsigned threads = 1) {
    for (const auto& [x, t] : points) {
        if (!(std::abs(x) <= config.L() / 2.0) || !(-std::abs(x) < t && t < std::abs(x))) {
            throw DomainError("sample point lies outside the bow-tie region");
        }
    }
    std::vector<double> deviation(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        const auto [x, t] = points[i];
        const auto in = eval_in_even(j, x, t, eigen, config);
        const auto out = eval_out_even(j, x, t, eigen, config, n_max).value;
        deviation[i] = (in - out).abs();
    });
    return deviation.empty() ? 0.0 : *std::max_element(deviation.begin(), deviation.end());
}

} // namespace casimir_pulse
