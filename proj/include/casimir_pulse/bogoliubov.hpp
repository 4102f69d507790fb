#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "casimir_pulse/model.hpp"
#include "casimir_pulse/overlap.hpp"
#include "casimir_pulse/parallel.hpp"
#include "casimir_pulse/summation.hpp"

namespace casimir_pulse {

// Real Bogolubov coefficients alpha_{nj}, beta_{nj}; row n = 0 is the topological mode.
struct BogolubovTable {
    std::size_t n_max = 0;
    std::size_t j_max = 0;
    double ell = 0.0;
    std::vector<double> alpha;
    std::vector<double> beta;

    [[nodiscard]] std::span<const double> alpha_row(std::size_t n) const { return row(alpha, n); }
    [[nodiscard]] std::span<const double> beta_row(std::size_t n) const { return row(beta, n); }
    [[nodiscard]] double alpha_at(std::size_t n, std::size_t j) const { return alpha_row(n)[index(j)]; }
    [[nodiscard]] double beta_at(std::size_t n, std::size_t j) const { return beta_row(n)[index(j)]; }

private:
    [[nodiscard]] std::span<const double> row(const std::vector<double>& data, std::size_t n) const {
        if (n > n_max) {
            throw std::out_of_range("Bogolubov row n exceeds n_max");
        }
        return std::span<const double>(data).subspan(n * j_max, j_max);
    }
    [[nodiscard]] std::size_t index(std::size_t j) const {
        if (j < 1 || j > j_max) {
            throw std::out_of_range("mode index j outside table");
        }
        return j - 1;
    }
};

inline BogolubovTable build_bogolubov(const OverlapTable& overlaps, const ModelConfig& config,
                                      unsigned threads = 1) {
    const EigenTable& eigen = *overlaps.eigen;
    require_consistent(eigen, config);
    const double L = config.L();
    const double ell = config.ell();
    BogolubovTable table;
    table.n_max = overlaps.n_max;
    table.j_max = eigen.j_max;
    table.ell = ell;
    const std::size_t J = eigen.j_max;
    table.alpha.resize((table.n_max + 1) * J);
    table.beta.resize((table.n_max + 1) * J);

    parallel_for(table.n_max + 1, threads, [&](std::size_t n) {
        const auto y = overlaps.column(n);
        for (std::size_t j = 1; j <= J; ++j) {
            const double kappa = 2.0 * eigen.root(j) / L;
            double a = 0.0;
            double b = 0.0;
            if (n == 0) {
                const double kl = kappa * ell;
                a = (1.0 + kl) * y[j - 1] / (2.0 * std::sqrt(kl));
                b = (1.0 - kl) * y[j - 1] / (2.0 * std::sqrt(kl));
            } else {
                const double k = 2.0 * std::numbers::pi * static_cast<double>(n) / L;
                const double scale = 0.5 * std::sqrt(k / kappa) * y[j - 1];
                a = scale * (1.0 + kappa / k);
                b = scale * (-eigen.root_minus_multiple(j, n) / (static_cast<double>(n) * std::numbers::pi));
            }
            table.alpha[n * J + (j - 1)] = a;
            table.beta[n * J + (j - 1)] = -b;
        }
    });
    return table;
}

struct IdentityResiduals {
    // max |sum_j (alpha_m alpha_n - beta_m beta_n) - delta_mn|
    double first = 0.0;
    // max |sum_j (alpha_m beta_n - beta_m alpha_n)|
    double second = 0.0;
};

inline IdentityResiduals bogolubov_identity_residuals(const BogolubovTable& table, std::size_t max_index) {
    max_index = std::min(max_index, table.n_max);
    IdentityResiduals out;
    for (std::size_t m = 0; m <= max_index; ++m) {
        for (std::size_t n = m; n <= max_index; ++n) {
            const auto am = table.alpha_row(m);
            const auto bm = table.beta_row(m);
            const auto an = table.alpha_row(n);
            const auto bn = table.beta_row(n);
            CompensatedSum<> first;
            CompensatedSum<> second;
            for (std::size_t i = 0; i < table.j_max; ++i) {
                first += am[i] * an[i];
                first += -bm[i] * bn[i];
                second += am[i] * bn[i];
                second += -bm[i] * an[i];
            }
            out.first = std::max(out.first, std::abs(first.value() - (m == n ? 1.0 : 0.0)));
            out.second = std::max(out.second, std::abs(second.value()));
        }
    }
    return out;
}

struct CreationSpectrum {
    double N0 = 0.0;                // sum_j beta_{0j}^2
    std::vector<double> N;          // N[n-1] = sum_j beta_{nj}^2
    double total = 0.0;             // N0 + sum_n N_n over computed modes
    double N0_series = 0.0;         // -1/2 + (1/4) sum_j (1/(kappa ell) + kappa ell) Y_{j,0}^2
    std::vector<double> N_series;   // -1/2 + (1/4) sum_j (k/kappa + kappa/k) Y_{j,n}^2
    // Largest |sum beta^2 - series form|; equals max |sum_j Y^2 - 1| / 2 up to rounding.
    double route_difference = 0.0;
};

inline CreationSpectrum creation_spectrum(const BogolubovTable& bog, const OverlapTable& overlaps,
                                          const ModelConfig& config) {
    const EigenTable& eigen = *overlaps.eigen;
    require_consistent(eigen, config);
    const double L = config.L();
    const double ell = bog.ell;
    CreationSpectrum spec;
    spec.N.resize(bog.n_max);
    spec.N_series.resize(bog.n_max);

    for (std::size_t n = 0; n <= bog.n_max; ++n) {
        const auto beta = bog.beta_row(n);
        const auto y = overlaps.column(n);
        CompensatedSum<> direct;
        CompensatedSum<> series;
        for (std::size_t j = 1; j <= bog.j_max; ++j) {
            direct += beta[j - 1] * beta[j - 1];
            const double kappa = 2.0 * eigen.root(j) / L;
            double weight = 0.0;
            if (n == 0) {
                weight = 1.0 / (kappa * ell) + kappa * ell;
            } else {
                const double ratio = 2.0 * std::numbers::pi * static_cast<double>(n) / (L * kappa);
                weight = ratio + 1.0 / ratio;
            }
            series += 0.25 * weight * y[j - 1] * y[j - 1];
        }
        const double by_beta = direct.value();
        const double by_series = series.value() - 0.5;
        if (n == 0) {
            spec.N0 = by_beta;
            spec.N0_series = by_series;
        } else {
            spec.N[n - 1] = by_beta;
            spec.N_series[n - 1] = by_series;
        }
        spec.route_difference = std::max(spec.route_difference, std::abs(by_beta - by_series));
    }
    CompensatedSum<> total;
    total += spec.N0;
    for (double value : spec.N) {
        total += value;
    }
    spec.total = total.value();
    return spec;
}

enum class TailMethod { none, power_law_fit };

struct TotalCreated {
    double partial_sum = 0.0;
    // Integral bound c n_max^{1-p} / (p-1) of the fitted law c n^{-p}; +inf when p <= 1
    // or fewer than three points are available. Never added into partial_sum.
    double tail_estimate = 0.0;
    double exponent = std::numeric_limits<double>::quiet_NaN();
    TailMethod method = TailMethod::none;
};

// Fit log N_n = log c - p log n over the last decade n in [max(1, n_max/10), n_max].
inline TotalCreated total_created(const CreationSpectrum& spec, TailMethod method) {
    TotalCreated out;
    out.partial_sum = spec.total;
    out.method = method;
    if (method == TailMethod::none) {
        return out;
    }
    const std::size_t n_max = spec.N.size();
    const std::size_t first = std::max<std::size_t>(1, n_max / 10);
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    double count = 0.0;
    for (std::size_t n = first; n <= n_max; ++n) {
        const double value = spec.N[n - 1];
        if (!(value > 0.0)) {
            continue;
        }
        const double lx = std::log(static_cast<double>(n));
        const double ly = std::log(value);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        count += 1.0;
    }
    const double denom = count * sxx - sx * sx;
    if (count < 3.0 || !(denom > 0.0)) {
        out.tail_estimate = std::numeric_limits<double>::infinity();
        return out;
    }
    const double slope = (count * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / count;
    const double p = -slope;
    out.exponent = p;
    if (!(p > 1.0)) {
        out.tail_estimate = std::numeric_limits<double>::infinity();
        return out;
    }
    const double c = std::exp(intercept);
    out.tail_estimate = c * std::pow(static_cast<double>(n_max), 1.0 - p) / (p - 1.0);
    return out;
}

} // namespace casimir_pulse
