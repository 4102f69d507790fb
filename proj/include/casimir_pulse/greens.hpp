#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "casimir_pulse/errors.hpp"
#include "casimir_pulse/summation.hpp"

namespace casimir_pulse {

// Advanced-minus-retarded kernel E(x, t; x', t') at one point pair.
struct KernelValue {
    double value = 0.0;
};

namespace detail {

inline void require_circumference(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw DomainError("L must be positive and finite");
    }
}

// u mod L in [0, L), except that exact multiples of L map to L/2, the mean of the
// one-sided limits. Off null separations this is the plain principal value.
inline double wrap_midpoint(double u, double L) {
    double r = std::fmod(u, L);
    if (r < 0.0) {
        r += L;
    }
    if (r >= L) {
        r -= L;
    }
    return r == 0.0 ? 0.5 * L : r;
}

} // namespace detail

// -dt/L - (1/L) sum_{n <= n_max} (1/k_n)[sin(k_n (dt - dx)) + sin(k_n (dt + dx))].
inline KernelValue kernel_series(double x, double t, double xp, double tp, std::size_t n_max, double L) {
    detail::require_circumference(L);
    if (n_max < 1) {
        throw DomainError("n_max must be at least 1");
    }
    const double dt = t - tp;
    const double dx = x - xp;
    const double u = (dt - dx) / L;
    const double w = (dt + dx) / L;
    CompensatedSum<> sum;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double nn = static_cast<double>(n);
        // k_n (dt -+ dx) = 2 pi n u; reduce n u modulo 1 before scaling by 2 pi.
        const double a = 2.0 * std::numbers::pi * (nn * u - std::round(nn * u));
        const double b = 2.0 * std::numbers::pi * (nn * w - std::round(nn * w));
        sum += (std::sin(a) + std::sin(b)) / nn;
    }
    return {-dt / L - sum.value() / (2.0 * std::numbers::pi)};
}

// -dt/L - 1/2 + (1/2L)[(dt - dx) mod L + (dt + dx) mod L].
inline KernelValue kernel_closed(double x, double t, double xp, double tp, double L) {
    detail::require_circumference(L);
    const double dt = t - tp;
    const double dx = x - xp;
    return {-dt / L - 0.5 + (detail::wrap_midpoint(dt - dx, L) + detail::wrap_midpoint(dt + dx, L)) / (2.0 * L)};
}

// Classical solution phi(x, t) = -int [d_t E(x, t; x', 0) f(x') + E(x, t; x', 0) g(x')] dx'
// for data sampled at x_i = i L / N, i = 0..N-1. The kernel is the series truncated at
// n_max <= N/2; the trapezoid rule on the periodic grid projects the data onto each mode.
class CauchyEvolver {
public:
    CauchyEvolver(std::span<const double> f, std::span<const double> g, double L, std::size_t n_max) : L_(L) {
        detail::require_circumference(L);
        if (f.size() != g.size()) {
            throw DomainError("initial data and velocity must share one grid");
        }
        const std::size_t N = f.size();
        if (N < 16) {
            throw DomainError("Cauchy data grid needs at least 16 samples");
        }
        if (n_max > N / 2) {
            throw DomainError("n_max exceeds the Nyquist limit of the sample grid");
        }
        const double h = L / static_cast<double>(N);
        f0_ = trapezoid(f, h, 0, false);
        g0_ = trapezoid(g, h, 0, false);
        fc_.resize(n_max);
        fs_.resize(n_max);
        gc_.resize(n_max);
        gs_.resize(n_max);
        for (std::size_t n = 1; n <= n_max; ++n) {
            fc_[n - 1] = trapezoid(f, h, n, false);
            fs_[n - 1] = trapezoid(f, h, n, true);
            gc_[n - 1] = trapezoid(g, h, n, false);
            gs_[n - 1] = trapezoid(g, h, n, true);
        }
    }

    [[nodiscard]] double operator()(double x, double t) const {
        CompensatedSum<> sum;
        sum += f0_ + t * g0_;
        for (std::size_t i = 0; i < fc_.size(); ++i) {
            const double k = 2.0 * std::numbers::pi * static_cast<double>(i + 1) / L_;
            const double a = k * (t - x);
            const double b = k * (t + x);
            sum += std::cos(a) * fc_[i] - std::sin(a) * fs_[i] + std::cos(b) * fc_[i] + std::sin(b) * fs_[i];
            sum += (std::sin(a) * gc_[i] + std::cos(a) * gs_[i] + std::sin(b) * gc_[i] - std::cos(b) * gs_[i]) / k;
        }
        return sum.value() / L_;
    }

private:
    [[nodiscard]] double trapezoid(std::span<const double> data, double h, std::size_t n, bool sine) const {
        CompensatedSum<> sum;
        const std::size_t N = data.size();
        for (std::size_t i = 0; i < N; ++i) {
            // Exact phase index (n i mod N) keeps the mode samples periodic.
            const double phase = 2.0 * std::numbers::pi * static_cast<double>((n * i) % N) / static_cast<double>(N);
            sum += data[i] * (n == 0 ? 1.0 : (sine ? std::sin(phase) : std::cos(phase)));
        }
        return h * sum.value();
    }

    double L_;
    double f0_ = 0.0;
    double g0_ = 0.0;
    std::vector<double> fc_;
    std::vector<double> fs_;
    std::vector<double> gc_;
    std::vector<double> gs_;
};

inline double cauchy_evolve(std::span<const double> f, std::span<const double> g, double x, double t, double L,
                            std::size_t n_max) {
    return CauchyEvolver(f, g, L, n_max)(x, t);
}

} // namespace casimir_pulse
