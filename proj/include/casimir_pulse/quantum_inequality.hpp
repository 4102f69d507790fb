#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "casimir_pulse/errors.hpp"
#include "casimir_pulse/model.hpp"
#include "casimir_pulse/stress.hpp"
#include "casimir_pulse/summation.hpp"

namespace casimir_pulse {

namespace detail {

// Dimensionless spectrum of the bump b(u) = exp(-1 / (1 - u^2)) on [-1, 1]:
// B(s) = int b(u) cos(s u) du by the trapezoid rule, and the cumulative tail of |B|^2
// tabulated with spacing pi/8 up to the point where |B|^2 falls below 1e-28 of its peak.
// Depends only on the grid size, so one table serves every center, width and amplitude.
class BumpSpectrum {
public:
    static constexpr double s_step = std::numbers::pi / 8.0;

    explicit BumpSpectrum(std::size_t intervals) : intervals_(intervals) {
        const double h = 2.0 / static_cast<double>(intervals_);
        half_profile_.resize(intervals_ / 2);
        for (std::size_t i = 0; i < half_profile_.size(); ++i) {
            half_profile_[i] = profile(static_cast<double>(i) * h);
        }
        const double peak = transform(0.0);
        const double threshold = 1e-28 * peak * peak;
        constexpr double s_limit = 1e4;
        std::vector<double> pieces;
        std::size_t quiet = 0;
        double s = 0.0;
        // Stop after eight consecutive intervals (one full oscillation period of |B|^2) below threshold.
        while (quiet < 8 && s < s_limit) {
            const double B = transform(s + s_step);
            pieces.push_back(integral(s, s + s_step));
            quiet = (B * B < threshold) ? quiet + 1 : 0;
            s += s_step;
        }
        s_cutoff_ = s;
        cumulative_.assign(pieces.size() + 1, 0.0);
        for (std::size_t i = pieces.size(); i-- > 0;) {
            cumulative_[i] = cumulative_[i + 1] + pieces[i];
        }
    }

    static double profile(double u) {
        const double q = 1.0 - u * u;
        return q <= 0.0 ? 0.0 : std::exp(-1.0 / q);
    }

    [[nodiscard]] double transform(double s) const {
        const double h = 2.0 / static_cast<double>(intervals_);
        CompensatedSum<> sum;
        sum += half_profile_[0];
        for (std::size_t i = 1; i < half_profile_.size(); ++i) {
            sum += 2.0 * half_profile_[i] * std::cos(s * static_cast<double>(i) * h);
        }
        return h * sum.value();
    }

    // int_a^b |B(s)|^2 ds by 5-point Gauss-Legendre; b - a <= s_step.
    [[nodiscard]] double integral(double a, double b) const {
        static constexpr std::array<double, 5> nodes{0.0, -0.5384693101056831, 0.5384693101056831,
                                                     -0.9061798459386640, 0.9061798459386640};
        static constexpr std::array<double, 5> weights{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                       0.2369268850561891, 0.2369268850561891};
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double B = transform(mid + half * nodes[k]);
            sum += weights[k] * B * B;
        }
        return half * sum;
    }

    // int_s^inf |B|^2; zero beyond the cutoff.
    [[nodiscard]] double tail(double s) const {
        if (s >= s_cutoff_) {
            return 0.0;
        }
        const auto i = static_cast<std::size_t>(s / s_step);
        return cumulative_[i + 1] + integral(s, static_cast<double>(i + 1) * s_step);
    }

    [[nodiscard]] double cutoff() const { return s_cutoff_; }

    static std::shared_ptr<const BumpSpectrum> shared(std::size_t intervals) {
        static std::mutex mutex;
        static std::map<std::size_t, std::shared_ptr<const BumpSpectrum>> cache;
        const std::lock_guard lock(mutex);
        auto& slot = cache[intervals];
        if (!slot) {
            slot = std::make_shared<const BumpSpectrum>(intervals);
        }
        return slot;
    }

private:
    std::size_t intervals_;
    std::vector<double> half_profile_;
    std::vector<double> cumulative_;
    double s_cutoff_ = 0.0;
};

} // namespace detail

// g(tau) = amplitude * exp(-1 / (1 - u^2)), u = (tau - center) / width, zero for |u| >= 1.
class TestFunction {
public:
    TestFunction(double center, double width, double amplitude = 1.0, std::size_t intervals = 4096)
        : center_(center), width_(width), amplitude_(amplitude), intervals_(intervals) {
        if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(center)) {
            throw DomainError("test function width must be positive and finite");
        }
        if (!(amplitude > 0.0)) {
            throw DomainError("test function amplitude must be positive");
        }
        if (intervals < 64 || intervals % 2 != 0) {
            throw DomainError("test function grid needs an even number of at least 64 intervals");
        }
        spectrum_ = detail::BumpSpectrum::shared(intervals_);
        samples_.resize(intervals_ + 1);
        derivative_samples_.resize(intervals_ + 1);
        CompensatedSum<> l1;
        for (std::size_t i = 0; i <= intervals_; ++i) {
            const double tau = center_ - width_ + static_cast<double>(i) * step();
            samples_[i] = value(tau);
            derivative_samples_[i] = derivative(tau);
            l1 += std::abs(second_derivative(tau));
        }
        second_derivative_l1_ = step() * l1.value();
    }

    [[nodiscard]] double center() const { return center_; }
    [[nodiscard]] double width() const { return width_; }
    [[nodiscard]] double amplitude() const { return amplitude_; }
    [[nodiscard]] double support_begin() const { return center_ - width_; }
    [[nodiscard]] double support_end() const { return center_ + width_; }
    [[nodiscard]] double step() const { return 2.0 * width_ / static_cast<double>(intervals_); }
    // Values and derivatives at tau_i = center - width + i * step(), i = 0..intervals.
    [[nodiscard]] std::span<const double> samples() const { return samples_; }
    [[nodiscard]] std::span<const double> derivative_samples() const { return derivative_samples_; }

    [[nodiscard]] double value(double tau) const {
        const double u = (tau - center_) / width_;
        return amplitude_ * detail::BumpSpectrum::profile(u);
    }

    [[nodiscard]] double derivative(double tau) const {
        const double u = (tau - center_) / width_;
        const double q = 1.0 - u * u;
        return q <= 0.0 ? 0.0 : value(tau) * (-2.0 * u / (q * q)) / width_;
    }

    [[nodiscard]] double second_derivative(double tau) const {
        const double u = (tau - center_) / width_;
        const double q = 1.0 - u * u;
        if (q <= 0.0) {
            return 0.0;
        }
        const double lead = 2.0 * u / (q * q);
        return value(tau) * (lead * lead - (2.0 + 6.0 * u * u) / (q * q * q)) / (width_ * width_);
    }

    // (g'/g)^2 g = g'^2 / g, finite up to the support edges.
    [[nodiscard]] double log_derivative_energy(double tau) const {
        const double u = (tau - center_) / width_;
        const double q = 1.0 - u * u;
        if (q <= 0.0) {
            return 0.0;
        }
        const double lead = 2.0 * u / (q * q) / width_;
        return value(tau) * lead * lead;
    }

    // int g^2 dtau; trapezoid on the grid is spectrally accurate for the bump.
    [[nodiscard]] double l2_norm_squared() const {
        CompensatedSum<> sum;
        for (double s : samples_) {
            sum += s * s;
        }
        return step() * sum.value();
    }

    // |g^(alpha)| with g^(alpha) = int g(tau) e^{i alpha tau} dtau.
    [[nodiscard]] double fourier_magnitude(double alpha) const {
        return amplitude_ * width_ * std::abs(spectrum_->transform(alpha * width_));
    }

    // int_beta^inf |g^(alpha)|^2 d alpha for beta >= 0; zero beyond the tabulated cutoff.
    [[nodiscard]] double fourier_tail(double beta) const {
        if (!(beta >= 0.0)) {
            throw DomainError("Fourier tail requires beta >= 0");
        }
        return amplitude_ * amplitude_ * width_ * spectrum_->tail(beta * width_);
    }

    [[nodiscard]] double alpha_cutoff() const { return spectrum_->cutoff() / width_; }
    [[nodiscard]] double alpha_step() const { return detail::BumpSpectrum::s_step / width_; }

    // |g^(alpha)| <= ||g''||_1 / alpha^2, so the omitted tail beyond the cutoff is at most
    // ||g''||_1^2 / (3 alpha_cutoff^3).
    [[nodiscard]] double fourier_tail_bound() const {
        const double a = alpha_cutoff();
        return second_derivative_l1_ * second_derivative_l1_ / (3.0 * a * a * a);
    }

private:
    double center_;
    double width_;
    double amplitude_;
    std::size_t intervals_;
    std::shared_ptr<const detail::BumpSpectrum> spectrum_;
    std::vector<double> samples_;
    std::vector<double> derivative_samples_;
    double second_derivative_l1_ = 0.0;
};

struct QweiRhs {
    double casimir_term = 0.0;
    // (1/2L) sum_n k_n s^2 T(k_n s) / pi and (1/2L) sum_n k_n s^-2 T(k_n / s) / pi, s = sqrt((1+v)/(1-v)).
    double mode_sum_fast = 0.0;
    double mode_sum_slow = 0.0;
    std::size_t n_used = 0;
    bool converged = false;
    // Upper bound on the mode sums lost to the alpha cutoff.
    double tail_bound = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] double total() const { return casimir_term - mode_sum_fast - mode_sum_slow; }
};

namespace detail {

inline void require_velocity(double v) {
    if (!(std::abs(v) < 1.0)) {
        throw DomainError("velocity must satisfy |v| < 1");
    }
}

inline QweiRhs qwei_rhs_with_smooth_term(const TestFunction& g, double v, const ModelConfig& config,
                                         std::size_t n_cut, double smooth_density) {
    require_velocity(v);
    if (n_cut < 1) {
        throw DomainError("n_cut must be at least 1");
    }
    const double L = config.L();
    const double s = std::sqrt((1.0 + v) / (1.0 - v));
    QweiRhs out;
    out.casimir_term = (1.0 + v * v) / (1.0 - v * v) * smooth_density * g.l2_norm_squared();
    CompensatedSum<> fast;
    CompensatedSum<> slow;
    double k_weight = 0.0;
    for (std::size_t n = 1; n <= n_cut; ++n) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(n) / L;
        const double a = k * s * s * g.fourier_tail(k * s) / std::numbers::pi / (2.0 * L);
        const double b = k / (s * s) * g.fourier_tail(k / s) / std::numbers::pi / (2.0 * L);
        fast += a;
        slow += b;
        k_weight += k * (s * s + 1.0 / (s * s)) / (2.0 * std::numbers::pi * L);
        out.n_used = n;
        const double accumulated = fast.value() + slow.value();
        if (a + b < 1e-12 * accumulated || accumulated == 0.0) {
            out.converged = true;
            break;
        }
    }
    out.mode_sum_fast = fast.value();
    out.mode_sum_slow = slow.value();
    out.tail_bound = k_weight * g.fourier_tail_bound();
    if (!out.converged) {
        out.warnings.push_back("mode sum reached n_cut=" + std::to_string(n_cut) +
                               " before the increment fell below 1e-12 of the sum");
    }
    return out;
}

} // namespace detail

// Absolute QWEI right-hand side along a timelike geodesic of speed v.
inline QweiRhs qwei_rhs(const TestFunction& g, double v, const ModelConfig& config, std::size_t n_cut = 10000) {
    const double L = config.L();
    return detail::qwei_rhs_with_smooth_term(g, v, config, n_cut, -std::numbers::pi / (6.0 * L * L));
}

// Difference-form right-hand side, with -1/(4 ell L) in place of the Casimir density.
inline QweiRhs qwei_difference_rhs(const TestFunction& g, double v, const ModelConfig& config,
                                   std::size_t n_cut = 10000) {
    return detail::qwei_rhs_with_smooth_term(g, v, config, n_cut, -1.0 / (4.0 * config.ell() * config.L()));
}

struct QweiLhs {
    double casimir_term = 0.0;
    double b_minus_c_term = 0.0;
    double left_pulse_term = 0.0;
    double right_pulse_term = 0.0;
    std::size_t crossings = 0;

    [[nodiscard]] double total() const { return casimir_term + b_minus_c_term + left_pulse_term + right_pulse_term; }
};

namespace detail {

inline void require_support_after_entry(const TestFunction& g, const GeodesicSpec& geo) {
    if (geo.kind != GeodesicKind::timelike) {
        throw DomainError("the QWEI is evaluated along timelike geodesics");
    }
    geo.validate();
    if (!(g.support_begin() > geo.entry_parameter())) {
        throw DomainError("test function support reaches the t = 0 surface; the OUT-region bound does not apply");
    }
}

inline QweiLhs lhs_with_smooth_term(const TestFunction& g, const GeodesicSpec& geo, const StressTensorField& field,
                                    double smooth_density) {
    require_support_after_entry(g, geo);
    const double v = geo.v;
    const double boost = (1.0 + v * v) / (1.0 - v * v);
    const double norm = g.l2_norm_squared();
    QweiLhs out;
    out.casimir_term = boost * smooth_density * norm;
    out.b_minus_c_term = boost * field.potential_shift * norm;
    const auto density = energy_density_along(geo, field, g.support_begin(), g.support_end());
    for (const auto& c : density.crossings) {
        const double value = g.value(c.tau);
        const double term = c.weight * c.measure * value * value;
        (c.family == Direction::left ? out.left_pulse_term : out.right_pulse_term) += term;
    }
    out.crossings = density.crossings.size();
    return out;
}

} // namespace detail

// Renormalized IN-vacuum energy density on the OUT region smeared against g^2.
inline QweiLhs qwei_lhs_in_vacuum(const TestFunction& g, const GeodesicSpec& geo, const StressTensorField& field) {
    return detail::lhs_with_smooth_term(g, geo, field, field.casimir_density);
}

struct QweiReport {
    QweiLhs lhs;
    QweiRhs rhs;

    [[nodiscard]] double lhs_total() const { return lhs.total(); }
    [[nodiscard]] double rhs_total() const { return rhs.total(); }
    [[nodiscard]] double margin() const { return lhs.total() - rhs.total(); }
};

inline QweiReport qwei_verdict(const TestFunction& g, const GeodesicSpec& geo, const ModelConfig& config,
                               const StressConstants& constants, std::size_t n_cut = 10000) {
    const auto field = build_out_tensor(config, constants);
    QweiReport report;
    report.lhs = qwei_lhs_in_vacuum(g, geo, field);
    report.rhs = qwei_rhs(g, geo.v, config, n_cut);
    return report;
}

// Difference form: the normal-ordered density with -1/(4 ell L) against the matching bound.
inline QweiReport qwei_difference_verdict(const TestFunction& g, const GeodesicSpec& geo, const ModelConfig& config,
                                          const StressConstants& constants, std::size_t n_cut = 10000) {
    const auto field = build_out_tensor(config, constants);
    QweiReport report;
    report.lhs = detail::lhs_with_smooth_term(g, geo, field, -1.0 / (4.0 * config.ell() * config.L()));
    report.rhs = qwei_difference_rhs(g, geo.v, config, n_cut);
    return report;
}

// -(1/24 pi) int f'^2 / f over samples of f and f' with spacing h (trapezoid rule).
// Leading and trailing zero samples lie outside the support; a sample <= 0 between
// positive samples is an interior zero and is rejected.
inline double flanagan_bound(std::span<const double> f, std::span<const double> df, double h) {
    if (f.size() != df.size() || f.size() < 3) {
        throw DomainError("Flanagan bound needs matching samples of f and f'");
    }
    std::size_t first = 0;
    while (first < f.size() && f[first] == 0.0) {
        ++first;
    }
    std::size_t last = f.size();
    while (last > first && f[last - 1] == 0.0) {
        --last;
    }
    CompensatedSum<> sum;
    for (std::size_t i = first; i < last; ++i) {
        if (!(f[i] > 0.0)) {
            throw DomainError("f must be positive on the interior of its support");
        }
        sum += df[i] * df[i] / f[i];
    }
    return -h * sum.value() / (24.0 * std::numbers::pi);
}

inline double flanagan_bound(const TestFunction& f) {
    CompensatedSum<> sum;
    for (std::size_t i = 0; i < f.samples().size(); ++i) {
        sum += f.log_derivative_energy(f.support_begin() + static_cast<double>(i) * f.step());
    }
    return -f.step() * sum.value() / (24.0 * std::numbers::pi);
}

enum class QuadratureScheme { double_exponential, gauss_kronrod };

namespace detail {

inline double sinhc(double y) { return y < 1e-8 ? 1.0 : std::sinh(y) / y; }

} // namespace detail

// eta(xi, a) = (xi / 2 pi a) int_0^inf [y e^-y / (y e^y + c sinh y) - y e^-y / (y e^y + c cosh y)] dy,
// c = xi a / 2. The double-exponential route integrates the combined positive integrand
// c e^{-2y} / ((e^y + c sinh(y)/y)(y e^y + c cosh y)) over [0, inf); the Gauss-Kronrod
// route integrates the two terms separately over a truncated interval.
inline double mamev_trunov_eta(double xi, double a, QuadratureScheme scheme = QuadratureScheme::double_exponential) {
    if (!(xi > 0.0) || !(a > 0.0) || !std::isfinite(xi) || !std::isfinite(a)) {
        throw DomainError("eta requires xi > 0 and a > 0");
    }
    const double c = 0.5 * xi * a;
    const double prefactor = xi / (2.0 * std::numbers::pi * a);
    const double inf = std::numeric_limits<double>::infinity();
    if (scheme == QuadratureScheme::double_exponential) {
        const auto combined = [c](double y) {
            const double ey = std::exp(y);
            return c * std::exp(-2.0 * y) / ((ey + c * detail::sinhc(y)) * (y * ey + c * std::cosh(y)));
        };
        boost::math::quadrature::exp_sinh<double> integrator;
        return prefactor * integrator.integrate(combined, 0.0, inf, 1e-15);
    }
    const auto sinh_term = [c](double y) {
        return std::exp(-y) / (std::exp(y) + c * detail::sinhc(y));
    };
    const auto cosh_term = [c](double y) {
        return y * std::exp(-y) / (y * std::exp(y) + c * std::cosh(y));
    };
    // Both integrands are below e^{-2y}, so truncating at y = 40 omits less than e^{-80}/2 each.
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double first = GK::integrate(sinh_term, 0.0, 40.0, 15, 1e-14);
    const double second = GK::integrate(cosh_term, 0.0, 40.0, 15, 1e-14);
    return prefactor * (first - second);
}

} // namespace casimir_pulse
