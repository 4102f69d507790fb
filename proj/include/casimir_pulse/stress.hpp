#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "casimir_pulse/eigensolve.hpp"
#include "casimir_pulse/errors.hpp"
#include "casimir_pulse/model.hpp"
#include "casimir_pulse/zeta_series.hpp"

namespace casimir_pulse {

enum class Region { in, out };
enum class Direction { left, right };
enum class GeodesicKind { timelike, null_right, null_left };

inline std::string to_string(Direction d) { return d == Direction::left ? "left" : "right"; }

// The spectral constants the stress tensor depends on.
struct StressConstants {
    double B = 0.0;
    double C = 0.0;
};

inline StressConstants stress_constants(double chi, const EigenTable& eigen) {
    return {constant_B(chi, eigen).value, constant_C(chi, eigen).value};
}

// amplitude * sum_n delta(argument - phase - n), where the argument is (t + x)/L for the
// left-moving family and (t - x)/L for the right-moving one. The pulse block of the
// tensor is amplitude * [[1, s], [s, 1]] with s = flux_sign.
struct DeltaPulse {
    Direction direction = Direction::left;
    double amplitude = 0.0;
    double phase = 0.0;
    int flux_sign = 1;

    [[nodiscard]] int argument_sign() const { return direction == Direction::left ? 1 : -1; }
    [[nodiscard]] double argument(double x, double t, double L) const {
        return (t + argument_sign() * x) / L - phase;
    }
};

struct TensorComponents {
    double tt = 0.0;
    double tx = 0.0;
    double xx = 0.0;

    // Trace with the metric diag(+1, -1).
    [[nodiscard]] double trace() const { return tt - xx; }
    [[nodiscard]] double contract(double at, double ax, double bt, double bx) const {
        return tt * at * bt + tx * (at * bx + ax * bt) + xx * ax * bx;
    }
};

// The point lies on the support of one or more delta pulses; there is no pointwise value.
struct DistributionalSupport {
    std::vector<Direction> families;
};

using FieldSample = std::variant<double, DistributionalSupport>;

struct StressTensorField {
    Region region = Region::out;
    double L = 1.0;
    double casimir_density = 0.0;  // -pi / (6 L^2)
    double potential_shift = 0.0;  // (B - C) / L^2
    std::vector<DeltaPulse> pulses;

    [[nodiscard]] double background_density() const { return casimir_density + potential_shift; }

    // Isotropic diag(rho, rho) block away from pulses.
    [[nodiscard]] TensorComponents smooth_components() const {
        const double rho = background_density();
        return {rho, 0.0, rho};
    }

    [[nodiscard]] static TensorComponents pulse_components(const DeltaPulse& pulse) {
        return {pulse.amplitude, pulse.flux_sign * pulse.amplitude, pulse.amplitude};
    }

    // Trace of the full tensor: the smooth block plus every pulse block.
    [[nodiscard]] double trace() const {
        double total = smooth_components().trace();
        for (const auto& p : pulses) {
            total += pulse_components(p).trace();
        }
        return total;
    }

    // T_tt at a spacetime point.
    [[nodiscard]] FieldSample energy_density_at(double x, double t) const {
        if (region == Region::in) {
            if (t > 0.0) {
                throw DomainError("IN-region tensor requested at t > 0");
            }
            if (std::fmod(x, L) == 0.0) {
                throw OnPotentialSupportError("IN-region tensor is undefined on the potential support x = 0");
            }
            return background_density();
        }
        if (t < 0.0) {
            throw DomainError("OUT-region tensor requested at t < 0");
        }
        DistributionalSupport support;
        for (const auto& p : pulses) {
            const double arg = p.argument(x, t, L);
            if (arg == std::round(arg)) {
                support.families.push_back(p.direction);
            }
        }
        if (!support.families.empty()) {
            return support;
        }
        return background_density();
    }
};

// -pi/(6L^2) + (B - C)/L^2 with two pulse families of amplitude C/(2L^2).
inline StressTensorField build_out_tensor(const ModelConfig& config, const StressConstants& constants) {
    const double L = config.L();
    StressTensorField field;
    field.region = Region::out;
    field.L = L;
    field.casimir_density = -std::numbers::pi / (6.0 * L * L);
    field.potential_shift = (constants.B - constants.C) / (L * L);
    const double amplitude = constants.C / (2.0 * L * L);
    field.pulses.push_back({Direction::left, amplitude, 0.0, +1});
    field.pulses.push_back({Direction::right, amplitude, 0.0, -1});
    return field;
}

inline StressTensorField build_in_tensor(const ModelConfig& config, const StressConstants& constants) {
    const double L = config.L();
    StressTensorField field;
    field.region = Region::in;
    field.L = L;
    field.casimir_density = -std::numbers::pi / (6.0 * L * L);
    field.potential_shift = (constants.B - constants.C) / (L * L);
    return field;
}

// Timelike: (t, x) = gamma (1, v) tau + (t0, x0). Null: (t, x) = (1, +-1) lambda + (t0, x0).
struct GeodesicSpec {
    double v = 0.0;
    double t0 = 0.0;
    double x0 = 0.0;
    GeodesicKind kind = GeodesicKind::timelike;

    [[nodiscard]] double gamma() const { return 1.0 / std::sqrt(1.0 - v * v); }

    // Tangent (u^t, u^x).
    [[nodiscard]] std::pair<double, double> tangent() const {
        switch (kind) {
        case GeodesicKind::timelike: return {gamma(), gamma() * v};
        case GeodesicKind::null_right: return {1.0, 1.0};
        case GeodesicKind::null_left: return {1.0, -1.0};
        }
        return {0.0, 0.0};
    }

    [[nodiscard]] std::pair<double, double> position(double tau) const {
        const auto [ut, ux] = tangent();
        return {t0 + ut * tau, x0 + ux * tau};
    }

    // Parameter value at which the curve crosses t = 0.
    [[nodiscard]] double entry_parameter() const { return -t0 / tangent().first; }

    void validate() const {
        if (kind == GeodesicKind::timelike && !(std::abs(v) < 1.0)) {
            throw DomainError("timelike geodesic requires |v| < 1");
        }
    }
};

struct Crossing {
    double tau = 0.0;
    // Coefficient of delta(argument - n) in the contracted density.
    double weight = 0.0;
    // |d argument / d tau|^{-1}, so the integral of g^2 against the pulse is weight * measure * g(tau)^2.
    double measure = 0.0;
    Direction family = Direction::left;
    long long n = 0;
};

struct ContractedDensity {
    double smooth_part = 0.0;
    std::vector<Crossing> crossings;
};

namespace detail {

inline void require_out(const StressTensorField& field) {
    if (field.region != Region::out) {
        throw DomainError("geodesic contractions are defined on the OUT region");
    }
}

// Pulse crossings in [tau_lo, tau_hi] intersected with the OUT region t > 0.
template <typename WeightFn>
std::vector<Crossing> enumerate_crossings(const GeodesicSpec& geo, const StressTensorField& field, double tau_lo,
                                          double tau_hi, WeightFn&& weight_of) {
    std::vector<Crossing> out;
    const double lo = std::max(tau_lo, geo.entry_parameter());
    if (!(lo <= tau_hi)) {
        return out;
    }
    const auto [ut, ux] = geo.tangent();
    for (const auto& pulse : field.pulses) {
        const double weight = weight_of(pulse);
        const double rate = (ut + pulse.argument_sign() * ux) / field.L;
        if (weight == 0.0 || rate == 0.0) {
            continue;
        }
        const double start = pulse.argument(geo.x0, geo.t0, field.L);
        const auto arg = [&](double tau) { return start + rate * tau; };
        const auto n_lo = static_cast<long long>(std::ceil(arg(lo)));
        const auto n_hi = static_cast<long long>(std::floor(arg(tau_hi)));
        for (long long n = n_lo; n <= n_hi; ++n) {
            const double tau = (static_cast<double>(n) - start) / rate;
            if (tau <= geo.entry_parameter()) {
                continue;
            }
            out.push_back({tau, weight, 1.0 / std::abs(rate), pulse.direction, n});
        }
    }
    std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.tau < b.tau; });
    return out;
}

} // namespace detail

// T_{mu nu} u^mu u^nu along the geodesic for parameters in [tau_lo, tau_hi].
inline ContractedDensity energy_density_along(const GeodesicSpec& geo, const StressTensorField& field, double tau_lo,
                                              double tau_hi) {
    geo.validate();
    detail::require_out(field);
    const auto [ut, ux] = geo.tangent();
    ContractedDensity out;
    out.smooth_part = field.smooth_components().contract(ut, ux, ut, ux);
    out.crossings = detail::enumerate_crossings(geo, field, tau_lo, tau_hi, [&](const DeltaPulse& p) {
        return StressTensorField::pulse_components(p).contract(ut, ux, ut, ux);
    });
    return out;
}

// -T_{mu nu} u^mu r^nu with r = gamma (v, 1); timelike geodesics only.
inline ContractedDensity momentum_density_along(const GeodesicSpec& geo, const StressTensorField& field,
                                                double tau_lo, double tau_hi) {
    geo.validate();
    detail::require_out(field);
    if (geo.kind != GeodesicKind::timelike) {
        throw DomainError("momentum density is defined along timelike geodesics");
    }
    const auto [ut, ux] = geo.tangent();
    const double rt = geo.gamma() * geo.v;
    const double rx = geo.gamma();
    ContractedDensity out;
    out.smooth_part = -field.smooth_components().contract(ut, ux, rt, rx);
    out.crossings = detail::enumerate_crossings(geo, field, tau_lo, tau_hi, [&](const DeltaPulse& p) {
        return -StressTensorField::pulse_components(p).contract(ut, ux, rt, rx);
    });
    return out;
}

enum class EnergyCondition { NEC, WEC, SEC, DEC };

inline std::string to_string(EnergyCondition c) {
    switch (c) {
    case EnergyCondition::NEC: return "NEC";
    case EnergyCondition::WEC: return "WEC";
    case EnergyCondition::SEC: return "SEC";
    case EnergyCondition::DEC: return "DEC";
    }
    return "unknown";
}

struct ConditionWitness {
    double t = 0.0;
    double x = 0.0;
    double direction_t = 0.0;
    double direction_x = 0.0;
    // NEC: T K K; WEC: T u u; SEC: (T - T g / 2) u u; DEC: T^t_nu Y^nu.
    double value = 0.0;
};

struct ConditionVerdict {
    EnergyCondition condition = EnergyCondition::NEC;
    bool violated = false;
    ConditionWitness witness;
};

// Each verdict is decided by evaluating its contraction at a point between the pulses.
inline std::vector<ConditionVerdict> energy_conditions(const StressTensorField& field) {
    detail::require_out(field);
    const double L = field.L;
    double t = 0.25 * L;
    double x = 0.125 * L;
    for (const auto& p : field.pulses) {
        const double arg = p.argument(x, t, L);
        if (std::abs(arg - std::round(arg)) < 1e-3) {
            x += 0.1 * L;
        }
    }
    const TensorComponents T = field.smooth_components();
    std::vector<ConditionVerdict> out;

    const double nec = T.contract(1.0, 1.0, 1.0, 1.0);
    out.push_back({EnergyCondition::NEC, nec < 0.0, {t, x, 1.0, 1.0, nec}});

    const double wec = T.contract(1.0, 0.0, 1.0, 0.0);
    out.push_back({EnergyCondition::WEC, wec < 0.0, {t, x, 1.0, 0.0, wec}});

    // (T_{mu nu} - T g_{mu nu} / 2) u^mu u^nu with g(u, u) = 1.
    const double sec = wec - 0.5 * T.trace();
    out.push_back({EnergyCondition::SEC, sec < 0.0, {t, x, 1.0, 0.0, sec}});

    // Future-pointing part of the dominant condition for Y = (1, 0).
    const double dec = T.tt * 1.0 + T.tx * 0.0;
    out.push_back({EnergyCondition::DEC, dec < 0.0, {t, x, 1.0, 0.0, dec}});
    return out;
}

// Energy on a t = const > 0 Cauchy surface: -pi/(6L) + B/L. There is no time argument.
inline double total_energy(const ModelConfig& config, const StressConstants& constants) {
    return -std::numbers::pi / (6.0 * config.L()) + constants.B / config.L();
}

struct EnergyZero {
    double chi = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
};

// Bisection on chi for the zero of -pi/6 + B(chi) (L = 1), B truncated at j_max.
inline EnergyZero find_energy_zero(double lo, double hi, std::size_t j_max, double tol = 1e-7,
                                   const RootOptions& options = {}) {
    const auto energy = [&](double chi) {
        const auto eigen = solve_roots(chi, j_max, options);
        const auto config = ModelConfig::from_chi(chi);
        return total_energy(config, {constant_B(chi, eigen).value, chi / std::numbers::pi});
    };
    const double f_lo = energy(lo);
    const double f_hi = energy(hi);
    if (!(f_lo < 0.0 && f_hi > 0.0)) {
        throw DomainError("total energy does not change sign on the bracket");
    }
    EnergyZero out;
    while (hi - lo > tol && out.iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = energy(mid);
        if (f_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++out.iterations;
    }
    out.lo = lo;
    out.hi = hi;
    out.chi = 0.5 * (lo + hi);
    return out;
}

} // namespace casimir_pulse
