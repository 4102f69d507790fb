#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casimir_pulse/errors.hpp"
#include "casimir_pulse/parallel.hpp"

namespace casimir_pulse {

struct RootOptions {
    double tol_root = 1e-12;
    int iteration_cap = 200;
    unsigned threads = 1;
};

// Positive roots Z_j of Z = chi cot Z for j = 1..j_max.
// Vectors are indexed by j - 1; functions taking a mode index j use j >= 1.
struct EigenTable {
    double chi = 0.0;
    std::size_t j_max = 0;
    std::vector<double> Z;        // ascending, (j-1)pi < Z_j < (j-1/2)pi
    std::vector<double> eps;      // Z_j - (j-1)pi, stored exactly as solved
    std::vector<double> A2;       // Z^2 / (Z^2 + chi^2 + chi)
    std::vector<double> residual; // Z_j - chi cot Z_j

    [[nodiscard]] double root(std::size_t j) const { return Z.at(checked(j)); }
    [[nodiscard]] double offset(std::size_t j) const { return eps.at(checked(j)); }
    [[nodiscard]] double norm2(std::size_t j) const { return A2.at(checked(j)); }
    [[nodiscard]] double amplitude(std::size_t j) const { return std::sqrt(norm2(j)); }

    // Z_j - n pi without cancellation: the integer part of the offset is exact.
    [[nodiscard]] double root_minus_multiple(std::size_t j, std::size_t n) const {
        const auto shift = static_cast<double>(static_cast<long long>(j) - 1 - static_cast<long long>(n));
        return shift * std::numbers::pi + offset(j);
    }

private:
    [[nodiscard]] std::size_t checked(std::size_t j) const {
        if (j < 1 || j > j_max) {
            throw std::out_of_range("mode index j=" + std::to_string(j) + " outside 1.." + std::to_string(j_max));
        }
        return j - 1;
    }
};

using EigenTablePtr = std::shared_ptr<const EigenTable>;

namespace detail {

struct OffsetSolution {
    double eps;
    double residual;
};

// Z_j - chi cot Z_j evaluated through eps, where cot has no pole.
inline double root_residual(double chi, double Z, double eps) {
    return Z - chi * std::cos(eps) / std::sin(eps);
}

// Solves h(e) = (a + e) sin e - chi cos e = 0 on (0, pi/2) with a = (j-1)pi.
// Same zero set as Z sin Z - chi cos Z with Z = a + e; h(0) < 0 < h(pi/2).
inline OffsetSolution solve_offset(double chi, std::size_t j, const RootOptions& options) {
    const double a = static_cast<double>(j - 1) * std::numbers::pi;
    const auto h = [&](double e) { return (a + e) * std::sin(e) - chi * std::cos(e); };
    const auto dh = [&](double e) { return (1.0 + chi) * std::sin(e) + (a + e) * std::cos(e); };

    double lo = 0.0;
    double hi = std::numbers::pi / 2.0;
    int iterations = 0;
    while (hi - lo > 1e-3 && iterations < options.iteration_cap) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
        ++iterations;
    }

    double e = 0.5 * (lo + hi);
    bool settled = false;
    while (iterations < options.iteration_cap) {
        ++iterations;
        const double value = h(e);
        if (value == 0.0) {
            settled = true;
            break;
        }
        (value < 0.0 ? lo : hi) = e;
        double next = e - value / dh(e);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double change = std::abs(next - e);
        e = next;
        if (change <= 4.0 * std::numeric_limits<double>::epsilon() * e ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            settled = true;
            break;
        }
    }

    const double Z = a + e;
    const double residual = root_residual(chi, Z, e);
    // Absolute residual is limited by the spacing of doubles near Z, hence the max(1, Z) scale.
    if (!settled || !(std::abs(residual) < options.tol_root * std::max(1.0, Z))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "root refinement did not converge for j=" << j << " in bracket (" << a << ", "
            << a + std::numbers::pi / 2.0 << "), last residual " << residual;
        throw ConvergenceError(msg.str());
    }
    return {e, residual};
}

} // namespace detail

inline EigenTable solve_roots(double chi, std::size_t j_max, const RootOptions& options = {}) {
    if (!(chi > 0.0) || !std::isfinite(chi)) {
        throw DomainError("chi must be positive and finite");
    }
    if (j_max < 1) {
        throw DomainError("j_max must be at least 1");
    }
    if (!(options.tol_root > 0.0 && options.tol_root <= 1e-6)) {
        throw DomainError("tol_root must lie in (0, 1e-6]");
    }

    EigenTable table;
    table.chi = chi;
    table.j_max = j_max;
    table.Z.resize(j_max);
    table.eps.resize(j_max);
    table.A2.resize(j_max);
    table.residual.resize(j_max);

    parallel_for(j_max, options.threads, [&](std::size_t i) {
        const std::size_t j = i + 1;
        const auto solution = detail::solve_offset(chi, j, options);
        const double Z = static_cast<double>(i) * std::numbers::pi + solution.eps;
        table.Z[i] = Z;
        table.eps[i] = solution.eps;
        table.A2[i] = Z * Z / (Z * Z + chi * chi + chi);
        table.residual[i] = solution.residual;
    });
    return table;
}

inline EigenTablePtr share(EigenTable table) {
    return std::make_shared<const EigenTable>(std::move(table));
}

// Second algebraic form of A_j^2, cos^2 Z / (1 + sin Z cos Z / Z), evaluated through eps.
inline double alternate_norm2(const EigenTable& table, std::size_t j) {
    const double e = table.offset(j);
    const double c = std::cos(e);
    return c * c / (1.0 + std::sin(e) * c / table.root(j));
}

// Closed-form approximation (j-1)pi + 2chi / ((j-1)pi + sqrt((j-1)^2 pi^2 + 4chi(1 + chi/3))).
// Never below the true root.
inline double approx_root(double chi, std::size_t j) {
    if (!(chi >= 0.0) || !std::isfinite(chi)) {
        throw DomainError("chi must be nonnegative and finite");
    }
    if (j < 1) {
        throw DomainError("mode index j must be at least 1");
    }
    const double a = static_cast<double>(j - 1) * std::numbers::pi;
    if (chi == 0.0) {
        return a;
    }
    return a + 2.0 * chi / (a + std::sqrt(a * a + 4.0 * chi * (1.0 + chi / 3.0)));
}

// dZ_j / dchi = A_j^2 / Z_j.
inline double root_derivative(const EigenTable& table, std::size_t j) {
    return table.norm2(j) / table.root(j);
}

} // namespace casimir_pulse
