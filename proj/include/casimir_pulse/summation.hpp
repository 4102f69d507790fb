#pragma once

#include <cmath>
#include <limits>

namespace casimir_pulse {

// Neumaier-compensated running sum. The result is independent of thread count
// because every caller accumulates in a fixed ascending order.
template <typename T = double>
class CompensatedSum {
public:
    CompensatedSum& operator+=(T term) noexcept {
        const T t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term)) {
            compensation_ += (sum_ - t) + term;
        } else {
            compensation_ += (term - t) + sum_;
        }
        sum_ = t;
        magnitude_ += std::abs(term);
        return *this;
    }

    [[nodiscard]] T value() const noexcept { return sum_ + compensation_; }
    // Sum of |term|; scales the rounding allowance of series built from inexact terms.
    [[nodiscard]] T magnitude() const noexcept { return magnitude_; }

private:
    T sum_{};
    T compensation_{};
    T magnitude_{};
};

// Upper bound on sum_{m >= m0} m^{-p} for p > 1, m0 >= 1.
inline double zeta_tail_bound(double p, double m0) noexcept {
    return std::pow(m0, -p) + std::pow(m0, 1.0 - p) / (p - 1.0);
}

inline constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2.0;

} // namespace casimir_pulse
