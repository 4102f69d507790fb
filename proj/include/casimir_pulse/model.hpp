#pragma once

#include <cmath>
#include <string>

#include "casimir_pulse/errors.hpp"

namespace casimir_pulse {

// Physical inputs of the model. chi = xi * L / 2 is always derived, never stored.
class ModelConfig {
public:
    ModelConfig(double xi, double L, double ell) : xi_(xi), L_(L), ell_(ell) {
        require_positive(xi, "xi");
        require_positive(L, "L");
        require_positive(ell, "ell");
    }

    static ModelConfig from_chi(double chi, double L = 1.0, double ell = 1.0) {
        require_positive(chi, "chi");
        require_positive(L, "L");
        return ModelConfig(2.0 * chi / L, L, ell);
    }

    [[nodiscard]] double xi() const noexcept { return xi_; }
    [[nodiscard]] double L() const noexcept { return L_; }
    [[nodiscard]] double ell() const noexcept { return ell_; }
    [[nodiscard]] double chi() const noexcept { return xi_ * L_ / 2.0; }

    [[nodiscard]] ModelConfig with_ell(double ell) const { return {xi_, L_, ell}; }

private:
    static void require_positive(double value, const char* name) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw DomainError(std::string(name) + " must be positive and finite");
        }
    }

    double xi_;
    double L_;
    double ell_;
};

} // namespace casimir_pulse
