#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "casimir_pulse/quantum_inequality.hpp"

namespace cp = casimir_pulse;

namespace {

constexpr double pi = std::numbers::pi;

cp::StressConstants constants_for(double chi) {
    const auto eigen = cp::solve_roots(chi, 4096);
    return cp::stress_constants(chi, eigen);
}

} // namespace

TEST(TestFunction, SupportAndShape) {
    const cp::TestFunction g(2.0, 0.5);
    EXPECT_EQ(g.support_begin(), 1.5);
    EXPECT_EQ(g.support_end(), 2.5);
    EXPECT_EQ(g.value(1.5), 0.0);
    EXPECT_EQ(g.value(2.6), 0.0);
    EXPECT_NEAR(g.value(2.0), std::exp(-1.0), 1e-15);
    EXPECT_EQ(g.samples().size(), 4097U);
    EXPECT_NEAR(g.value(2.2), g.value(1.8), 1e-15);
    EXPECT_THROW(cp::TestFunction(0.0, 0.0), cp::DomainError);
    EXPECT_THROW(cp::TestFunction(0.0, 1.0, -1.0), cp::DomainError);
    EXPECT_THROW(cp::TestFunction(0.0, 1.0, 1.0, 63), cp::DomainError);
}

TEST(TestFunction, DerivativesMatchFiniteDifferences) {
    const cp::TestFunction g(0.3, 0.7, 1.7);
    const double h = 1e-5;
    for (double tau : {-0.2, 0.1, 0.3, 0.55, 0.9}) {
        EXPECT_NEAR(g.derivative(tau), (g.value(tau + h) - g.value(tau - h)) / (2.0 * h), 1e-7);
        EXPECT_NEAR(g.second_derivative(tau), (g.derivative(tau + h) - g.derivative(tau - h)) / (2.0 * h), 1e-5);
    }
}

TEST(TestFunction, ParsevalAndScaling) {
    const cp::TestFunction g(1.0, 0.2);
    // int_{-inf}^{inf} |g^|^2 = 2 pi int g^2, and |g^| is even.
    EXPECT_NEAR(g.fourier_tail(0.0), pi * g.l2_norm_squared(), 1e-10 * g.l2_norm_squared());
    const cp::TestFunction wide(1.0, 0.4);
    EXPECT_NEAR(wide.l2_norm_squared(), 2.0 * g.l2_norm_squared(), 1e-14);
    EXPECT_NEAR(g.fourier_magnitude(0.0), 0.2 * wide.fourier_magnitude(0.0) / 0.4, 1e-15);
}

TEST(TestFunction, FourierTransformMatchesDirectQuadrature) {
    const cp::TestFunction g(0.0, 1.0);
    for (double alpha : {0.0, 1.0, 5.5, 20.0}) {
        // Midpoint rule with a different node set from the library's trapezoid.
        double re = 0.0;
        const int M = 20000;
        for (int i = 0; i < M; ++i) {
            const double tau = -1.0 + (i + 0.5) * 2.0 / M;
            re += g.value(tau) * std::cos(alpha * tau);
        }
        re *= 2.0 / M;
        EXPECT_NEAR(g.fourier_magnitude(alpha), std::abs(re), 1e-12) << "alpha=" << alpha;
    }
}

TEST(TestFunction, TailIsMonotoneAndBounded) {
    const cp::TestFunction g(0.0, 0.3);
    double previous = g.fourier_tail(0.0);
    for (double beta = 1.0; beta < g.alpha_cutoff() * 1.2; beta *= 1.5) {
        const double tail = g.fourier_tail(beta);
        EXPECT_LE(tail, previous + 1e-30);
        EXPECT_GE(tail, 0.0);
        previous = tail;
    }
    EXPECT_EQ(g.fourier_tail(g.alpha_cutoff() * 2.0), 0.0);
    EXPECT_GT(g.fourier_tail_bound(), 0.0);
    EXPECT_LT(g.fourier_tail_bound(), 1e-6 * g.fourier_tail(0.0));
    EXPECT_LE(g.alpha_step(), pi / (8.0 * g.width()) * (1.0 + 1e-15));
    EXPECT_THROW((void)g.fourier_tail(-1.0), cp::DomainError);
}

TEST(Flanagan, GoldenValueForUnitWidth) {
    // mpmath quad of f'^2/f for the unit bump.
    const cp::TestFunction f(0.0, 1.0);
    EXPECT_NEAR(cp::flanagan_bound(f), -0.074061428274758031472, 1e-10);
}

TEST(Flanagan, ScalingTranslationAndMonotonicity) {
    const double base = cp::flanagan_bound(cp::TestFunction(0.0, 1.0));
    double previous = -1e300;
    for (double s : {0.25, 0.5, 2.0, 8.0}) {
        const double scaled = cp::flanagan_bound(cp::TestFunction(0.0, s, 1.0 / s));
        EXPECT_NEAR(scaled, base / (s * s), 1e-10 / (s * s)) << "s=" << s;
        EXPECT_GT(scaled, previous);
        previous = scaled;
    }
    EXPECT_NEAR(cp::flanagan_bound(cp::TestFunction(17.25, 0.6)), cp::flanagan_bound(cp::TestFunction(-3.0, 0.6)),
                1e-14);
}

TEST(Flanagan, SampleOverload) {
    const cp::TestFunction f(0.0, 1.0);
    EXPECT_NEAR(cp::flanagan_bound(f.samples(), f.derivative_samples(), f.step()), cp::flanagan_bound(f), 1e-12);
    EXPECT_LT(cp::flanagan_bound(std::vector<double>{0.0, 0.0, 1.0, 0.0}, std::vector<double>{0.0, 1.0, 0.5, -1.0}, 0.1),
              0.0);
    std::vector<double> values{0.0, 1.0, 0.0, 1.0, 0.0};
    std::vector<double> slopes{1.0, 0.0, 0.0, 0.0, -1.0};
    EXPECT_THROW(cp::flanagan_bound(values, slopes, 0.1), cp::DomainError);
}

TEST(Eta, GoldenValues) {
    // mpmath quad at 30 digits.
    EXPECT_NEAR(cp::mamev_trunov_eta(1.0, 1.0), 0.022306939637396287353, 1e-12);
    EXPECT_NEAR(cp::mamev_trunov_eta(5.0, 0.5), 0.19299946062626931252, 1e-12);
}

TEST(Eta, SchemesAgreeAndArePositive) {
    for (double xi : {0.01, 1.0, 5.0, 40.0}) {
        for (double a : {0.1, 0.5, 1.0, 3.0}) {
            const double de = cp::mamev_trunov_eta(xi, a, cp::QuadratureScheme::double_exponential);
            const double gk = cp::mamev_trunov_eta(xi, a, cp::QuadratureScheme::gauss_kronrod);
            EXPECT_GT(de, 0.0);
            EXPECT_NEAR(de, gk, 1e-8 * std::max(1.0, de)) << "xi=" << xi << " a=" << a;
        }
    }
}

TEST(Eta, VanishesWithCoupling) {
    double previous = cp::mamev_trunov_eta(1.0, 1.0);
    for (double xi : {1e-1, 1e-2, 1e-3}) {
        const double value = cp::mamev_trunov_eta(xi, 1.0);
        EXPECT_LT(value, previous);
        previous = value;
    }
    EXPECT_LT(previous, 1e-6);
    EXPECT_THROW(cp::mamev_trunov_eta(0.0, 1.0), cp::DomainError);
    EXPECT_THROW(cp::mamev_trunov_eta(1.0, -1.0), cp::DomainError);
}

TEST(QweiRhs, NegativeAndDecomposed) {
    const auto config = cp::ModelConfig::from_chi(1.0);
    const cp::TestFunction g(0.5, 0.05);
    const auto rhs = cp::qwei_rhs(g, 0.0, config);
    EXPECT_LT(rhs.total(), 0.0);
    EXPECT_TRUE(rhs.converged);
    EXPECT_TRUE(rhs.warnings.empty());
    EXPECT_GT(rhs.mode_sum_fast, 0.0);
    EXPECT_DOUBLE_EQ(rhs.mode_sum_fast, rhs.mode_sum_slow);
    EXPECT_GT(rhs.mode_sum_fast + rhs.mode_sum_slow, std::abs(rhs.casimir_term));
    for (double v : {0.0, 0.5, -0.9}) {
        const auto r = cp::qwei_rhs(g, v, config);
        EXPECT_NEAR(r.casimir_term, -(1.0 + v * v) / (1.0 - v * v) * pi / 6.0 * g.l2_norm_squared(), 1e-15);
        EXPECT_NEAR(r.total() + r.mode_sum_fast + r.mode_sum_slow, r.casimir_term, 1e-15);
    }
}

TEST(QweiRhs, MonotoneInCutoff) {
    const auto config = cp::ModelConfig::from_chi(1.0);
    const cp::TestFunction g(0.5, 0.1);
    double previous = cp::qwei_rhs(g, 0.3, config, 1).total();
    for (std::size_t n_cut : {2U, 4U, 8U, 32U, 10000U}) {
        const double value = cp::qwei_rhs(g, 0.3, config, n_cut).total();
        EXPECT_LE(value, previous) << "n_cut=" << n_cut;
        previous = value;
    }
    const auto truncated = cp::qwei_rhs(g, 0.3, config, 2);
    EXPECT_FALSE(truncated.converged);
    EXPECT_FALSE(truncated.warnings.empty());
}

TEST(QweiRhs, WiderFunctionsShrinkModeSums) {
    const auto config = cp::ModelConfig::from_chi(1.0);
    double previous = 1e300;
    for (double width : {0.05, 0.1, 0.2, 0.4}) {
        // Unit L2 norm isolates the spectral effect.
        const cp::TestFunction shape(0.5, width);
        const cp::TestFunction g(0.5, width, 1.0 / std::sqrt(shape.l2_norm_squared()));
        const auto rhs = cp::qwei_rhs(g, 0.0, config);
        const double modes = rhs.mode_sum_fast + rhs.mode_sum_slow;
        EXPECT_LT(modes, previous) << "width=" << width;
        previous = modes;
    }
    EXPECT_THROW(cp::qwei_rhs(cp::TestFunction(0.5, 0.1), 1.0, config), cp::DomainError);
}

TEST(QweiLhs, NoCrossingsBetweenPulses) {
    const auto config = cp::ModelConfig::from_chi(1.0);
    const auto field = cp::build_out_tensor(config, constants_for(1.0));
    const cp::GeodesicSpec geo{0.0, 0.0, 0.0, cp::GeodesicKind::timelike};
    const cp::TestFunction g(0.5, 0.25);
    const auto lhs = cp::qwei_lhs_in_vacuum(g, geo, field);
    EXPECT_EQ(lhs.crossings, 0U);
    EXPECT_EQ(lhs.left_pulse_term, 0.0);
    EXPECT_EQ(lhs.right_pulse_term, 0.0);
    EXPECT_NEAR(lhs.total(), field.background_density() * g.l2_norm_squared(), 1e-15);
}

TEST(QweiLhs, TermStructure) {
    const auto config = cp::ModelConfig::from_chi(3.0);
    const auto field = cp::build_out_tensor(config, constants_for(3.0));
    const cp::GeodesicSpec geo{0.4, 0.0, 0.1, cp::GeodesicKind::timelike};
    const cp::TestFunction g(1.2, 0.8);
    const auto lhs = cp::qwei_lhs_in_vacuum(g, geo, field);
    EXPECT_LT(lhs.casimir_term, 0.0);
    EXPECT_GE(lhs.b_minus_c_term, 0.0);
    EXPECT_GT(lhs.left_pulse_term, 0.0);
    EXPECT_GT(lhs.right_pulse_term, 0.0);
    EXPECT_GT(lhs.crossings, 0U);
}

TEST(QweiLhs, WeakCouplingLeavesCasimirTerm) {
    const auto config = cp::ModelConfig::from_chi(1e-10);
    const auto field = cp::build_out_tensor(config, constants_for(1e-10));
    const cp::GeodesicSpec geo{0.2, 0.0, 0.0, cp::GeodesicKind::timelike};
    const cp::TestFunction g(0.8, 0.5);
    const auto lhs = cp::qwei_lhs_in_vacuum(g, geo, field);
    EXPECT_NEAR(lhs.total(), lhs.casimir_term, 1e-4 * std::abs(lhs.casimir_term));
}

TEST(QweiLhs, SupportMustFollowSwitchOff) {
    const auto config = cp::ModelConfig::from_chi(1.0);
    const auto field = cp::build_out_tensor(config, constants_for(1.0));
    const cp::GeodesicSpec geo{0.0, 0.0, 0.0, cp::GeodesicKind::timelike};
    EXPECT_THROW(cp::qwei_lhs_in_vacuum(cp::TestFunction(0.1, 0.2), geo, field), cp::DomainError);
    const cp::GeodesicSpec late{0.0, -1.0, 0.0, cp::GeodesicKind::timelike};
    EXPECT_THROW(cp::qwei_lhs_in_vacuum(cp::TestFunction(1.5, 0.6), late, field), cp::DomainError);
    const cp::GeodesicSpec null{0.0, 0.0, 0.0, cp::GeodesicKind::null_left};
    EXPECT_THROW(cp::qwei_lhs_in_vacuum(cp::TestFunction(1.5, 0.6), null, field), cp::DomainError);
}

TEST(QweiVerdict, SatisfiedAtRepresentativePoints) {
    struct Case {
        double chi;
        double v;
        double width;
    };
    for (const auto& c : {Case{1.0, 0.0, 0.3}, Case{100.0, 0.9, 0.3}, Case{10.0, 0.5, 0.05}}) {
        const auto config = cp::ModelConfig::from_chi(c.chi);
        const cp::GeodesicSpec geo{c.v, 0.0, 0.05, cp::GeodesicKind::timelike};
        const cp::TestFunction g(1.0, c.width);
        const auto report = cp::qwei_verdict(g, geo, config, constants_for(c.chi));
        EXPECT_GT(report.margin(), 0.0) << "chi=" << c.chi << " v=" << c.v;
        EXPECT_TRUE(report.rhs.converged);
    }
}

TEST(QweiVerdict, DifferenceFormHasSameMargin) {
    const auto config = cp::ModelConfig(2.0, 1.0, 0.3);
    const cp::GeodesicSpec geo{0.5, 0.0, 0.0, cp::GeodesicKind::timelike};
    const cp::TestFunction g(1.2, 0.4);
    const auto constants = constants_for(config.chi());
    const auto absolute = cp::qwei_verdict(g, geo, config, constants);
    const auto difference = cp::qwei_difference_verdict(g, geo, config, constants);
    EXPECT_NE(absolute.lhs_total(), difference.lhs_total());
    EXPECT_NEAR(absolute.margin(), difference.margin(), 1e-12 * std::abs(absolute.rhs_total()));
}
