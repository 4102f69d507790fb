#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "casimir_pulse/eigensolve.hpp"

namespace cp = casimir_pulse;

namespace {

constexpr double pi = std::numbers::pi;

// Plain bisection on Z - chi cot Z over ((j-1)pi, (j-1/2)pi) in long double.
long double bisect_root(long double chi, std::size_t j) {
    const long double pil = 3.141592653589793238462643383279502884L;
    long double lo = static_cast<long double>(j - 1) * pil + 1e-15L;
    long double hi = (static_cast<long double>(j) - 0.5L) * pil;
    for (int i = 0; i < 200 && hi - lo > 1e-16L * hi; ++i) {
        const long double mid = 0.5L * (lo + hi);
        const long double g = mid - chi * std::cos(mid) / std::sin(mid);
        (g < 0.0L ? lo : hi) = mid;
    }
    return 0.5L * (lo + hi);
}

} // namespace

TEST(Eigensolve, FirstRootMatchesGolden) {
    // mpmath findroot at 30 digits.
    const auto table = cp::solve_roots(1.0, 1);
    EXPECT_NEAR(table.root(1), 0.86033358901937976248, 1e-14);
    EXPECT_LT(std::abs(table.residual[0]), 1e-12);
}

TEST(Eigensolve, AgreesWithBisectionOracle) {
    for (double chi : {0.01, 0.3, 1.0, 7.5, 100.0}) {
        const auto table = cp::solve_roots(chi, 50);
        for (std::size_t j : {1U, 2U, 7U, 50U}) {
            const double oracle = static_cast<double>(bisect_root(chi, j));
            EXPECT_NEAR(table.root(j), oracle, 4e-15 * oracle) << "chi=" << chi << " j=" << j;
        }
    }
}

TEST(Eigensolve, RootsAreBracketedAndIncreasing) {
    for (double chi : {1e-3, 0.5, 1.0, 20.0, 1e3}) {
        const auto table = cp::solve_roots(chi, 2000);
        for (std::size_t j = 1; j <= table.j_max; ++j) {
            const double a = static_cast<double>(j - 1) * pi;
            ASSERT_GT(table.root(j), a);
            ASSERT_LT(table.root(j), a + pi / 2.0);
            ASSERT_GT(table.offset(j), 0.0);
            ASSERT_LT(table.offset(j), pi / 2.0);
            if (j > 1) {
                ASSERT_GT(table.root(j), table.root(j - 1));
            }
        }
    }
}

TEST(Eigensolve, ResidualWithinTolerance) {
    const auto table = cp::solve_roots(1.0, 10);
    for (double r : table.residual) {
        EXPECT_LT(std::abs(r), 1e-12);
    }
}

TEST(Eigensolve, LargeIndexOffsetBound) {
    const auto table = cp::solve_roots(1.0, 1000);
    const double Z = table.root(1000);
    EXPECT_GT(Z, 999.0 * pi);
    EXPECT_LT(Z, 999.5 * pi);
    EXPECT_LT(table.offset(1000), 1.0 / (999.0 * pi));
}

TEST(Eigensolve, WeakCouplingLimit) {
    const auto table = cp::solve_roots(1e-8, 2);
    EXPECT_GT(table.root(2), pi);
    EXPECT_LT(table.offset(2), 1e-8);
    EXPECT_NEAR(table.root(1), std::sqrt(1e-8), 1e-11);
}

TEST(Eigensolve, NormalizationFormsAgree) {
    for (double chi : {0.05, 1.0, 42.0}) {
        const auto table = cp::solve_roots(chi, 3000);
        for (std::size_t j = 1; j <= table.j_max; ++j) {
            ASSERT_NEAR(table.norm2(j), cp::alternate_norm2(table, j), 1e-12) << "chi=" << chi << " j=" << j;
            ASSERT_GT(table.norm2(j), 0.0);
            ASSERT_LE(table.norm2(j), 1.0);
        }
    }
}

TEST(Eigensolve, CouplingMonotone) {
    std::vector<double> previous;
    for (double chi = 0.1; chi < 50.0; chi *= 1.7) {
        const auto table = cp::solve_roots(chi, 40);
        if (!previous.empty()) {
            for (std::size_t i = 0; i < 40; ++i) {
                ASSERT_GT(table.Z[i], previous[i]);
            }
        }
        previous = table.Z;
    }
}

TEST(Eigensolve, ApproximationDominatesRoot) {
    for (double chi : {0.01, 0.5, 1.0, 3.0, 30.0, 300.0}) {
        const auto table = cp::solve_roots(chi, 5000);
        for (std::size_t j = 1; j <= table.j_max; ++j) {
            const double approx = cp::approx_root(chi, j);
            // A few ulps of slack where both sit within rounding of each other.
            ASSERT_GE(approx, table.root(j) * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()))
                << "chi=" << chi << " j=" << j;
        }
    }
    EXPECT_GE(cp::approx_root(1.0, 1), 0.8603335890);
}

TEST(Eigensolve, ApproximationLimits) {
    EXPECT_EQ(cp::approx_root(0.0, 1), 0.0);
    EXPECT_EQ(cp::approx_root(0.0, 6), 5.0 * pi);
    const double chi = 2.0;
    const std::size_t j = 1000;
    const double a = static_cast<double>(j - 1) * pi;
    EXPECT_NEAR((cp::approx_root(chi, j) - a) * a / chi, 1.0, 1e-6);
}

TEST(Eigensolve, DerivativeMatchesFiniteDifference) {
    const double h = 1e-6;
    for (double chi : {0.2, 1.0, 12.0}) {
        const auto table = cp::solve_roots(chi, 20);
        const auto up = cp::solve_roots(chi + h, 20);
        const auto down = cp::solve_roots(chi - h, 20);
        for (std::size_t j = 1; j <= 20; ++j) {
            const double fd = (up.root(j) - down.root(j)) / (2.0 * h);
            const double exact = cp::root_derivative(table, j);
            EXPECT_GT(exact, 0.0);
            EXPECT_NEAR(fd, exact, 1e-5 * exact) << "chi=" << chi << " j=" << j;
        }
    }
}

TEST(Eigensolve, SquaredRootSlopeTendsToOneAtWeakCoupling) {
    // d(Z_1^2)/dchi = 2 A_1^2 -> 1 as Z_1^2 -> chi.
    double last_gap = 1.0;
    for (double chi : {1e-2, 1e-4, 1e-6}) {
        const auto table = cp::solve_roots(chi, 1);
        const double slope = 2.0 * table.root(1) * cp::root_derivative(table, 1);
        const double gap = std::abs(slope - 1.0);
        EXPECT_LT(gap, last_gap);
        last_gap = gap;
    }
    EXPECT_LT(last_gap, 1e-5);
}

TEST(Eigensolve, RejectsInvalidInput) {
    EXPECT_THROW(cp::solve_roots(0.0, 10), cp::DomainError);
    EXPECT_THROW(cp::solve_roots(-1.0, 10), cp::DomainError);
    EXPECT_THROW(cp::solve_roots(std::nan(""), 10), cp::DomainError);
    EXPECT_THROW(cp::solve_roots(1.0, 0), cp::DomainError);
    EXPECT_THROW(cp::solve_roots(1.0, 10, {.tol_root = 1e-3}), cp::DomainError);
    EXPECT_THROW(cp::solve_roots(1.0, 10, {.tol_root = 0.0}), cp::DomainError);
    EXPECT_THROW(cp::approx_root(-0.5, 1), cp::DomainError);
    EXPECT_THROW(cp::approx_root(1.0, 0), cp::DomainError);
    const auto table = cp::solve_roots(1.0, 5);
    EXPECT_THROW((void)cp::root_derivative(table, 6), std::out_of_range);
    EXPECT_THROW((void)table.root(0), std::out_of_range);
}

TEST(Eigensolve, IterationCapRaisesConvergenceError) {
    try {
        (void)cp::solve_roots(1.0, 3, {.iteration_cap = 5});
        FAIL() << "expected ConvergenceError";
    } catch (const cp::ConvergenceError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("j=1"), std::string::npos);
        EXPECT_NE(what.find("bracket"), std::string::npos);
    }
}

TEST(Eigensolve, UnreachableToleranceRaisesConvergenceError) {
    EXPECT_THROW((void)cp::solve_roots(1.0, 100, {.tol_root = 1e-17}), cp::ConvergenceError);
}

TEST(Eigensolve, ThreadCountDoesNotChangeResults) {
    const auto serial = cp::solve_roots(3.3, 4097);
    const auto threaded = cp::solve_roots(3.3, 4097, {.threads = 7});
    EXPECT_EQ(serial.Z, threaded.Z);
    EXPECT_EQ(serial.A2, threaded.A2);
    EXPECT_EQ(serial.residual, threaded.residual);
}

TEST(Eigensolve, RootMinusMultipleIsExact) {
    const auto table = cp::solve_roots(0.7, 300);
    for (std::size_t j : {1U, 10U, 300U}) {
        EXPECT_EQ(table.root_minus_multiple(j, j - 1), table.offset(j));
        EXPECT_NEAR(table.root_minus_multiple(j, 3), table.root(j) - 3.0 * pi, 1e-12 * table.root(j));
    }
}
