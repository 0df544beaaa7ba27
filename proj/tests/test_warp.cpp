#include <warpcyl/warp.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace warpcyl;

namespace {

std::vector<WarpProfile> closed_forms() {
    return {WarpProfile::constant(1.0, 3.0), WarpProfile::constant(2.5, 2.0), WarpProfile::exp_pair(1.0, 3.0),
            WarpProfile::exp_pair(0.3, 2.0), WarpProfile::cosh_centered(3.0)};
}

} // namespace

TEST(Warp, EvalExamples) {
    EXPECT_DOUBLE_EQ(eval_f(WarpProfile::exp_pair(1.0, 3.0), 0.0), 2.0);
    const auto flat = WarpProfile::constant(1.0, 3.0);
    for (double t : {0.0, 0.7, 3.0}) EXPECT_EQ(eval_f(flat, t), 1.0);
    EXPECT_NEAR(eval_f(WarpProfile::exp_pair(1.0, 3.0), 3.0), std::exp(3.0) + std::exp(-3.0), 1e-12);
}

TEST(Warp, DomainErrors) {
    const auto p = WarpProfile::exp_pair(1.0, 3.0);
    EXPECT_THROW(p.f(-1e-9), Error);
    EXPECT_THROW(p.f(3.0 + 1e-9), Error);
    try {
        inv_f_integral(p, 4.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
}

TEST(Warp, CoefficientsFlatAndExpPair) {
    const auto flat = coefficients(WarpProfile::constant(1.0, 3.0), 1.5);
    for (double t : {0.0, 1.0, 2.9}) {
        EXPECT_EQ(flat.p(t), 0.0);
        EXPECT_EQ(flat.q(t), 1.5);
    }
    const auto ep = WarpProfile::exp_pair(1.0, 3.0);
    const auto c = coefficients(ep, 1.5);
    EXPECT_NEAR(c.p(0.0), 0.0, 1e-15);
    EXPECT_NEAR(c.q(0.0), 0.75, 1e-15);

    // Central differences of eval_f at t = 3 (one-sided shift keeps the stencil inside [0, T]).
    const double t = 3.0 - 1e-3;
    const double h = 1e-5;
    const double fd = (ep.f(t + h) - ep.f(t - h)) / (2.0 * h);
    EXPECT_NEAR(c.p(t), fd / (2.0 * ep.f(t)), 1e-10);
    EXPECT_NEAR(c.q(t), 1.5 / ep.f(t), 1e-10);
    const double T = 3.0;
    const double fd_end = (3.0 * ep.f(T) - 4.0 * ep.f(T - h) + ep.f(T - 2 * h)) / (2.0 * h);
    EXPECT_NEAR(c.p(T), fd_end / (2.0 * ep.f(T)), 1e-8);
}

TEST(Warp, DqMatchesFiniteDifference) {
    for (const auto& p : closed_forms()) {
        const auto c = coefficients(p, -0.7);
        const double h = 1e-5;
        for (double t : {0.5, 1.1, 1.7}) EXPECT_NEAR(c.dq(t), (c.q(t + h) - c.q(t - h)) / (2 * h), 1e-8);
    }
}

TEST(Warp, InverseIntegral) {
    EXPECT_NEAR(inv_f_integral(WarpProfile::constant(1.0, 3.0), 3.0), 3.0, 1e-14);
    const auto ep = WarpProfile::exp_pair(1.0, 3.0);
    EXPECT_EQ(inv_f_integral(ep, 0.0), 0.0);
    EXPECT_NEAR(inv_f_integral(ep, 1e-8), 0.5e-8, 1e-14);
    // d/dt arctan(e^t) = 1/(e^t + e^-t).
    for (double t : {0.3, 1.0, 2.2, 3.0}) {
        const double exact = std::atan(std::exp(t)) - std::numbers::pi / 4.0;
        EXPECT_NEAR(inv_f_integral(ep, t), exact, 1e-10) << t;
    }
}

TEST(Warp, InverseIntegralMonotone) {
    for (const auto& p : closed_forms()) {
        double prev = -1.0;
        for (int i = 0; i <= 60; ++i) {
            const double v = inv_f_integral(p, p.length() * i / 60.0);
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(Warp, DerivativeConsistency) {
    for (const auto& p : closed_forms()) {
        const double T = p.length();
        const double h = 1e-5;
        for (int i = 0; i < 100; ++i) {
            const double t = h + (T - 2 * h) * i / 99.0;
            const double fd = (p.f(t + h) - p.f(t - h)) / (2 * h);
            EXPECT_LE(std::abs(p.df(t) - fd), 1e-6) << to_string(p.kind()) << " t=" << t;
        }
    }
}

TEST(Warp, TabulatedRejectsNonPositive) {
    std::vector<double> s(12, 1.0);
    s[5] = 0.0;
    EXPECT_THROW(WarpProfile::tabulated(s, 2.0), Error);
    s[5] = -0.2;
    EXPECT_THROW(WarpProfile::tabulated(s, 2.0), Error);
    EXPECT_THROW(WarpProfile::tabulated(std::vector<double>(7, 1.0), 2.0), Error);
    EXPECT_THROW(WarpProfile::constant(-1.0, 2.0), Error);
    EXPECT_THROW(WarpProfile::exp_pair(0.0, 2.0), Error);
}

TEST(Warp, TabulatedNonUniformGridRejected) {
    std::vector<double> t{0, 0.1, 0.2, 0.3, 0.45, 0.5, 0.6, 0.7};
    std::vector<double> f(8, 1.0);
    EXPECT_THROW(WarpProfile::tabulated(t, f), Error);
}

TEST(Warp, TabulatedReproducesSmoothProfile) {
    const double T = 3.0;
    const int N = 301;
    std::vector<double> samples(N);
    for (int j = 0; j < N; ++j) {
        const double t = T * j / (N - 1);
        samples[j] = std::exp(t) + std::exp(-t);
    }
    const auto tab = WarpProfile::tabulated(samples, T);
    const auto ref = WarpProfile::exp_pair(1.0, T);
    for (double t : {0.05, 0.77, 1.5, 2.31, 2.95}) {
        EXPECT_NEAR(tab.f(t), ref.f(t), 1e-5 * ref.f(t));
        EXPECT_NEAR(tab.df(t), ref.df(t), 1e-3 * ref.f(t));
    }
    EXPECT_NEAR(inv_f_integral(tab, T), inv_f_integral(ref, T), 1e-7);
}
