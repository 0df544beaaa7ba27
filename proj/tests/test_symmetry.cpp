#include <warpcyl/symmetry.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace warpcyl;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Internal;
}

} // namespace

TEST(Symmetry, PairGapExamples) {
    EXPECT_LE(pair_spectrum_gap(WarpProfile::exp_pair(1.0, 3.0), 1, 0.5, {8.0}), 1e-6);
    const auto flat = pair_spectrum_check(WarpProfile::constant(1.0, 3.0), 2, 0.0, {6.0});
    EXPECT_EQ(flat.k_paired, -2);
    EXPECT_GT(flat.count, 0u);
    EXPECT_LE(flat.gap, 1e-8);
    EXPECT_EQ(kind_of([] { pair_spectrum_gap(WarpProfile::exp_pair(1.0, 3.0), 0, 0.0); }),
              ErrorKind::Precondition);
    EXPECT_EQ(kind_of([] { pair_spectrum_gap(WarpProfile::exp_pair(1.0, 3.0), 1, 0.3); }), ErrorKind::LiftAbsent);
}

TEST(Symmetry, PairGapAntiperiodic) {
    const auto r = pair_spectrum_check(WarpProfile::cosh_centered(2.5), 0.5, 1.0, {6.0});
    EXPECT_EQ(r.k_paired, -2.5);
    EXPECT_LE(r.gap, 1e-6);
}

TEST(Symmetry, EtaExamples) {
    const auto ep = WarpProfile::exp_pair(1.0, 3.0);
    for (const auto& r : {boundary_eta(ep, 1.5, Boundary::Y0), boundary_eta(ep, -0.5, Boundary::YT)}) {
        EXPECT_EQ(r.eta, 0.0);
        EXPECT_EQ(r.h, 0);
        EXPECT_EQ(r.eta_bar, 0.0);
    }
    for (auto b : {Boundary::Y0, Boundary::YT}) {
        const auto r = boundary_eta(ep, 0.0, b);
        EXPECT_EQ(r.eta, 0.0);
        EXPECT_EQ(r.h, 2);
        EXPECT_EQ(r.eta_bar, 1.0);
        EXPECT_EQ(r.eta_bar, (r.eta + r.h) / 2.0);
    }
}

TEST(Symmetry, ChiralIndexExamples) {
    EXPECT_EQ(chiral_index(WarpProfile::exp_pair(1.0, 3.0), 0.5, LatticeKind::Periodic, -6, 6,
                           Completion::Transmission),
              0);
    EXPECT_EQ(chiral_index(WarpProfile::constant(1.0, 3.0), 0.3, LatticeKind::Periodic, -6, 6,
                           Completion::Transmission),
              0);
    EXPECT_EQ(chiral_index(WarpProfile::cosh_centered(3.0), 0.0, LatticeKind::Periodic, -6, 6,
                           Completion::Transmission),
              0);
}

TEST(Symmetry, CoshKernelGradingVanishes) {
    // (1,1) f^{-1/2}: |v|^2 - |u|^2 = 0 pointwise, so the graded count cancels exactly.
    const auto p = WarpProfile::cosh_centered(3.0);
    const auto basis = kernel_basis(p, classify_mode(LatticeKind::Periodic, 0, 0), Completion::Transmission);
    ASSERT_EQ(basis.size(), 1u);
    const auto mom = detail::kernel_moments(p, basis[0]);
    EXPECT_EQ(mom.grading, 0.0);
    // |u|^2 f = f(0) so the norm is 2 f(0) T.
    EXPECT_NEAR(mom.norm2, 2.0 * p.f(0) * 3.0, 1e-10);
}

TEST(Symmetry, TraceExamples) {
    for (const auto& p : {WarpProfile::exp_pair(1.0, 3.0), WarpProfile::cosh_centered(3.0),
                          WarpProfile::constant(1, 2)}) {
        const auto r = reflection_trace(p, 0.5, LatticeKind::Periodic, Completion::Transmission);
        EXPECT_FALSE(r.self_paired_present);
        EXPECT_EQ(r.trace, 0.0);
    }
    const auto ep = reflection_trace(WarpProfile::exp_pair(1.0, 3.0), 0.0, LatticeKind::Periodic,
                                     Completion::Transmission);
    EXPECT_TRUE(ep.self_paired_present);
    EXPECT_EQ(ep.kernel_dim_self_paired, 0);
    EXPECT_EQ(ep.trace, 0.0);
    const auto ch = reflection_trace(WarpProfile::cosh_centered(3.0), 0.0, LatticeKind::Periodic,
                                     Completion::Transmission);
    EXPECT_EQ(ch.kernel_dim_self_paired, 1);
    EXPECT_NEAR(ch.trace, 1.0, 1e-8);
    const auto chiral = reflection_trace(WarpProfile::cosh_centered(3.0), 0.0, LatticeKind::Periodic,
                                         Completion::Chiral);
    EXPECT_EQ(chiral.trace, 0.0);
    EXPECT_EQ(kind_of([] {
                  reflection_trace(WarpProfile::cosh_centered(3.0), 0.3, LatticeKind::Periodic,
                                   Completion::Transmission);
              }),
              ErrorKind::LiftAbsent);
}

TEST(Symmetry, TraceLocalization) {
    const auto p = WarpProfile::cosh_centered(3.0);
    const double base = reflection_trace(p, 0.0, LatticeKind::Periodic, Completion::Transmission).trace;
    for (auto window : {std::pair{-1.0, 1.0}, std::pair{-5.0, 5.0}, std::pair{0.0, 3.0}, std::pair{2.0, 7.0}}) {
        const auto r = reflection_trace(p, 0.0, LatticeKind::Periodic, Completion::Transmission, window);
        EXPECT_EQ(r.trace, base);
    }
    // Antiperiodic lattice with A0 = 1/2 carries the self-paired label -1/2.
    const auto anti = reflection_trace(p, 0.5, LatticeKind::AntiPeriodic, Completion::Transmission, {{-4.0, 4.0}});
    EXPECT_TRUE(anti.self_paired_present);
    EXPECT_NEAR(anti.trace, 1.0, 1e-8);
}

TEST(Symmetry, PairGapMatrix) {
    struct C {
        WarpProfile p;
        double k, A;
    };
    const std::vector<C> configs{{WarpProfile::exp_pair(1.0, 3.0), -1, 0.5},
                                 {WarpProfile::exp_pair(0.5, 2.0), 1, 1.0},
                                 {WarpProfile::cosh_centered(3.0), 2, -0.5},
                                 {WarpProfile::constant(1.5, 2.0), 0.5, 0.5}};
    for (const auto& c : configs) EXPECT_LE(pair_spectrum_gap(c.p, c.k, c.A, {6.0}), 1e-6) << c.k;
}
