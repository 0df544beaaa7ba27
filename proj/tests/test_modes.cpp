#include <warpcyl/modes.hpp>

#include <gtest/gtest.h>

#include <vector>

using namespace warpcyl;

TEST(Modes, LatticeWindowExamples) {
    EXPECT_EQ(lattice_window(LatticeKind::Periodic, -2.2, 1.3), (std::vector<double>{-2, -1, 0, 1}));
    EXPECT_EQ(lattice_window(LatticeKind::AntiPeriodic, -1, 1), (std::vector<double>{-0.5, 0.5}));
    EXPECT_TRUE(lattice_window(LatticeKind::Periodic, 0.1, 0.9).empty());
    EXPECT_EQ(lattice_window(LatticeKind::Periodic, 2, 2), (std::vector<double>{2}));
}

TEST(Modes, ReflectionLift) {
    EXPECT_TRUE(reflection_lift_exists(0.5));
    EXPECT_TRUE(reflection_lift_exists(0.0));
    EXPECT_FALSE(reflection_lift_exists(0.3));
    EXPECT_TRUE(reflection_lift_exists(-1.5));
}

TEST(Modes, PairedModeExamples) {
    EXPECT_EQ(paired_mode(1, 0.5), -2);
    EXPECT_EQ(paired_mode(0, 0), 0);
    const double k = 5, A = -1;
    const double kv = paired_mode(k, A);
    EXPECT_EQ(kv, -3);
    EXPECT_EQ(kv + A, -(k + A));
    try {
        paired_mode(1, 0.3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LiftAbsent);
    }
}

TEST(Modes, ClassifyExamples) {
    auto m = classify_mode(LatticeKind::Periodic, 1, 0.5);
    EXPECT_EQ(m.m, 1.5);
    EXPECT_EQ(m.aps_case, ApsCase::PositiveM);
    m = classify_mode(LatticeKind::Periodic, -1, 0.5);
    EXPECT_EQ(m.m, -0.5);
    EXPECT_EQ(m.aps_case, ApsCase::NegativeM);
    m = classify_mode(LatticeKind::Periodic, 0, 0);
    EXPECT_EQ(m.aps_case, ApsCase::SelfPaired);
    EXPECT_EQ(classify_mode(LatticeKind::Periodic, 0, 5e-10).aps_case, ApsCase::SelfPaired);
    EXPECT_EQ(classify_mode(LatticeKind::Periodic, 0, 2e-9).aps_case, ApsCase::PositiveM);
    try {
        classify_mode(LatticeKind::Periodic, 0.5, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Lattice);
    }
}

TEST(Modes, InvolutionAndClosure) {
    for (auto lattice : {LatticeKind::Periodic, LatticeKind::AntiPeriodic}) {
        for (double A : {-2.0, -1.5, -0.5, 0.0, 0.5, 1.0, 2.5}) {
            for (double k : lattice_window(lattice, -6, 6)) {
                const double kv = paired_mode(k, A);
                EXPECT_EQ(paired_mode(kv, A), k);
                EXPECT_TRUE(on_lattice(lattice, kv));
                EXPECT_EQ(kv + A, -(k + A));
            }
        }
    }
}

TEST(Modes, SelfPairedUniqueness) {
    for (auto lattice : {LatticeKind::Periodic, LatticeKind::AntiPeriodic}) {
        for (double A : {-1.5, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0}) {
            int count = 0;
            for (double k : lattice_window(lattice, -5, 5)) {
                const auto spec = classify_mode(lattice, k, A);
                if (spec.aps_case == ApsCase::SelfPaired) {
                    ++count;
                    EXPECT_LE(std::abs(k + A), kSelfPairedTol);
                    EXPECT_EQ(self_paired_label(lattice, A).value(), k);
                }
            }
            EXPECT_LE(count, 1);
            EXPECT_EQ(count == 1, self_paired_label(lattice, A).has_value());
        }
    }
}
