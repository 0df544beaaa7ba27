#include <warpcyl/eigensolve.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace warpcyl;

namespace {

double flat_residual(double lambda, double m, double T) {
    const double d = lambda * lambda - m * m;
    if (d > 0) {
        const double w = std::sqrt(d);
        return std::abs(std::tan(w * T) - w / m);
    }
    const double k = std::sqrt(-d);
    return std::abs(std::tanh(k * T) - k / m);
}

ModeSpec mode_of(double k, double A) { return classify_mode(*lattice_of(k), k, A); }

} // namespace

TEST(Eigensolve, BracketRootsFindsSimpleZeros) {
    const auto roots = bracket_roots([](double x) { return std::sin(x); }, -4.0, 7.0, 111, 1e-12);
    ASSERT_EQ(roots.size(), 4u);
    EXPECT_NEAR(roots[0].value, -M_PI, 1e-12);
    EXPECT_NEAR(roots[3].value, 2 * M_PI, 1e-12);
    for (const auto& r : roots) EXPECT_LE(r.width, 1e-12);
}

TEST(Eigensolve, FlatTranscendentalResiduals) {
    const double T = 3.0, m = 1.5;
    const auto spec = eigenvalues_shooting(WarpProfile::constant(1.0, T), mode_of(1, 0.5), {6.0});
    ASSERT_GE(spec.eigenvalues.size(), 6u);
    int hyperbolic = 0;
    for (double l : spec.eigenvalues) {
        EXPECT_LT(flat_residual(l, m, T), 1e-8) << l;
        if (l * l < m * m) ++hyperbolic;
    }
    // tanh(kT) = k/m has one root in (0, m) when mT > 1, giving the pair +-lambda.
    EXPECT_EQ(hyperbolic, 2);
    for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i)
        EXPECT_GT(spec.eigenvalues[i] - spec.eigenvalues[i - 1], 1e-6);
}

TEST(Eigensolve, ExpPairConfigurationAgreesWithOracle) {
    const auto p = WarpProfile::exp_pair(1.0, 3.0);
    const auto mode = mode_of(1, 0.5);
    const auto a = eigenvalues_shooting(p, mode, {10.0});
    const auto b = oracle_eigenvalues(p, mode, Completion::Transmission, 800, 10.0);
    ASSERT_EQ(a.eigenvalues.size(), b.eigenvalues.size());
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
        EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 5e-3);
}

TEST(Eigensolve, EmptyWindow) {
    const auto p = WarpProfile::exp_pair(1.0, 3.0);
    const auto mode = mode_of(1, 0.5);
    const auto full = eigenvalues_shooting(p, mode, {10.0});
    double least = 1e9;
    for (double l : full.eigenvalues) least = std::min(least, std::abs(l));
    const auto empty = eigenvalues_shooting(p, mode, {0.5 * least});
    EXPECT_TRUE(empty.eigenvalues.empty());
}

TEST(Eigensolve, KernelDimensionExamples) {
    const auto ep = WarpProfile::exp_pair(1.0, 3.0);
    EXPECT_EQ(kernel_dimension(ep, mode_of(1, 0.5), Completion::Transmission), 0);
    EXPECT_EQ(kernel_dimension(WarpProfile::cosh_centered(3.0), mode_of(0, 0), Completion::Transmission), 1);
    EXPECT_EQ(kernel_dimension(ep, mode_of(0, 0), Completion::Transmission), 0);
    EXPECT_EQ(kernel_dimension(WarpProfile::cosh_centered(3.0), mode_of(0, 0), Completion::Chiral), 0);
}

TEST(Eigensolve, KernelVectorSolvesKernelEquations) {
    // u = sqrt(f0/f) e^{mI} satisfies u' + p u - q u = 0.
    const auto p = WarpProfile::exp_pair(1.0, 3.0);
    const KernelVector phi{1.0, 1.0, 0.8};
    const auto c = coefficients(p, 0.8);
    const double h = 1e-5;
    for (double t : {0.4, 1.3, 2.6}) {
        const double du = (phi.eval(p, t + h).first - phi.eval(p, t - h).first) / (2 * h);
        const double dv = (phi.eval(p, t + h).second - phi.eval(p, t - h).second) / (2 * h);
        const auto [u, v] = phi.eval(p, t);
        EXPECT_NEAR(du + c.p(t) * u - c.q(t) * u, 0.0, 1e-7);
        EXPECT_NEAR(dv + c.p(t) * v + c.q(t) * v, 0.0, 1e-7);
    }
}

TEST(Eigensolve, OracleMatchesCoshKernel) {
    const auto p = WarpProfile::cosh_centered(3.0);
    const auto spec = oracle_eigenvalues(p, mode_of(0, 0), Completion::Transmission, 400, 1.0);
    int near_zero = 0;
    for (double l : spec.eigenvalues)
        if (std::abs(l) < 1e-8) ++near_zero;
    EXPECT_EQ(near_zero, 1);
}

TEST(Eigensolve, OracleConvergesAtSecondOrder) {
    const auto p = WarpProfile::constant(1.0, 3.0);
    const auto mode = mode_of(1, 0.5);
    const auto exact = eigenvalues_shooting(p, mode, {4.0, 2001, 1e-13});
    const auto a = oracle_eigenvalues(p, mode, Completion::Transmission, 400, 4.0);
    const auto b = oracle_eigenvalues(p, mode, Completion::Transmission, 800, 4.0);
    ASSERT_EQ(a.eigenvalues.size(), exact.eigenvalues.size());
    ASSERT_EQ(b.eigenvalues.size(), exact.eigenvalues.size());
    for (std::size_t i = 0; i < exact.eigenvalues.size(); ++i) {
        const double ea = std::abs(a.eigenvalues[i] - exact.eigenvalues[i]);
        const double eb = std::abs(b.eigenvalues[i] - exact.eigenvalues[i]);
        if (ea < 1e-9) continue;  // both below the shooting accuracy floor
        const double order = std::log2(ea / eb);
        EXPECT_NEAR(order, 2.0, 0.2) << exact.eigenvalues[i];
    }
}

TEST(Eigensolve, OracleAssemblyHermitian) {
    const auto p = WarpProfile::exp_pair(1.0, 3.0);
    for (const auto& mode : {mode_of(1, 0.5), mode_of(-1, 0.5), mode_of(0, 0)}) {
        for (auto completion : {Completion::Chiral, Completion::Transmission}) {
            const auto P = assemble_oracle(p, mode, completion, 60, PerturbationSpec::bump(3.0, 0.3), 0.5);
            const Eigen::MatrixXcd M = P.dense();
            EXPECT_EQ((M - M.adjoint()).cwiseAbs().maxCoeff(), 0.0);
        }
    }
    EXPECT_THROW(assemble_oracle(p, mode_of(1, 0.5), Completion::Transmission, 49), Error);
}

TEST(Eigensolve, OracleResidualsSmall) {
    const auto p = WarpProfile::exp_pair(1.0, 3.0);
    for (const auto& mode : {mode_of(1, 0.5), mode_of(-2, 0.5), mode_of(0, 0)}) {
        const auto spec = oracle_eigenvalues(p, mode, Completion::Transmission, 800, 10.0);
        ASSERT_FALSE(spec.eigenvalues.empty());
        for (double r : spec.residuals) EXPECT_LE(r, 1e-8);
    }
}

TEST(Eigensolve, FlatSelfPairedClosedForms) {
    // Psi = f^{1/2} psi with m = 0 on the flat strip: transmission gives pi j / T, chiral gives
    // pi (j + 1/2) / T.
    const double T = 3.0;
    const auto p = WarpProfile::constant(1.0, T);
    const auto tr = oracle_eigenvalues(p, mode_of(0, 0), Completion::Transmission, 800, 3.0);
    const auto ch = oracle_eigenvalues(p, mode_of(0, 0), Completion::Chiral, 800, 3.0);
    for (double l : tr.eigenvalues) {
        const double j = std::round(l * T / M_PI);
        EXPECT_NEAR(l, M_PI * j / T, 1e-4);
    }
    for (double l : ch.eigenvalues) {
        const double j = std::round(l * T / M_PI - 0.5);
        EXPECT_NEAR(l, M_PI * (j + 0.5) / T, 1e-4);
    }
    EXPECT_EQ(tr.eigenvalues.size(), 5u);
    EXPECT_EQ(ch.eigenvalues.size(), 6u);
}

TEST(Eigensolve, KernelConsistencyRandomConfigs) {
    std::mt19937 rng(20261014);
    std::uniform_real_distribution<double> alpha(0.2, 2.0), length(1.5, 4.0);
    std::uniform_int_distribution<int> kind(0, 2), kpick(-3, 3);
    std::bernoulli_distribution half(0.5);
    for (int trial = 0; trial < 20; ++trial) {
        const double T = length(rng);
        const WarpProfile prof = kind(rng) == 0   ? WarpProfile::exp_pair(alpha(rng), T)
                                 : kind(rng) == 1 ? WarpProfile::cosh_centered(T)
                                                  : WarpProfile::constant(alpha(rng), T);
        const double A = half(rng) ? 0.5 : 0.25;
        double k = kpick(rng);
        if (std::abs(k + A) < 1e-9) k += 1;
        const auto mode = classify_mode(LatticeKind::Periodic, k, A);
        ASSERT_EQ(kernel_dimension(prof, mode, Completion::Transmission), 0);
        const auto spec = oracle_eigenvalues(prof, mode, Completion::Transmission, 800, 1e-4);
        EXPECT_TRUE(spec.eigenvalues.empty()) << "trial " << trial;
    }
}

TEST(Eigensolve, MethodAgreement) {
    const int n = 800;
    struct C {
        WarpProfile p;
        double k, A;
    };
    const std::vector<C> configs{{WarpProfile::constant(1.0, 3.0), 1, 0.5},
                                 {WarpProfile::exp_pair(1.0, 3.0), 1, 0.5},
                                 {WarpProfile::exp_pair(1.0, 3.0), -2, 0.5},
                                 {WarpProfile::cosh_centered(3.0), 1, 0},
                                 {WarpProfile::exp_pair(0.5, 2.0), -0.5, 0}};
    for (const auto& c : configs) {
        const auto mode = mode_of(c.k, c.A);
        const double bound = 10.0 * std::pow(c.p.length() / n, 2);
        const auto a = eigenvalues_shooting(c.p, mode, {5.0});
        const auto b = oracle_eigenvalues(c.p, mode, Completion::Transmission, n, 5.0);
        ASSERT_EQ(a.eigenvalues.size(), b.eigenvalues.size());
        for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
            EXPECT_LE(std::abs(a.eigenvalues[i] - b.eigenvalues[i]), bound) << a.eigenvalues[i];
    }
}

TEST(Eigensolve, BlockSpectrumDispatch) {
    const auto p = WarpProfile::cosh_centered(3.0);
    SolverOptions opts;
    opts.shooting.lambda_max = 3.0;
    opts.oracle_n = 200;
    EXPECT_EQ(block_spectrum(p, mode_of(0, 0), opts).method, SpectrumMethod::Oracle);
    EXPECT_EQ(block_spectrum(p, mode_of(1, 0), opts).method, SpectrumMethod::Shooting);
}

TEST(Eigensolve, CyclicSturmMatchesDenseSolver) {
    const auto p = WarpProfile::exp_pair(1.0, 3.0);
    const auto mode = mode_of(0, 0);
    const auto P = assemble_oracle(p, mode, Completion::Transmission, 60, PerturbationSpec::bump(4.0, 0.3), 0.7);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> dense(P.dense(), Eigen::EigenvaluesOnly);
    std::vector<double> expect;
    for (Eigen::Index i = 0; i < dense.eigenvalues().size(); ++i)
        if (std::abs(dense.eigenvalues()(i)) <= 12.0) expect.push_back(dense.eigenvalues()(i));
    const auto got = oracle_eigenvalues(P, mode, 12.0);
    ASSERT_EQ(got.eigenvalues.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        EXPECT_NEAR(got.eigenvalues[i], expect[i], 1e-10);
        EXPECT_LE(got.residuals[i], 1e-8);
    }
}
