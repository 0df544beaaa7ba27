#pragma once

// Consequences of the reflection lift on the APS problem: equal spectra of paired
// blocks, boundary eta invariants, the ordinary index, and the reflection trace on
// the harmonic space.

#include <warpcyl/eigensolve.hpp>
#include <warpcyl/error.hpp>
#include <warpcyl/modes.hpp>
#include <warpcyl/warp.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace warpcyl {

enum class Boundary { Y0, YT };

inline const char* to_string(Boundary b) { return b == Boundary::Y0 ? "Y0" : "YT"; }

struct EtaReport {
    double m = 0.0;
    Boundary boundary = Boundary::Y0;
    double eta = 0.0;
    int h = 0;
    double eta_bar = 0.0;  // (eta + h) / 2
};

struct TraceReport {
    double A0 = 0.0;
    LatticeKind lattice = LatticeKind::Periodic;
    Completion completion = Completion::Transmission;
    bool self_paired_present = false;
    int kernel_dim_self_paired = 0;
    double trace = 0.0;
};

struct PairGap {
    double k = 0.0;
    double k_paired = 0.0;
    double m = 0.0;
    std::size_t count = 0;
    double gap = 0.0;
};

/// Spectra of the blocks k and k^v = -k - 2A compared in sorted order.
inline PairGap pair_spectrum_check(const WarpProfile& profile, double k, double A, const ShootingOptions& opts = {}) {
    const auto lattice = lattice_of(k);
    if (!lattice) fail(ErrorKind::Lattice, "k = " + std::to_string(k) + " lies on neither lattice");
    if (!reflection_lift_exists(A))
        fail(ErrorKind::LiftAbsent, "2A = " + std::to_string(2.0 * A) + " is not an integer");
    const ModeSpec mode = classify_mode(*lattice, k, A);
    if (mode.aps_case == ApsCase::SelfPaired)
        fail(ErrorKind::Precondition, "pair check needs m != 0; k = " + std::to_string(k) + " is self-paired");
    const double kv = paired_mode(k, A);
    const ModeSpec paired = classify_mode(*lattice, kv, A);

    const Spectrum a = eigenvalues_shooting(profile, mode, opts);
    const Spectrum b = eigenvalues_shooting(profile, paired, opts);
    if (a.eigenvalues.size() != b.eigenvalues.size())
        fail(ErrorKind::Mismatch, "paired spectra differ in cardinality (" + std::to_string(a.eigenvalues.size()) +
                                      " vs " + std::to_string(b.eigenvalues.size()) + ")");
    PairGap out{k, kv, mode.m, a.eigenvalues.size(), 0.0};
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
        out.gap = std::max(out.gap, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
    return out;
}

inline double pair_spectrum_gap(const WarpProfile& profile, double k, double A, const ShootingOptions& opts = {}) {
    return pair_spectrum_check(profile, k, A, opts).gap;
}

/// The block B_0 = m/f(0) sigma_3 (B_T = -m/f(T) sigma_3) has spectrum {+c, -c}.
inline EtaReport boundary_eta(const WarpProfile& profile, double m, Boundary boundary) {
    const double f = boundary == Boundary::Y0 ? profile.f(0.0) : profile.f(profile.length());
    const double sign = boundary == Boundary::Y0 ? 1.0 : -1.0;
    const std::array<double, 2> spectrum{sign * m / f, -sign * m / f};
    EtaReport r;
    r.m = m;
    r.boundary = boundary;
    const bool zero_block = aps_case_of(m) == ApsCase::SelfPaired;
    for (double mu : spectrum) {
        if (zero_block)
            ++r.h;
        else
            r.eta += mu > 0.0 ? 1.0 : -1.0;
    }
    r.eta_bar = (r.eta + r.h) / 2.0;
    return r;
}

namespace detail {

/// Composite 4-point Gauss-Legendre on 16 panels (64 nodes) of g(t) f(t) over [0, T].
template <typename G>
double weighted_quadrature(const WarpProfile& profile, G&& g) {
    constexpr std::array<double, 4> x{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                      0.8611363115940526};
    constexpr std::array<double, 4> w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                      0.3478548451374538};
    constexpr int panels = 16;
    const double T = profile.length();
    const double width = T / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double centre = (p + 0.5) * width;
        for (int j = 0; j < 4; ++j) {
            const double t = centre + 0.5 * width * x[j];
            sum += w[j] * g(t) * profile.f(t);
        }
    }
    return 0.5 * width * sum;
}

struct KernelMoments {
    double norm2 = 0.0;    // <phi, phi>
    double sigma1 = 0.0;   // <phi, sigma_1 phi> = 2 Re(u v)
    double grading = 0.0;  // <phi, gamma_3 phi> with gamma_3 = -sigma_3: |v|^2 - |u|^2
};

inline KernelMoments kernel_moments(const WarpProfile& profile, const KernelVector& phi) {
    KernelMoments out;
    out.norm2 = weighted_quadrature(profile, [&](double t) {
        const auto [u, v] = phi.eval(profile, t);
        return u * u + v * v;
    });
    out.sigma1 = weighted_quadrature(profile, [&](double t) {
        const auto [u, v] = phi.eval(profile, t);
        return 2.0 * u * v;
    });
    out.grading = weighted_quadrature(profile, [&](double t) {
        const auto [u, v] = phi.eval(profile, t);
        return v * v - u * u;
    });
    return out;
}

} // namespace detail

/// Signed chirality count of ker D over the modes k in [k_lo, k_hi]. Every m != 0 block has
/// trivial kernel, so only the self-paired kernel (graded by gamma_3) can contribute.
inline int chiral_index(const WarpProfile& profile, double A0, LatticeKind lattice, double k_lo, double k_hi,
                        Completion completion) {
    double total = 0.0;
    for (double k : lattice_window(lattice, k_lo, k_hi)) {
        const ModeSpec mode = classify_mode(lattice, k, A0);
        for (const KernelVector& phi : kernel_basis(profile, mode, completion)) {
            const auto mom = detail::kernel_moments(profile, phi);
            total += mom.grading / mom.norm2;
        }
    }
    const int index = static_cast<int>(std::lround(total));
    if (!self_paired_label(lattice, A0) && index != 0)
        fail(ErrorKind::Internal, "nonzero index without a self-paired sector");
    return index;
}

/// Tr U_r on ker D^APS. U_r exchanges the k and k^v kernels, so each paired orbit gives an
/// off-diagonal block of zero trace; on the self-paired block U_r acts as sigma_1.
/// When a window is given, its modes are scanned explicitly as well.
inline TraceReport reflection_trace(const WarpProfile& profile, double A0, LatticeKind lattice, Completion completion,
                                    std::optional<std::pair<double, double>> window = std::nullopt) {
    if (!reflection_lift_exists(A0))
        fail(ErrorKind::LiftAbsent, "2A = " + std::to_string(2.0 * A0) + " is not an integer");
    TraceReport r;
    r.A0 = A0;
    r.lattice = lattice;
    r.completion = completion;
    const auto self_k = self_paired_label(lattice, A0);
    r.self_paired_present = self_k.has_value();

    if (window) {
        for (double k : lattice_window(lattice, window->first, window->second)) {
            const ModeSpec mode = classify_mode(lattice, k, A0);
            if (mode.aps_case == ApsCase::SelfPaired) continue;
            // Paired orbit: kernels on k and k^v, reflection maps one onto the other.
            const ModeSpec partner = classify_mode(lattice, paired_mode(k, A0), A0);
            const int dk = kernel_dimension(profile, mode, completion);
            const int dkv = kernel_dimension(profile, partner, completion);
            if (dk != dkv) fail(ErrorKind::Internal, "paired kernels differ in dimension");
        }
    }

    if (self_k) {
        const ModeSpec mode = classify_mode(lattice, *self_k, A0);
        const auto basis = kernel_basis(profile, mode, completion);
        r.kernel_dim_self_paired = static_cast<int>(basis.size());
        for (const KernelVector& phi : basis) {
            const auto mom = detail::kernel_moments(profile, phi);
            r.trace += mom.sigma1 / mom.norm2;
        }
    }
    return r;
}

} // namespace warpcyl
