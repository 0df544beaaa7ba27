#pragma once

// Fourier lattice, shifted mode parameter m = k + A, and the reflection pairing of labels.

#include <warpcyl/error.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace warpcyl {

enum class LatticeKind { Periodic, AntiPeriodic };

inline const char* to_string(LatticeKind kind) {
    return kind == LatticeKind::Periodic ? "periodic" : "antiperiodic";
}

enum class ApsCase { PositiveM, NegativeM, SelfPaired };

inline const char* to_string(ApsCase c) {
    switch (c) {
        case ApsCase::PositiveM: return "positive_m";
        case ApsCase::NegativeM: return "negative_m";
        case ApsCase::SelfPaired: return "self_paired";
    }
    return "unknown";
}

inline constexpr double kSelfPairedTol = 1e-9;
inline constexpr double kLatticeTol = 1e-12;
inline constexpr double kLiftTol = 1e-9;

struct ModeSpec {
    LatticeKind lattice = LatticeKind::Periodic;
    double k = 0.0;
    double A = 0.0;
    double m = 0.0;  // stored as k + A at classification time
    ApsCase aps_case = ApsCase::SelfPaired;
};

inline double lattice_offset(LatticeKind lattice) { return lattice == LatticeKind::Periodic ? 0.0 : 0.5; }

/// Distance from x to the nearest lattice point.
inline double lattice_distance(LatticeKind lattice, double x) {
    const double shifted = x - lattice_offset(lattice);
    return std::abs(shifted - std::round(shifted));
}

inline bool on_lattice(LatticeKind lattice, double k, double tol = kLatticeTol) {
    return lattice_distance(lattice, k) <= tol;
}

/// Lattice points in [lo, hi], ascending.
inline std::vector<double> lattice_window(LatticeKind lattice, double lo, double hi) {
    std::vector<double> points;
    if (lo > hi) return points;
    const double offset = lattice_offset(lattice);
    const double first = std::ceil(lo - offset);
    const double last = std::floor(hi - offset);
    for (double n = first; n <= last; n += 1.0) points.push_back(n + offset);
    return points;
}

inline bool reflection_lift_exists(double A, double tol = kLiftTol) {
    const double twice = 2.0 * A;
    return std::abs(twice - std::round(twice)) <= tol;
}

/// k -> -k - 2A. 2A is snapped to its nearest integer so that pairing is an
/// exact involution on lattice labels.
inline double paired_mode(double k, double A) {
    if (!reflection_lift_exists(A))
        fail(ErrorKind::LiftAbsent, "2A = " + std::to_string(2.0 * A) + " is not an integer");
    return -k - std::round(2.0 * A);
}

inline ApsCase aps_case_of(double m, double eps0 = kSelfPairedTol) {
    if (m > eps0) return ApsCase::PositiveM;
    if (m < -eps0) return ApsCase::NegativeM;
    return ApsCase::SelfPaired;
}

inline ModeSpec classify_mode(LatticeKind lattice, double k, double A, double eps0 = kSelfPairedTol) {
    if (!on_lattice(lattice, k))
        fail(ErrorKind::Lattice, "k = " + std::to_string(k) + " is not on the " + to_string(lattice) + " lattice");
    ModeSpec spec;
    spec.lattice = lattice;
    spec.k = k;
    spec.A = A;
    spec.m = k + A;
    spec.aps_case = aps_case_of(spec.m, eps0);
    return spec;
}

/// The label k = -A when it lies on the lattice (within the self-paired tolerance).
inline std::optional<double> self_paired_label(LatticeKind lattice, double A, double eps0 = kSelfPairedTol) {
    if (lattice_distance(lattice, -A) > eps0) return std::nullopt;
    const double offset = lattice_offset(lattice);
    return std::round(-A - offset) + offset;
}

/// Lattice kind containing k, if any.
inline std::optional<LatticeKind> lattice_of(double k) {
    if (on_lattice(LatticeKind::Periodic, k)) return LatticeKind::Periodic;
    if (on_lattice(LatticeKind::AntiPeriodic, k)) return LatticeKind::AntiPeriodic;
    return std::nullopt;
}

} // namespace warpcyl
