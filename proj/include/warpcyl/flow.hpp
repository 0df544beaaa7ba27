#pragma once

// Spectral flow in two settings.
//  * Holonomy paths A(s): the APS domain jumps where k + A(s) = 0, and the flow is the
//    signed crossing count sum sign A'(s*), with its mod-two reduction.
//  * Fixed holonomy A0 = 0 with a scalar bulk perturbation s mu b(t): the family is
//    continuous, eigenvalue branches are tracked through s, and the flow decomposes over
//    reflection orbits {k, -k} plus the self-paired block.

#include <warpcyl/eigensolve.hpp>
#include <warpcyl/error.hpp>
#include <warpcyl/modes.hpp>
#include <warpcyl/ode.hpp>
#include <warpcyl/warp.hpp>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace warpcyl {

inline constexpr double kTransversalityFloor = 1e-6;
inline constexpr double kCrossingTol = 1e-9;

enum class PathKind { Linear, Samples, PiecewiseLinear };

/// Holonomy path A : [0, 1] -> R.
///   Linear: A(s) = a0 + c s.
///   Samples: values on a uniform s-grid (>= 16 points), cubic B-spline interpolation.
///   PiecewiseLinear: values on a uniform s-grid (>= 2 points), linear interpolation.
class HolonomyPath {
public:
    static constexpr int kMinSamples = 16;

    static HolonomyPath linear(double a0, double c) {
        HolonomyPath p(PathKind::Linear);
        p.a0_ = a0;
        p.c_ = c;
        return p;
    }

    static HolonomyPath samples(std::vector<double> values) {
        if (static_cast<int>(values.size()) < kMinSamples)
            fail(ErrorKind::Precondition, "sampled holonomy path needs at least 16 points");
        HolonomyPath p(PathKind::Samples);
        p.set_values(std::move(values));
        const double step = 1.0 / static_cast<double>(p.values_->size() - 1);
        p.spline_ = std::make_shared<const Spline>(p.values_->begin(), p.values_->end(), 0.0, step);
        return p;
    }

    static HolonomyPath piecewise_linear(std::vector<double> values) {
        if (values.size() < 2) fail(ErrorKind::Precondition, "piecewise-linear path needs at least 2 knots");
        HolonomyPath p(PathKind::PiecewiseLinear);
        p.set_values(std::move(values));
        return p;
    }

    PathKind kind() const noexcept { return kind_; }
    std::span<const double> knots() const {
        return values_ ? std::span<const double>(*values_) : std::span<const double>{};
    }

    double value(double s) const {
        check(s);
        switch (kind_) {
            case PathKind::Linear: return a0_ + c_ * s;
            case PathKind::Samples: return (*spline_)(s);
            case PathKind::PiecewiseLinear: {
                const auto [j, frac] = segment(s);
                return (*values_)[j] + frac * ((*values_)[j + 1] - (*values_)[j]);
            }
        }
        return 0.0;
    }

    double derivative(double s) const {
        check(s);
        switch (kind_) {
            case PathKind::Linear: return c_;
            case PathKind::Samples: return spline_->prime(s);
            case PathKind::PiecewiseLinear: {
                const auto [j, frac] = segment(s);
                (void)frac;
                return ((*values_)[j + 1] - (*values_)[j]) * static_cast<double>(values_->size() - 1);
            }
        }
        return 0.0;
    }

    /// s -> A(1 - s).
    HolonomyPath reversed() const {
        switch (kind_) {
            case PathKind::Linear: return linear(a0_ + c_, -c_);
            case PathKind::Samples: return samples({values_->rbegin(), values_->rend()});
            case PathKind::PiecewiseLinear: return piecewise_linear({values_->rbegin(), values_->rend()});
        }
        return *this;
    }

    /// Strictly monotone over [0, 1] (Linear with c != 0, or strictly ordered knots for
    /// PiecewiseLinear). Sampled paths are not classified.
    bool strictly_monotone() const {
        if (kind_ == PathKind::Linear) return c_ != 0.0;
        if (kind_ == PathKind::Samples) return false;
        const auto& v = *values_;
        bool up = true, down = true;
        for (std::size_t j = 0; j + 1 < v.size(); ++j) {
            up = up && v[j + 1] > v[j];
            down = down && v[j + 1] < v[j];
        }
        return up || down;
    }

private:
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

    explicit HolonomyPath(PathKind kind) : kind_(kind) {}

    void set_values(std::vector<double> values) {
        for (double v : values)
            if (!std::isfinite(v)) fail(ErrorKind::Precondition, "holonomy path values must be finite");
        values_ = std::make_shared<const std::vector<double>>(std::move(values));
    }

    static void check(double s) {
        if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::Domain, "path parameter s must lie in [0, 1]");
    }

    std::pair<std::size_t, double> segment(double s) const {
        const double scaled = s * static_cast<double>(values_->size() - 1);
        std::size_t j = static_cast<std::size_t>(std::floor(scaled));
        if (j >= values_->size() - 1) j = values_->size() - 2;
        return {j, scaled - static_cast<double>(j)};
    }

    PathKind kind_;
    double a0_ = 0.0;
    double c_ = 0.0;
    std::shared_ptr<const std::vector<double>> values_;
    std::shared_ptr<const Spline> spline_;
};

struct CrossingEvent {
    double s_star = 0.0;
    double k = 0.0;
    int sign = 0;
};

struct FlowReport {
    std::vector<CrossingEvent> events;
    int sf = 0;
    int parity = 0;
    bool endpoint_ok = true;
};

inline constexpr int kPathScan = 2001;

namespace detail {

inline std::pair<double, double> path_range(const HolonomyPath& path, int scan_n) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < scan_n; ++i) {
        const double a = path.value(static_cast<double>(i) / (scan_n - 1));
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    return {lo, hi};
}

} // namespace detail

/// Lattice labels that can satisfy k + A(s) = 0 somewhere on the path.
inline std::vector<double> relevant_modes(const HolonomyPath& path, LatticeKind lattice, int scan_n = kPathScan) {
    const auto [lo, hi] = detail::path_range(path, scan_n);
    return lattice_window(lattice, -hi - 1.0, -lo + 1.0);
}

inline bool endpoint_invertibility(const HolonomyPath& path, LatticeKind lattice, double eps = 1e-6) {
    return lattice_distance(lattice, -path.value(0.0)) > eps && lattice_distance(lattice, -path.value(1.0)) > eps;
}

inline std::vector<CrossingEvent> crossing_events(const HolonomyPath& path, LatticeKind lattice,
                                                  int scan_n = kPathScan, double tol = 1e-12) {
    if (!endpoint_invertibility(path, lattice))
        fail(ErrorKind::Endpoint, "k + A(s) vanishes at an endpoint for some lattice k");
    std::vector<double> grid(scan_n);
    for (int i = 0; i < scan_n; ++i) grid[i] = path.value(static_cast<double>(i) / (scan_n - 1));

    std::vector<CrossingEvent> events;
    for (double k : relevant_modes(path, lattice, scan_n)) {
        for (int i = 0; i + 1 < scan_n; ++i) {
            const double ga = k + grid[i];
            const double gb = k + grid[i + 1];
            if ((ga < 0.0) == (gb < 0.0)) continue;
            double a = static_cast<double>(i) / (scan_n - 1);
            double b = static_cast<double>(i + 1) / (scan_n - 1);
            const bool rising = ga < 0.0;
            while (b - a > tol) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                if ((k + path.value(mid) < 0.0) == rising)
                    a = mid;
                else
                    b = mid;
            }
            const double s_star = 0.5 * (a + b);
            const double slope = path.derivative(s_star);
            if (std::abs(slope) <= kTransversalityFloor)
                fail(ErrorKind::Transversality,
                     "|A'(s*)| <= 1e-6 at s* = " + std::to_string(s_star) + " for k = " + std::to_string(k));
            // One label per event: lattice points are a unit apart, so only k itself can vanish here.
            int hits = 0;
            for (double other : lattice_window(lattice, k - 1.5, k + 1.5))
                if (std::abs(other + path.value(s_star)) <= kCrossingTol) ++hits;
            if (hits != 1) fail(ErrorKind::Internal, "crossing event is not rank one");
            events.push_back({s_star, k, slope > 0.0 ? 1 : -1});
        }
    }
    std::sort(events.begin(), events.end(), [](const CrossingEvent& x, const CrossingEvent& y) {
        return x.s_star != y.s_star ? x.s_star < y.s_star : x.k < y.k;
    });
    return events;
}

inline FlowReport crossing_spectral_flow(const HolonomyPath& path, LatticeKind lattice, int scan_n = kPathScan) {
    FlowReport r;
    r.endpoint_ok = endpoint_invertibility(path, lattice);
    r.events = crossing_events(path, lattice, scan_n);
    for (const CrossingEvent& e : r.events) r.sf += e.sign;
    r.parity = static_cast<int>(r.events.size() % 2);
    if (((r.sf % 2) + 2) % 2 != r.parity) fail(ErrorKind::Internal, "parity disagrees with sf mod 2");
    return r;
}

/// #(K intersected with the open interval between -A1 and -A0), mod 2.
inline int monotone_parity(double A0, double A1, LatticeKind lattice) {
    if (A0 == A1) fail(ErrorKind::Precondition, "monotone parity needs A0 != A1");
    if (lattice_distance(lattice, -A0) <= kCrossingTol || lattice_distance(lattice, -A1) <= kCrossingTol)
        fail(ErrorKind::Endpoint, "an endpoint holonomy lies on the lattice");
    const double lo = std::min(-A0, -A1);
    const double hi = std::max(-A0, -A1);
    return static_cast<int>(lattice_window(lattice, lo, hi).size() % 2);
}

// ---------------------------------------------------------------------------
// Bulk-perturbation family at A0 = 0.

struct BranchSample {
    double k = 0.0;
    int branch = 0;
    double s = 0.0;
    double lambda = 0.0;
};

struct ModeFlow {
    double k = 0.0;
    int sf = 0;
    std::vector<BranchSample> tracks;
};

struct TrackingOptions {
    int s_grid_n = 101;
    double band = 2.0;        // only branches with |lambda| < band are required to match
    int max_refine = 10;      // bisection depth for unresolved s-intervals
    double ambiguity = 1e-8;  // two eigenvalues closer than this at one s cannot be told apart
};

namespace detail {

struct Matching {
    bool ok = true;
    std::vector<int> from;  // for each index in Eb, matched index in Ea or -1
};

inline double neighbour_gap(const std::vector<double>& E, std::size_t i) {
    double gap = std::numeric_limits<double>::infinity();
    if (i > 0) gap = std::min(gap, E[i] - E[i - 1]);
    if (i + 1 < E.size()) gap = std::min(gap, E[i + 1] - E[i]);
    return gap;
}

inline std::size_t nearest(const std::vector<double>& E, double x) {
    const auto it = std::lower_bound(E.begin(), E.end(), x);
    if (it == E.begin()) return 0;
    if (it == E.end()) return E.size() - 1;
    const std::size_t j = static_cast<std::size_t>(it - E.begin());
    return (x - E[j - 1]) <= (E[j] - x) ? j - 1 : j;
}

inline Matching match_branches(const std::vector<double>& Ea, const std::vector<double>& Eb, double band) {
    Matching out;
    out.from.assign(Eb.size(), -1);
    if (Ea.empty() || Eb.empty()) {
        for (double a : Ea)
            if (std::abs(a) < band) out.ok = false;
        for (double b : Eb)
            if (std::abs(b) < band) out.ok = false;
        return out;
    }
    for (std::size_t j = 0; j < Eb.size(); ++j) {
        const std::size_t i = nearest(Ea, Eb[j]);
        if (nearest(Eb, Ea[i]) != j) continue;
        out.from[j] = static_cast<int>(i);
    }
    std::vector<char> used(Ea.size(), 0);
    for (int i : out.from)
        if (i >= 0) used[static_cast<std::size_t>(i)] = 1;
    for (std::size_t i = 0; i < Ea.size(); ++i)
        if (std::abs(Ea[i]) < band && !used[i]) out.ok = false;
    for (std::size_t j = 0; j < Eb.size(); ++j) {
        const int i = out.from[j];
        if (i < 0) {
            if (std::abs(Eb[j]) < band) out.ok = false;
            continue;
        }
        if (std::abs(Eb[j]) >= band && std::abs(Ea[static_cast<std::size_t>(i)]) >= band) continue;
        const double moved = std::abs(Eb[j] - Ea[static_cast<std::size_t>(i)]);
        const double gap = std::min(neighbour_gap(Ea, static_cast<std::size_t>(i)), neighbour_gap(Eb, j));
        if (!(moved < 0.5 * gap)) out.ok = false;
    }
    return out;
}

} // namespace detail

/// Signed zero crossings (+1 for negative -> positive) of eigenvalue branches of a
/// continuous family s -> spectrum(s), by nearest-neighbour matching between grid points
/// with interval bisection wherever the matching is not unambiguous.
template <typename SpectrumAt>
ModeFlow track_spectral_flow(SpectrumAt&& spectrum, const TrackingOptions& opts, double k = 0.0) {
    if (opts.s_grid_n < 2) fail(ErrorKind::Precondition, "s-grid needs at least 2 points");
    ModeFlow out;
    out.k = k;
    int next_id = 0;

    auto check_ambiguity = [&](const std::vector<double>& E, double s) {
        for (std::size_t i = 0; i + 1 < E.size(); ++i) {
            if (std::abs(E[i]) < opts.band && E[i + 1] - E[i] < opts.ambiguity)
                fail(ErrorKind::Refinement, "two branches within 1e-8 at s = " + std::to_string(s) +
                                                " for k = " + std::to_string(k) + "; refine the s-grid");
        }
    };
    auto record = [&](double s, const std::vector<double>& E, const std::vector<int>& ids) {
        for (std::size_t i = 0; i < E.size(); ++i) out.tracks.push_back({k, ids[i], s, E[i]});
    };

    struct Node {
        double s;
        std::vector<double> E;
        std::vector<int> ids;
    };

    auto fresh_ids = [&](std::size_t count) {
        std::vector<int> ids(count);
        for (auto& id : ids) id = next_id++;
        return ids;
    };

    // Resolves [a, b]; returns b with branch ids assigned.
    auto resolve = [&](auto&& self, const Node& a, Node b, int depth) -> Node {
        const auto match = detail::match_branches(a.E, b.E, opts.band);
        if (!match.ok) {
            if (depth >= opts.max_refine)
                fail(ErrorKind::Refinement, "branch tracking ambiguous on s in [" + std::to_string(a.s) + ", " +
                                                std::to_string(b.s) + "] for k = " + std::to_string(k) +
                                                "; refine the s-grid");
            Node mid{0.5 * (a.s + b.s), spectrum(0.5 * (a.s + b.s)), {}};
            check_ambiguity(mid.E, mid.s);
            mid = self(self, a, std::move(mid), depth + 1);
            return self(self, mid, std::move(b), depth + 1);
        }
        b.ids.assign(b.E.size(), -1);
        for (std::size_t j = 0; j < b.E.size(); ++j) {
            const int i = match.from[j];
            if (i < 0) {
                b.ids[j] = next_id++;
                continue;
            }
            const double ea = a.E[static_cast<std::size_t>(i)];
            const double eb = b.E[j];
            b.ids[j] = a.ids[static_cast<std::size_t>(i)];
            if (std::abs(ea) < opts.band || std::abs(eb) < opts.band) {
                if (ea < 0.0 && eb >= 0.0) ++out.sf;
                if (ea >= 0.0 && eb < 0.0) --out.sf;
            }
        }
        record(b.s, b.E, b.ids);
        return b;
    };

    Node prev{0.0, spectrum(0.0), {}};
    check_ambiguity(prev.E, 0.0);
    prev.ids = fresh_ids(prev.E.size());
    record(prev.s, prev.E, prev.ids);
    for (int i = 1; i < opts.s_grid_n; ++i) {
        const double s = static_cast<double>(i) / (opts.s_grid_n - 1);
        Node next{s, spectrum(s), {}};
        check_ambiguity(next.E, s);
        prev = resolve(resolve, prev, std::move(next), 0);
    }
    return out;
}

struct EquivariantOptions {
    double mu = 0.0;
    double delta = 0.0;  // <= 0 selects T/10
    double k_max = 2.0;  // modes with |k| <= k_max
    int s_grid_n = 101;
    ShootingOptions shooting{4.0, 401, 1e-10, 2000};
    int oracle_n = 200;
    Completion completion = Completion::Transmission;
    int max_refine = 10;
    double endpoint_eps = 1e-6;
};

struct OrbitFlow {
    double k = 0.0;         // positive representative
    double k_paired = 0.0;  // -k
    int N = 0;
    int sf_k = 0;
    int sf_paired = 0;
};

struct EquivariantReport {
    std::vector<OrbitFlow> orbit_flows;
    std::optional<int> self_paired_flow;
    int total_sf = 0;
    bool even_off_self_paired = true;
    Completion completion = Completion::Transmission;
    double mu = 0.0;
    double delta = 0.0;
    std::vector<BranchSample> tracks;
};

inline double resolve_delta(const WarpProfile& profile, double delta) {
    return delta > 0.0 ? delta : profile.length() / 10.0;
}

/// Spectral flow of one block along s -> D_k + s mu b(t) at A0 = 0.
inline ModeFlow mode_spectral_flow(const WarpProfile& profile, const ModeSpec& mode, const EquivariantOptions& opts) {
    const PerturbationSpec pert = PerturbationSpec::bump(opts.mu, resolve_delta(profile, opts.delta));
    pert.validate(profile.length());
    SolverOptions solver{opts.shooting, opts.oracle_n, opts.completion};
    // The shooting table depends only on (profile, m, pert), so build it once.
    std::optional<Shooter> shooter;
    if (mode.aps_case != ApsCase::SelfPaired) shooter.emplace(profile, mode, pert, opts.shooting.n_steps);
    auto spectrum = [&](double s) {
        if (!shooter) return block_spectrum(profile, mode, solver, pert, s).eigenvalues;
        std::vector<double> E;
        for (const Root& r : bracket_roots([&](double l) { return (*shooter)(l, s); }, -opts.shooting.lambda_max,
                                           opts.shooting.lambda_max, opts.shooting.grid_n, opts.shooting.tol))
            E.push_back(r.value);
        return E;
    };
    for (double s : {0.0, 1.0}) {
        for (double lambda : spectrum(s))
            if (std::abs(lambda) < opts.endpoint_eps)
                fail(ErrorKind::Precondition, "block k = " + std::to_string(mode.k) + " has an eigenvalue within 1e-6 of 0 at s = " +
                                                  std::to_string(s) + " (" + to_string(opts.completion) + " completion)");
    }
    TrackingOptions tracking;
    tracking.s_grid_n = opts.s_grid_n;
    tracking.band = 0.5 * opts.shooting.lambda_max;
    tracking.max_refine = opts.max_refine;
    return track_spectral_flow(spectrum, tracking, mode.k);
}

inline EquivariantReport equivariant_spectral_flow(const WarpProfile& profile, LatticeKind lattice,
                                                   const EquivariantOptions& opts) {
    constexpr double A0 = 0.0;
    EquivariantReport r;
    r.completion = opts.completion;
    r.mu = opts.mu;
    r.delta = resolve_delta(profile, opts.delta);

    int raw_total = 0;
    for (double k : lattice_window(lattice, 0.0, opts.k_max)) {
        const ModeSpec mode = classify_mode(lattice, k, A0);
        if (mode.aps_case == ApsCase::SelfPaired) {
            ModeFlow flow = mode_spectral_flow(profile, mode, opts);
            r.self_paired_flow = flow.sf;
            raw_total += flow.sf;
            r.tracks.insert(r.tracks.end(), flow.tracks.begin(), flow.tracks.end());
            continue;
        }
        const double kv = paired_mode(k, A0);
        ModeFlow a = mode_spectral_flow(profile, mode, opts);
        ModeFlow b = mode_spectral_flow(profile, classify_mode(lattice, kv, A0), opts);
        if (a.sf != b.sf)
            fail(ErrorKind::Internal, "paired blocks k = " + std::to_string(k) + " and k^v = " + std::to_string(kv) +
                                          " have different spectral flow (" + std::to_string(a.sf) + " vs " +
                                          std::to_string(b.sf) + ")");
        r.orbit_flows.push_back({k, kv, a.sf, a.sf, b.sf});
        raw_total += a.sf + b.sf;
        r.tracks.insert(r.tracks.end(), b.tracks.begin(), b.tracks.end());
        r.tracks.insert(r.tracks.end(), a.tracks.begin(), a.tracks.end());
    }
    int orbit_sum = 0;
    for (const OrbitFlow& o : r.orbit_flows) orbit_sum += o.N;
    r.total_sf = raw_total;
    const int self = r.self_paired_flow.value_or(0);
    if (raw_total != 2 * orbit_sum + self) fail(ErrorKind::Internal, "orbit decomposition does not sum to total");
    r.even_off_self_paired = ((r.total_sf - self) % 2) == 0;
    std::stable_sort(r.tracks.begin(), r.tracks.end(),
                     [](const BranchSample& x, const BranchSample& y) { return x.k != y.k ? x.k < y.k : x.s < y.s; });
    return r;
}

struct CouplingSearch {
    double mu = 0.0;
    int flow = 0;
};

/// Scans mu from mu_from towards mu_to in steps of |step| and returns the first coupling
/// at which block k has spectral flow equal to target.
inline std::optional<CouplingSearch> search_coupling(const WarpProfile& profile, LatticeKind lattice, double k,
                                                     int target, double mu_from, double mu_to, double step,
                                                     EquivariantOptions opts) {
    const ModeSpec mode = classify_mode(lattice, k, 0.0);
    const double dir = mu_to >= mu_from ? 1.0 : -1.0;
    const double inc = dir * std::abs(step);
    const int count = static_cast<int>(std::floor(std::abs(mu_to - mu_from) / std::abs(step) + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
        opts.mu = mu_from + inc * i;
        const int flow = mode_spectral_flow(profile, mode, opts).sf;
        if (flow == target) return CouplingSearch{opts.mu, flow};
    }
    return std::nullopt;
}

} // namespace warpcyl
