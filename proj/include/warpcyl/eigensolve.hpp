#pragma once

// APS eigenvalues of one Fourier block: sign bracketing + bisection on the
// shooting function, closed-form kernels, and an independent finite-difference
// Hermitian matrix oracle.

#include <warpcyl/error.hpp>
#include <warpcyl/modes.hpp>
#include <warpcyl/ode.hpp>
#include <warpcyl/warp.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace warpcyl {

enum class SpectrumMethod { Shooting, Oracle };

inline const char* to_string(SpectrumMethod method) {
    return method == SpectrumMethod::Shooting ? "shooting" : "oracle";
}

/// Self-adjoint completion of the APS condition on the self-paired block (m = 0).
///   Transmission: psi(T) = sigma_1 psi(0), i.e. u(T) = v(0), v(T) = u(0); reflection invariant.
///   Chiral: the m > 0 conditions u(0) = 0, v(T) = 0; not reflection invariant.
enum class Completion { Chiral, Transmission };

inline const char* to_string(Completion c) { return c == Completion::Chiral ? "chiral" : "transmission"; }

struct Spectrum {
    std::vector<double> eigenvalues;  // strictly ascending, all in [-lambda_max, lambda_max]
    ModeSpec mode;
    double lambda_max = 0.0;
    SpectrumMethod method = SpectrumMethod::Shooting;
    std::vector<double> residuals;  // bracket width (shooting) or ||Mx - lx|| / ||x|| (oracle)
};

struct ShootingOptions {
    double lambda_max = 10.0;
    int grid_n = 2001;
    double tol = 1e-10;
    int n_steps = kDefaultSteps;
};

struct Root {
    double value;
    double width;  // final bracket width
};

/// Every sign change of g on a uniform grid over [lo, hi], bisected to width <= tol.
/// Double roots that do not change sign between grid points are not seen.
template <typename F>
std::vector<Root> bracket_roots(F&& g, double lo, double hi, int grid_n, double tol) {
    if (grid_n < 2) fail(ErrorKind::Precondition, "scan grid needs at least 2 points");
    std::vector<Root> roots;
    auto at = [&](int i) { return lo + (hi - lo) * static_cast<double>(i) / (grid_n - 1); };
    double x_prev = at(0);
    double g_prev = g(x_prev);
    if (g_prev == 0.0) roots.push_back({x_prev, 0.0});
    for (int i = 1; i < grid_n; ++i) {
        const double x = at(i);
        const double gx = g(x);
        if (gx == 0.0) {
            roots.push_back({x, 0.0});
        } else if (g_prev != 0.0 && (g_prev < 0.0) != (gx < 0.0)) {
            double a = x_prev, b = x, ga = g_prev;
            for (int it = 0; it < 200 && (b - a) > tol; ++it) {
                const double mid = 0.5 * (a + b);
                const double gm = g(mid);
                if (gm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            roots.push_back({0.5 * (a + b), b - a});
        }
        x_prev = x;
        g_prev = gx;
    }
    return roots;
}

inline Spectrum eigenvalues_shooting(const WarpProfile& profile, const ModeSpec& mode,
                                     const ShootingOptions& opts = {}, const PerturbationSpec& pert = {},
                                     double s = 0.0) {
    if (!(opts.lambda_max > 0.0)) fail(ErrorKind::Precondition, "lambda_max must be positive");
    const Shooter shooter(profile, mode, pert, opts.n_steps);
    const auto roots = bracket_roots([&](double lambda) { return shooter(lambda, s); }, -opts.lambda_max,
                                     opts.lambda_max, opts.grid_n, opts.tol);
    Spectrum out;
    out.mode = mode;
    out.lambda_max = opts.lambda_max;
    out.method = SpectrumMethod::Shooting;
    for (const Root& r : roots) {
        out.eigenvalues.push_back(r.value);
        out.residuals.push_back(r.width);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form kernels.

/// Kernel vector psi(t) = sqrt(f(0)/f(t)) * (cu e^{m I(t)}, cv e^{-m I(t)}), I = inv_f_integral.
/// These are the only solutions of A^- u = 0, A^+ v = 0.
struct KernelVector {
    double cu = 0.0;
    double cv = 0.0;
    double m = 0.0;

    std::pair<double, double> eval(const WarpProfile& profile, double t) const {
        const double scale = std::sqrt(profile.f(0.0) / profile.f(t));
        if (m == 0.0) return {cu * scale, cv * scale};
        const double I = inv_f_integral(profile, t);
        return {cu * scale * std::exp(m * I), cv * scale * std::exp(-m * I)};
    }
};

inline std::vector<KernelVector> kernel_basis(const WarpProfile& profile, const ModeSpec& mode,
                                              Completion completion, double tol = 1e-8) {
    // m != 0: u(0) = 0 (resp. v(0) = 0) kills cu (cv) and v(T) = 0 (u(T) = 0) kills the other,
    // because the exponential closed forms never vanish.
    if (mode.aps_case != ApsCase::SelfPaired || completion == Completion::Chiral) return {};
    // u(T) = v(0): cu sqrt(f0/fT) = cv;  v(T) = u(0): cv sqrt(f0/fT) = cu.  Nontrivial iff f(0) = f(T).
    const double f0 = profile.f(0.0);
    const double fT = profile.f(profile.length());
    if (std::abs(f0 - fT) <= tol * f0) return {KernelVector{1.0, 1.0, 0.0}};
    return {};
}

inline int kernel_dimension(const WarpProfile& profile, const ModeSpec& mode, Completion completion,
                            double tol = 1e-8) {
    return static_cast<int>(kernel_basis(profile, mode, completion, tol).size());
}

// ---------------------------------------------------------------------------
// Matrix oracle.
//
// In the rescaled unknowns (U, V) = f^{1/2} (u, v) the block is the operator
//   lambda U = i (V' + q V),   lambda V = i (U' - q U)   (+ s mu b on the diagonal)
// on L^2(dt). U and V live on alternating sites x_i = i h/2 with h = T/(n + 1/2), so
// Dirichlet points fall on sites and central differences span neighbouring sites.
// Each bond carries q at its midpoint, which makes the assembly Hermitian entrywise.

struct OracleProblem {
    int n = 0;
    double h = 0.0;
    std::vector<double> sites;                 // x_i of each unknown
    std::vector<char> component;               // 'u' or 'v'
    std::vector<double> diagonal;              // s mu b(x_i)
    std::vector<std::complex<double>> upper;   // H(i, i+1)
    std::optional<std::complex<double>> wrap;  // H(N-1, 0), transmission only
    ApsCase aps_case = ApsCase::PositiveM;
    Completion completion = Completion::Transmission;

    Eigen::Index size() const { return static_cast<Eigen::Index>(diagonal.size()); }

    Eigen::MatrixXcd dense() const {
        const Eigen::Index N = size();
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
        for (Eigen::Index i = 0; i < N; ++i) M(i, i) = diagonal[i];
        for (Eigen::Index i = 0; i + 1 < N; ++i) {
            M(i, i + 1) = upper[i];
            M(i + 1, i) = std::conj(upper[i]);
        }
        if (wrap) {
            M(N - 1, 0) = *wrap;
            M(0, N - 1) = std::conj(*wrap);
        }
        return M;
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
        const Eigen::Index N = size();
        Eigen::VectorXcd y(N);
        for (Eigen::Index i = 0; i < N; ++i) {
            std::complex<double> acc = diagonal[i] * x(i);
            if (i + 1 < N) acc += upper[i] * x(i + 1);
            if (i > 0) acc += std::conj(upper[i - 1]) * x(i - 1);
            y(i) = acc;
        }
        if (wrap) {
            y(N - 1) += *wrap * x(0);
            y(0) += std::conj(*wrap) * x(N - 1);
        }
        return y;
    }
};

inline OracleProblem assemble_oracle(const WarpProfile& profile, const ModeSpec& mode, Completion completion,
                                     int n, const PerturbationSpec& pert = {}, double s = 0.0) {
    if (n < 50) fail(ErrorKind::Precondition, "oracle grid needs n >= 50");
    pert.validate(profile.length());
    const double T = profile.length();
    const bool wrap = mode.aps_case == ApsCase::SelfPaired && completion == Completion::Transmission;
    // Even sites carry the component that vanishes at t = 0 (Dirichlet cases) or u (transmission).
    const char even = mode.aps_case == ApsCase::NegativeM ? 'v' : 'u';
    const char odd = even == 'u' ? 'v' : 'u';

    OracleProblem P;
    P.n = n;
    P.h = T / (n + 0.5);
    P.aps_case = mode.aps_case;
    P.completion = completion;
    const int first = wrap ? 0 : 1;
    const int last = 2 * n;
    for (int i = first; i <= last; ++i) {
        const double x = 0.5 * P.h * i;
        P.sites.push_back(x);
        P.component.push_back(i % 2 == 0 ? even : odd);
        P.diagonal.push_back(s * pert.mu * pert.cutoff(x, T));
    }
    const std::complex<double> I(0.0, 1.0);
    auto bond = [&](std::size_t r, double centre) {
        const double q = mode.m / profile.f(std::min(centre, T));
        const double sign = P.component[r] == 'u' ? 1.0 : -1.0;
        return I * (1.0 / P.h + sign * 0.5 * q);
    };
    for (std::size_t r = 0; r + 1 < P.sites.size(); ++r)
        P.upper.push_back(bond(r, 0.5 * (P.sites[r] + P.sites[r + 1])));
    if (wrap) P.wrap = bond(P.sites.size() - 1, T - 0.25 * P.h);
    return P;
}

namespace detail {

/// Solves the tridiagonal system (dl, d, du) x = b in place with partial pivoting.
inline void tridiagonal_solve(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                              std::vector<double>& b) {
    const std::size_t n = d.size();
    const double tiny = 1e-300;
    if (n == 1) {
        b[0] /= (d[0] == 0.0 ? tiny : d[0]);
        return;
    }
    std::vector<double> du2(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            const double tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
}

/// Relative residual of an eigenpair of the tridiagonal Hermitian problem via inverse iteration
/// on the real gauge-equivalent matrix, lifted back through the diagonal phase gauge.
inline double tridiagonal_residual(const OracleProblem& P, const std::vector<double>& offdiag, double lambda) {
    const std::size_t N = P.diagonal.size();
    const double shift = lambda + 1e-13 * std::max(1.0, std::abs(lambda));
    std::vector<double> x(N);
    for (std::size_t i = 0; i < N; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    for (int it = 0; it < 3; ++it) {
        std::vector<double> d(N), dl(offdiag.begin(), offdiag.end()), du(offdiag.begin(), offdiag.end());
        for (std::size_t i = 0; i < N; ++i) d[i] = P.diagonal[i] - shift;
        tridiagonal_solve(dl, d, du, x);
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : x) v /= norm;
    }
    // Real gauge: H = G R G^* with G = diag(e^{i phi}), phi_{r+1} = phi_r - arg(upper_r).
    Eigen::VectorXcd z(static_cast<Eigen::Index>(N));
    double phase = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        z(static_cast<Eigen::Index>(i)) = std::polar(x[i], phase);
        if (i + 1 < N) phase -= std::arg(P.upper[i]);
    }
    const Eigen::VectorXcd r = P.apply(z) - lambda * z;
    return r.norm() / z.norm();
}

/// Sturm counts for the oracle matrix. Without a wrap this is the LDL^* inertia of a Hermitian
/// tridiagonal chain. With the transmission wrap the last site closes the chain, so
/// H - x = [[A, c], [c^*, a]] with A open and c supported on its two ends, and Sylvester's law
/// gives count(x) = neg(A - x) + [a - x - c^* (A - x)^{-1} c < 0].
class SturmChain {
public:
    explicit SturmChain(const OracleProblem& P) : P_(P), N_(P.diagonal.size()) {}

    /// Number of eigenvalues strictly below x.
    int count_below(double x) const {
        std::vector<double> d;
        std::vector<std::complex<double>> y;
        if (!P_.wrap) return open_count(x);
        const auto c = c_vector();
        // A pivot that vanishes exactly (x = 0 with zero diagonal, say) is stepped around.
        for (int attempt = 0;; ++attempt) {
            const double schur = factor(x, c, d, y);
            bool degenerate = !std::isfinite(schur);
            for (double di : d) degenerate = degenerate || std::abs(di) < 1e-150;
            if (degenerate && attempt < 4) {
                x += 1e-14 * std::max(1.0, std::abs(x));
                continue;
            }
            int neg = schur < 0.0 ? 1 : 0;
            for (double di : d) neg += di < 0.0 ? 1 : 0;
            return neg;
        }
    }

private:
    static double safe(double v) { return v == 0.0 ? 1e-300 : v; }

    int open_count(double x) const {
        int neg = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < N_; ++i) {
            d = P_.diagonal[i] - x - (i > 0 ? std::norm(P_.upper[i - 1]) / d : 0.0);
            if (d == 0.0) d = -1e-300;
            neg += d < 0.0 ? 1 : 0;
        }
        return neg;
    }

    std::vector<std::complex<double>> c_vector() const {
        std::vector<std::complex<double>> c(N_ - 1, 0.0);
        c.front() += std::conj(*P_.wrap);  // H(0, N-1)
        c.back() += P_.upper[N_ - 2];      // H(N-2, N-1)
        return c;
    }

    // LDL^* of the open chain A - x; returns the Schur complement of the closing site.
    double factor(double x, const std::vector<std::complex<double>>& c, std::vector<double>& d,
                  std::vector<std::complex<double>>& y) const {
        const std::size_t M = N_ - 1;
        d.resize(M);
        y.resize(M);
        for (std::size_t i = 0; i < M; ++i) {
            double di = P_.diagonal[i] - x;
            std::complex<double> yi = c[i];
            if (i > 0) {
                di -= std::norm(P_.upper[i - 1]) / d[i - 1];
                yi -= std::conj(P_.upper[i - 1]) / d[i - 1] * y[i - 1];
            }
            d[i] = safe(di);
            y[i] = yi;
        }
        double schur = P_.diagonal[M] - x;
        for (std::size_t i = 0; i < M; ++i) schur -= std::norm(y[i]) / d[i];
        return schur;
    }

    const OracleProblem& P_;
    std::size_t N_;
};

inline std::vector<double> sturm_eigenvalues(const SturmChain& chain, double lo, double hi) {
    const int first = chain.count_below(lo);
    const int last = chain.count_below(hi);
    std::vector<double> out;
    for (int j = first; j < last; ++j) {
        double a = lo, b = hi;  // count(a) <= j < count(b)
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b || b - a <= 1e-15 * std::max(1.0, std::abs(mid))) break;
            if (chain.count_below(mid) <= j)
                a = mid;
            else
                b = mid;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

/// Inverse iteration with a sparse LU of the cyclic matrix; the bordered chain solve is not
/// stable when the open chain is itself nearly singular at lambda.
inline double cyclic_residual(const OracleProblem& P, double lambda) {
    const double shift = lambda + 1e-13 * std::max(1.0, std::abs(lambda));
    const Eigen::Index N = P.size();
    std::vector<Eigen::Triplet<std::complex<double>>> entries;
    for (Eigen::Index i = 0; i < N; ++i) entries.emplace_back(i, i, P.diagonal[i] - shift);
    for (Eigen::Index i = 0; i + 1 < N; ++i) {
        entries.emplace_back(i, i + 1, P.upper[i]);
        entries.emplace_back(i + 1, i, std::conj(P.upper[i]));
    }
    entries.emplace_back(N - 1, 0, *P.wrap);
    entries.emplace_back(0, N - 1, std::conj(*P.wrap));
    Eigen::SparseMatrix<std::complex<double>> S(N, N);
    S.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu(S);
    if (lu.info() != Eigen::Success) fail(ErrorKind::Internal, "sparse LU failed in oracle residual");
    Eigen::VectorXcd x(N);
    for (Eigen::Index i = 0; i < N; ++i) x(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
    for (int it = 0; it < 3; ++it) {
        x = lu.solve(x).eval();
        x /= x.norm();
    }
    return (P.apply(x) - lambda * x).norm();
}

} // namespace detail

inline Spectrum oracle_eigenvalues(const OracleProblem& P, const ModeSpec& mode, double lambda_max) {
    Spectrum out;
    out.mode = mode;
    out.lambda_max = lambda_max;
    out.method = SpectrumMethod::Oracle;
    const Eigen::Index N = P.size();
    const detail::SturmChain chain(P);
    std::vector<double> off;
    if (!P.wrap)
        for (Eigen::Index i = 0; i + 1 < N; ++i) off.push_back(std::abs(P.upper[i]));
    for (double lambda : detail::sturm_eigenvalues(chain, -lambda_max, lambda_max)) {
        out.eigenvalues.push_back(lambda);
        out.residuals.push_back(P.wrap ? detail::cyclic_residual(P, lambda)
                                       : detail::tridiagonal_residual(P, off, lambda));
    }
    return out;
}

inline Spectrum oracle_eigenvalues(const WarpProfile& profile, const ModeSpec& mode, Completion completion, int n,
                                   double lambda_max, const PerturbationSpec& pert = {}, double s = 0.0) {
    const OracleProblem P = assemble_oracle(profile, mode, completion, n, pert, s);
    return oracle_eigenvalues(P, mode, lambda_max);
}

/// Spectrum of a block by whichever method applies: shooting for signed cases,
/// the oracle for the self-paired sector.
struct SolverOptions {
    ShootingOptions shooting{};
    int oracle_n = 800;
    Completion completion = Completion::Transmission;
};

inline Spectrum block_spectrum(const WarpProfile& profile, const ModeSpec& mode, const SolverOptions& opts,
                               const PerturbationSpec& pert = {}, double s = 0.0) {
    if (mode.aps_case == ApsCase::SelfPaired)
        return oracle_eigenvalues(profile, mode, opts.completion, opts.oracle_n, opts.shooting.lambda_max, pert, s);
    return eigenvalues_shooting(profile, mode, opts.shooting, pert, s);
}

} // namespace warpcyl
