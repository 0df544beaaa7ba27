#pragma once

// Fixed-step RK4 integration of the mode system and the shooting functions
// whose zeros are the APS eigenvalues of a single Fourier block.
//
// With v = i w the first-order mode system becomes the real system
//   u' = (q - p) u + L(t) w,   w' = -(p + q) w - L(t) u,   L(t) = lambda - s mu b(t),
// where p = f'/(2f), q = m/f and b is the interior cutoff of the bulk perturbation.

#include <warpcyl/error.hpp>
#include <warpcyl/modes.hpp>
#include <warpcyl/warp.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace warpcyl {

inline constexpr int kDefaultSteps = 4000;
inline constexpr int kMinSteps = 100;

struct ModeSystemState {
    double u = 0.0;
    double w = 0.0;
};

enum class PerturbationShape { None, Bump };

/// Scalar bulk perturbation s * mu * b(t) * Id. b is the C-infinity bump
/// exp(-1/(x(1-x))) with x = (t - delta)/(T - 2 delta), scaled to max 1 and
/// identically zero on [0, delta] and [T - delta, T].
struct PerturbationSpec {
    double mu = 0.0;
    PerturbationShape shape = PerturbationShape::None;
    double delta = 0.0;

    static PerturbationSpec none() { return {}; }
    static PerturbationSpec bump(double mu, double delta) {
        return {mu, PerturbationShape::Bump, delta};
    }

    bool active() const noexcept { return shape == PerturbationShape::Bump && mu != 0.0; }

    void validate(double T) const {
        if (shape != PerturbationShape::Bump) return;
        if (!(delta > 0.0 && 2.0 * delta < T))
            fail(ErrorKind::Precondition, "bump cutoff needs 0 < delta < T/2");
        if (!std::isfinite(mu)) fail(ErrorKind::Precondition, "coupling mu must be finite");
    }

    /// b(t), normalised so that max b = 1 at the centre of the support.
    double cutoff(double t, double T) const {
        if (shape != PerturbationShape::Bump) return 0.0;
        if (t <= delta || t >= T - delta) return 0.0;
        const double x = (t - delta) / (T - 2.0 * delta);
        return std::exp(4.0 - 1.0 / (x * (1.0 - x)));
    }
};

/// \int_0^T b(t) dt on a fine midpoint grid; used by closed-form self-paired checks.
inline double cutoff_integral(const PerturbationSpec& pert, double T, int n = 20000) {
    double sum = 0.0;
    const double h = T / n;
    for (int j = 0; j < n; ++j) sum += pert.cutoff((j + 0.5) * h, T);
    return sum * h;
}

enum class ScalarVariant { U, V };

/// Endpoint values of the scalar reductions U'' + c(t) U = 0.
struct ScalarState {
    double y = 0.0;
    double dy = 0.0;
};

/// Transfer matrix of the complex (u, v) system: psi(T) = M(lambda) psi(0).
struct TransferMatrix {
    Eigen::Matrix2cd M;
    std::complex<double> det() const { return M.determinant(); }
};

/// Coefficients tabulated on the RK4 half-step grid for one (profile, m, perturbation).
/// Integrations for many lambda values reuse the table.
class ModeSystem {
public:
    ModeSystem(const WarpProfile& profile, double m, const PerturbationSpec& pert = {},
               int n_steps = kDefaultSteps)
        : T_(profile.length()), m_(m), n_steps_(n_steps) {
        if (n_steps < kMinSteps) fail(ErrorKind::Precondition, "n_steps must be >= 100");
        pert.validate(T_);
        const int nodes = 2 * n_steps + 1;
        q_minus_p_.resize(nodes);
        p_plus_q_.resize(nodes);
        gU_.resize(nodes);
        gV_.resize(nodes);
        b_.resize(nodes);
        mu_ = pert.mu;
        for (int j = 0; j < nodes; ++j) {
            const double t = T_ * static_cast<double>(j) / (2.0 * n_steps);
            const double f = profile.f(t);
            const double df = profile.df(t);
            const double p = df / (2.0 * f);
            const double q = m / f;
            const double dq = -m * df / (f * f);
            q_minus_p_[j] = q - p;
            p_plus_q_[j] = p + q;
            gU_[j] = -dq - q * q;
            gV_[j] = dq - q * q;
            b_[j] = pert.cutoff(t, T_);
        }
        q0_ = m / profile.f(0.0);
        qT_ = m / profile.f(T_);
        f0_ = profile.f(0.0);
        fT_ = profile.f(T_);
    }

    int n_steps() const noexcept { return n_steps_; }
    double length() const noexcept { return T_; }
    double m() const noexcept { return m_; }
    double q0() const noexcept { return q0_; }
    double qT() const noexcept { return qT_; }
    double f0() const noexcept { return f0_; }
    double fT() const noexcept { return fT_; }
    bool perturbed() const noexcept { return mu_ != 0.0; }

    /// t at integration step i (exactly T at i = n_steps).
    double node(int i) const { return T_ * static_cast<double>(i) / n_steps_; }

    ModeSystemState integrate(double lambda, double s, ModeSystemState y) const {
        for (int i = 0; i < n_steps_; ++i) {
            y = step(i, lambda, s, y);
            if (!std::isfinite(y.u) || !std::isfinite(y.w)) blow_up(i);
        }
        return y;
    }

    /// States at every step node t_i = i T / n_steps, i = 0..n_steps.
    std::vector<ModeSystemState> trajectory(double lambda, double s, ModeSystemState y) const {
        std::vector<ModeSystemState> out;
        out.reserve(n_steps_ + 1);
        out.push_back(y);
        for (int i = 0; i < n_steps_; ++i) {
            y = step(i, lambda, s, y);
            if (!std::isfinite(y.u) || !std::isfinite(y.w)) blow_up(i);
            out.push_back(y);
        }
        return out;
    }

    ScalarState integrate_scalar(double lambda, ScalarVariant variant, ScalarState y) const {
        const std::vector<double>& g = variant == ScalarVariant::U ? gU_ : gV_;
        const double h = T_ / n_steps_;
        const double l2 = lambda * lambda;
        for (int i = 0; i < n_steps_; ++i) {
            const double c0 = l2 + g[2 * i];
            const double c1 = l2 + g[2 * i + 1];
            const double c2 = l2 + g[2 * i + 2];
            const double k1y = y.dy, k1d = -c0 * y.y;
            const double y2 = y.y + 0.5 * h * k1y, d2 = y.dy + 0.5 * h * k1d;
            const double k2y = d2, k2d = -c1 * y2;
            const double y3 = y.y + 0.5 * h * k2y, d3 = y.dy + 0.5 * h * k2d;
            const double k3y = d3, k3d = -c1 * y3;
            const double y4 = y.y + h * k3y, d4 = y.dy + h * k3d;
            const double k4y = d4, k4d = -c2 * y4;
            y.y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            y.dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            if (!std::isfinite(y.y) || !std::isfinite(y.dy)) blow_up(i);
        }
        return y;
    }

    /// Complex (u, v) system u' = (q-p)u - i lam v, v' = -(p+q)v - i lam u, unperturbed.
    TransferMatrix transfer(double lambda) const {
        using C = std::complex<double>;
        const C il(0.0, lambda);
        const double h = T_ / n_steps_;
        auto rhs = [&](int j, const Eigen::Vector2cd& y) {
            return Eigen::Vector2cd(q_minus_p_[j] * y(0) - il * y(1), -p_plus_q_[j] * y(1) - il * y(0));
        };
        TransferMatrix out;
        for (int col = 0; col < 2; ++col) {
            Eigen::Vector2cd y = Eigen::Vector2cd::Zero();
            y(col) = 1.0;
            for (int i = 0; i < n_steps_; ++i) {
                const Eigen::Vector2cd k1 = rhs(2 * i, y);
                const Eigen::Vector2cd k2 = rhs(2 * i + 1, y + 0.5 * h * k1);
                const Eigen::Vector2cd k3 = rhs(2 * i + 1, y + 0.5 * h * k2);
                const Eigen::Vector2cd k4 = rhs(2 * i + 2, y + h * k3);
                y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (!std::isfinite(std::abs(y(0))) || !std::isfinite(std::abs(y(1)))) blow_up(i);
            }
            out.M.col(col) = y;
        }
        return out;
    }

private:
    ModeSystemState step(int i, double lambda, double s, const ModeSystemState& y) const {
        const double h = T_ / n_steps_;
        const double shift = s * mu_;
        const int j0 = 2 * i, j1 = 2 * i + 1, j2 = 2 * i + 2;
        const double l0 = lambda - shift * b_[j0];
        const double l1 = lambda - shift * b_[j1];
        const double l2 = lambda - shift * b_[j2];
        const double a0 = q_minus_p_[j0], a1 = q_minus_p_[j1], a2 = q_minus_p_[j2];
        const double c0 = p_plus_q_[j0], c1 = p_plus_q_[j1], c2 = p_plus_q_[j2];

        const double k1u = a0 * y.u + l0 * y.w;
        const double k1w = -c0 * y.w - l0 * y.u;
        const double u2 = y.u + 0.5 * h * k1u, w2 = y.w + 0.5 * h * k1w;
        const double k2u = a1 * u2 + l1 * w2;
        const double k2w = -c1 * w2 - l1 * u2;
        const double u3 = y.u + 0.5 * h * k2u, w3 = y.w + 0.5 * h * k2w;
        const double k3u = a1 * u3 + l1 * w3;
        const double k3w = -c1 * w3 - l1 * u3;
        const double u4 = y.u + h * k3u, w4 = y.w + h * k3w;
        const double k4u = a2 * u4 + l2 * w4;
        const double k4w = -c2 * w4 - l2 * u4;
        return {y.u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
                y.w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)};
    }

    [[noreturn]] static void blow_up(int step) {
        fail(ErrorKind::BlowUp, "non-finite state at integration step " + std::to_string(step));
    }

    double T_;
    double m_;
    int n_steps_;
    double mu_ = 0.0;
    double q0_ = 0.0, qT_ = 0.0, f0_ = 1.0, fT_ = 1.0;
    std::vector<double> q_minus_p_, p_plus_q_, gU_, gV_, b_;
};

inline ModeSystemState integrate_system(const WarpProfile& profile, double m, double lambda,
                                        const PerturbationSpec& pert, double s, ModeSystemState init,
                                        int n_steps = kDefaultSteps) {
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::Domain, "family parameter s must lie in [0, 1]");
    return ModeSystem(profile, m, pert, n_steps).integrate(lambda, s, init);
}

/// Shooting function of the first-order system for a signed APS case.
/// PositiveM: start (u, w) = (0, 1), return w(T). NegativeM: start (1, 0), return u(T).
class Shooter {
public:
    Shooter(const WarpProfile& profile, const ModeSpec& mode, const PerturbationSpec& pert = {},
            int n_steps = kDefaultSteps)
        : system_(profile, require_signed(mode).m, pert, n_steps), aps_case_(mode.aps_case) {}

    double operator()(double lambda, double s = 0.0) const {
        if (aps_case_ == ApsCase::PositiveM) return system_.integrate(lambda, s, {0.0, 1.0}).w;
        return system_.integrate(lambda, s, {1.0, 0.0}).u;
    }

    const ModeSystem& system() const noexcept { return system_; }

private:
    static const ModeSpec& require_signed(const ModeSpec& mode) {
        if (mode.aps_case == ApsCase::SelfPaired)
            fail(ErrorKind::Unsupported, "shooting is not defined for the self-paired sector");
        return mode;
    }

    ModeSystem system_;
    ApsCase aps_case_;
};

inline double shoot(const WarpProfile& profile, const ModeSpec& mode, double lambda,
                    const PerturbationSpec& pert = {}, double s = 0.0, int n_steps = kDefaultSteps) {
    return Shooter(profile, mode, pert, n_steps)(lambda, s);
}

/// Scalar reductions u = f^{-1/2} U, v = f^{-1/2} V of the unperturbed block.
///   m > 0:  S_U = U'(T) - q(T) U(T) with U(0)=0, U'(0)=1;   S_V = V(T) with V(0)=1, V'(0)=-q(0)
///   m < 0:  S_U = U(T) with U(0)=1, U'(0)=q(0);             S_V = V'(T) + q(T) V(T) with V(0)=0, V'(0)=1
class ScalarShooter {
public:
    ScalarShooter(const WarpProfile& profile, const ModeSpec& mode, ScalarVariant variant,
                  int n_steps = kDefaultSteps)
        : system_(profile, check(mode).m, {}, n_steps), positive_(mode.aps_case == ApsCase::PositiveM),
          variant_(variant) {}

    double operator()(double lambda) const {
        const double q0 = system_.q0();
        const double qT = system_.qT();
        if (variant_ == ScalarVariant::U) {
            if (positive_) {
                const ScalarState e = system_.integrate_scalar(lambda, ScalarVariant::U, {0.0, 1.0});
                return e.dy - qT * e.y;
            }
            return system_.integrate_scalar(lambda, ScalarVariant::U, {1.0, q0}).y;
        }
        if (positive_) return system_.integrate_scalar(lambda, ScalarVariant::V, {1.0, -q0}).y;
        const ScalarState e = system_.integrate_scalar(lambda, ScalarVariant::V, {0.0, 1.0});
        return e.dy + qT * e.y;
    }

private:
    static const ModeSpec& check(const ModeSpec& mode) {
        if (mode.aps_case == ApsCase::SelfPaired)
            fail(ErrorKind::Unsupported, "scalar shooting is not defined for the self-paired sector");
        return mode;
    }

    ModeSystem system_;
    bool positive_;
    ScalarVariant variant_;
};

inline double scalar_shoot(const WarpProfile& profile, const ModeSpec& mode, double lambda, ScalarVariant variant,
                           const PerturbationSpec& pert = {}, int n_steps = kDefaultSteps) {
    if (pert.active())
        fail(ErrorKind::Unsupported, "scalar reduction holds only for the unperturbed family");
    return ScalarShooter(profile, mode, variant, n_steps)(lambda);
}

inline TransferMatrix transfer_matrix(const WarpProfile& profile, double m, double lambda,
                                      int n_steps = kDefaultSteps) {
    return ModeSystem(profile, m, {}, n_steps).transfer(lambda);
}

} // namespace warpcyl
