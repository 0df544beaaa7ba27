#pragma once

// Warp profiles f(t) > 0 on [0, T] for the cylinder metric dt^2 + f(t)^2 dtheta^2.

#include <warpcyl/error.hpp>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace warpcyl {

enum class WarpKind { Constant, ExpPair, CoshCentered, Tabulated };

inline const char* to_string(WarpKind kind) {
    switch (kind) {
        case WarpKind::Constant: return "constant";
        case WarpKind::ExpPair: return "exp_pair";
        case WarpKind::CoshCentered: return "cosh_centered";
        case WarpKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

/// Immutable warp profile. Closed-form families are evaluated analytically;
/// tabulated samples go through a cubic B-spline and its analytic derivative.
class WarpProfile {
public:
    static constexpr int kMinSamples = 8;
    static constexpr int kPositivityGrid = 1001;

    /// f(t) = c.
    static WarpProfile constant(double c, double T) {
        if (!(c > 0.0)) fail(ErrorKind::InvalidProfile, "constant warp needs c > 0");
        WarpProfile p(WarpKind::Constant, T);
        p.param_ = c;
        p.validate();
        return p;
    }

    /// f(t) = e^t + alpha e^{-t}.
    static WarpProfile exp_pair(double alpha, double T) {
        if (!(alpha > 0.0)) fail(ErrorKind::InvalidProfile, "exp_pair warp needs alpha > 0");
        WarpProfile p(WarpKind::ExpPair, T);
        p.param_ = alpha;
        p.validate();
        return p;
    }

    /// f(t) = cosh(t - T/2); symmetric, so f(0) = f(T).
    static WarpProfile cosh_centered(double T) {
        WarpProfile p(WarpKind::CoshCentered, T);
        p.validate();
        return p;
    }

    /// Samples f(t_j) on the uniform grid t_j = j T / (N - 1).
    static WarpProfile tabulated(std::span<const double> samples, double T) {
        if (static_cast<int>(samples.size()) < kMinSamples)
            fail(ErrorKind::InvalidProfile, "tabulated warp needs at least 8 samples");
        for (std::size_t j = 0; j < samples.size(); ++j) {
            if (!(samples[j] > 0.0) || !std::isfinite(samples[j]))
                fail(ErrorKind::InvalidProfile,
                     "tabulated warp sample " + std::to_string(j) + " is not positive");
        }
        WarpProfile p(WarpKind::Tabulated, T);
        const double step = T / static_cast<double>(samples.size() - 1);
        p.samples_ = std::make_shared<const std::vector<double>>(samples.begin(), samples.end());
        p.spline_ = std::make_shared<const Spline>(p.samples_->begin(), p.samples_->end(), 0.0, step);
        p.validate();
        return p;
    }

    /// Tabulated profile from (t, f) pairs; t must start at 0 with uniform spacing.
    static WarpProfile tabulated(std::span<const double> t, std::span<const double> f) {
        if (t.size() != f.size()) fail(ErrorKind::InvalidProfile, "t and f columns differ in length");
        if (static_cast<int>(t.size()) < kMinSamples)
            fail(ErrorKind::InvalidProfile, "tabulated warp needs at least 8 samples");
        if (std::abs(t[0]) > 1e-12) fail(ErrorKind::InvalidProfile, "tabulated grid must start at t = 0");
        const double T = t.back();
        const double step = T / static_cast<double>(t.size() - 1);
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (std::abs(t[j] - step * static_cast<double>(j)) > 1e-9 * std::max(1.0, T))
                fail(ErrorKind::InvalidProfile, "tabulated grid is not uniform");
        }
        return tabulated(f, T);
    }

    WarpKind kind() const noexcept { return kind_; }
    double length() const noexcept { return T_; }
    /// c for Constant, alpha for ExpPair, unused otherwise.
    double parameter() const noexcept { return param_; }
    std::span<const double> samples() const {
        return samples_ ? std::span<const double>(*samples_) : std::span<const double>{};
    }

    double f(double t) const {
        check_domain(t);
        return f_unchecked(t);
    }

    double df(double t) const {
        check_domain(t);
        return df_unchecked(t);
    }

    double f_unchecked(double t) const {
        switch (kind_) {
            case WarpKind::Constant: return param_;
            case WarpKind::ExpPair: return std::exp(t) + param_ * std::exp(-t);
            case WarpKind::CoshCentered: return std::cosh(t - 0.5 * T_);
            case WarpKind::Tabulated: return (*spline_)(t);
        }
        return 0.0;
    }

    double df_unchecked(double t) const {
        switch (kind_) {
            case WarpKind::Constant: return 0.0;
            case WarpKind::ExpPair: return std::exp(t) - param_ * std::exp(-t);
            case WarpKind::CoshCentered: return std::sinh(t - 0.5 * T_);
            case WarpKind::Tabulated: return spline_->prime(t);
        }
        return 0.0;
    }

    void check_domain(double t) const {
        if (!(t >= 0.0 && t <= T_))
            fail(ErrorKind::Domain, "t = " + std::to_string(t) + " outside [0, " + std::to_string(T_) + "]");
    }

private:
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

    WarpProfile(WarpKind kind, double T) : kind_(kind), T_(T) {
        if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorKind::InvalidProfile, "cylinder length T must be positive");
    }

    void validate() const {
        for (int j = 0; j < kPositivityGrid; ++j) {
            const double t = T_ * static_cast<double>(j) / (kPositivityGrid - 1);
            const double value = f_unchecked(t);
            if (!(value > 0.0) || !std::isfinite(value))
                fail(ErrorKind::InvalidProfile, "warp is not positive at t = " + std::to_string(t));
        }
    }

    WarpKind kind_;
    double T_;
    double param_ = 0.0;
    std::shared_ptr<const std::vector<double>> samples_;
    std::shared_ptr<const Spline> spline_;
};

inline double eval_f(const WarpProfile& profile, double t) { return profile.f(t); }

/// p(t) = f'/(2f) and q(t) = m/f, the coefficients of the mode operators
/// A^{+/-} = d/dt + p +/- q.
class ModeCoefficients {
public:
    ModeCoefficients(WarpProfile profile, double m) : profile_(std::move(profile)), m_(m) {}

    double p(double t) const { return profile_.df(t) / (2.0 * profile_.f(t)); }
    double q(double t) const { return m_ / profile_.f(t); }
    /// q'(t) = -m f'/f^2.
    double dq(double t) const {
        const double f = profile_.f(t);
        return -m_ * profile_.df(t) / (f * f);
    }
    double m() const noexcept { return m_; }
    const WarpProfile& profile() const noexcept { return profile_; }

private:
    WarpProfile profile_;
    double m_;
};

inline ModeCoefficients coefficients(const WarpProfile& profile, double m) { return {profile, m}; }

/// \int_0^t 1/f, adaptive Gauss-Kronrod to 1e-12.
inline double inv_f_integral(const WarpProfile& profile, double t) {
    profile.check_domain(t);
    if (t == 0.0) return 0.0;
    if (profile.kind() == WarpKind::Constant) return t / profile.parameter();
    auto integrand = [&](double tau) { return 1.0 / profile.f_unchecked(tau); };
    double error = 0.0;
    // Boost floors each panel's error estimate near 2 eps, so a shallow depth limit keeps short
    // intervals from recursing all the way down without changing the value.
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 10, 1e-14, &error);
    if (error > 1e-12) fail(ErrorKind::Internal, "inv_f_integral did not reach 1e-12");
    return value;
}

} // namespace warpcyl
