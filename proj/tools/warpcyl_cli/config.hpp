#pragma once

// Run configuration: a JSON document (--config) overlaid by command-line flags.

#include "format.hpp"

#include <warpcyl/warpcyl.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace warpcyl::cli {

/// Every setting is optional here; each subcommand applies its own defaults.
struct RunConfig {
    std::optional<std::string> profile;  // exp_pair | constant | cosh_centered | tabulated
    std::optional<double> alpha, c, T;
    std::optional<std::string> profile_csv;
    std::optional<std::string> lattice;
    std::optional<double> A, k, m, k_min, k_max;
    std::optional<double> lambda_max, tol;
    std::optional<int> grid, n_steps, oracle_n;
    std::optional<std::string> completion;
    std::optional<double> mu, delta;
    std::optional<int> s_grid;
    std::optional<std::vector<double>> path_linear;
    std::optional<std::string> path_csv;
    std::optional<std::string> boundary;
    std::optional<std::string> variant;
    std::optional<std::string> kind;
    std::optional<std::string> out, events_csv, emit_shooting, branches_csv;
};

namespace detail {

template <typename T>
void take(const Json& j, const char* key, std::optional<T>& slot) {
    if (slot || !j.contains(key)) return;
    try {
        slot = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorKind::Config, std::string("config key '") + key + "' has the wrong type");
    }
}

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) fail(ErrorKind::Config, "unknown config key '" + key + "'" + where);
    }
}

} // namespace detail

/// Fills every unset field of cfg from the JSON document.
inline void overlay_json(RunConfig& cfg, const Json& j) {
    if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
    detail::reject_unknown(j,
                           {"profile", "alpha", "c", "T", "profile_csv", "lattice", "A", "k", "m", "k_min", "k_max",
                            "lambda_max", "tol", "grid", "n_steps", "oracle_n", "completion", "mu", "delta", "s_grid",
                            "path", "path_linear", "path_csv", "boundary", "variant", "kind", "out", "events_csv",
                            "emit_shooting", "branches_csv"},
                           "");
    if (j.contains("profile") && j.at("profile").is_object()) {
        const Json& p = j.at("profile");
        detail::reject_unknown(p, {"kind", "alpha", "c", "T", "csv"}, " in profile");
        detail::take(p, "kind", cfg.profile);
        detail::take(p, "alpha", cfg.alpha);
        detail::take(p, "c", cfg.c);
        detail::take(p, "T", cfg.T);
        detail::take(p, "csv", cfg.profile_csv);
    } else {
        detail::take(j, "profile", cfg.profile);
    }
    if (j.contains("path")) {
        const Json& p = j.at("path");
        if (!p.is_object()) fail(ErrorKind::Config, "config key 'path' must be an object");
        detail::reject_unknown(p, {"kind", "a0", "c", "file"}, " in path");
        const std::string kind = p.value("kind", "");
        if (kind == "linear") {
            if (!cfg.path_linear && !cfg.path_csv) {
                if (!p.contains("a0") || !p.contains("c")) fail(ErrorKind::Config, "linear path needs a0 and c");
                cfg.path_linear = std::vector<double>{p.at("a0").get<double>(), p.at("c").get<double>()};
            }
        } else if (kind == "csv") {
            if (!cfg.path_linear && !cfg.path_csv) {
                if (!p.contains("file")) fail(ErrorKind::Config, "csv path needs file");
                cfg.path_csv = p.at("file").get<std::string>();
            }
        } else {
            fail(ErrorKind::Config, "path kind must be linear or csv");
        }
    }
    detail::take(j, "alpha", cfg.alpha);
    detail::take(j, "c", cfg.c);
    detail::take(j, "T", cfg.T);
    detail::take(j, "profile_csv", cfg.profile_csv);
    detail::take(j, "lattice", cfg.lattice);
    detail::take(j, "A", cfg.A);
    detail::take(j, "k", cfg.k);
    detail::take(j, "m", cfg.m);
    detail::take(j, "k_min", cfg.k_min);
    detail::take(j, "k_max", cfg.k_max);
    detail::take(j, "lambda_max", cfg.lambda_max);
    detail::take(j, "tol", cfg.tol);
    detail::take(j, "grid", cfg.grid);
    detail::take(j, "n_steps", cfg.n_steps);
    detail::take(j, "oracle_n", cfg.oracle_n);
    detail::take(j, "completion", cfg.completion);
    detail::take(j, "mu", cfg.mu);
    detail::take(j, "delta", cfg.delta);
    detail::take(j, "s_grid", cfg.s_grid);
    if (!cfg.path_csv) detail::take(j, "path_linear", cfg.path_linear);
    if (!cfg.path_linear) detail::take(j, "path_csv", cfg.path_csv);
    detail::take(j, "boundary", cfg.boundary);
    detail::take(j, "variant", cfg.variant);
    detail::take(j, "kind", cfg.kind);
    detail::take(j, "out", cfg.out);
    detail::take(j, "events_csv", cfg.events_csv);
    detail::take(j, "emit_shooting", cfg.emit_shooting);
    detail::take(j, "branches_csv", cfg.branches_csv);
}

inline void overlay_file(RunConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Config, "cannot read config " + path);
    Json j;
    try {
        j = Json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Config, "config " + path + " is not valid JSON: " + e.what());
    }
    overlay_json(cfg, j);
}

// ---------------------------------------------------------------------------
// Resolution with defaults and bounds.

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::Config, what);
}

inline WarpProfile resolve_profile(const RunConfig& cfg) {
    const std::string kind = cfg.profile.value_or("exp_pair");
    if (kind == "tabulated") {
        require(cfg.profile_csv.has_value(), "tabulated profile needs --profile-csv");
        const CsvData data = read_csv(*cfg.profile_csv);
        const auto* t = data.column("t");
        const auto* f = data.column("f");
        require(t && f, *cfg.profile_csv + " must have columns t,f");
        return WarpProfile::tabulated(*t, *f);
    }
    const double T = cfg.T.value_or(3.0);
    require(T > 0.0 && std::isfinite(T), "T must be positive");
    if (kind == "exp_pair") {
        const double alpha = cfg.alpha.value_or(1.0);
        require(alpha > 0.0, "alpha must be positive");
        return WarpProfile::exp_pair(alpha, T);
    }
    if (kind == "constant") {
        const double c = cfg.c.value_or(1.0);
        require(c > 0.0, "c must be positive");
        return WarpProfile::constant(c, T);
    }
    if (kind == "cosh_centered") return WarpProfile::cosh_centered(T);
    fail(ErrorKind::Config, "unknown profile kind '" + kind + "'");
}

inline LatticeKind resolve_lattice(const RunConfig& cfg) {
    const std::string l = cfg.lattice.value_or("periodic");
    if (l == "periodic") return LatticeKind::Periodic;
    if (l == "antiperiodic") return LatticeKind::AntiPeriodic;
    fail(ErrorKind::Config, "lattice must be periodic or antiperiodic");
}

inline Completion resolve_completion(const RunConfig& cfg, Completion fallback = Completion::Transmission) {
    if (!cfg.completion) return fallback;
    if (*cfg.completion == "transmission") return Completion::Transmission;
    if (*cfg.completion == "chiral") return Completion::Chiral;
    fail(ErrorKind::Config, "completion must be chiral or transmission");
}

inline ShootingOptions resolve_shooting(const RunConfig& cfg, ShootingOptions defaults = {}) {
    ShootingOptions o = defaults;
    o.lambda_max = cfg.lambda_max.value_or(o.lambda_max);
    o.grid_n = cfg.grid.value_or(o.grid_n);
    o.tol = cfg.tol.value_or(o.tol);
    o.n_steps = cfg.n_steps.value_or(o.n_steps);
    require(o.lambda_max > 0.0, "lambda-max must be positive");
    require(o.grid_n >= 2, "grid must be >= 2");
    require(o.tol > 0.0, "tol must be positive");
    require(o.n_steps >= kMinSteps, "n-steps must be >= 100");
    return o;
}

inline int resolve_oracle_n(const RunConfig& cfg, int fallback = 800) {
    const int n = cfg.oracle_n.value_or(fallback);
    require(n >= 50, "oracle-n must be >= 50");
    return n;
}

inline double resolve_A(const RunConfig& cfg, double fallback = 0.5) {
    const double A = cfg.A.value_or(fallback);
    require(std::isfinite(A), "A must be finite");
    return A;
}

/// Modes selected by --k, or the window [k_min, k_max].
inline std::vector<double> resolve_modes(const RunConfig& cfg, LatticeKind lattice) {
    if (cfg.k) {
        require(on_lattice(lattice, *cfg.k), "k = " + format_number(*cfg.k) + " is not on the " +
                                                 to_string(lattice) + " lattice");
        return {*cfg.k};
    }
    require(cfg.k_min && cfg.k_max, "give --k or both --k-min and --k-max");
    return lattice_window(lattice, *cfg.k_min, *cfg.k_max);
}

inline HolonomyPath resolve_path(const RunConfig& cfg) {
    if (cfg.path_linear) {
        require(cfg.path_linear->size() == 2, "--path-linear takes a0 and c");
        return HolonomyPath::linear((*cfg.path_linear)[0], (*cfg.path_linear)[1]);
    }
    require(cfg.path_csv.has_value(), "give --path-linear a0 c or --path-csv FILE");
    const CsvData data = read_csv(*cfg.path_csv);
    const auto* A = data.column("A");
    require(A != nullptr, *cfg.path_csv + " must have an A column");
    if (const auto* s = data.column("s")) {
        const std::size_t n = s->size();
        require(n >= 2, *cfg.path_csv + " needs at least 2 rows");
        for (std::size_t i = 0; i < n; ++i)
            require(std::abs((*s)[i] - static_cast<double>(i) / (n - 1)) <= 1e-9,
                    *cfg.path_csv + ": s must be a uniform grid on [0, 1]");
    }
    require(static_cast<int>(A->size()) >= HolonomyPath::kMinSamples,
            *cfg.path_csv + " needs at least 16 samples");
    return HolonomyPath::samples(*A);
}

} // namespace warpcyl::cli
