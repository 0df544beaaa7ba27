#pragma once

// Subcommand implementations and dispatch. run() is the whole CLI; main() only forwards to it.

#include "config.hpp"
#include "format.hpp"

#include <warpcyl/warpcyl.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace warpcyl::cli {

inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Domain:
        case ErrorKind::InvalidProfile:
        case ErrorKind::Lattice: return 2;
        case ErrorKind::LiftAbsent:
        case ErrorKind::Precondition:
        case ErrorKind::Endpoint:
        case ErrorKind::Transversality:
        case ErrorKind::Unsupported: return 4;
        case ErrorKind::BlowUp:
        case ErrorKind::Mismatch:
        case ErrorKind::Refinement:
        case ErrorKind::Internal: return 3;
    }
    return 3;
}

class Context {
public:
    Context(const RunConfig& cfg, std::ostream& out) : cfg(cfg), out_(out) {}

    const RunConfig& cfg;

    void emit(const Json& j) const {
        if (cfg.out) {
            std::ofstream os(*cfg.out, std::ios::binary);
            if (!os) fail(ErrorKind::Config, "cannot open " + *cfg.out + " for writing");
            os << j.dump() << '\n';
        } else {
            out_ << j.dump() << '\n';
        }
    }

    void emit(const CsvTable& table) const {
        if (cfg.out)
            table.save(*cfg.out);
        else
            table.write(out_);
    }

private:
    std::ostream& out_;
};

namespace detail {

inline std::string fmt(double x) { return format_number(x); }

inline Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

/// (lambda, S(lambda)) over the scan grid plus one row per zero, sorted by lambda.
inline void shooting_rows(CsvTable& table, const WarpProfile& profile, const ModeSpec& mode,
                          const ShootingOptions& opts, const std::string& variant) {
    std::function<double(double)> S;
    if (variant == "system") {
        auto shooter = std::make_shared<Shooter>(profile, mode, PerturbationSpec{}, opts.n_steps);
        S = [shooter](double l) { return (*shooter)(l); };
    } else if (variant == "U" || variant == "V") {
        auto shooter = std::make_shared<ScalarShooter>(
            profile, mode, variant == "U" ? ScalarVariant::U : ScalarVariant::V, opts.n_steps);
        S = [shooter](double l) { return (*shooter)(l); };
    } else {
        fail(ErrorKind::Config, "variant must be system, U or V");
    }
    struct Row {
        double lambda, value;
        int zero;
    };
    std::vector<Row> rows;
    const double L = opts.lambda_max;
    for (int i = 0; i < opts.grid_n; ++i) {
        const double l = -L + 2.0 * L * i / (opts.grid_n - 1);
        rows.push_back({l, S(l), 0});
    }
    for (const Root& r : bracket_roots(S, -L, L, opts.grid_n, opts.tol)) rows.push_back({r.value, S(r.value), 1});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.lambda < b.lambda; });
    for (const Row& r : rows) table.row({fmt(mode.k), fmt(r.lambda), fmt(r.value), std::to_string(r.zero)});
}

inline EquivariantOptions equivariant_options(const RunConfig& cfg, const WarpProfile& profile) {
    EquivariantOptions o;
    o.mu = cfg.mu.value_or(0.0);
    o.delta = cfg.delta.value_or(profile.length() / 10.0);
    require(o.delta > 0.0 && 2.0 * o.delta < profile.length(), "delta must lie in (0, T/2)");
    o.k_max = cfg.k_max.value_or(2.0);
    require(o.k_max >= 0.0, "k-max must be >= 0");
    o.s_grid_n = cfg.s_grid.value_or(101);
    require(o.s_grid_n >= 2, "s-grid must be >= 2");
    o.shooting = resolve_shooting(cfg, ShootingOptions{4.0, 401, 1e-10, 2000});
    o.oracle_n = resolve_oracle_n(cfg, 200);
    o.completion = resolve_completion(cfg);
    return o;
}

inline CsvTable branch_table(const std::vector<BranchSample>& tracks) {
    CsvTable t({"k", "branch", "s", "lambda"});
    for (const auto& b : tracks) t.row({fmt(b.k), std::to_string(b.branch), fmt(b.s), fmt(b.lambda)});
    return t;
}

inline CsvTable event_table(const std::vector<CrossingEvent>& events) {
    CsvTable t({"s_star", "k", "sign"});
    for (const auto& e : events) t.row({fmt(e.s_star), fmt(e.k), std::to_string(e.sign)});
    return t;
}

} // namespace detail

inline void cmd_spectrum(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const WarpProfile profile = resolve_profile(cfg);
    const LatticeKind lattice = resolve_lattice(cfg);
    const double A = resolve_A(cfg);
    SolverOptions solver{resolve_shooting(cfg), resolve_oracle_n(cfg), resolve_completion(cfg)};
    const std::string variant = cfg.variant.value_or("system");
    CsvTable table({"k", "m", "lambda", "residual", "method"});
    CsvTable shooting({"k", "lambda", "S", "zero"});
    for (double k : resolve_modes(cfg, lattice)) {
        const ModeSpec mode = classify_mode(lattice, k, A);
        const Spectrum spec = block_spectrum(profile, mode, solver);
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
            table.row({detail::fmt(k), detail::fmt(mode.m), detail::fmt(spec.eigenvalues[i]),
                       detail::fmt(spec.residuals[i]), to_string(spec.method)});
        if (cfg.emit_shooting && mode.aps_case != ApsCase::SelfPaired)
            detail::shooting_rows(shooting, profile, mode, solver.shooting, variant);
    }
    if (cfg.emit_shooting) shooting.save(*cfg.emit_shooting);
    ctx.emit(table);
}

inline void cmd_pair_check(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const double A = resolve_A(cfg);
    if (!reflection_lift_exists(A))
        fail(ErrorKind::LiftAbsent, "2A = " + detail::fmt(2.0 * A) + " is not an integer; no reflection lift");
    const WarpProfile profile = resolve_profile(cfg);
    const LatticeKind lattice = resolve_lattice(cfg);
    const ShootingOptions opts = resolve_shooting(cfg);
    std::vector<double> modes;
    if (cfg.k) {
        modes = resolve_modes(cfg, lattice);
    } else {
        for (double k : lattice_window(lattice, cfg.k_min.value_or(-3.0), cfg.k_max.value_or(3.0)))
            if (aps_case_of(k + A) != ApsCase::SelfPaired) modes.push_back(k);
    }
    Json pairs = Json::array();
    double max_gap = 0.0;
    for (double k : modes) {
        const PairGap g = pair_spectrum_check(profile, k, A, opts);
        max_gap = std::max(max_gap, g.gap);
        pairs.push_back({{"k", number(g.k)},
                         {"k_paired", number(g.k_paired)},
                         {"m", number(g.m)},
                         {"count", g.count},
                         {"gap", number(g.gap)}});
    }
    ctx.emit({{"A", number(A)},
              {"lattice", to_string(lattice)},
              {"lambda_max", number(opts.lambda_max)},
              {"pairs", pairs},
              {"max_gap", number(max_gap)}});
}

inline void cmd_eta(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const WarpProfile profile = resolve_profile(cfg);
    double m = 0.0;
    if (cfg.m) {
        m = *cfg.m;
    } else {
        require(cfg.k.has_value(), "eta needs --m or --k (with --A)");
        m = *cfg.k + resolve_A(cfg);
    }
    std::vector<Boundary> sides;
    const std::string b = cfg.boundary.value_or("both");
    if (b == "Y0" || b == "both") sides.push_back(Boundary::Y0);
    if (b == "YT" || b == "both") sides.push_back(Boundary::YT);
    require(!sides.empty(), "boundary must be Y0, YT or both");
    Json reports = Json::array();
    for (Boundary side : sides) {
        const EtaReport r = boundary_eta(profile, m, side);
        reports.push_back({{"boundary", to_string(r.boundary)},
                           {"eta", number(r.eta)},
                           {"h", r.h},
                           {"eta_bar", number(r.eta_bar)}});
    }
    ctx.emit({{"m", number(m)}, {"reports", reports}});
}

inline void cmd_index(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const WarpProfile profile = resolve_profile(cfg);
    const LatticeKind lattice = resolve_lattice(cfg);
    const double A = resolve_A(cfg);
    const Completion completion = resolve_completion(cfg);
    const double lo = cfg.k_min.value_or(-10.0), hi = cfg.k_max.value_or(10.0);
    const int index = chiral_index(profile, A, lattice, lo, hi, completion);
    ctx.emit({{"A0", number(A)},
              {"lattice", to_string(lattice)},
              {"completion", to_string(completion)},
              {"k_min", number(lo)},
              {"k_max", number(hi)},
              {"self_paired_present", self_paired_label(lattice, A).has_value()},
              {"index", index}});
}

inline void cmd_trace(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const double A = resolve_A(cfg);
    const WarpProfile profile = resolve_profile(cfg);
    const LatticeKind lattice = resolve_lattice(cfg);
    const Completion completion = resolve_completion(cfg);
    std::optional<std::pair<double, double>> window;
    if (cfg.k_min && cfg.k_max) window = std::pair{*cfg.k_min, *cfg.k_max};
    const TraceReport r = reflection_trace(profile, A, lattice, completion, window);
    ctx.emit({{"A0", number(r.A0)},
              {"lattice", to_string(r.lattice)},
              {"completion", to_string(r.completion)},
              {"self_paired_present", r.self_paired_present},
              {"kernel_dim_self_paired", r.kernel_dim_self_paired},
              {"trace", number(r.trace)}});
}

inline void cmd_sf_path(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const HolonomyPath path = resolve_path(cfg);
    const LatticeKind lattice = resolve_lattice(cfg);
    const FlowReport r = crossing_spectral_flow(path, lattice);
    Json events = Json::array();
    for (const auto& e : r.events)
        events.push_back({{"s_star", number(e.s_star)}, {"k", number(e.k)}, {"sign", e.sign}});
    if (cfg.events_csv) detail::event_table(r.events).save(*cfg.events_csv);
    ctx.emit({{"lattice", to_string(lattice)},
              {"events", events},
              {"sf", r.sf},
              {"parity", r.parity},
              {"endpoint_ok", r.endpoint_ok}});
}

inline void cmd_parity(const Context& ctx) {
    const FlowReport r = crossing_spectral_flow(resolve_path(ctx.cfg), resolve_lattice(ctx.cfg));
    ctx.emit({{"sf", r.sf}, {"parity", r.parity}});
}

inline void cmd_equivariant(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const WarpProfile profile = resolve_profile(cfg);
    const LatticeKind lattice = resolve_lattice(cfg);
    require(!cfg.A || *cfg.A == 0.0, "equivariant-sf runs at A0 = 0 only");
    const EquivariantOptions o = detail::equivariant_options(cfg, profile);
    const EquivariantReport r = equivariant_spectral_flow(profile, lattice, o);
    Json orbits = Json::array();
    for (const auto& f : r.orbit_flows)
        orbits.push_back({{"k", number(f.k)},
                          {"k_paired", number(f.k_paired)},
                          {"N", f.N},
                          {"sf_k", f.sf_k},
                          {"sf_paired", f.sf_paired}});
    if (cfg.branches_csv) detail::branch_table(r.tracks).save(*cfg.branches_csv);
    ctx.emit({{"lattice", to_string(lattice)},
              {"completion", to_string(r.completion)},
              {"mu", number(r.mu)},
              {"delta", number(r.delta)},
              {"s_grid", o.s_grid_n},
              {"k_max", number(o.k_max)},
              {"orbit_flows", orbits},
              {"self_paired_flow", r.self_paired_flow ? Json(*r.self_paired_flow) : Json(nullptr)},
              {"total_sf", r.total_sf},
              {"even_off_self_paired", r.even_off_self_paired}});
}

inline void cmd_oracle_compare(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const WarpProfile profile = resolve_profile(cfg);
    const LatticeKind lattice = resolve_lattice(cfg);
    const double A = resolve_A(cfg);
    require(cfg.k.has_value(), "oracle-compare needs --k");
    const ModeSpec mode = classify_mode(lattice, resolve_modes(cfg, lattice).front(), A);
    if (mode.aps_case == ApsCase::SelfPaired)
        fail(ErrorKind::Unsupported, "shooting is not defined for the self-paired sector");
    const ShootingOptions opts = resolve_shooting(cfg);
    const int n = resolve_oracle_n(cfg);
    const Spectrum a = eigenvalues_shooting(profile, mode, opts);
    const Spectrum b = oracle_eigenvalues(profile, mode, resolve_completion(cfg), n, opts.lambda_max);
    const bool count_match = a.eigenvalues.size() == b.eigenvalues.size();
    double gap = 0.0;
    if (count_match)
        for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
            gap = std::max(gap, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
    const double bound = 10.0 * std::pow(profile.length() / n, 2);
    ctx.emit({{"k", number(mode.k)},
              {"m", number(mode.m)},
              {"case", to_string(mode.aps_case)},
              {"n", n},
              {"lambda_max", number(opts.lambda_max)},
              {"shooting", detail::numbers(a.eigenvalues)},
              {"oracle", detail::numbers(b.eigenvalues)},
              {"count_match", count_match},
              {"max_gap", count_match ? number(gap) : Json(nullptr)},
              {"bound", number(bound)}});
}

inline void cmd_plot_data(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const std::string kind = cfg.kind.value_or("");
    if (kind == "shooting") {
        const WarpProfile profile = resolve_profile(cfg);
        const LatticeKind lattice = resolve_lattice(cfg);
        require(cfg.k.has_value(), "plot-data --kind shooting needs --k");
        const ModeSpec mode = classify_mode(lattice, resolve_modes(cfg, lattice).front(), resolve_A(cfg));
        CsvTable t({"k", "lambda", "S", "zero"});
        detail::shooting_rows(t, profile, mode, resolve_shooting(cfg), cfg.variant.value_or("system"));
        ctx.emit(t);
    } else if (kind == "branches") {
        const WarpProfile profile = resolve_profile(cfg);
        const auto r = equivariant_spectral_flow(profile, resolve_lattice(cfg), detail::equivariant_options(cfg, profile));
        ctx.emit(detail::branch_table(r.tracks));
    } else if (kind == "timeline") {
        const HolonomyPath path = resolve_path(cfg);
        const LatticeKind lattice = resolve_lattice(cfg);
        const int n = cfg.s_grid.value_or(101);
        require(n >= 2, "s-grid must be >= 2");
        const auto events = crossing_events(path, lattice);
        CsvTable t({"k", "s", "m", "event"});
        for (double k : relevant_modes(path, lattice)) {
            struct Row {
                double s, m;
                int event;
            };
            std::vector<Row> rows;
            for (int i = 0; i < n; ++i) {
                const double s = static_cast<double>(i) / (n - 1);
                rows.push_back({s, k + path.value(s), 0});
            }
            for (const auto& e : events)
                if (e.k == k) rows.push_back({e.s_star, k + path.value(e.s_star), 1});
            std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.s < b.s; });
            for (const Row& r : rows)
                t.row({detail::fmt(k), detail::fmt(r.s), detail::fmt(r.m), std::to_string(r.event)});
        }
        ctx.emit(t);
    } else {
        fail(ErrorKind::Config, "plot-data needs --kind shooting, branches or timeline");
    }
}

namespace detail {

inline void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path, "JSON config file; flags override its values");
    sub->add_option("--profile", cfg.profile, "exp_pair | constant | cosh_centered | tabulated");
    sub->add_option("--alpha", cfg.alpha, "ExpPair parameter");
    sub->add_option("--c", cfg.c, "Constant value");
    sub->add_option("--T", cfg.T, "cylinder length");
    sub->add_option("--profile-csv", cfg.profile_csv, "tabulated profile (columns t,f)");
    sub->add_option("--lattice", cfg.lattice, "periodic | antiperiodic");
    sub->add_option("--A", cfg.A, "holonomy");
    sub->add_option("--k", cfg.k, "mode label");
    sub->add_option("--m", cfg.m, "shifted mode parameter (eta)");
    sub->add_option("--k-min", cfg.k_min, "mode window lower end");
    sub->add_option("--k-max", cfg.k_max, "mode window upper end");
    sub->add_option("--lambda-max", cfg.lambda_max, "spectral window half-width");
    sub->add_option("--grid", cfg.grid, "shooting scan points");
    sub->add_option("--tol", cfg.tol, "bisection tolerance");
    sub->add_option("--n-steps", cfg.n_steps, "RK4 steps");
    sub->add_option("--oracle-n", cfg.oracle_n, "matrix oracle grid size");
    sub->add_option("--completion", cfg.completion, "chiral | transmission");
    sub->add_option("--mu", cfg.mu, "bulk perturbation coupling");
    sub->add_option("--delta", cfg.delta, "cutoff margin (default T/10)");
    sub->add_option("--s-grid", cfg.s_grid, "family parameter grid");
    sub->add_option("--path-linear", cfg.path_linear, "A(s) = a0 + c s")->expected(2);
    sub->add_option("--path-csv", cfg.path_csv, "sampled path (column A, optional s)");
    sub->add_option("--boundary", cfg.boundary, "Y0 | YT | both");
    sub->add_option("--variant", cfg.variant, "shooting function: system | U | V");
    sub->add_option("--kind", cfg.kind, "plot-data kind: shooting | branches | timeline");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--events-csv", cfg.events_csv, "crossing events CSV");
    sub->add_option("--emit-shooting", cfg.emit_shooting, "shooting samples CSV");
    sub->add_option("--branches-csv", cfg.branches_csv, "eigenvalue branch tracks CSV");
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using Command = void (*)(const Context&);
    const std::vector<std::pair<std::string, std::pair<Command, std::string>>> table{
        {"spectrum", {cmd_spectrum, "APS eigenvalues of mode blocks (CSV)"}},
        {"pair-check", {cmd_pair_check, "spectra of paired blocks k and -k-2A"}},
        {"eta", {cmd_eta, "boundary eta invariants of one block"}},
        {"index", {cmd_index, "chiral index over a mode window"}},
        {"trace", {cmd_trace, "reflection trace on the harmonic space"}},
        {"sf-path", {cmd_sf_path, "crossing spectral flow along a holonomy path"}},
        {"parity", {cmd_parity, "sf and its parity along a holonomy path"}},
        {"equivariant-sf", {cmd_equivariant, "bulk-perturbation spectral flow at A0 = 0"}},
        {"oracle-compare", {cmd_oracle_compare, "shooting vs matrix oracle for one block"}},
        {"plot-data", {cmd_plot_data, "CSV inputs for the plotting scripts"}},
    };

    CLI::App app{"APS spectra of twisted Dirac operators on warped cylinders", "warpcyl"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path;
    std::map<CLI::App*, Command> dispatch;
    for (const auto& [name, entry] : table) {
        CLI::App* sub = app.add_subcommand(name, entry.second);
        detail::add_common(sub, cfg, config_path);
        dispatch[sub] = entry.first;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (!config_path.empty()) overlay_file(cfg, config_path);
        for (const auto& [sub, command] : dispatch) {
            if (sub->parsed()) {
                command(Context(cfg, out));
                return 0;
            }
        }
        err << "error: no subcommand\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace warpcyl::cli
