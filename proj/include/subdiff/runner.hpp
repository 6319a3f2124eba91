#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/estimates.hpp"
#include "subdiff/forward.hpp"
#include "subdiff/inverse.hpp"
#include "subdiff/io.hpp"
#include "subdiff/mms.hpp"
#include "subdiff/problem.hpp"

namespace subdiff::run {

inline constexpr const char* version = "1.0.0";

/// Everything a subcommand run needs, filled from defaults, an optional JSON
/// config file, and command-line flags (flags win).
struct RunConfig {
    std::string subcommand = "invert";
    std::string case_id = "mms-1";
    double alpha = 0.5;
    double T = 1.0;
    std::optional<double> l0;  ///< unset: keep the case's observation height
    double epsilon = 0.5;
    int K = 32;
    int nt = 65;
    int nx = 65;
    int ny = 0;                ///< 0: 8K + 1
    double tol = 1e-10;
    int max_iter = 60;
    double noise_level = 0.0;
    std::uint64_t seed = 1;
    int fine_factor = 1;
    std::string outdir = "out";
    std::string psi_file;      ///< measured trace CSV; replaces the case trace
    std::string target = "forward";  ///< verify: which pipeline to study
    bool dump_full = false;
    int dump_mode = 0;         ///< write state_k<k>.csv for this mode
    bool dump_series = false;
    bool dump_coeffs = false;
    double mu = 1.0;           ///< ml-eval second parameter
    double z = 0.0;            ///< ml-eval argument
};

namespace detail {

template <typename T>
T config_value(const io::json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const io::json::exception&) {
        throw std::invalid_argument("config key '" + key + "' has the wrong type");
    }
}

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const io::json& v) {
    if (key == "subcommand") cfg.subcommand = config_value<std::string>(v, key);
    else if (key == "case") cfg.case_id = config_value<std::string>(v, key);
    else if (key == "alpha") cfg.alpha = config_value<double>(v, key);
    else if (key == "T") cfg.T = config_value<double>(v, key);
    else if (key == "l0") cfg.l0 = config_value<double>(v, key);
    else if (key == "epsilon") cfg.epsilon = config_value<double>(v, key);
    else if (key == "K") cfg.K = config_value<int>(v, key);
    else if (key == "nt") cfg.nt = config_value<int>(v, key);
    else if (key == "nx") cfg.nx = config_value<int>(v, key);
    else if (key == "ny") cfg.ny = config_value<int>(v, key);
    else if (key == "tol") cfg.tol = config_value<double>(v, key);
    else if (key == "max_iter") cfg.max_iter = config_value<int>(v, key);
    else if (key == "noise_level") cfg.noise_level = config_value<double>(v, key);
    else if (key == "seed") cfg.seed = config_value<std::uint64_t>(v, key);
    else if (key == "fine_factor") cfg.fine_factor = config_value<int>(v, key);
    else if (key == "outdir") cfg.outdir = config_value<std::string>(v, key);
    else if (key == "psi_file") cfg.psi_file = config_value<std::string>(v, key);
    else if (key == "target") cfg.target = config_value<std::string>(v, key);
    else if (key == "dump_full") cfg.dump_full = config_value<bool>(v, key);
    else if (key == "dump_mode") cfg.dump_mode = config_value<int>(v, key);
    else if (key == "dump_series") cfg.dump_series = config_value<bool>(v, key);
    else if (key == "dump_coeffs") cfg.dump_coeffs = config_value<bool>(v, key);
    else if (key == "mu") cfg.mu = config_value<double>(v, key);
    else if (key == "z") cfg.z = config_value<double>(v, key);
    else throw std::invalid_argument("unknown config key: " + key);
}

} // namespace detail

/// Parse a JSON config file over the defaults. Unknown keys are refused by
/// name; range checks happen where the values are consumed, so the error
/// messages state the violated bound.
inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    io::json j;
    try {
        in >> j;
    } catch (const io::json::exception& e) {
        throw std::invalid_argument("config " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) detail::apply_config_entry(cfg, key, value);
    return cfg;
}

namespace detail {

using clock = std::chrono::steady_clock;

inline double ms_since(clock::time_point start) {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
}

/// Registry case plus the run's grids and overrides, validated.
inline std::pair<ManufacturedCase, ProblemSpec> build_problem(const RunConfig& cfg) {
    ManufacturedCase mc = manufactured_case(cfg.case_id, cfg.alpha);
    ProblemSpec spec = mc.spec;
    spec.T = cfg.T;
    spec.tg = TimeGrid(cfg.T, cfg.nt);
    spec.sg = SpaceGrid(cfg.nx);
    spec.epsilon = cfg.epsilon;
    spec.K = cfg.K;
    spec.ny = cfg.ny;
    if (cfg.l0) spec.l0 = *cfg.l0;
    validate(spec);
    return {std::move(mc), std::move(spec)};
}

inline io::json config_echo(const RunConfig& cfg) {
    io::json j;
    j["case"] = cfg.case_id;
    j["alpha"] = cfg.alpha;
    j["T"] = cfg.T;
    j["l0"] = cfg.l0 ? io::json(*cfg.l0) : io::json();
    j["epsilon"] = cfg.epsilon;
    j["K"] = cfg.K;
    j["nt"] = cfg.nt;
    j["nx"] = cfg.nx;
    j["ny"] = cfg.ny;
    j["tol"] = cfg.tol;
    j["max_iter"] = cfg.max_iter;
    j["noise_level"] = cfg.noise_level;
    j["seed"] = cfg.seed;
    j["fine_factor"] = cfg.fine_factor;
    j["outdir"] = cfg.outdir;
    j["psi_file"] = cfg.psi_file;
    j["target"] = cfg.target;
    j["dump_full"] = cfg.dump_full;
    j["dump_mode"] = cfg.dump_mode;
    j["dump_series"] = cfg.dump_series;
    j["dump_coeffs"] = cfg.dump_coeffs;
    return j;
}

inline io::json resolved_echo(const ProblemSpec& spec) {
    io::json j;
    j["alpha"] = spec.alpha;
    j["T"] = spec.T;
    j["l0"] = spec.l0;
    j["epsilon"] = spec.epsilon;
    j["K"] = spec.K;
    j["nt"] = spec.tg.nt;
    j["nx"] = spec.sg.nx;
    j["ny"] = spec.resolved_ny();
    return j;
}

inline io::json estimates_json(const EstimateReport& rep, const std::vector<BoundCheck>* checks) {
    io::json j;
    j["f0"] = rep.f0;
    j["g0"] = rep.g0;
    j["psi0"] = rep.psi0;
    j["M"] = rep.M;
    j["M_alpha"] = rep.M_alpha;
    j["phistar"] = rep.phistar;
    j["fstar"] = rep.fstar;
    j["gstar"] = rep.gstar;
    j["A0"] = rep.A0;
    j["A1"] = rep.A1;
    j["B1"] = rep.B1;
    j["B1_spectral"] = rep.B1_spectral;
    j["derivative_route"] = rep.derivative_route;
    j["condition4"] = rep.condition4;
    j["condition_L"] = rep.condition_L;
    j["max_f_ynorm_sq"] = rep.max_f_ynorm_sq;
    j["max_f_omega_sq"] = rep.max_f_omega_sq;
    j["max_g_omega_sq"] = rep.max_g_omega_sq;
    j["phi_l2sq"] = rep.phi_l2sq;
    j["phi_x_l2sq"] = rep.phi_x_l2sq;
    j["phi_y_l2sq"] = rep.phi_y_l2sq;
    j["notes"] = rep.notes;
    if (checks) {
        io::json arr = io::json::array();
        for (const BoundCheck& c : *checks)
            arr.push_back({{"name", c.name},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"margin", c.margin},
                           {"pass", c.pass}});
        j["bound_checks"] = arr;
    }
    return j;
}

/// Tracks the manifest through a run: written once before any data file and
/// rewritten with status, timings, and the checksummed inventory at the end.
class Manifest {
public:
    Manifest(const RunConfig& cfg) : dir_(cfg.outdir) {
        doc_["version"] = version;
        doc_["subcommand"] = cfg.subcommand;
        doc_["status"] = "started";
        doc_["config"] = config_echo(cfg);
        std::filesystem::create_directories(dir_);
        io::write_json((dir_ / "manifest.json").string(), doc_);
    }

    std::string path_for(const std::string& name) { return (dir_ / name).string(); }

    /// Register a data file written under the output directory.
    void add_file(const std::string& name) { files_.push_back(name); }

    void add_timing(const std::string& phase, double ms) { timings_[phase] = ms; }

    void set(const std::string& key, io::json value) { doc_[key] = std::move(value); }

    void finish(const std::string& status) {
        doc_["status"] = status;
        doc_["timings_ms"] = timings_;
        io::json inventory = io::json::array();
        for (const std::string& name : files_) {
            const std::filesystem::path p = dir_ / name;
            inventory.push_back(
                {{"name", name},
                 {"bytes", static_cast<std::uint64_t>(std::filesystem::file_size(p))},
                 {"fnv1a", io::hex64(io::fnv1a_file(p.string()))}});
        }
        doc_["files"] = inventory;
        io::write_json((dir_ / "manifest.json").string(), doc_);
    }

private:
    std::filesystem::path dir_;
    io::json doc_;
    io::json timings_ = io::json::object();
    std::vector<std::string> files_;
};

/// Shared dump handling for subcommands that end with a spectral state.
inline void write_state_dumps(const RunConfig& cfg, const ProblemSpec& spec,
                              const SpectralState& state, Manifest& mf) {
    if (cfg.dump_mode > 0) {
        if (cfg.dump_mode > spec.K)
            throw std::invalid_argument("dump_mode exceeds K = " + std::to_string(spec.K));
        const std::string name = "state_k" + std::to_string(cfg.dump_mode) + ".csv";
        io::write_field_csv(mf.path_for(name), "value", spec.tg, spec.sg,
                            state.modes[static_cast<std::size_t>(cfg.dump_mode - 1)].values);
        mf.add_file(name);
    }
    if (cfg.dump_coeffs) {
        // sine coefficients of the final-time mid-profile solution
        const int mid = spec.sg.nx / 2;
        std::vector<double> coeffs(static_cast<std::size_t>(spec.K), 0.0);
        for (const ModeField& mode : state.modes)
            coeffs[static_cast<std::size_t>(mode.k - 1)] =
                mode.values(static_cast<std::size_t>(spec.tg.nt - 1), static_cast<std::size_t>(mid));
        io::write_coeffs_csv(mf.path_for("coeffs.csv"), coeffs);
        mf.add_file("coeffs.csv");
    }
}

/// The measurement for an inverse run: file > synthesized > analytic case
/// trace. Whenever the data are not the case's own analytic trace, the
/// analytic psi shortcuts are dropped so the derivative tables come from the
/// actual data.
inline Array2D resolve_psi(const RunConfig& cfg, ProblemSpec& spec) {
    if (!cfg.psi_file.empty()) {
        Array2D psi = io::read_field_csv(cfg.psi_file, spec.tg, spec.sg);
        spec.psi = nullptr;
        spec.dalpha_psi = nullptr;
        spec.psi_xx = nullptr;
        return psi;
    }
    if (cfg.noise_level > 0.0) {
        Array2D psi = synthesize_data(spec, cfg.noise_level, cfg.seed, cfg.fine_factor);
        spec.psi = nullptr;
        spec.dalpha_psi = nullptr;
        spec.psi_xx = nullptr;
        return psi;
    }
    if (!spec.psi)
        throw std::invalid_argument("invert: the case has no analytic trace; pass psi_file");
    Array2D psi(static_cast<std::size_t>(spec.tg.nt), static_cast<std::size_t>(spec.sg.nx));
    for (int i = 0; i < spec.tg.nt; ++i)
        for (int j = 0; j < spec.sg.nx; ++j)
            psi(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                spec.psi(spec.tg.t(i), spec.sg.x(j));
    return psi;
}

inline int run_forward(const RunConfig& cfg, Manifest& mf) {
    auto [mc, spec] = build_problem(cfg);
    mf.set("resolved", resolved_echo(spec));
    mf.set("warnings", check_compatibility(spec));

    auto t0 = clock::now();
    const DecomposedData decomp = decompose_data(spec);
    mf.add_timing("decompose", ms_since(t0));

    t0 = clock::now();
    const SpectralState state = solve_forward(spec, decomp);
    mf.add_timing("solve", ms_since(t0));

    t0 = clock::now();
    const Array2D trace = trace_profile(state, spec.l0);
    io::write_field_csv(mf.path_for("psi.csv"), "psi", spec.tg, spec.sg, trace);
    mf.add_file("psi.csv");
    if (cfg.dump_full) {
        const SineBasis basis(spec.K, spec.resolved_ny());
        io::write_full_csv(mf.path_for("u_full.csv"), spec.tg, spec.sg, basis.ygrid(),
                           assemble_full(state, basis));
        mf.add_file("u_full.csv");
    }
    if (cfg.dump_series) {
        const int mid = spec.sg.nx / 2;
        std::vector<double> series(static_cast<std::size_t>(spec.tg.nt));
        for (int i = 0; i < spec.tg.nt; ++i)
            series[static_cast<std::size_t>(i)] = trace(static_cast<std::size_t>(i), static_cast<std::size_t>(mid));
        io::write_series_csv(mf.path_for("series.csv"), "psi_mid", spec.tg, series);
        mf.add_file("series.csv");
    }
    write_state_dumps(cfg, spec, state, mf);
    mf.add_timing("write", ms_since(t0));

    std::printf("forward: case %s, alpha=%g, T=%g, grid nt=%d nx=%d ny=%d, K=%d\n", mc.id.c_str(),
                spec.alpha, spec.T, spec.tg.nt, spec.sg.nx, spec.resolved_ny(), spec.K);
    std::printf("  trace written to %s\n", mf.path_for("psi.csv").c_str());
    return 0;
}

inline int run_synthesize(const RunConfig& cfg, Manifest& mf) {
    auto [mc, spec] = build_problem(cfg);
    mf.set("resolved", resolved_echo(spec));
    mf.set("warnings", check_compatibility(spec));

    auto t0 = clock::now();
    const Array2D psi = synthesize_data(spec, cfg.noise_level, cfg.seed, cfg.fine_factor);
    mf.add_timing("solve", ms_since(t0));

    t0 = clock::now();
    io::write_field_csv(mf.path_for("psi.csv"), "psi", spec.tg, spec.sg, psi);
    mf.add_file("psi.csv");
    mf.add_timing("write", ms_since(t0));

    std::printf("synthesize: case %s, noise=%g, seed=%llu, fine_factor=%d\n", mc.id.c_str(),
                cfg.noise_level, static_cast<unsigned long long>(cfg.seed), cfg.fine_factor);
    std::printf("  trace written to %s\n", mf.path_for("psi.csv").c_str());
    return 0;
}

inline int run_invert(const RunConfig& cfg, Manifest& mf) {
    auto [mc, spec] = build_problem(cfg);
    mf.set("resolved", resolved_echo(spec));
    mf.set("warnings", check_compatibility(spec));

    auto t0 = clock::now();
    const Array2D psi = resolve_psi(cfg, spec);
    const DecomposedData decomp = decompose_data(spec);
    mf.add_timing("decompose", ms_since(t0));

    t0 = clock::now();
    const InverseSolution sol = solve_inverse(spec, decomp, psi, cfg.tol, cfg.max_iter);
    mf.add_timing("solve", ms_since(t0));

    t0 = clock::now();
    io::write_field_csv(mf.path_for("h.csv"), "h", spec.tg, spec.sg, sol.source.h);
    mf.add_file("h.csv");
    io::write_json(mf.path_for("convergence.json"), io::convergence_json(sol.report));
    mf.add_file("convergence.json");

    const PsiDerivatives psid = compute_psi_derivatives(spec, psi);
    const EstimateReport rep = compute_constants(spec, decomp, psid);
    const std::vector<BoundCheck> checks = verify_bounds(spec, rep, sol.state, sol.source);
    io::write_json(mf.path_for("estimates.json"), estimates_json(rep, &checks));
    mf.add_file("estimates.json");

    if (cfg.dump_series) {
        const int mid = spec.sg.nx / 2;
        std::vector<double> series(static_cast<std::size_t>(spec.tg.nt));
        for (int i = 0; i < spec.tg.nt; ++i)
            series[static_cast<std::size_t>(i)] =
                sol.source.h(static_cast<std::size_t>(i), static_cast<std::size_t>(mid));
        io::write_series_csv(mf.path_for("series.csv"), "h_mid", spec.tg, series);
        mf.add_file("series.csv");
    }
    write_state_dumps(cfg, spec, sol.state, mf);
    mf.add_timing("write", ms_since(t0));

    std::printf("invert: case %s, alpha=%g, T=%g, grid nt=%d nx=%d, K=%d\n", mc.id.c_str(),
                spec.alpha, spec.T, spec.tg.nt, spec.sg.nx, spec.K);
    std::printf("  condition L = %.6g (%s)\n", sol.report.condition_L,
                sol.report.within_proven_regime ? "within the proven regime"
                                                : "outside the proven regime");
    if (sol.report.converged)
        std::printf("  converged in %d iterations, terminal increment %.3g\n",
                    sol.report.iterations, sol.report.terminal_increment);
    else
        std::printf("  NOT converged after %d iterations, terminal increment %.3g\n",
                    sol.report.iterations, sol.report.terminal_increment);
    std::printf("  outputs in %s\n", mf.path_for("").c_str());
    return sol.report.converged ? 0 : 2;
}

inline int run_verify(const RunConfig& cfg, Manifest& mf) {
    const ManufacturedCase mc = manufactured_case(cfg.case_id, cfg.alpha);
    StudyTarget target;
    if (cfg.target == "forward") target = StudyTarget::forward;
    else if (cfg.target == "inverse") target = StudyTarget::inverse;
    else throw std::invalid_argument("verify target must be 'forward' or 'inverse'");

    ManufacturedCase run_case = mc;
    run_case.spec.T = cfg.T;
    run_case.spec.epsilon = cfg.epsilon;
    run_case.spec.K = cfg.K;
    run_case.spec.ny = cfg.ny;
    if (cfg.l0) run_case.spec.l0 = *cfg.l0;

    GridLadder ladder;
    if (target == StudyTarget::forward) {
        ladder.nts = {33, 65, 129, 257};
        ladder.nxs = std::vector<int>(4, std::max(65, cfg.nx));
    } else {
        ladder.nts = {17, 33, 65};
        ladder.nxs = {17, 33, 65};
    }
    mf.set("resolved", io::json{{"case", run_case.id},
                                {"target", cfg.target},
                                {"nts", ladder.nts},
                                {"nxs", ladder.nxs}});

    auto t0 = clock::now();
    const ConvergenceStudy study =
        convergence_study(run_case, ladder, target, cfg.tol, cfg.max_iter);
    mf.add_timing("study", ms_since(t0));

    io::write_json(mf.path_for("study.json"), io::study_json(study));
    mf.add_file("study.json");

    std::printf("verify: case %s, target %s, alpha=%g, T=%g\n", study.case_id.c_str(),
                cfg.target.c_str(), cfg.alpha, cfg.T);
    std::printf("  %6s %6s %14s %14s\n", "nt", "nx", "error", "rel_error");
    for (const StudyLevel& l : study.levels)
        std::printf("  %6d %6d %14.6e %14.6e\n", l.nt, l.nx, l.error, l.rel_error);
    std::printf("  observed order in %s: %.3f\n", study.step_kind.c_str(), study.observed_order);
    if (study.aborted) std::printf("  study aborted: inverse did not converge at some level\n");
    return study.aborted ? 2 : 0;
}

inline int run_check_conditions(const RunConfig& cfg, Manifest& mf) {
    auto [mc, spec] = build_problem(cfg);
    mf.set("resolved", resolved_echo(spec));
    mf.set("warnings", check_compatibility(spec));

    auto t0 = clock::now();
    const Array2D psi = resolve_psi(cfg, spec);
    const DecomposedData decomp = decompose_data(spec);
    const PsiDerivatives psid = compute_psi_derivatives(spec, psi);
    const EstimateReport rep = compute_constants(spec, decomp, psid);
    mf.add_timing("constants", ms_since(t0));

    io::write_json(mf.path_for("estimates.json"), estimates_json(rep, nullptr));
    mf.add_file("estimates.json");

    std::printf("check-conditions: case %s, alpha=%g, T=%g\n", mc.id.c_str(), spec.alpha, spec.T);
    std::printf("  %-14s %.9g\n", "f0", rep.f0);
    std::printf("  %-14s %.9g\n", "g0", rep.g0);
    std::printf("  %-14s %.9g\n", "psi0", rep.psi0);
    std::printf("  %-14s %.9g\n", "M", rep.M);
    std::printf("  %-14s %.9g\n", "M_alpha", rep.M_alpha);
    std::printf("  %-14s %.9g\n", "A0", rep.A0);
    std::printf("  %-14s %.9g\n", "A1", rep.A1);
    std::printf("  %-14s %.9g (%s route)\n", "B1", rep.B1,
                rep.derivative_route ? "derivative" : "spectral");
    std::printf("  %-14s %.9g%s\n", "condition-4", rep.condition4,
                rep.condition4 <= 1.0 ? "  (<= 1: smallness condition holds)"
                                      : "  (> 1: outside the proven regime)");
    std::printf("  %-14s %.9g%s\n", "condition-L", rep.condition_L,
                rep.condition_L <= 1.0 ? "  (<= 1: iteration provably contracts)"
                                       : "  (> 1: contraction not guaranteed)");
    for (const std::string& note : rep.notes) std::printf("  note: %s\n", note.c_str());
    return 0;
}

} // namespace detail

/// Execute one subcommand. Returns the process exit code: 0 success, 1
/// usage or data error (message on stderr), 2 solver non-convergence
/// (partial outputs still written). Every file-producing run writes
/// manifest.json into the output directory before any data file and rewrites
/// it with status, timings, and checksums at the end; ml-eval is a pure
/// stdout evaluation and writes nothing.
inline int run(const RunConfig& cfg) {
    if (cfg.subcommand == "ml-eval") {
        const double v = mittag_leffler(MLParams{cfg.alpha, cfg.mu}, cfg.z);
        std::printf("E_{%g,%g}(%.12g) = %.12g\n", cfg.alpha, cfg.mu, cfg.z, v);
        return 0;
    }

    detail::Manifest mf(cfg);
    try {
        int code = 0;
        if (cfg.subcommand == "forward") code = detail::run_forward(cfg, mf);
        else if (cfg.subcommand == "synthesize") code = detail::run_synthesize(cfg, mf);
        else if (cfg.subcommand == "invert") code = detail::run_invert(cfg, mf);
        else if (cfg.subcommand == "verify") code = detail::run_verify(cfg, mf);
        else if (cfg.subcommand == "check-conditions") code = detail::run_check_conditions(cfg, mf);
        else throw std::invalid_argument("unknown subcommand: " + cfg.subcommand);
        mf.finish(code == 0 ? "complete" : "non-converged");
        return code;
    } catch (const std::exception& e) {
        mf.set("error", std::string(e.what()));
        mf.finish("failed");
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace subdiff::run
