#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "subdiff/runner.hpp"

/// Command-line front end. Each flag mirrors one config key; when --config
/// is given the file is applied first and explicit flags override it.
int main(int argc, char** argv) {
    CLI::App app{"Inverse source recovery for time-fractional subdiffusion"};
    app.require_subcommand(1);

    std::string config_path, case_id, outdir, psi_file, target;
    double alpha = 0, T = 0, l0 = 0, epsilon = 0, tol = 0, noise_level = 0, mu = 0, z = 0;
    int K = 0, nt = 0, nx = 0, ny = 0, max_iter = 0, fine_factor = 0, dump_mode = 0;
    std::uint64_t seed = 0;
    bool dump_full = false, dump_series = false, dump_coeffs = false;

    auto add_problem_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override its keys)");
        sub->add_option("--case", case_id, "manufactured case id: mms-0, mms-1, mms-2");
        sub->add_option("--alpha", alpha, "fractional order, in (0,1)");
        sub->add_option("--T", T, "time horizon");
        sub->add_option("--l0", l0, "observation height in (0,pi); default: the case's own");
        sub->add_option("--epsilon", epsilon, "weight exponent of the contraction norm");
        sub->add_option("--K", K, "sine modes kept");
        sub->add_option("--ny", ny, "y-quadrature nodes (odd, >= 8K+1); 0 = automatic");
        sub->add_option("--outdir", outdir, "output directory");
    };
    auto add_grid_flags = [&](CLI::App* sub) {
        sub->add_option("--nt", nt, "time nodes");
        sub->add_option("--nx", nx, "space nodes");
    };
    auto add_dump_flags = [&](CLI::App* sub) {
        sub->add_flag("--dump-series", dump_series, "write series.csv (mid-profile time series)");
        sub->add_flag("--dump-coeffs", dump_coeffs, "write coeffs.csv (final-time sine coefficients)");
        sub->add_option("--dump-mode", dump_mode, "write state_k<k>.csv for one mode");
    };
    auto add_noise_flags = [&](CLI::App* sub) {
        sub->add_option("--noise-level", noise_level, "relative measurement noise amplitude");
        sub->add_option("--seed", seed, "noise generator seed");
        sub->add_option("--fine-factor", fine_factor, "solve on a fine grid, restrict to the run grid");
    };

    CLI::App* fwd = app.add_subcommand("forward", "solve the forward problem for a known source");
    add_problem_flags(fwd);
    add_grid_flags(fwd);
    add_dump_flags(fwd);
    fwd->add_flag("--dump-full", dump_full, "write u_full.csv over (t,x,y); large");

    CLI::App* syn = app.add_subcommand("synthesize", "produce measurement data psi.csv, optionally noisy");
    add_problem_flags(syn);
    add_grid_flags(syn);
    add_noise_flags(syn);

    CLI::App* inv = app.add_subcommand("invert", "recover h(t,x) from trace data");
    add_problem_flags(inv);
    add_grid_flags(inv);
    add_dump_flags(inv);
    add_noise_flags(inv);
    inv->add_option("--tol", tol, "stop when the weighted increment reaches tol^2");
    inv->add_option("--max-iter", max_iter, "iteration cap");
    inv->add_option("--psi-file", psi_file, "measured trace CSV (t,x,psi) matching the grid");

    CLI::App* ver = app.add_subcommand("verify", "convergence study over a refinement ladder");
    add_problem_flags(ver);
    ver->add_option("--nx", nx, "fixed space resolution of the time-refinement ladder");
    ver->add_option("--target", target, "which pipeline to study: forward or inverse");
    ver->add_option("--tol", tol, "inverse-solve tolerance");
    ver->add_option("--max-iter", max_iter, "inverse-solve iteration cap");

    CLI::App* chk = app.add_subcommand("check-conditions", "compute the constants and both sufficient conditions");
    add_problem_flags(chk);
    add_grid_flags(chk);
    chk->add_option("--psi-file", psi_file, "measured trace CSV (t,x,psi) matching the grid");

    CLI::App* ml = app.add_subcommand("ml-eval", "evaluate the two-parameter Mittag-Leffler function");
    ml->add_option("--alpha", alpha, "first parameter, in (0,1]");
    ml->add_option("--mu", mu, "second parameter, positive");
    ml->add_option("--z", z, "argument");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        subdiff::run::RunConfig cfg;
        const CLI::Option* config_opt = sub->get_option_no_throw("--config");
        if (config_opt != nullptr && config_opt->count() > 0)
            cfg = subdiff::run::parse_config(config_path);
        cfg.subcommand = sub->get_name();

        auto over = [&sub](const char* flag, auto apply) {
            const CLI::Option* opt = sub->get_option_no_throw(flag);
            if (opt != nullptr && opt->count() > 0) apply();
        };
        over("--case", [&] { cfg.case_id = case_id; });
        over("--alpha", [&] { cfg.alpha = alpha; });
        over("--T", [&] { cfg.T = T; });
        over("--l0", [&] { cfg.l0 = l0; });
        over("--epsilon", [&] { cfg.epsilon = epsilon; });
        over("--K", [&] { cfg.K = K; });
        over("--nt", [&] { cfg.nt = nt; });
        over("--nx", [&] { cfg.nx = nx; });
        over("--ny", [&] { cfg.ny = ny; });
        over("--tol", [&] { cfg.tol = tol; });
        over("--max-iter", [&] { cfg.max_iter = max_iter; });
        over("--noise-level", [&] { cfg.noise_level = noise_level; });
        over("--seed", [&] { cfg.seed = seed; });
        over("--fine-factor", [&] { cfg.fine_factor = fine_factor; });
        over("--outdir", [&] { cfg.outdir = outdir; });
        over("--psi-file", [&] { cfg.psi_file = psi_file; });
        over("--target", [&] { cfg.target = target; });
        over("--dump-full", [&] { cfg.dump_full = dump_full; });
        over("--dump-mode", [&] { cfg.dump_mode = dump_mode; });
        over("--dump-series", [&] { cfg.dump_series = dump_series; });
        over("--dump-coeffs", [&] { cfg.dump_coeffs = dump_coeffs; });
        over("--mu", [&] { cfg.mu = mu; });
        over("--z", [&] { cfg.z = z; });

        return subdiff::run::run(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
