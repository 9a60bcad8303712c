#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rkrfm/error.hpp"
#include "rkrfm/log.hpp"
#include "rkrfm/runner.hpp"

using namespace rkrfm;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kSolver = 4 };

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string out;
    bool verbose = false;
    bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "run configuration file")->required()->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "override the configured seed");
    app->add_option("--workers", c.workers, "parallel runs")->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "output directory (default: $RKRFM_OUT_DIR, then the config)");
    app->add_flag("-v,--verbose", c.verbose, "log progress");
    app->add_flag("-q,--quiet", c.quiet, "suppress warnings");
}

RunConfig load(const Common& c) {
    RunConfig cfg = load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.out.empty()) {
        cfg.out_dir = c.out;
    } else if (const char* env = std::getenv("RKRFM_OUT_DIR"); env != nullptr && cfg.out_dir.empty()) {
        cfg.out_dir = env;
    }
    set_log_level(c.quiet ? LogLevel::Quiet : c.verbose ? LogLevel::Info : LogLevel::Warn);
    return cfg;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad list entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty value list");
    return out;
}

std::string output_path(const RunConfig& cfg, const std::string& name) {
    if (cfg.out_dir.empty()) return {};
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void print_report(const char* what, const ErrorReport& e) {
    std::printf("%s: l_inf = %.3e  l_2 = %.3e  (%.2f s)\n", what, e.linf, e.l2, e.seconds);
}

int cmd_fit(const Common& c, const std::string& dump) {
    const RunConfig cfg = load(c);
    ErrorReport e;
    run_fit(cfg, &e, dump);
    print_report("fit", e);
    return kOk;
}

int cmd_converge(const Common& c, const std::string& knob, const std::string& values) {
    const RunConfig cfg = load(c);
    if (cfg.model != ModelKind::Manufactured) throw ConfigError("converge needs [model] kind = manufactured");
    const ConvergenceTable t = run_converge(cfg, knob, parse_list(values), c.workers);
    t.write_csv(std::cout);
    if (const std::string path = output_path(cfg, "converge_" + knob + ".csv"); !path.empty()) {
        std::ofstream out(path);
        t.write_csv(out);
    }
    if (t.slope_l2)
        std::printf("# slope in %s: l_inf %.3f, l_2 %.3f\n", knob.c_str(), *t.slope_linf, *t.slope_l2);
    else
        std::printf("# slope in %s: undefined\n", knob.c_str());
    for (const SweepRow& r : t.rows)
        if (!r.ok) return kNumerical;
    return kOk;
}

int cmd_cells(const Common& c) {
    const RunConfig cfg = load(c);
    const CellRunResult r = run_cells(cfg, cfg.out_dir, [](const StepInfo& s) {
        if (log_level() >= LogLevel::Info && s.step % 10 == 0)
            log_info("step " + std::to_string(s.step) + " t=" + std::to_string(s.t) +
                     " residual=" + std::to_string(s.residual));
    });
    std::printf("t,v_rms,s_rms,mean_speed,component_speed,component_order,mean_angle\n");
    for (std::size_t k = 0; k < r.series.size(); ++k) {
        const Observables& o = r.series[k];
        std::printf("%g,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e\n", r.snapshot_times[k], o.v_rms, o.s_rms, o.mean_speed,
                    o.mean_component_speed, o.mean_component_order, o.mean_angle);
    }
    std::printf("# %d steps in %.1f s, field range [%.3f, %.3f]\n", r.steps, r.seconds, r.min_value, r.max_value);
    return kOk;
}

int cmd_sweep(const Common& c, const std::string& zetas, const std::string& gammas, int reps) {
    const RunConfig cfg = load(c);
    const auto cells = run_observable_sweep(cfg, parse_list(zetas), parse_list(gammas), reps, c.workers);
    write_sweep_csv(std::cout, cells);
    if (const std::string path = output_path(cfg, "sweep.csv"); !path.empty()) {
        std::ofstream out(path);
        write_sweep_csv(out, cells);
    }
    for (const SweepCell& s : cells)
        if (s.failures > 0) return kNumerical;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-feature Runge-Kutta solver for phase-field cell models"};
    app.require_subcommand(1);

    Common fit_opts, conv_opts, cell_opts, sweep_opts;
    std::string dump, knob = "dt", values, zetas = "0", gammas, reps_text;
    int reps = 1;

    auto* fit = app.add_subcommand("fit", "fit the initial condition once and report its error");
    add_common(fit, fit_opts);
    fit->add_option("--dump", dump, "write the assembled system and coefficients to this directory");

    auto* conv = app.add_subcommand("converge", "manufactured-solution sweep over one knob");
    add_common(conv, conv_opts);
    conv->add_option("--knob", knob, "dt, features, partition, collocation, bound or seed");
    conv->add_option("--values", values, "comma-separated knob values")->required();

    auto* cells = app.add_subcommand("cells", "cell simulation with snapshots");
    add_common(cells, cell_opts);

    auto* sweep = app.add_subcommand("sweep", "observables over activity and gamma grids");
    add_common(sweep, sweep_opts);
    sweep->add_option("--zeta", zetas, "comma-separated activities");
    sweep->add_option("--gamma", gammas, "comma-separated gamma values")->required();
    sweep->add_option("--repetitions", reps, "seeds per grid cell")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*fit) return cmd_fit(fit_opts, dump);
        if (*conv) return cmd_converge(conv_opts, knob, values);
        if (*cells) return cmd_cells(cell_opts);
        if (*sweep) return cmd_sweep(sweep_opts, zetas, gammas, reps);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
    return kOk;
}
