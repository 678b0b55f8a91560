// Command-line front end. Talks to the simulator only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spectator/spectator.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Failure {
    int code;
};

void check(spq_status s) {
    if (s != SPQ_OK) {
        std::cerr << "error: " << spq_last_error() << " (" << spq_status_name(s) << ")\n";
        throw Failure{spq_status_is_validation(s) ? kExitValidation : kExitRuntime};
    }
}

[[noreturn]] void usage_error(const std::string &message) {
    std::cerr << "error: " << message << "\n";
    throw Failure{kExitValidation};
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct ConfigDeleter {
    void operator()(spq_config *c) const { spq_config_free(c); }
};
struct TraceDeleter {
    void operator()(spq_trace *t) const { spq_trace_free(t); }
};
struct GridDeleter {
    void operator()(spq_grid *g) const { spq_grid_free(g); }
};
using ConfigPtr = std::unique_ptr<spq_config, ConfigDeleter>;
using TracePtr = std::unique_ptr<spq_trace, TraceDeleter>;
using GridPtr = std::unique_ptr<spq_grid, GridDeleter>;

// Options shared by `sim` and `sweep`.
struct ScenarioOptions {
    std::optional<std::string> scenario;
    std::optional<std::string> config_path;
    std::optional<int64_t> runs;
    std::optional<int64_t> steps;
    std::optional<uint64_t> seed;
    std::optional<std::string> mode;
    unsigned threads = 0;

    void add_to(CLI::App *app, bool with_steps) {
        app->add_option("--scenario", scenario, "bfield-perp, bfield-xy4, beam-delta, beam-eps, beam-eps-linear");
        app->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
        app->add_option("--runs", runs, "Monte Carlo runs");
        if (with_steps) {
            app->add_option("--steps", steps, "measurement cycles per run");
        }
        app->add_option("--seed", seed, "master seed");
        app->add_option("--mode", mode, "sampled or crb");
        app->add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    ConfigPtr build() const {
        std::string text;
        if (config_path) {
            std::ifstream f(*config_path, std::ios::binary);
            if (!f) {
                usage_error("cannot read config '" + *config_path + "'");
            }
            std::ostringstream ss;
            ss << f.rdbuf();
            text = ss.str();
        }
        spq_config *raw = nullptr;
        check(spq_config_parse(text.c_str(), scenario ? scenario->c_str() : nullptr, &raw));
        ConfigPtr cfg(raw);
        if (runs) {
            check(spq_config_set(cfg.get(), "runs", std::to_string(*runs).c_str()));
        }
        if (steps) {
            check(spq_config_set(cfg.get(), "steps", std::to_string(*steps).c_str()));
        }
        if (seed) {
            check(spq_config_set(cfg.get(), "seed", std::to_string(*seed).c_str()));
        }
        if (mode) {
            check(spq_config_set(cfg.get(), "mode", mode->c_str()));
        }
        return cfg;
    }
};

template <typename T>
std::vector<T> parse_list(const std::string &text, const char *what) {
    std::vector<T> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !(is >> std::ws).eof()) {
            usage_error(std::string("bad entry '") + item + "' in " + what);
        }
        out.push_back(v);
    }
    if (out.empty()) {
        usage_error(std::string(what) + " is empty");
    }
    return out;
}

int run_sim(const ScenarioOptions &opts, const std::string &out) {
    ConfigPtr cfg = opts.build();
    spq_trace *spec_raw = nullptr;
    spq_trace *nospec_raw = nullptr;
    check(spq_run_scenario(cfg.get(), opts.threads, &spec_raw, &nospec_raw));
    TracePtr spec(spec_raw), nospec(nospec_raw);

    const spq_trace *both[] = {spec.get(), nospec.get()};
    check(spq_traces_write_csv(both, 2, out.c_str()));
    check(spq_config_write_manifest(cfg.get(), (out + ".manifest").c_str()));

    for (const spq_trace *t : both) {
        int64_t cross = 0;
        check(spq_trace_crossing(t, 1e-4, &cross));
        double last = 0;
        check(spq_trace_get(t, spq_trace_length(t) - 1, &last, nullptr));
        std::cout << spq_trace_scenario(t) << ": runs " << spq_trace_runs(t) << ", censored "
                  << spq_trace_censored(t) << ", final infidelity " << num(last) << ", crosses 1e-4 at "
                  << (cross ? std::to_string(cross) : std::string("never")) << "\n";
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

struct SweepArgs {
    std::string m_grid = "100,200,400,800,1600";
    std::string step_grid;
    std::string metric = "both";
    int64_t at_step = 4000;
    int64_t horizon = 0;
    double threshold = 1e-4;
    std::string out = "landscape.csv";
};

int run_sweep(const ScenarioOptions &opts, const SweepArgs &args) {
    ConfigPtr cfg = opts.build();
    auto ms = parse_list<int64_t>(args.m_grid, "--m-grid");
    auto steps = parse_list<double>(args.step_grid, "--step-grid");
    spq_grid *raw = nullptr;
    check(spq_run_sweep(cfg.get(), ms.data(), ms.size(), steps.data(), steps.size(), args.metric.c_str(),
                        args.at_step, args.horizon, args.threshold, opts.threads, &raw));
    GridPtr grid(raw);
    check(spq_grid_write_csv(grid.get(), args.out.c_str()));
    for (size_t i = 0; i < spq_grid_size(grid.get()); i++) {
        int64_t m = 0;
        double step = 0, value = 0;
        const char *metric = nullptr;
        const char *flag = nullptr;
        check(spq_grid_cell(grid.get(), i, &m, &step, &metric, &value, &flag));
        std::cout << "M=" << m << " step=" << num(step) << " " << metric << " " << num(value) << " " << flag << "\n";
    }
    std::cout << "wrote " << args.out << "\n";
    return 0;
}

struct OracleArgs {
    std::string which;
    int64_t n = 1;
    double phi = 0;
    double a = 0;
    double delta0 = 0.02, ddelta = 0.001, delta_bar = 0.0198;
    double eps0 = 0.002, deps = 0.0007, eps_bar = 0.0015;
    std::optional<std::string> out;
};

int run_oracle(const OracleArgs &o) {
    double value = 0;
    if (o.which == "remainder-linear" && o.out) {
        check(spq_oracle_remainder_csv(o.n, o.out->c_str()));
        std::cout << "wrote " << *o.out << "\n";
        return 0;
    }
    if (o.which == "remainder-linear") {
        check(spq_oracle_remainder_linear(o.n, o.phi, &value));
    } else if (o.which == "taylor-linear") {
        double lhs = 0, rhs = 0;
        check(spq_oracle_taylor_linear(o.n, o.phi, &lhs, &rhs));
        std::cout << "lhs " << num(lhs) << "\nrhs " << num(rhs) << "\n";
        return 0;
    } else if (o.which == "avg-f-delta") {
        check(spq_oracle_avg_f_nospec_delta(o.n, o.delta0, o.ddelta, o.delta_bar, &value));
    } else if (o.which == "avg-f-eps") {
        check(spq_oracle_avg_f_nospec_eps(o.n, o.eps0, o.deps, o.eps_bar, &value));
    } else if (o.which == "fidelity-sk1") {
        check(spq_oracle_fidelity_sk1(o.a, &value));
    } else if (o.which == "fidelity-plain") {
        check(spq_oracle_fidelity_plain(o.a, &value));
    } else {
        usage_error("unknown oracle '" + o.which + "'");
    }
    std::cout << num(value) << "\n";
    return 0;
}

struct RpeArgs {
    int64_t budget = 100000;
    std::string depths;
    int64_t runs = 10000;
    uint64_t seed = 1;
    unsigned threads = 0;
    std::optional<std::string> out;
};

int run_rpe(const RpeArgs &a) {
    std::vector<int64_t> depths;
    if (a.depths.empty()) {
        int32_t deepest = 0;
        check(spq_rpe_deepest_feasible(a.budget, &deepest));
        if (deepest < 1) {
            usage_error("budget too small for any RPE depth");
        }
        for (int32_t d = 1; d <= deepest; d++) {
            depths.push_back(d);
        }
    } else {
        depths = parse_list<int64_t>(a.depths, "--depths");
    }
    std::vector<spq_rpe_result> rows;
    std::cout << "budget depth shots mean_abs_error stderr shot_noise crb\n";
    for (int64_t d : depths) {
        spq_rpe_result r{};
        check(spq_run_rpe(a.budget, static_cast<int32_t>(d), a.runs, a.seed, a.threads, &r));
        rows.push_back(r);
        std::cout << r.budget << " " << r.depth << " " << r.shots_per_generation << " " << num(r.mean_abs_error) << " "
                  << num(r.abs_error_stderr) << " " << num(r.shot_noise) << " " << num(r.crb) << "\n";
    }
    if (a.out) {
        check(spq_rpe_write_csv(rows.data(), rows.size(), a.out->c_str()));
        std::cout << "wrote " << *a.out << "\n";
    }
    return 0;
}

struct MomentArgs {
    int64_t k = 1;
    int64_t m = 2;
    double dtheta = 1;
    double theta0 = 0;
    double theta_end = 0;
};

int run_moments(const MomentArgs &a) {
    double mean = 0, var = 0, printed = 0;
    check(spq_estimator_moments(a.k, a.m, a.theta0, a.theta_end, a.dtheta, &mean, &var, &printed));
    std::cout << "mean " << num(mean) << "\n"
              << "variance_sum " << num(var) << "\n"
              << "variance_printed " << num(printed) << "\n";
    if (printed > 0) {
        std::cout << "ratio_sum_over_printed " << num(var / printed) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Spectator-qubit calibration simulator"};
    app.set_version_flag("--version", std::string(spq_version()));
    app.require_subcommand(1);

    ScenarioOptions sim_opts;
    std::string sim_out = "trace.csv";
    CLI::App *sim = app.add_subcommand("sim", "Simulate one scenario, with and without spectators");
    sim_opts.add_to(sim, true);
    sim->add_option("--out", sim_out, "trace CSV path (a .manifest file is written next to it)");

    ScenarioOptions sweep_opts;
    SweepArgs sweep_args;
    CLI::App *sweep = app.add_subcommand("sweep", "Landscape over M and step size");
    sweep_opts.add_to(sweep, false);
    sweep->add_option("--m-grid", sweep_args.m_grid, "comma-separated M values");
    sweep->add_option("--step-grid", sweep_args.step_grid, "comma-separated step sizes")->required();
    sweep->add_option("--metric", sweep_args.metric, "infidelity-ratio, threshold-time-ratio or both");
    sweep->add_option("--at-step", sweep_args.at_step, "step N of the infidelity ratio");
    sweep->add_option("--horizon", sweep_args.horizon, "steps simulated for crossing times (0 = at-step)");
    sweep->add_option("--threshold", sweep_args.threshold, "infidelity threshold");
    sweep->add_option("--out", sweep_args.out, "landscape CSV path");

    OracleArgs oracle_args;
    CLI::App *oracle = app.add_subcommand("oracle", "Evaluate a closed-form expression");
    oracle->add_option("--which", oracle_args.which,
                       "remainder-linear, taylor-linear, avg-f-delta, avg-f-eps, fidelity-sk1, fidelity-plain")
        ->required();
    oracle->add_option("--n", oracle_args.n, "number of steps N");
    oracle->add_option("--phi", oracle_args.phi, "phase phi_s (default 1/(2 sqrt(N)))");
    oracle->add_option("--a", oracle_args.a, "effective amplitude argument");
    oracle->add_option("--delta0", oracle_args.delta0);
    oracle->add_option("--ddelta", oracle_args.ddelta);
    oracle->add_option("--delta-bar", oracle_args.delta_bar);
    oracle->add_option("--eps0", oracle_args.eps0);
    oracle->add_option("--deps", oracle_args.deps);
    oracle->add_option("--eps-bar", oracle_args.eps_bar);
    oracle->add_option("--out", oracle_args.out, "remainder-linear only: CSV over n = 1..N");

    RpeArgs rpe_args;
    CLI::App *rpe = app.add_subcommand("rpe", "Robust phase estimation under a gate budget");
    rpe->add_option("--budget", rpe_args.budget, "total gate budget T");
    rpe->add_option("--depths", rpe_args.depths, "comma-separated depths (default 1..deepest feasible)");
    rpe->add_option("--runs", rpe_args.runs, "Monte Carlo runs per depth");
    rpe->add_option("--seed", rpe_args.seed, "master seed");
    rpe->add_option("--threads", rpe_args.threads, "worker threads (0 = all cores)");
    rpe->add_option("--out", rpe_args.out, "RPE CSV path");

    MomentArgs moment_args;
    CLI::App *moments = app.add_subcommand("moments", "Estimator moments, exact sum and printed closed form");
    moments->add_option("--k", moment_args.k, "cycle index k");
    moments->add_option("--m", moment_args.m, "measurements per cycle M");
    moments->add_option("--dtheta", moment_args.dtheta, "walk step size");
    moments->add_option("--theta0", moment_args.theta0, "walk start");
    moments->add_option("--theta-end", moment_args.theta_end, "walk value at step kM");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*sim) {
            return run_sim(sim_opts, sim_out);
        }
        if (*sweep) {
            return run_sweep(sweep_opts, sweep_args);
        }
        if (*oracle) {
            return run_oracle(oracle_args);
        }
        if (*rpe) {
            return run_rpe(rpe_args);
        }
        if (*moments) {
            return run_moments(moment_args);
        }
    } catch (const Failure &f) {
        return f.code;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
