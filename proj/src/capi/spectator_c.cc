#include "spectator/spectator.h"

#include <cmath>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "spectator/analytic_oracles.h"
#include "spectator/config.h"
#include "spectator/csv.h"
#include "spectator/error_walk.h"
#include "spectator/errors.h"
#include "spectator/feedback_engine.h"
#include "spectator/rpe_lab.h"

using namespace spectator;

struct spq_config {
    ScenarioConfig cfg;
};

struct spq_trace {
    FidelityTrace trace;
};

struct spq_grid {
    SweepGrid grid;
    std::vector<std::string> metric_names;
};

namespace {

thread_local std::string g_last_error;

spq_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
            return SPQ_ERR_INVALID_ARGUMENT;
        case ErrorKind::InvalidAxis:
            return SPQ_ERR_INVALID_AXIS;
        case ErrorKind::Domain:
            return SPQ_ERR_DOMAIN;
        case ErrorKind::RunawayParameter:
            return SPQ_ERR_RUNAWAY;
        case ErrorKind::DegenerateMeasurement:
            return SPQ_ERR_DEGENERATE;
        case ErrorKind::TallyCorruption:
            return SPQ_ERR_TALLY;
        case ErrorKind::InvalidTarget:
            return SPQ_ERR_INVALID_TARGET;
        case ErrorKind::InfeasibleBudget:
            return SPQ_ERR_INFEASIBLE_BUDGET;
        case ErrorKind::DegenerateCurvature:
            return SPQ_ERR_CURVATURE;
        case ErrorKind::Config:
            return SPQ_ERR_CONFIG;
        case ErrorKind::Io:
            return SPQ_ERR_IO;
    }
    return SPQ_ERR_INTERNAL;
}

spq_status fail(spq_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

// Runs body, translating exceptions into status codes.
template <typename Body>
spq_status guarded(Body &&body) {
    try {
        body();
        g_last_error.clear();
        return SPQ_OK;
    } catch (const SimError &e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc &) {
        return fail(SPQ_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return fail(SPQ_ERR_INTERNAL, e.what());
    }
}

void require(bool ok, const char *message) {
    if (!ok) {
        throw SimError(ErrorKind::InvalidArgument, message);
    }
}

ScenarioKind kind_from(const char *scenario) {
    require(scenario != nullptr, "scenario name is NULL");
    auto kind = parse_scenario(scenario);
    if (!kind) {
        throw SimError(ErrorKind::Config, std::string("unknown scenario '") + scenario + "'");
    }
    return *kind;
}

std::string_view line_key(std::string_view line) {
    size_t eq = line.find('=');
    std::string_view key = line.substr(0, eq);
    while (!key.empty() && key.back() == ' ') {
        key.remove_suffix(1);
    }
    return key;
}

}  // namespace

extern "C" {

const char *spq_version(void) {
    return SPECTATOR_VERSION;
}

const char *spq_status_name(spq_status status) {
    switch (status) {
        case SPQ_OK:
            return "ok";
        case SPQ_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case SPQ_ERR_CONFIG:
            return "configuration error";
        case SPQ_ERR_DOMAIN:
            return "domain error";
        case SPQ_ERR_INVALID_AXIS:
            return "invalid axis";
        case SPQ_ERR_RUNAWAY:
            return "runaway parameter";
        case SPQ_ERR_DEGENERATE:
            return "degenerate measurement";
        case SPQ_ERR_TALLY:
            return "tally corruption";
        case SPQ_ERR_INVALID_TARGET:
            return "invalid target";
        case SPQ_ERR_INFEASIBLE_BUDGET:
            return "infeasible budget";
        case SPQ_ERR_CURVATURE:
            return "degenerate curvature";
        case SPQ_ERR_IO:
            return "i/o error";
        case SPQ_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char *spq_last_error(void) {
    return g_last_error.c_str();
}

int spq_status_is_validation(spq_status status) {
    switch (status) {
        case SPQ_ERR_INVALID_ARGUMENT:
        case SPQ_ERR_CONFIG:
        case SPQ_ERR_DOMAIN:
        case SPQ_ERR_INVALID_TARGET:
        case SPQ_ERR_INFEASIBLE_BUDGET:
            return 1;
        default:
            return 0;
    }
}

spq_status spq_config_default(const char *scenario, spq_config **out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is NULL");
        *out = new spq_config{ScenarioConfig::defaults(kind_from(scenario))};
    });
}

spq_status spq_config_parse(const char *text, const char *scenario, spq_config **out) {
    return guarded([&] {
        require(text != nullptr && out != nullptr, "text and output pointer must be non-NULL");
        std::optional<ScenarioKind> kind;
        if (scenario != nullptr) {
            kind = kind_from(scenario);
        }
        *out = new spq_config{parse_config(text, kind)};
    });
}

spq_status spq_config_set(spq_config *cfg, const char *key, const char *value) {
    return guarded([&] {
        require(cfg != nullptr && key != nullptr && value != nullptr, "config, key and value must be non-NULL");
        std::string_view k(key);
        if (k == "scenario") {
            if (kind_from(value) != cfg->cfg.kind) {
                throw SimError(ErrorKind::Config, "the scenario of an existing config cannot change");
            }
            return;
        }
        // Rebuild the text with the new line first, so parse errors point at it.
        std::string text = std::string(key) + " = " + value + "\n";
        std::istringstream current(serialize_config(cfg->cfg));
        for (std::string line; std::getline(current, line);) {
            if (line_key(line) != k) {
                text += line + "\n";
            }
        }
        try {
            cfg->cfg = parse_config(text, cfg->cfg.kind);
        } catch (const SimError &e) {
            std::string msg = e.what();
            const std::string prefix = "line 1: ";
            if (msg.rfind(prefix, 0) == 0) {
                msg.erase(0, prefix.size());
            }
            throw SimError(e.kind(), msg);
        }
    });
}

spq_status spq_config_serialize(const spq_config *cfg, char **out_text) {
    return guarded([&] {
        require(cfg != nullptr && out_text != nullptr, "config and output pointer must be non-NULL");
        std::string text = serialize_config(cfg->cfg);
        char *buf = new char[text.size() + 1];
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out_text = buf;
    });
}

spq_status spq_config_write_manifest(const spq_config *cfg, const char *path) {
    return guarded([&] {
        require(cfg != nullptr && path != nullptr, "config and path must be non-NULL");
        std::string text = std::string("# spectator ") + SPECTATOR_VERSION + "\n" + serialize_config(cfg->cfg);
        write_file_atomic(path, text);
    });
}

void spq_config_free(spq_config *cfg) {
    delete cfg;
}

void spq_string_free(char *s) {
    delete[] s;
}

spq_status spq_run_scenario(const spq_config *cfg, unsigned threads, spq_trace **spec, spq_trace **nospec) {
    return guarded([&] {
        require(cfg != nullptr && spec != nullptr && nospec != nullptr, "config and outputs must be non-NULL");
        ScenarioResult res = run_scenario(cfg->cfg, threads);
        auto *s = new spq_trace{std::move(res.spec)};
        auto *n = new (std::nothrow) spq_trace{std::move(res.nospec)};
        if (n == nullptr) {
            delete s;
            throw std::bad_alloc();
        }
        *spec = s;
        *nospec = n;
    });
}

size_t spq_trace_length(const spq_trace *trace) {
    return trace ? trace->trace.size() : 0;
}

spq_status spq_trace_get(const spq_trace *trace, size_t index, double *mean_infidelity, double *stderr_out) {
    return guarded([&] {
        require(trace != nullptr, "trace is NULL");
        require(index < trace->trace.size(), "step index out of range");
        if (mean_infidelity) {
            *mean_infidelity = trace->trace.mean_infidelity[index];
        }
        if (stderr_out) {
            *stderr_out = trace->trace.stderr_[index];
        }
    });
}

int64_t spq_trace_runs(const spq_trace *trace) {
    return trace ? trace->trace.runs : 0;
}

int64_t spq_trace_censored(const spq_trace *trace) {
    return trace ? trace->trace.censored : 0;
}

const char *spq_trace_scenario(const spq_trace *trace) {
    return trace ? trace->trace.scenario.c_str() : "";
}

spq_status spq_trace_crossing(const spq_trace *trace, double threshold, int64_t *step) {
    return guarded([&] {
        require(trace != nullptr && step != nullptr, "trace and output must be non-NULL");
        *step = threshold_crossing(trace->trace, threshold).value_or(0);
    });
}

spq_status spq_traces_write_csv(const spq_trace *const *traces, size_t count, const char *path) {
    return guarded([&] {
        require(traces != nullptr && path != nullptr && count > 0, "traces and path must be non-NULL");
        std::vector<FidelityTrace> all;
        for (size_t i = 0; i < count; i++) {
            require(traces[i] != nullptr, "trace is NULL");
            all.push_back(traces[i]->trace);
        }
        write_file_atomic(path, trace_csv(all));
    });
}

void spq_trace_free(spq_trace *trace) {
    delete trace;
}

spq_status spq_run_sweep(const spq_config *tmpl, const int64_t *m_grid, size_t m_count, const double *step_grid,
                         size_t step_count, const char *metrics, int64_t at_step, int64_t horizon, double threshold,
                         unsigned threads, spq_grid **out) {
    return guarded([&] {
        require(tmpl != nullptr && out != nullptr && metrics != nullptr, "config, metrics and output must be non-NULL");
        require(m_grid != nullptr && step_grid != nullptr && m_count > 0 && step_count > 0, "grids must be nonempty");
        std::vector<SweepMetric> list;
        std::string_view which(metrics);
        if (which == "both") {
            list = {SweepMetric::InfidelityRatio, SweepMetric::ThresholdTimeRatio};
        } else if (auto m = parse_metric(which)) {
            list = {*m};
        } else {
            throw SimError(ErrorKind::InvalidArgument, "unknown metric '" + std::string(which) + "'");
        }
        SweepOptions opts;
        opts.at_step = at_step;
        opts.horizon = horizon;
        opts.threshold = threshold;
        opts.threads = threads;
        auto *g = new spq_grid{run_sweep(tmpl->cfg, {m_grid, m_count}, {step_grid, step_count}, list, opts), {}};
        for (const SweepCell &c : g->grid.cells) {
            g->metric_names.emplace_back(metric_name(c.metric));
        }
        *out = g;
    });
}

size_t spq_grid_size(const spq_grid *grid) {
    return grid ? grid->grid.cells.size() : 0;
}

spq_status spq_grid_cell(const spq_grid *grid, size_t index, int64_t *m, double *step_size, const char **metric,
                         double *value, const char **flag) {
    return guarded([&] {
        require(grid != nullptr, "grid is NULL");
        require(index < grid->grid.cells.size(), "cell index out of range");
        const SweepCell &c = grid->grid.cells[index];
        if (m) {
            *m = c.M;
        }
        if (step_size) {
            *step_size = c.step_size;
        }
        if (metric) {
            *metric = grid->metric_names[index].c_str();
        }
        if (value) {
            *value = c.value;
        }
        if (flag) {
            *flag = c.flag.c_str();
        }
    });
}

spq_status spq_grid_write_csv(const spq_grid *grid, const char *path) {
    return guarded([&] {
        require(grid != nullptr && path != nullptr, "grid and path must be non-NULL");
        write_file_atomic(path, landscape_csv(grid->grid));
    });
}

void spq_grid_free(spq_grid *grid) {
    delete grid;
}

spq_status spq_oracle_remainder_linear(int64_t n, double phi_s, double *out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is NULL");
        if (phi_s <= 0 && n >= 1) {
            phi_s = 1 / (2 * std::sqrt(static_cast<double>(n)));
        }
        *out = remainder_linear(n, phi_s);
    });
}

spq_status spq_oracle_remainder_csv(int64_t n_max, const char *path) {
    return guarded([&] {
        require(path != nullptr, "path is NULL");
        require(n_max >= 1, "n_max must be >= 1");
        std::string text = "n,phi_sq,remainder\n";
        for (int64_t n = 1; n <= n_max; n++) {
            double phi = 1 / (2 * std::sqrt(static_cast<double>(n)));
            text += std::to_string(n) + "," + format_real(phi * phi) + "," + format_real(remainder_linear(n, phi)) + "\n";
        }
        write_file_atomic(path, text);
    });
}

spq_status spq_oracle_taylor_linear(int64_t n, double phi_s, double *lhs, double *rhs) {
    return guarded([&] {
        require(lhs != nullptr && rhs != nullptr, "output pointers must be non-NULL");
        require(n >= 1, "n must be >= 1");
        if (phi_s <= 0) {
            phi_s = 1 / (2 * std::sqrt(static_cast<double>(n)));
        }
        double nn = static_cast<double>(n);
        TaylorSides sides = taylor_condition_sides(
            [nn](double x) {
                double c = std::cos(nn * x);
                return c * c;
            },
            phi_s);
        *lhs = sides.lhs;
        *rhs = sides.rhs;
    });
}

spq_status spq_oracle_avg_f_nospec_delta(int64_t n, double delta0, double ddelta, double delta_bar, double *out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is NULL");
        *out = avg_F_nospec_delta(n, delta0, ddelta, delta_bar);
    });
}

spq_status spq_oracle_avg_f_nospec_eps(int64_t n, double eps0, double deps, double eps_bar, double *out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is NULL");
        *out = avg_F_nospec_eps(n, eps0, deps, eps_bar);
    });
}

spq_status spq_oracle_fidelity_sk1(double a, double *out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is NULL");
        *out = fidelity_sk1_pointwise(a);
    });
}

spq_status spq_oracle_fidelity_plain(double a, double *out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is NULL");
        *out = fidelity_plain_pointwise(a);
    });
}

spq_status spq_estimator_moments(int64_t k, int64_t m, double theta0, double theta_end, double step, double *mean,
                                 double *variance, double *printed_variance) {
    return guarded([&] {
        require(mean != nullptr && variance != nullptr && printed_variance != nullptr,
                "output pointers must be non-NULL");
        GaussianSpec g = estimator_moments(k, m, theta0, theta_end, step);
        double printed = estimator_variance_printed(k, m, step);
        *mean = g.mean;
        *variance = g.variance;
        *printed_variance = printed;
    });
}

spq_status spq_rpe_deepest_feasible(int64_t budget, int32_t *depth) {
    return guarded([&] {
        require(depth != nullptr, "output pointer is NULL");
        *depth = RpeBudget::deepest_feasible(budget);
    });
}

spq_status spq_run_rpe(int64_t budget, int32_t depth, int64_t runs, uint64_t seed, unsigned threads,
                       spq_rpe_result *out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is NULL");
        RpeResult r = run_rpe(budget, depth, runs, seed, threads);
        *out = {r.budget,         depth,      r.runs,        r.shots_per_generation, r.max_gates_used,
                r.mean_abs_error, r.abs_error_stderr, r.shot_noise, r.crb};
    });
}

spq_status spq_rpe_write_csv(const spq_rpe_result *rows, size_t count, const char *path) {
    return guarded([&] {
        require(rows != nullptr && path != nullptr, "rows and path must be non-NULL");
        std::vector<RpeResult> all(count);
        for (size_t i = 0; i < count; i++) {
            all[i].budget = rows[i].budget;
            all[i].depth = rows[i].depth;
            all[i].mean_abs_error = rows[i].mean_abs_error;
            all[i].shot_noise = rows[i].shot_noise;
            all[i].crb = rows[i].crb;
        }
        write_file_atomic(path, rpe_csv(all));
    });
}

}  // extern "C"
