#include "spectator/feedback_engine.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "spectator/error_walk.h"
#include "spectator/errors.h"
#include "spectator/parallel.h"
#include "spectator/rng.h"
#include "spectator/spectator_estimation.h"

namespace spectator {

namespace {

constexpr double kPi = std::numbers::pi;

struct KindName {
    ScenarioKind kind;
    std::string_view name;
    std::string_view ns;
};

constexpr std::array<KindName, 5> kKinds{{
    {ScenarioKind::BfieldPerp, "bfield-perp", "bfield_perp"},
    {ScenarioKind::BfieldXy4, "bfield-xy4", "bfield_xy4"},
    {ScenarioKind::BeamDelta, "beam-delta", "beam_delta"},
    {ScenarioKind::BeamEps, "beam-eps", "beam_eps"},
    {ScenarioKind::BeamEpsLinear, "beam-eps-linear", "beam_eps_linear"},
}};

// Errors that mean the drifting parameters left the gate model; the run is censored.
bool censors(const SimError &e) {
    return e.kind() == ErrorKind::RunawayParameter || e.kind() == ErrorKind::Domain;
}

double component(const Vec3 &v, int i) {
    return i == 0 ? v.x : (i == 1 ? v.y : v.z);
}

void set_component(Vec3 &v, int i, double value) {
    (i == 0 ? v.x : (i == 1 ? v.y : v.z)) = value;
}

// ---- beam scenarios ----

RunTraces simulate_beam(const ScenarioConfig &cfg, uint64_t run) {
    const BeamParams &bp = cfg.beam;
    const bool delta_kind = cfg.kind == ScenarioKind::BeamDelta;
    const size_t steps = static_cast<size_t>(cfg.steps);
    const Unitary2 ideal = rotation(kAxisX, kPi);

    RngStream walk_rng(cfg.seed, run, Substream::Walk);
    RngStream meas_rng(cfg.seed, run, Substream::Measure);
    RngStream est_rng(cfg.seed, run, Substream::Estimate);

    WalkState walk = WalkState::start(bp.initial, bp.step);
    double est_spec = bp.initial_estimate;
    const double est_nospec = bp.initial_estimate;

    MeasurementTally plus, minus;
    CompensatedSum window;
    int64_t window_n = 0;

    auto gate_spec = [&](double estimate) {
        BeamGateSpec g;
        g.c = bp.c;
        if (delta_kind) {
            g.delta = walk.value;
            g.delta_bar = estimate;
        } else {
            g.eps = walk.value;
            g.eps_bar = estimate;
        }
        return g;
    };
    auto infidelity = [&](const BeamGateSpec &g) {
        Unitary2 u = cfg.kind == ScenarioKind::BeamEps ? beam_gate_sk1(g) : beam_gate_plain(g, BeamSite::Data, bp.profile);
        return 1 - process_fidelity(ideal, u);
    };

    RunTraces out;
    out.spec.reserve(steps);
    out.nospec.reserve(steps);
    bool spec_alive = true;
    bool nospec_alive = true;

    for (int64_t n = 1; n <= cfg.steps; n++) {
        walk = advance(walk, walk_rng);

        if (nospec_alive) {
            try {
                out.nospec.push_back(infidelity(gate_spec(est_nospec)));
            } catch (const SimError &e) {
                if (!censors(e)) {
                    throw;
                }
                nospec_alive = false;
            }
        }
        if (!spec_alive) {
            continue;
        }
        try {
            BeamGateSpec g = gate_spec(est_spec);
            out.spec.push_back(infidelity(g));

            if (cfg.mode == EstimationMode::Sampled) {
                double per_cycle = kPi * bp.gates_per_cycle;
                for (BeamSite site : {BeamSite::SpectatorPlus, BeamSite::SpectatorMinus}) {
                    double angle = checked_angle(per_cycle, beam_scale(g, site, bp.profile));
                    PureState s = rotation(kAxisX, angle) * PureState::zero();
                    int outcome = measure_pauli(s, kAxisZ, meas_rng);
                    (site == BeamSite::SpectatorPlus ? plus : minus).add(outcome);
                }
            } else {
                window.add(walk.value);
                window_n++;
            }

            if (n % cfg.M == 0) {
                if (cfg.mode == EstimationMode::Sampled) {
                    if (delta_kind) {
                        try {
                            est_spec = estimate_delta(plus, minus, g.x0());
                        } catch (const SimError &e) {
                            if (e.kind() != ErrorKind::DegenerateMeasurement) {
                                throw;
                            }
                        }
                    } else {
                        est_spec = estimate_eps(plus, minus, bp.c, est_spec).value;
                    }
                } else {
                    double mean = window.value() / static_cast<double>(window_n);
                    double fisher =
                        delta_kind ? fisher_delta(cfg.M, bp.c, est_spec).value : fisher_eps(cfg.M, bp.c, est_spec).value;
                    est_spec = crb_noise(mean, 1, fisher, est_rng);
                }
                if (!std::isfinite(est_spec) || (delta_kind ? std::abs(est_spec) >= 0.99 : est_spec >= 0.99)) {
                    throw SimError(ErrorKind::RunawayParameter, "calibration estimate left the gate model");
                }
                plus.clear();
                minus.clear();
                window = {};
                window_n = 0;
            }
        } catch (const SimError &e) {
            if (!censors(e)) {
                throw;
            }
            spec_alive = false;
        }
    }
    if (!spec_alive) {
        out.spec.clear();
    }
    if (!nospec_alive) {
        out.nospec.clear();
    }
    return out;
}

// ---- magnetic-field scenarios ----

using Pulses = std::array<Unitary2, 4>;

Pulses choose_pulses(bool xy4, const Vec3 &estimate, RngStream &rng) {
    if (xy4) {
        auto [ex, ey] = choose_xy4_axes(estimate, rng);
        Unitary2 rx = rotation(ex, kPi);
        Unitary2 ry = rotation(ey, kPi);
        return {rx, ry, rx, ry};
    }
    Unitary2 r = rotation(choose_perp_axis(estimate, rng), kPi);
    return {r, r, r, r};
}

// Same product as dd_block with the pulse unitaries precomputed.
double block_infidelity(const Unitary2 &free, const Pulses &pulses) {
    Unitary2 u = Unitary2::identity();
    for (const Unitary2 &p : pulses) {
        u = p * (free * u);
    }
    return 1 - process_fidelity(Unitary2::identity(), u);
}

RunTraces simulate_field(const ScenarioConfig &cfg, uint64_t run) {
    const FieldParams &fp = cfg.field;
    const bool xy4 = cfg.kind == ScenarioKind::BfieldXy4;
    const size_t steps = static_cast<size_t>(cfg.steps);

    RngStream walk_rng(cfg.seed, run, Substream::Walk);
    RngStream meas_rng(cfg.seed, run, Substream::Measure);
    RngStream axis_rng(cfg.seed, run, Substream::Axis);
    RngStream est_rng(cfg.seed, run, Substream::Estimate);

    const std::array<Vec3, 2> initial{fp.b1, fp.b2};
    std::array<std::array<WalkState, 3>, 2> walks;
    for (int s = 0; s < 2; s++) {
        double magnitude = initial[s].norm();
        for (int i = 0; i < 3; i++) {
            walks[s][i] = WalkState::start(component(initial[s], i), component(fp.rel_step, i) * magnitude);
        }
    }

    std::array<Vec3, 2> estimate = initial;
    Pulses pulses_nospec = choose_pulses(xy4, SpectatorLayout::data_field(fp.b1, fp.b2), axis_rng);
    Pulses pulses_spec = pulses_nospec;

    std::array<std::array<MeasurementTally, 3>, 2> tallies;
    std::array<std::array<CompensatedSum, 3>, 2> windows;
    std::array<std::array<int64_t, 3>, 2> window_n{};

    RunTraces out;
    out.spec.reserve(steps);
    out.nospec.reserve(steps);

    for (int64_t n = 1; n <= cfg.steps; n++) {
        std::array<Vec3, 2> field;
        for (int s = 0; s < 2; s++) {
            for (int i = 0; i < 3; i++) {
                walks[s][i] = advance(walks[s][i], walk_rng);
                set_component(field[s], i, walks[s][i].value);
            }
        }
        Unitary2 free = field_evolution(SpectatorLayout::data_field(field[0], field[1]), fp.tau);
        out.nospec.push_back(block_infidelity(free, pulses_nospec));
        out.spec.push_back(block_infidelity(free, pulses_spec));

        int c = static_cast<int>((n - 1) % 3);
        auto comp = static_cast<FieldComponent>(c);
        for (int s = 0; s < 2; s++) {
            if (cfg.mode == EstimationMode::Sampled) {
                double e = probe_expectation(field[s], fp.pulses, fp.tau, comp);
                tallies[s][c].add(meas_rng.bernoulli((1 + e) / 2) ? +1 : -1);
            } else {
                windows[s][c].add(component(field[s], c));
                window_n[s][c]++;
            }
        }

        if (n % cfg.M != 0) {
            continue;
        }
        for (int s = 0; s < 2; s++) {
            for (int i = 0; i < 3; i++) {
                auto ci = static_cast<FieldComponent>(i);
                if (cfg.mode == EstimationMode::Sampled) {
                    if (tallies[s][i].count > 0) {
                        set_component(estimate[s], i, estimate_B_component(tallies[s][i], fp.pulses, fp.tau, ci));
                    }
                    tallies[s][i].clear();
                } else {
                    if (window_n[s][i] > 0) {
                        double mean = windows[s][i].value() / static_cast<double>(window_n[s][i]);
                        double fisher = fisher_field(window_n[s][i], fp.pulses, fp.tau).value;
                        set_component(estimate[s], i, crb_noise(mean, 1, fisher, est_rng));
                    }
                    windows[s][i] = {};
                    window_n[s][i] = 0;
                }
            }
        }
        try {
            pulses_spec = choose_pulses(xy4, SpectatorLayout::data_field(estimate[0], estimate[1]), axis_rng);
        } catch (const SimError &e) {
            if (e.kind() != ErrorKind::InvalidAxis) {
                throw;
            }
        }
    }
    return out;
}

void require(bool ok, const std::string &message) {
    if (!ok) {
        throw SimError(ErrorKind::Config, message);
    }
}

}  // namespace

std::string_view scenario_name(ScenarioKind kind) {
    for (const auto &k : kKinds) {
        if (k.kind == kind) {
            return k.name;
        }
    }
    return "unknown";
}

std::string_view scenario_namespace(ScenarioKind kind) {
    for (const auto &k : kKinds) {
        if (k.kind == kind) {
            return k.ns;
        }
    }
    return "unknown";
}

std::optional<ScenarioKind> parse_scenario(std::string_view name) {
    for (const auto &k : kKinds) {
        if (k.name == name) {
            return k.kind;
        }
    }
    return std::nullopt;
}

std::string_view mode_name(EstimationMode mode) {
    return mode == EstimationMode::Sampled ? "sampled" : "crb";
}

std::optional<EstimationMode> parse_mode(std::string_view name) {
    if (name == "sampled") {
        return EstimationMode::Sampled;
    }
    if (name == "crb") {
        return EstimationMode::Crb;
    }
    return std::nullopt;
}

bool is_beam(ScenarioKind kind) {
    return kind == ScenarioKind::BeamDelta || kind == ScenarioKind::BeamEps || kind == ScenarioKind::BeamEpsLinear;
}

ScenarioConfig ScenarioConfig::defaults(ScenarioKind kind) {
    ScenarioConfig cfg;
    cfg.kind = kind;
    switch (kind) {
        case ScenarioKind::BeamDelta:
            cfg.M = 400;
            cfg.steps = 4000;
            cfg.beam = {0.02, 0.001, 0.0198, 12, 4, SpectatorProfile::Linear};
            break;
        case ScenarioKind::BeamEps:
        case ScenarioKind::BeamEpsLinear:
            cfg.M = 1000;
            cfg.steps = 4000;
            cfg.beam = {0.002, 0.0007, 0.0015, 1.8, 1, SpectatorProfile::Linear};
            break;
        case ScenarioKind::BfieldPerp:
            cfg.M = 700;
            cfg.steps = 15000;
            cfg.field = {1, {0, 0, 2e-3}, {0, 0, 1e-3}, {0.03, 0.02, 0.01}, 20};
            break;
        case ScenarioKind::BfieldXy4:
            cfg.M = 700;
            cfg.steps = 15000;
            cfg.field = {1, {0, 0, 3.8e-2}, {0, 0, 1.9e-2}, {0.03, 0.02, 0.01}, 4};
            break;
    }
    return cfg;
}

void ScenarioConfig::validate() const {
    require(steps >= 1, "steps must be >= 1");
    require(runs >= 1, "runs must be >= 1");
    require(M >= 1, "M must be >= 1");
    if (is_beam(kind)) {
        require(std::isfinite(beam.initial) && std::isfinite(beam.initial_estimate), "beam parameters must be finite");
        require(std::isfinite(beam.step) && beam.step >= 0, "beam step size must be >= 0");
        require(std::isfinite(beam.c) && beam.c > 1, "c must exceed 1");
        require(beam.gates_per_cycle >= 1, "gates_per_cycle must be >= 1");
        if (kind == ScenarioKind::BeamDelta) {
            require(std::abs(beam.initial_estimate) < 1, "|delta_bar0| must be < 1");
        } else {
            require(beam.initial_estimate < 0.99, "eps_bar0 must be < 0.99");
        }
    } else {
        require(std::isfinite(field.tau) && field.tau > 0, "tau must be > 0");
        require(field.pulses >= 2 && field.pulses % 2 == 0, "n_pulses must be even and >= 2");
        for (const Vec3 &b : {field.b1, field.b2}) {
            require(std::isfinite(b.norm()) && b.norm() > 0, "spectator fields must be finite and nonzero");
        }
        const Vec3 &r = field.rel_step;
        require(std::isfinite(r.norm()) && r.x >= 0 && r.y >= 0 && r.z >= 0, "rel_step components must be >= 0");
    }
}

void TraceAccumulator::add_run(std::span<const double> infidelity) {
    if (infidelity.size() != moments_.size()) {
        throw SimError(ErrorKind::InvalidArgument, "trace length does not match the accumulator");
    }
    for (size_t i = 0; i < moments_.size(); i++) {
        moments_[i].add(infidelity[i]);
    }
    runs_++;
}

FidelityTrace TraceAccumulator::finish(std::string scenario, uint64_t seed, int64_t censored) const {
    FidelityTrace t;
    t.scenario = std::move(scenario);
    t.seed = seed;
    t.runs = runs_;
    t.censored = censored;
    t.mean_infidelity.reserve(moments_.size());
    t.stderr_.reserve(moments_.size());
    for (const RunningMoments &m : moments_) {
        t.mean_infidelity.push_back(std::clamp(m.mean(), 0.0, 1.0));
        t.stderr_.push_back(m.stderr_of_mean());
    }
    return t;
}

RunTraces simulate_run(const ScenarioConfig &cfg, uint64_t run) {
    return is_beam(cfg.kind) ? simulate_beam(cfg, run) : simulate_field(cfg, run);
}

ScenarioResult run_scenario(const ScenarioConfig &cfg, unsigned threads) {
    cfg.validate();
    if (threads == 0) {
        threads = default_threads();
    }
    const size_t steps = static_cast<size_t>(cfg.steps);
    TraceAccumulator spec(steps), nospec(steps);
    int64_t spec_censored = 0, nospec_censored = 0;

    // Chunks bound memory; folding each chunk in run order keeps the sums
    // independent of the thread count.
    const uint64_t runs = static_cast<uint64_t>(cfg.runs);
    const uint64_t chunk = std::max<uint64_t>(64, 4 * uint64_t{threads});
    std::vector<RunTraces> buffer;
    for (uint64_t begin = 0; begin < runs; begin += chunk) {
        uint64_t count = std::min(chunk, runs - begin);
        buffer.assign(count, {});
        parallel_for(count, threads, [&](size_t i) { buffer[i] = simulate_run(cfg, begin + i); });
        for (const RunTraces &r : buffer) {
            if (r.spec.empty()) {
                spec_censored++;
            } else {
                spec.add_run(r.spec);
            }
            if (r.nospec.empty()) {
                nospec_censored++;
            } else {
                nospec.add_run(r.nospec);
            }
        }
    }
    std::string base(scenario_name(cfg.kind));
    return {spec.finish(base + ":spec", cfg.seed, spec_censored),
            nospec.finish(base + ":nospec", cfg.seed, nospec_censored)};
}

std::optional<int64_t> threshold_crossing(const FidelityTrace &trace, double threshold) {
    if (!(threshold > 0 && threshold < 1)) {
        throw SimError(ErrorKind::InvalidArgument, "threshold must lie in (0, 1)");
    }
    for (size_t i = 0; i < trace.mean_infidelity.size(); i++) {
        if (trace.mean_infidelity[i] > threshold) {
            return static_cast<int64_t>(i) + 1;
        }
    }
    return std::nullopt;
}

std::string_view metric_name(SweepMetric metric) {
    return metric == SweepMetric::InfidelityRatio ? "infidelity-ratio" : "threshold-time-ratio";
}

std::optional<SweepMetric> parse_metric(std::string_view name) {
    if (name == "infidelity-ratio") {
        return SweepMetric::InfidelityRatio;
    }
    if (name == "threshold-time-ratio") {
        return SweepMetric::ThresholdTimeRatio;
    }
    return std::nullopt;
}

void set_step_size(ScenarioConfig &cfg, double step_size) {
    if (is_beam(cfg.kind)) {
        cfg.beam.step = step_size;
        return;
    }
    Vec3 &r = cfg.field.rel_step;
    if (r.x > 0) {
        r = r * (step_size / r.x);
    } else {
        r = {step_size, step_size, step_size};
    }
}

SweepGrid run_sweep(const ScenarioConfig &tmpl, std::span<const int64_t> m_grid, std::span<const double> step_grid,
                    std::span<const SweepMetric> metrics, const SweepOptions &options) {
    if (m_grid.empty() || step_grid.empty() || metrics.empty()) {
        throw SimError(ErrorKind::InvalidArgument, "sweep grids and metric list must be nonempty");
    }
    if (options.at_step < 1 || options.horizon < 0) {
        throw SimError(ErrorKind::InvalidArgument, "at_step must be >= 1 and horizon >= 0");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SweepGrid grid;
    for (int64_t m : m_grid) {
        for (double step : step_grid) {
            ScenarioConfig cfg = tmpl;
            cfg.M = m;
            set_step_size(cfg, step);
            cfg.steps = std::max(options.at_step, options.horizon);
            ScenarioResult res = run_scenario(cfg, options.threads);
            const bool have_data = res.spec.runs > 0 && res.nospec.runs > 0;
            const bool censored = res.spec.censored > 0 || res.nospec.censored > 0;
            auto spec_cross = have_data ? threshold_crossing(res.spec, options.threshold) : std::nullopt;
            auto nospec_cross = have_data ? threshold_crossing(res.nospec, options.threshold) : std::nullopt;

            for (SweepMetric metric : metrics) {
                SweepCell cell{m, step, metric, nan, "ok"};
                if (!have_data) {
                    cell.flag = "no-data";
                } else if (metric == SweepMetric::InfidelityRatio) {
                    size_t at = static_cast<size_t>(options.at_step - 1);
                    double s = res.spec.mean_infidelity[at];
                    double n = res.nospec.mean_infidelity[at];
                    cell.value = (s == 0 && n == 0) ? 0.0 : std::log10(s / n);
                    if (spec_cross && *spec_cross <= options.at_step) {
                        cell.flag = "spec-crossed";
                    }
                } else {
                    // A variant that never crosses is censored at the simulated horizon.
                    double horizon = static_cast<double>(cfg.steps);
                    double t_spec = spec_cross ? static_cast<double>(*spec_cross) : horizon;
                    double t_nospec = nospec_cross ? static_cast<double>(*nospec_cross) : horizon;
                    cell.value = std::log10(t_nospec / t_spec);
                    if (spec_cross && *spec_cross <= m) {
                        cell.flag = "early-crossing";
                    } else if (!nospec_cross) {
                        cell.flag = "nospec-censored";
                    } else if (!spec_cross) {
                        cell.flag = "spec-censored";
                    }
                }
                if (censored && cell.flag == "ok") {
                    cell.flag = "censored";
                }
                grid.cells.push_back(std::move(cell));
            }
        }
    }
    return grid;
}

}  // namespace spectator
