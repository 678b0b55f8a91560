#ifndef SPECTATOR_FEEDBACK_ENGINE_H
#define SPECTATOR_FEEDBACK_ENGINE_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectator/pulse_control.h"
#include "spectator/stats.h"
#include "spectator/su2.h"

namespace spectator {

enum class ScenarioKind { BfieldPerp, BfieldXy4, BeamDelta, BeamEps, BeamEpsLinear };
enum class EstimationMode { Sampled, Crb };

std::string_view scenario_name(ScenarioKind kind);       // "beam-delta", ...
std::string_view scenario_namespace(ScenarioKind kind);  // "beam_delta", ...
std::optional<ScenarioKind> parse_scenario(std::string_view name);
std::string_view mode_name(EstimationMode mode);
std::optional<EstimationMode> parse_mode(std::string_view name);

bool is_beam(ScenarioKind kind);

/// Drifting laser-beam parameter (delta for beam-delta, eps for the eps scenarios).
struct BeamParams {
    double initial = 0;           // walk start
    double step = 0;              // Gaussian step std per measurement cycle
    double initial_estimate = 0;  // calibration at step 0
    double c = 2;                 // exp(x0^2)
    int gates_per_cycle = 1;      // X gates between spectator measurements
    SpectatorProfile profile = SpectatorProfile::Linear;

    bool operator==(const BeamParams &) const = default;
};

/// Two spectators at +-x0 around the data qubit under a linear field gradient.
struct FieldParams {
    double tau = 1;
    Vec3 b1{0, 0, 2e-3};
    Vec3 b2{0, 0, 1e-3};
    Vec3 rel_step{0.03, 0.02, 0.01};  // component steps relative to each spectator's |B|
    int pulses = 20;                  // pi-pulses per spectator probe

    bool operator==(const FieldParams &) const = default;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::BeamDelta;
    int64_t steps = 4000;
    int64_t runs = 1000;
    int64_t M = 400;
    EstimationMode mode = EstimationMode::Sampled;
    uint64_t seed = 1;
    BeamParams beam;
    FieldParams field;

    /// Standard parameter set of each scenario.
    static ScenarioConfig defaults(ScenarioKind kind);
    /// Throws SimError(Config) on constraint violations.
    void validate() const;
    bool operator==(const ScenarioConfig &) const = default;
};

struct SpectatorLayout {
    /// Field at the data qubit: exact mean of the two spectator fields.
    static Vec3 data_field(const Vec3 &b1, const Vec3 &b2) { return (b1 + b2) * 0.5; }
};

/// Per-step mean infidelity over the runs that completed.
struct FidelityTrace {
    std::string scenario;  // "<kind>:spec" or "<kind>:nospec"
    uint64_t seed = 0;
    int64_t runs = 0;
    int64_t censored = 0;
    std::vector<double> mean_infidelity;  // entry i is step i + 1
    std::vector<double> stderr_;

    size_t size() const { return mean_infidelity.size(); }
};

struct ScenarioResult {
    FidelityTrace spec;
    FidelityTrace nospec;
};

/// Folds per-run traces into per-step means and standard errors.
class TraceAccumulator {
   public:
    explicit TraceAccumulator(size_t steps) : moments_(steps) {}
    void add_run(std::span<const double> infidelity);
    int64_t runs() const { return runs_; }
    FidelityTrace finish(std::string scenario, uint64_t seed, int64_t censored) const;

   private:
    std::vector<RunningMoments> moments_;
    int64_t runs_ = 0;
};

/// Per-run infidelity traces of both variants. An empty vector marks a censored run.
struct RunTraces {
    std::vector<double> spec;
    std::vector<double> nospec;
};

/// Simulates one Monte Carlo run (deterministic in cfg.seed and run index).
RunTraces simulate_run(const ScenarioConfig &cfg, uint64_t run);

/// Full Monte Carlo: runs are independent; threads = 0 uses all cores, 1 is sequential.
ScenarioResult run_scenario(const ScenarioConfig &cfg, unsigned threads = 0);

/// Smallest step number N (1-based) with mean infidelity above threshold.
std::optional<int64_t> threshold_crossing(const FidelityTrace &trace, double threshold);

enum class SweepMetric { InfidelityRatio, ThresholdTimeRatio };
std::string_view metric_name(SweepMetric metric);
std::optional<SweepMetric> parse_metric(std::string_view name);

struct SweepCell {
    int64_t M = 0;
    double step_size = 0;
    SweepMetric metric = SweepMetric::InfidelityRatio;
    double value = 0;  // log10 of the ratio; negative means spectators help
    std::string flag;  // "ok", "spec-crossed", "early-crossing", "censored", "no-data"
};

struct SweepGrid {
    std::vector<SweepCell> cells;
};

struct SweepOptions {
    int64_t at_step = 4000;
    int64_t horizon = 0;  // steps simulated for crossing times; 0 means at_step
    double threshold = 1e-4;
    unsigned threads = 0;
};

/// Applies a step size to a config: absolute step for beam scenarios, x-component
/// relative step (y and z keep their ratio to x) for field scenarios.
void set_step_size(ScenarioConfig &cfg, double step_size);

/// One scenario run per (M, step size) cell; every requested metric is read off
/// the same pair of traces.
SweepGrid run_sweep(const ScenarioConfig &tmpl, std::span<const int64_t> m_grid, std::span<const double> step_grid,
                    std::span<const SweepMetric> metrics, const SweepOptions &options);

}  // namespace spectator

#endif
