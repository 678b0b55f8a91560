#ifndef SPECTATOR_RPE_LAB_H
#define SPECTATOR_RPE_LAB_H

#include <cstdint>
#include <span>
#include <vector>

#include "spectator/rng.h"

namespace spectator {

/// Even shot allocation: every generation gets the same (even) number of shots,
/// split equally between the two measurement bases; generation j repeats the
/// gate 2^(j-1) times per shot.
struct RpeBudget {
    int64_t total_gates = 0;
    int max_depth = 1;
    int64_t shots_per_generation = 0;

    static RpeBudget even(int64_t total_gates, int depth);
    int64_t gates_used() const;
    /// Largest depth whose even allocation leaves at least two shots per generation.
    static int deepest_feasible(int64_t total_gates);
};

/// Averages of the two conjugate measurements of one generation.
struct GenerationData {
    double cos_avg = 0;  // <sigma_z>, estimates cos(L theta)
    double sin_avg = 0;  // -<sigma_y>, estimates sin(L theta)
};

/// Overrotation estimate from per-generation data of a pi/2 X gate. Generation j
/// narrows the previous estimate to the branch within pi / 2^(j-1) of it.
double rpe_estimate(std::span<const GenerationData> generations);

struct RpeResult {
    double mean_abs_error = 0;
    double abs_error_stderr = 0;
    double mean_signed_error = 0;
    double signed_error_stderr = 0;
    int64_t runs = 0;
    int64_t budget = 0;
    int depth = 1;
    int64_t shots_per_generation = 0;
    int64_t max_gates_used = 0;
    double shot_noise = 0;  // 1/sqrt(T)
    double crb = 0;         // crb_curve(T, depth)
};

/// Overrotations phi ~ N(0, (pi/32)^2) estimated under a budget of T gates.
RpeResult run_rpe(int64_t total_gates, int depth, int64_t runs, uint64_t seed, unsigned threads = 0);

/// Mean absolute error of an efficient estimator at the Cramer-Rao variance for the
/// even allocation: sqrt(2/pi) / sqrt(K (4^D - 1) / 3).
double crb_curve(int64_t total_gates, int depth);

/// One simulated RPE experiment for a given true overrotation.
double simulate_rpe_once(double phi, const RpeBudget &budget, RngStream &rng);

}  // namespace spectator

#endif
