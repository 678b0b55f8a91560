#ifndef SPECTATOR_ERROR_WALK_H
#define SPECTATOR_ERROR_WALK_H

#include <cstdint>

#include "spectator/rng.h"

namespace spectator {

/// One error parameter drifting as an unbiased Gaussian random walk.
struct WalkState {
    double theta0 = 0;
    double step = 0;
    double value = 0;
    uint64_t count = 0;

    static WalkState start(double theta0, double step) { return {theta0, step, theta0, 0}; }
};

struct GaussianSpec {
    double mean = 0;
    double variance = 0;
};

/// Advance the walk by one Gaussian step of standard deviation `w.step`.
WalkState advance(const WalkState &w, RngStream &rng);

/// Law of the walk value `n` steps before the pinned endpoint of a walk of
/// `kM` steps pinned at theta0 (start) and theta_end (step kM).
GaussianSpec bridge_moments(int64_t n, int64_t kM, double theta0, double theta_end, double step);

/// Law of the average of the last M walk values of cycle k, conditioned on the
/// walk start and on its value at step kM. The variance is the exact double sum.
GaussianSpec estimator_moments(int64_t k, int64_t M, double theta0, double theta_end, double step);

/// Alternative closed-form variance:
///   (M-1)/3 * (4kM - 3M - 3k + 2) / (4kM) * step^2
/// It disagrees with the exact sum for small k (1/24 vs 1/8 at k=1, M=2).
/// Kept only as a diagnostic.
double estimator_variance_printed(int64_t k, int64_t M, double step);

/// Estimate plus Cramer-Rao limited noise, N(0, 1/(M * fisher_per_block)).
/// Pass M = 1 when the Fisher value already sums over the M measurements.
double crb_noise(double estimate_mean, int64_t M, double fisher_per_block, RngStream &rng);

}  // namespace spectator

#endif
