#include "spectator/error_walk.h"

#include <cmath>
#include <string>

#include "spectator/errors.h"

namespace spectator {

WalkState advance(const WalkState &w, RngStream &rng) {
    WalkState next = w;
    // The draw is consumed even for a frozen walk so streams stay aligned across configs.
    double z = rng.gaussian();
    if (w.step != 0) {
        next.value = w.value + w.step * z;
    }
    next.count = w.count + 1;
    return next;
}

GaussianSpec bridge_moments(int64_t n, int64_t kM, double theta0, double theta_end, double step) {
    if (kM < 1 || n < 0 || n > kM) {
        throw SimError(ErrorKind::Domain,
                       "bridge_moments: need 0 <= n <= kM and kM >= 1 (n=" + std::to_string(n) +
                           ", kM=" + std::to_string(kM) + ")");
    }
    double nn = static_cast<double>(n);
    double total = static_cast<double>(kM);
    return {
        theta_end + nn * (theta0 - theta_end) / total,
        nn * (total - nn) / total * step * step,
    };
}

GaussianSpec estimator_moments(int64_t k, int64_t M, double theta0, double theta_end, double step) {
    if (k < 1 || M < 1) {
        throw SimError(ErrorKind::Domain, "estimator_moments: k and M must be >= 1");
    }
    double kM = static_cast<double>(k * M);
    double mean = theta_end + static_cast<double>(M - 1) / kM * (theta0 - theta_end) / 2;
    // sum_{n<M} (kM n^2 - n^3), evaluated in integers while it fits.
    long double acc = 0;
    for (int64_t n = 0; n < M; n++) {
        long double nn = static_cast<long double>(n);
        acc += static_cast<long double>(kM) * nn * nn - nn * nn * nn;
    }
    double variance = static_cast<double>(acc / (static_cast<long double>(M) * M * kM)) * step * step;
    return {mean, variance};
}

double estimator_variance_printed(int64_t k, int64_t M, double step) {
    double kk = static_cast<double>(k);
    double mm = static_cast<double>(M);
    return (mm - 1) / 3 * (4 * kk * mm - 3 * mm - 3 * kk + 2) / (4 * kk * mm) * step * step;
}

double crb_noise(double estimate_mean, int64_t M, double fisher_per_block, RngStream &rng) {
    if (!(fisher_per_block > 0) || M < 1) {
        throw SimError(ErrorKind::Domain, "crb_noise: Fisher information must be positive");
    }
    double z = rng.gaussian();
    if (std::isinf(fisher_per_block)) {
        return estimate_mean;
    }
    return estimate_mean + z / std::sqrt(static_cast<double>(M) * fisher_per_block);
}

}  // namespace spectator
