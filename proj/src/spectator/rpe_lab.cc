#include "spectator/rpe_lab.h"

#include <cmath>
#include <numbers>
#include <string>

#include "spectator/errors.h"
#include "spectator/parallel.h"
#include "spectator/stats.h"

namespace spectator {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double a) {
    return std::remainder(a, 2 * kPi);
}

}  // namespace

RpeBudget RpeBudget::even(int64_t total_gates, int depth) {
    if (depth < 1 || depth > 62) {
        throw SimError(ErrorKind::InvalidArgument, "RPE depth must be in [1, 62]");
    }
    int64_t per_shot_sum = (int64_t{1} << depth) - 1;  // sum of 2^(j-1), j = 1..depth
    int64_t shots = 2 * (total_gates / (2 * per_shot_sum));
    if (shots < 2) {
        throw SimError(ErrorKind::InfeasibleBudget, "budget of " + std::to_string(total_gates) +
                                                        " gates cannot cover depth " + std::to_string(depth));
    }
    return {total_gates, depth, shots};
}

int64_t RpeBudget::gates_used() const {
    return shots_per_generation * ((int64_t{1} << max_depth) - 1);
}

int RpeBudget::deepest_feasible(int64_t total_gates) {
    int depth = 0;
    while (depth < 62 && 2 * ((int64_t{1} << (depth + 1)) - 1) <= total_gates) {
        depth++;
    }
    return depth;
}

double rpe_estimate(std::span<const GenerationData> generations) {
    double estimate = 0;
    double reps = 1;
    bool first = true;
    for (const GenerationData &g : generations) {
        double total = std::atan2(g.sin_avg, g.cos_avg);
        double excess = wrap_pi(total - reps * kPi / 2);  // reps * phi modulo 2 pi
        if (first) {
            estimate = excess;
            first = false;
        } else {
            double m = std::floor((reps * estimate - excess) / (2 * kPi) + 0.5);
            estimate = (excess + 2 * kPi * m) / reps;
        }
        reps *= 2;
    }
    return estimate;
}

double simulate_rpe_once(double phi, const RpeBudget &budget, RngStream &rng) {
    std::vector<GenerationData> data(budget.max_depth);
    uint64_t per_basis = static_cast<uint64_t>(budget.shots_per_generation / 2);
    double reps = 1;
    for (int j = 0; j < budget.max_depth; j++) {
        double angle = reps * (kPi / 2 + phi);
        double p_cos = (1 + std::cos(angle)) / 2;
        double p_sin = (1 + std::sin(angle)) / 2;
        double n = static_cast<double>(per_basis);
        data[j].cos_avg = 2 * static_cast<double>(rng.binomial(per_basis, p_cos)) / n - 1;
        data[j].sin_avg = 2 * static_cast<double>(rng.binomial(per_basis, p_sin)) / n - 1;
        reps *= 2;
    }
    return rpe_estimate(data);
}

RpeResult run_rpe(int64_t total_gates, int depth, int64_t runs, uint64_t seed, unsigned threads) {
    if (runs < 1) {
        throw SimError(ErrorKind::InvalidArgument, "run_rpe: runs must be >= 1");
    }
    RpeBudget budget = RpeBudget::even(total_gates, depth);
    if (budget.gates_used() > total_gates) {
        throw SimError(ErrorKind::InfeasibleBudget, "RPE allocation exceeds the gate budget");
    }
    std::vector<double> errors(static_cast<size_t>(runs));
    parallel_for(errors.size(), threads, [&](size_t r) {
        RngStream rng(seed, r, Substream::Estimate);
        double phi = rng.gaussian(0, kPi / 32);
        errors[r] = simulate_rpe_once(phi, budget, rng) - phi;
    });

    RunningMoments abs_err, signed_err;
    for (double e : errors) {
        abs_err.add(std::abs(e));
        signed_err.add(e);
    }
    RpeResult out;
    out.mean_abs_error = abs_err.mean();
    out.abs_error_stderr = abs_err.stderr_of_mean();
    out.mean_signed_error = signed_err.mean();
    out.signed_error_stderr = signed_err.stderr_of_mean();
    out.runs = runs;
    out.budget = total_gates;
    out.depth = depth;
    out.shots_per_generation = budget.shots_per_generation;
    out.max_gates_used = budget.gates_used();
    out.shot_noise = 1 / std::sqrt(static_cast<double>(total_gates));
    out.crb = crb_curve(total_gates, depth);
    return out;
}

double crb_curve(int64_t total_gates, int depth) {
    if (total_gates < 1 || depth < 1) {
        throw SimError(ErrorKind::InvalidArgument, "crb_curve: T and depth must be >= 1");
    }
    // Depth 1 with an odd budget still counts every gate as a shot.
    double shots = depth == 1 ? static_cast<double>(total_gates)
                              : static_cast<double>(RpeBudget::even(total_gates, depth).shots_per_generation);
    double fisher = shots * (std::pow(4.0, depth) - 1) / 3;
    return std::sqrt(2 / kPi) / std::sqrt(fisher);
}

}  // namespace spectator
