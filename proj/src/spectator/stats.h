#ifndef SPECTATOR_STATS_H
#define SPECTATOR_STATS_H

#include <cmath>
#include <cstdint>

namespace spectator {

/// Neumaier-compensated sum; the result is insensitive to summation order far
/// below the 1e-13 level for the sample sizes used here.
class CompensatedSum {
   public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

   private:
    double sum_ = 0;
    double comp_ = 0;
};

/// Mean and standard error from compensated first and second power sums.
class RunningMoments {
   public:
    void add(double x) {
        n_++;
        s1_.add(x);
        s2_.add(x * x);
    }
    int64_t count() const { return n_; }
    double mean() const { return n_ ? s1_.value() / static_cast<double>(n_) : 0; }
    double variance() const {
        if (n_ < 2) {
            return 0;
        }
        double n = static_cast<double>(n_);
        double m = s1_.value() / n;
        double v = (s2_.value() - n * m * m) / (n - 1);
        return v > 0 ? v : 0;
    }
    double stderr_of_mean() const { return n_ ? std::sqrt(variance() / static_cast<double>(n_)) : 0; }

   private:
    int64_t n_ = 0;
    CompensatedSum s1_;
    CompensatedSum s2_;
};

}  // namespace spectator

#endif
