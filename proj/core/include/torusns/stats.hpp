#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace torusns {

/// Neumaier compensated summation; reduction order is fixed by the caller, so
/// results do not depend on worker count.
class KahanSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

/// Sample mean and standard error of the mean.
Estimate mean_estimate(const std::vector<double>& samples);

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double p_hat;
    double lower;
    double upper;
    double std_error;  // half-width proxy: sqrt(p(1-p)/n) with continuity floor
};
WilsonInterval wilson_interval(std::int64_t hits, std::int64_t n, double z = 1.96);

/// Least-squares line y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace torusns
