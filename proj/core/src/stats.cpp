#include "torusns/stats.hpp"

namespace torusns {

Estimate mean_estimate(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("mean_estimate: no samples");
    KahanSum s;
    for (double x : samples) s.add(x);
    const double n = static_cast<double>(samples.size());
    const double mean = s.value() / n;
    KahanSum v;
    for (double x : samples) v.add((x - mean) * (x - mean));
    const double var = samples.size() > 1 ? v.value() / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n), static_cast<std::int64_t>(samples.size())};
}

WilsonInterval wilson_interval(std::int64_t hits, std::int64_t n, double z) {
    if (n <= 0) throw std::invalid_argument("wilson_interval: n must be > 0");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / nn) / nn);
    return {p, std::max(0.0, center - half), std::min(1.0, center + half), se};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need matching x/y with >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

}  // namespace torusns
