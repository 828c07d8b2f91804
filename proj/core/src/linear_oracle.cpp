#include "torusns/linear_oracle.hpp"

#include <algorithm>

namespace torusns {
namespace linear_oracle {

double stationary_mode_variance(const CovarianceSpec& spec, double epsilon, WaveVector k) {
    if (k.is_zero()) throw std::domain_error("stationary_mode_variance: zero wavevector");
    return epsilon * spec.sigma2(k) / (2.0 * k.norm2());
}

double energy_mean(const SpectralField& x, const CovarianceSpec& spec, double epsilon, double t) {
    double s = 0.0;
    x.for_each_mode([&](WaveVector k, Complex a) {
        const double lam = k.norm2();
        const double e2 = std::exp(-2.0 * lam * t);
        const double v = epsilon * spec.sigma2(k) / (2.0 * lam);
        s += e2 * std::norm(a) + v * (1.0 - e2);
    });
    return s;
}

double enstrophy_time_integral(const SpectralField& x, const CovarianceSpec& spec, double epsilon,
                               double t) {
    double s = 0.0;
    x.for_each_mode([&](WaveVector k, Complex a) {
        const double lam = k.norm2();
        const double ramp = (1.0 - std::exp(-2.0 * lam * t)) / (2.0 * lam);
        const double v = epsilon * spec.sigma2(k) / (2.0 * lam);
        s += lam * (std::norm(a) * ramp + v * (t - ramp));
    });
    return s;
}

double stationary_v_moment(const CovarianceSpec& spec, double epsilon, TruncationParams trunc) {
    return 0.5 * epsilon * trace_q(spec, trunc);
}

double stationary_h_moment(const CovarianceSpec& spec, double epsilon, TruncationParams trunc) {
    double s = 0.0;
    const int n = trunc.n_max;
    for (int k1 = -n; k1 <= n; ++k1)
        for (int k2 = -n; k2 <= n; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const WaveVector k{k1, k2};
            s += spec.sigma2(k) / k.norm2();
        }
    return 0.5 * epsilon * s;
}

std::vector<double> v2_exponential_weights(const CovarianceSpec& spec, double epsilon,
                                           TruncationParams trunc) {
    // ||z||_V^2 = sum over conjugate pairs of 2|k|^2 |z_k|^2, and
    // 2|k|^2 |z_k|^2 ~ eps sigma_k^2 Exp(1) in the stationary law.
    std::vector<double> w;
    const int n = trunc.n_max;
    for (int k1 = -n; k1 <= n; ++k1)
        for (int k2 = -n; k2 <= n; ++k2) {
            const WaveVector k{k1, k2};
            if (k.is_zero() || !k.is_half_lattice()) continue;
            w.push_back(epsilon * spec.sigma2(k));
        }
    std::sort(w.begin(), w.end(), std::greater<double>());
    return w;
}

double weighted_exponential_tail(const std::vector<double>& weights, double x) {
    if (weights.empty()) throw std::invalid_argument("weighted_exponential_tail: no weights");
    if (x <= 0.0) return 1.0;

    // Drop weights too small to move the tail at double precision.
    std::vector<double> w;
    const double wmax = *std::max_element(weights.begin(), weights.end());
    double wsum = 0.0;
    for (double wi : weights) {
        if (wi > 1e-9 * wmax) w.push_back(wi);
        wsum += wi;
    }

    // Gil-Pelaez: P(S > x) = 1/2 + (1/pi) integral Im[phi(t) e^{-itx}] / t dt,
    // phi(t) = prod (1 - i w t)^{-1}.
    auto integrand = [&](double t) {
        Complex phi{1.0, 0.0};
        for (double wi : w) phi /= Complex(1.0, -wi * t);
        const Complex val = phi * std::exp(Complex(0.0, -t * x));
        return val.imag() / t;
    };
    auto phi_mag2 = [&](double t) {
        double logm = 0.0;
        for (double wi : w) logm -= 0.5 * std::log1p(wi * wi * t * t);
        return logm;
    };

    const double freq = x + wsum + 1.0;
    const double h = 2.0 * M_PI / (64.0 * freq);
    const double f0 = wsum - x;  // limit of the integrand at t = 0

    double acc = 0.0;
    double comp = 0.0;
    auto add = [&](double v) {
        const double t = acc + v;
        comp += std::abs(acc) >= std::abs(v) ? (acc - t) + v : (v - t) + acc;
        acc = t;
    };

    double f_prev = f0;
    double t_prev = 0.0;
    const std::size_t max_panels = 50'000'000;
    for (std::size_t j = 1; j <= max_panels; j += 2) {
        const double tm = t_prev + h;
        const double tr = t_prev + 2.0 * h;
        const double fm = integrand(tm);
        const double fr = integrand(tr);
        add(h / 3.0 * (f_prev + 4.0 * fm + fr));
        f_prev = fr;
        t_prev = tr;
        if (phi_mag2(tr) < -40.0) break;  // |phi| < ~4e-18: remainder negligible
    }

    const double p = 0.5 + (acc + comp) / M_PI;
    return std::clamp(p, 0.0, 1.0);
}

double stationary_v_tail(const CovarianceSpec& spec, double epsilon, TruncationParams trunc,
                         double r) {
    return weighted_exponential_tail(v2_exponential_weights(spec, epsilon, trunc), r * r);
}

}  // namespace linear_oracle
}  // namespace torusns
