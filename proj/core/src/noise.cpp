#include "torusns/noise.hpp"

#include <iostream>

namespace torusns {

SpectralField apply_sqrtQ(const CovarianceSpec& spec, const SpectralField& f) {
    SpectralField out = f;
    out.for_each_mode([&](WaveVector k, Complex& a) { a *= spec.sigma(k); });
    return out;
}

double trace_q(const CovarianceSpec& spec, TruncationParams trunc) {
    double s = 0.0;
    const int n = trunc.n_max;
    for (int k1 = -n; k1 <= n; ++k1)
        for (int k2 = -n; k2 <= n; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            s += spec.sigma2({k1, k2});
        }
    return s;
}

double p_epsilon(const CovarianceSpec& spec, TruncationParams trunc) {
    if (spec.beta <= 2.0)
        std::cerr << "warning: p_epsilon with beta = " << spec.beta
                  << " <= 2; the delta^{-2/beta} comparison does not apply\n";
    double s = 0.0;
    const int n = trunc.n_max;
    for (int k1 = -n; k1 <= n; ++k1)
        for (int k2 = -n; k2 <= n; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const WaveVector k{k1, k2};
            s += k.norm2() * spec.sigma2(k);
        }
    return s;
}

SeriesBound convolution_series_bound(const CovarianceSpec& spec, TruncationParams trunc) {
    if (spec.delta <= 0.0 || spec.delta >= 1.0)
        throw std::domain_error("convolution_series_bound: requires delta in (0,1)");
    double s = 0.0;
    const int n = trunc.n_max;
    for (int k1 = -n; k1 <= n; ++k1)
        for (int k2 = -n; k2 <= n; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const WaveVector k{k1, k2};
            const double m2 = k.norm2();
            s += 1.0 / (m2 * (1.0 + spec.delta * std::pow(m2, spec.beta)));
        }
    const double bound = (std::log(1.0 / spec.delta) + 1.0) / spec.beta;
    return {s, bound};
}

bool slope_fit_delta_guard_ok(double delta, double beta, int n_max) {
    return std::pow(delta, -1.0 / (2.0 * beta)) <= n_max / 4.0;
}

SpectralField ou_exact_step(const SpectralField& z, const CovarianceSpec& spec, double epsilon,
                            double dt, const RngStream& rng, std::uint64_t step_index) {
    if (dt <= 0.0) throw std::invalid_argument("ou_exact_step: dt must be > 0");
    SpectralField out = z;
    out.for_each_mode([&](WaveVector k, Complex& a) {
        if (!k.is_half_lattice()) return;
        const double lam = k.norm2();
        const double decay = std::exp(-lam * dt);
        const double var =
            epsilon * spec.sigma2(k) * (-std::expm1(-2.0 * lam * dt)) / (2.0 * lam);
        Complex g{0.0, 0.0};
        if (var > 0.0) {
            const auto slot = static_cast<std::uint32_t>(out.index(k));
            const auto [g1, g2] =
                rng.gaussian_pair(RngStream::Domain::ou_noise, step_index, slot);
            g = Complex(g1, g2) * std::sqrt(var / 2.0);
        }
        const Complex next = decay * a + g;
        a = next;
        out.set(k.negated(), -std::conj(next));
    });
    return out;
}

SpectralField ou_stationary_field(TruncationParams trunc, const CovarianceSpec& spec,
                                  double epsilon, const RngStream& rng, std::uint64_t tag) {
    SpectralField z(trunc);
    z.for_each_mode([&](WaveVector k, Complex&) {
        if (!k.is_half_lattice()) return;
        const double var = epsilon * spec.sigma2(k) / (2.0 * k.norm2());
        const auto slot = static_cast<std::uint32_t>(z.index(k));
        const auto [g1, g2] = rng.gaussian_pair(RngStream::Domain::initial_condition, tag, slot);
        z.set_pair(k, Complex(g1, g2) * std::sqrt(var / 2.0));
    });
    return z;
}

}  // namespace torusns
