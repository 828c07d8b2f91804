#pragma once

#include "torusns/rng.hpp"
#include "torusns/spectral_field.hpp"

namespace torusns {

/// Diagonal covariance Q = (I + delta A^beta)^{-1} with per-mode multipliers
/// sigma_k = (1 + delta |k|^{2 beta})^{-1/2} in (0, 1].
struct CovarianceSpec {
    double beta = 3.0;
    double delta = 1.0;

    void validate() const {
        if (beta <= 0.0) throw std::invalid_argument("covariance: beta must be > 0");
        if (delta < 0.0) throw std::invalid_argument("covariance: delta must be >= 0");
    }

    double sigma(WaveVector k) const {
        return 1.0 / std::sqrt(1.0 + delta * std::pow(static_cast<double>(k.norm2()), beta));
    }
    double sigma2(WaveVector k) const {
        return 1.0 / (1.0 + delta * std::pow(static_cast<double>(k.norm2()), beta));
    }
};

/// Correlation-scale law delta(eps) = c * eps^theta, with flags for the two
/// joint-scaling hypotheses the vanishing-correlation limit needs.
struct NoiseSchedule {
    double c = 1.0;
    double theta = 1.0;

    void validate() const {
        if (c <= 0.0 || theta <= 0.0)
            throw std::invalid_argument("noise schedule: c and theta must be > 0");
    }

    double delta_of(double eps) const { return c * std::pow(eps, theta); }

    /// eps * log(1/delta(eps)) -> 0 as eps -> 0; true for any power law.
    bool log_hypothesis_ok() const { return theta > 0.0; }

    /// eps * delta(eps)^{-2/beta} -> 0 as eps -> 0; needs theta < beta/2.
    bool power_hypothesis_ok(double beta) const { return 1.0 - 2.0 * theta / beta > 0.0; }

    CovarianceSpec covariance_at(double eps, double beta) const {
        return CovarianceSpec{beta, delta_of(eps)};
    }
};

inline double sigma_k(const CovarianceSpec& spec, WaveVector k) {
    if (k.is_zero()) throw std::domain_error("sigma_k: zero wavevector");
    return spec.sigma(k);
}

/// Per-mode multiplication by sigma_k (the smoothing half of the covariance).
SpectralField apply_sqrtQ(const CovarianceSpec& spec, const SpectralField& f);

/// Truncated trace sum_k sigma_k^2 over retained modes.
double trace_q(const CovarianceSpec& spec, TruncationParams trunc);

/// Truncated sum_k |k|^2 sigma_k^2; warns when beta <= 2, where the
/// delta^{-2/beta} comparison breaks down.
double p_epsilon(const CovarianceSpec& spec, TruncationParams trunc);

struct SeriesBound {
    double series;  // sum_k 1 / (|k|^2 (1 + delta |k|^{2 beta}))
    double bound;   // (1/beta) log(1/delta) + 1/beta
};

/// Stochastic-convolution series against its logarithmic bound; requires
/// delta in (0,1), outside which the bound's derivation does not apply.
SeriesBound convolution_series_bound(const CovarianceSpec& spec, TruncationParams trunc);

/// Guard for slope fits in delta: the truncation must resolve the correlation
/// scale, delta^{-1/(2 beta)} <= n_max / 4.
bool slope_fit_delta_guard_ok(double delta, double beta, int n_max);

/// One exactly-distributed step of dz + Az dt = sqrt(eps Q) dw:
/// z_k <- e^{-|k|^2 dt} z_k + g_k with E|g_k|^2 = eps sigma_k^2 (1 - e^{-2|k|^2 dt}) / (2|k|^2),
/// conjugate pairs receiving linked draws so the field stays real.
SpectralField ou_exact_step(const SpectralField& z, const CovarianceSpec& spec, double epsilon,
                            double dt, const RngStream& rng, std::uint64_t step_index);

/// Draw from the exact stationary law of the truncated OU process,
/// per-mode variance eps sigma_k^2 / (2 |k|^2).
SpectralField ou_stationary_field(TruncationParams trunc, const CovarianceSpec& spec,
                                  double epsilon, const RngStream& rng, std::uint64_t tag);

}  // namespace torusns
