#pragma once

#include "torusns/noise.hpp"

namespace torusns {

/// Closed forms for the linear (B = 0) model: per-mode Ornstein-Uhlenbeck
/// processes with exactly known Gaussian laws.  These are the cross-check
/// oracles that gate the nonlinear Monte-Carlo runs.
namespace linear_oracle {

/// Stationary second moment E|z_k|^2 = eps sigma_k^2 / (2 |k|^2).
double stationary_mode_variance(const CovarianceSpec& spec, double epsilon, WaveVector k);

/// Transient E||u(t)||_H^2 from initial condition x:
/// sum_k [ e^{-2|k|^2 t} |x_k|^2 + eps sigma_k^2 (1 - e^{-2|k|^2 t}) / (2|k|^2) ].
double energy_mean(const SpectralField& x, const CovarianceSpec& spec, double epsilon, double t);

/// Time integral of E||u(s)||_V^2 over [0, t], per-mode in closed form.
double enstrophy_time_integral(const SpectralField& x, const CovarianceSpec& spec, double epsilon,
                               double t);

/// Stationary E||z||_V^2 = (eps/2) Tr Q.
double stationary_v_moment(const CovarianceSpec& spec, double epsilon, TruncationParams trunc);

/// Stationary E||z||_H^2 = (eps/2) sum_k sigma_k^2 / |k|^2.
double stationary_h_moment(const CovarianceSpec& spec, double epsilon, TruncationParams trunc);

/// Half-lattice weights of the stationary ||z||_V^2 law: the squared V-norm is
/// sum_i w_i E_i with E_i iid standard exponentials and w_i = eps sigma_k^2.
std::vector<double> v2_exponential_weights(const CovarianceSpec& spec, double epsilon,
                                           TruncationParams trunc);

/// P(sum w_i E_i > x) by numerical characteristic-function inversion
/// (Gil-Pelaez); exact up to quadrature for the weighted chi-square tail.
double weighted_exponential_tail(const std::vector<double>& weights, double x);

/// Stationary tail P(||z||_V > r) of the truncated linear model.
double stationary_v_tail(const CovarianceSpec& spec, double epsilon, TruncationParams trunc,
                         double r);

}  // namespace linear_oracle

}  // namespace torusns
