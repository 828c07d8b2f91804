#pragma once

#include <functional>
#include <string>

#include "torusns/noise.hpp"
#include "torusns/transform.hpp"

namespace torusns {

enum class Scheme {
    exponential_euler,  // exact linear part, first-order explicit nonlinearity
    etd_rk2,            // Cox-Matthews two-stage exponential integrator
};

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

struct SolverConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    Scheme scheme = Scheme::exponential_euler;
    int record_stride = 1;
    bool nonlinear = true;
    double blowup_threshold = 1e6;

    void validate() const {
        if (dt <= 0.0) throw std::invalid_argument("solver: dt must be > 0");
        if (t_final <= 0.0) throw std::invalid_argument("solver: t_final must be > 0");
        if (record_stride < 1) throw std::invalid_argument("solver: record_stride must be >= 1");
    }

    std::int64_t n_steps() const { return std::llround(t_final / dt); }
};

/// Signals numerical misuse: the 2D equation is globally well-posed, so a
/// runaway H-norm means the discretization, not the model, has failed.
class BlowupError : public std::runtime_error {
  public:
    BlowupError(double t, double h_norm_value)
        : std::runtime_error("solution blew up at t = " + std::to_string(t) +
                             " (H-norm " + std::to_string(h_norm_value) + ")"),
          time(t),
          h_norm(h_norm_value) {}
    double time;
    double h_norm;
};

/// Time grid plus states; the discrete stand-in for a path in C([0,T];H).
struct DiscretePath {
    std::vector<double> times;
    std::vector<SpectralField> states;

    std::size_t size() const { return times.size(); }

    double dt() const {
        validate();
        return times[1] - times[0];
    }

    void validate() const {
        if (times.size() != states.size())
            throw std::invalid_argument("path: times/states length mismatch");
        if (times.size() < 2) throw std::invalid_argument("path: needs at least two nodes");
        const double h = times[1] - times[0];
        for (std::size_t i = 1; i < times.size(); ++i)
            if (std::abs(times[i] - times[i - 1] - h) > 1e-12)
                throw std::invalid_argument("path: time grid is not uniform");
    }
};

/// One deterministic unforced step of du + [Au + B(u)]dt = 0.
SpectralField step_unforced(const SpectralField& u, double dt, const SolverConfig& cfg,
                            FourierWorkspace& ws);

/// One deterministic step of du + [Au + B(u)]dt = phi dt with the control held
/// constant over the step.
SpectralField step_controlled(const SpectralField& u, const SpectralField& phi, double dt,
                              const SolverConfig& cfg, FourierWorkspace& ws);

/// One step of du + [Au + B(u)]dt = sqrt(eps Q) dw: exponential treatment of
/// the linear and stochastic parts (exact OU increment, same draws as
/// ou_exact_step at equal coordinates) plus the chosen scheme for B.
SpectralField step_stochastic(const SpectralField& u, const CovarianceSpec& spec, double epsilon,
                              double dt, const RngStream& rng, std::uint64_t step_index,
                              const SolverConfig& cfg, FourierWorkspace& ws);

/// Runs the stochastic flow from x0 over [0, t_final], invoking
/// on_state(step, t, u) at step 0 and after every step.
using StateCallback = std::function<void(std::int64_t, double, const SpectralField&)>;
SpectralField run_stochastic(const SpectralField& x0, const CovarianceSpec& spec, double epsilon,
                             const RngStream& rng, const SolverConfig& cfg, FourierWorkspace& ws,
                             const StateCallback& on_state = {});

/// Records every record_stride-th state (plus the initial one).
DiscretePath simulate_stochastic(const SpectralField& x0, const CovarianceSpec& spec,
                                 double epsilon, const RngStream& rng, const SolverConfig& cfg,
                                 FourierWorkspace& ws);

DiscretePath solve_unforced(const SpectralField& x0, const SolverConfig& cfg,
                            FourierWorkspace& ws);

/// Integrates du + [Au + B(u)]dt = phi_i dt with per-step controls; phi_steps
/// must have one field per step.  Every state is recorded.
DiscretePath solve_controlled(const SpectralField& x0,
                              const std::vector<SpectralField>& phi_steps,
                              double dt, const SolverConfig& cfg, FourierWorkspace& ws);

/// The map F_x of the contraction route: v solves
/// dv + Av dt + B(v + z)dt = 0, v(0) = x, on the grid of z.
/// v + z then solves the z-shifted dynamics.
DiscretePath solve_Fx(const SpectralField& x, const DiscretePath& z, const SolverConfig& cfg,
                      FourierWorkspace& ws);

/// Empirical time by which n_samples random initial conditions with
/// H-norm <= radius have decayed below lambda under the unforced flow.
/// Simulation budget is twice the linearized estimate log(radius/lambda).
double decay_time(double radius, double lambda, int n_samples, TruncationParams trunc,
                  const SolverConfig& cfg, const RngStream& rng, FourierWorkspace& ws);

}  // namespace torusns
