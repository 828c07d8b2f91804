#pragma once

#include "torusns/dynamics.hpp"

namespace torusns {

/// Quadrature of (1/2) integral ||H(u)||_H^2 dt over a discrete path.
struct ActionResult {
    double value = 0.0;
    std::vector<double> integrand;  // per-step samples (1/2)||H_i||^2 at midpoints
    double dt = 0.0;
};

/// Hamiltonian H(u) = u' + Au + B(u) along a uniform-grid path, evaluated with
/// midpoint differences and midpoint-averaged states.  The returned path lives
/// on the midpoint grid.  include_nonlinearity = false drops B (the
/// Ornstein-Uhlenbeck rate function's Hamiltonian).
DiscretePath hamiltonian_of_path(const DiscretePath& u, FourierWorkspace& ws,
                                 bool include_nonlinearity = true);

/// I_T(u) = (1/2) integral ||u' + Au + B(u)||_H^2 dt.
ActionResult action_it(const DiscretePath& u, FourierWorkspace& ws);

/// J_T(z) = (1/2) integral ||z' + Az||_H^2 dt; equals action_it with B off.
ActionResult action_jt(const DiscretePath& z);

/// U(x) = ||x||_V^2, the closed-form quasipotential on the torus.  Every
/// truncated field lies in V; the H \ V branch (+infinity) has no finite
/// truncation representative, but ||x||_V^2 grows without bound under
/// truncation refinement for rough coefficient sequences.
double quasipotential_exact(const SpectralField& x);

/// Integrates v' = -Av + B(v) from v(0) = x over [0, t_final] and returns the
/// time reversal u(t) = v(T - t): a path from v(T) (near 0) to x whose action
/// telescopes to ||x||_V^2 - ||v(T)||_V^2 up to the scheme defect.
DiscretePath reversed_flow_path(const SpectralField& x, double t_final, double dt,
                                FourierWorkspace& ws);

struct MinimizeOptions {
    int max_iterations = 200;
    double relative_tolerance = 1e-9;
    bool nonlinear = true;
};

struct MinimizeResult {
    DiscretePath path;
    ActionResult action;
    bool converged = false;
    int iterations = 0;
};

/// Local minimization of the discrete action over interior nodes with
/// endpoints pinned at 0 and x_target: steepest descent with backtracking on
/// the adjoint-exact gradient.  The value never increases across iterations;
/// on hitting max_iterations the best iterate is returned with
/// converged = false.
MinimizeResult minimize_action(const SpectralField& x_target, double t_final, int n_nodes,
                               const DiscretePath& init, FourierWorkspace& ws,
                               const MinimizeOptions& opts = {});

/// Control realizing the quasipotential lower-bound construction: free decay
/// on [0, t_free], then the extracted steering force on the tail grid.
struct ControlPath {
    double dt = 0.0;
    double t_free = 0.0;                // uncontrolled stretch, zero forcing
    std::vector<SpectralField> values;  // per-step forcing after t_free
    double cost = 0.0;                  // (1/2) integral ||phi||_H^2 dt

    double total_time() const {
        return dt * static_cast<double>(std::llround(t_free / dt) +
                                        static_cast<long long>(values.size()));
    }

    /// Per-step forcing list over the whole horizon (zeros then values).
    std::vector<SpectralField> step_forcings(TruncationParams trunc) const;
};

/// Builds the two-phase control: wait T1 for the free decay, then steer along
/// the reversed-flow path to x.  The steering force is the midpoint
/// Hamiltonian of that path, so the cost telescopes to
/// ||x||_V^2 - ||v(T2)||_V^2.  The construction is verified by replaying from
/// the origin; a final distance above replay_tolerance throws.
ControlPath control_for_target(const SpectralField& x, double lambda, double t1, double t2,
                               const SolverConfig& cfg, FourierWorkspace& ws,
                               double replay_tolerance = 0.1);

/// Replays a control through the deterministic solver from `start`.
DiscretePath replay_control(const SpectralField& start, const ControlPath& control,
                            const SolverConfig& cfg, FourierWorkspace& ws);

}  // namespace torusns
