#pragma once

#include <map>
#include <optional>
#include <string>

#include "torusns/action.hpp"
#include "torusns/linear_oracle.hpp"
#include "torusns/stats.hpp"

namespace torusns {

/// One retained mode of a target field; the conjugate partner is implied.
struct TargetMode {
    int k1 = 0;
    int k2 = 0;
    double re = 0.0;
    double im = 0.0;
};

SpectralField build_target(TruncationParams trunc, const std::vector<TargetMode>& modes);

/// Full description of one experiment; serializing the plan pins the rerun.
struct ExperimentPlan {
    std::string kind;  // simulate|invariant|tails|ldp|oracle|energy|quasipotential|action|check
    std::vector<double> epsilon_list;
    double beta = 3.0;
    NoiseSchedule schedule;
    TruncationParams trunc = TruncationParams::with_default_grid(4);
    SolverConfig solver;
    int trajectories = 100;
    double burn_in = 1.0;
    std::vector<double> radii;
    std::vector<TargetMode> targets;
    double tolerance = 0.05;
    std::uint64_t seed = 0;
    int threads = 1;  // 0 = hardware concurrency

    void validate() const;
    CovarianceSpec covariance_at(double eps) const {
        return schedule.covariance_at(eps, beta);
    }
    SpectralField target_field() const { return build_target(trunc, targets); }
};

/// One estimated observable with its sampling error and labelling parameters.
struct ObservableRow {
    std::string observable;
    std::map<std::string, double> params;
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

struct Report {
    std::vector<ObservableRow> rows;
    std::vector<std::string> flags;
    bool ok = true;

    void add(std::string name, std::map<std::string, double> params, double est, double se,
             std::int64_t n) {
        rows.push_back({std::move(name), std::move(params), est, se, n});
    }
    const ObservableRow* find(const std::string& name,
                              const std::map<std::string, double>& params = {}) const;
};

/// Deterministic trajectory-parallel map: per-trajectory outputs are stored by
/// index and reduced in index order, so estimates do not depend on the worker
/// count or scheduling.
using TrajectoryFn = std::function<std::vector<double>(int, FourierWorkspace&)>;
std::vector<std::vector<double>> run_trajectories(int n, int threads, TruncationParams trunc,
                                                  const TrajectoryFn& fn);

/// Ito energy balance: E||u(t)||_H^2 + 2 int_0^t E||u||_V^2 ds against
/// ||x||_H^2 + t eps Tr Q, per epsilon, with Monte-Carlo confidence intervals.
Report energy_balance_check(const ExperimentPlan& plan);

/// Long-run sampler of the invariant measure: post-burn-in moments of the H
/// and V norms, histograms, ball masses at the plan radii, and a
/// non-stationarity flag when first/second half means differ by > 5 sigma.
Report ergodic_sampler(const ExperimentPlan& plan);

/// Per-epsilon estimates of nu_eps(||x||_V > R) with Wilson intervals and the
/// companion fit of -eps log p against R^2.
Report tail_probability(const ExperimentPlan& plan, const std::vector<double>& radii);

/// Per-epsilon estimates of P(||u_eps - target||_{C([0,T];H)} < delta_ball)
/// from the target's own starting point, and the rate fit against epsilon.
Report ball_probability(const ExperimentPlan& plan, const DiscretePath& target,
                        double delta_ball);

/// Spread of the per-start ball probabilities when the same control is
/// replayed from finitely many starts.
Report uniformity_probe(const ExperimentPlan& plan, const std::vector<SpectralField>& starts,
                        const ControlPath& control, double delta_ball);

/// Linear-model (B off) Monte Carlo against the Gaussian closed forms; the
/// gate that must pass before nonlinear estimates are considered meaningful.
Report linear_oracle_gate(const ExperimentPlan& plan);

/// Deterministic target path for the ldp experiment kind: the steering path
/// from the origin to the plan target (or the unforced path when no target).
DiscretePath ldp_target_path(const ExperimentPlan& plan, FourierWorkspace& ws);

/// Re-executes a plan by kind; used for record-driven reproducibility.
Report rerun(const ExperimentPlan& plan);

}  // namespace torusns
