#include "torusns/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace torusns {

SpectralField build_target(TruncationParams trunc, const std::vector<TargetMode>& modes) {
    SpectralField x(trunc);
    for (const TargetMode& m : modes) {
        const WaveVector k{m.k1, m.k2};
        if (k.is_zero()) throw std::invalid_argument("target: zero wavevector");
        if (std::abs(m.k1) > trunc.n_max || std::abs(m.k2) > trunc.n_max)
            throw std::invalid_argument("target: mode outside truncation");
        x.set_pair(k, Complex(m.re, m.im));
    }
    return x;
}

void ExperimentPlan::validate() const {
    trunc.validate();
    solver.validate();
    schedule.validate();
    if (beta <= 0.0) throw std::invalid_argument("plan: beta must be > 0");
    if (epsilon_list.empty()) throw std::invalid_argument("plan: epsilon_list is empty");
    for (double e : epsilon_list)
        if (e <= 0.0) throw std::invalid_argument("plan: epsilon must be > 0");
    for (std::size_t i = 1; i < epsilon_list.size(); ++i)
        if (epsilon_list[i] >= epsilon_list[i - 1])
            throw std::invalid_argument("plan: epsilon_list must be strictly decreasing");
    if (trajectories < 1) throw std::invalid_argument("plan: trajectories must be >= 1");
    if (burn_in < 0.0) throw std::invalid_argument("plan: burn_in must be >= 0");
    if (burn_in >= solver.t_final && kind != "simulate" && kind != "energy")
        throw std::invalid_argument("plan: burn_in must be < t_final");
    if (threads < 0) throw std::invalid_argument("plan: threads must be >= 0");
    for (double r : radii)
        if (r <= 0.0) throw std::invalid_argument("plan: radii must be > 0");
}

const ObservableRow* Report::find(const std::string& name,
                                  const std::map<std::string, double>& params) const {
    for (const auto& r : rows) {
        if (r.observable != name) continue;
        bool match = true;
        for (const auto& [k, v] : params) {
            auto it = r.params.find(k);
            if (it == r.params.end() || it->second != v) {
                match = false;
                break;
            }
        }
        if (match) return &r;
    }
    return nullptr;
}

std::vector<std::vector<double>> run_trajectories(int n, int threads, TruncationParams trunc,
                                                  const TrajectoryFn& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));

    std::vector<std::vector<double>> results(static_cast<std::size_t>(n));
    if (threads == 1) {
        FourierWorkspace ws(trunc);
        for (int i = 0; i < n; ++i) results[static_cast<std::size_t>(i)] = fn(i, ws);
        return results;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        FourierWorkspace ws(trunc);
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                results[static_cast<std::size_t>(i)] = fn(i, ws);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

namespace {

void add_schedule_flags(Report& rep, const ExperimentPlan& plan) {
    rep.flags.push_back(std::string("schedule eps*log(1/delta)->0: ") +
                        (plan.schedule.log_hypothesis_ok() ? "holds" : "fails"));
    rep.flags.push_back(std::string("schedule eps*delta^(-2/beta)->0: ") +
                        (plan.schedule.power_hypothesis_ok(plan.beta) ? "holds" : "fails"));
}

Estimate column_mean(const std::vector<std::vector<double>>& rows, std::size_t col) {
    std::vector<double> vals;
    vals.reserve(rows.size());
    for (const auto& r : rows) vals.push_back(r.at(col));
    return mean_estimate(vals);
}

std::uint64_t trajectory_id(std::size_t eps_index, int trajectories, int traj) {
    return static_cast<std::uint64_t>(eps_index) * static_cast<std::uint64_t>(trajectories) + traj;
}

}  // namespace

Report energy_balance_check(const ExperimentPlan& plan) {
    plan.validate();
    Report rep;
    add_schedule_flags(rep, plan);
    const SpectralField x0 = plan.target_field();
    const double t = plan.solver.t_final;

    for (std::size_t ei = 0; ei < plan.epsilon_list.size(); ++ei) {
        const double eps = plan.epsilon_list[ei];
        const CovarianceSpec cov = plan.covariance_at(eps);
        const double rhs =
            inner_h(x0, x0) + t * eps * trace_q(cov, plan.trunc);

        auto traj_fn = [&](int traj, FourierWorkspace& ws) -> std::vector<double> {
            const RngStream rng(plan.seed, trajectory_id(ei, plan.trajectories, traj));
            KahanSum v2_integral;
            double prev_v2 = 0.0;
            double final_h2 = 0.0;
            run_stochastic(x0, cov, eps, rng, plan.solver, ws,
                           [&](std::int64_t step, double, const SpectralField& u) {
                               const double v = norm_v(u);
                               const double v2 = v * v;
                               if (step > 0) v2_integral.add(0.5 * plan.solver.dt * (prev_v2 + v2));
                               prev_v2 = v2;
                               if (step == plan.solver.n_steps()) {
                                   const double h = norm_h(u);
                                   final_h2 = h * h;
                               }
                           });
            return {final_h2 + 2.0 * v2_integral.value(), final_h2};
        };
        const auto rows = run_trajectories(plan.trajectories, plan.threads, plan.trunc, traj_fn);

        const Estimate lhs = column_mean(rows, 0);
        const Estimate energy = column_mean(rows, 1);
        rep.add("ito_lhs", {{"epsilon", eps}, {"t", t}}, lhs.value, lhs.std_error, lhs.n_samples);
        rep.add("ito_rhs", {{"epsilon", eps}, {"t", t}}, rhs, 0.0, 0);
        const double rel = std::abs(lhs.value - rhs) / rhs;
        rep.add("ito_rel_discrepancy", {{"epsilon", eps}, {"t", t}}, rel, lhs.std_error / rhs,
                lhs.n_samples);
        if (3.0 * lhs.std_error / rhs > 0.05) {
            rep.flags.push_back("ito balance at eps=" + std::to_string(eps) +
                                ": interval wider than 5%, add trajectories");
        }
        if (!plan.solver.nonlinear) {
            const double oracle = linear_oracle::energy_mean(x0, cov, eps, t);
            const double z = std::abs(energy.value - oracle) /
                             std::max(energy.std_error, 1e-300);
            rep.add("ito_energy_mc", {{"epsilon", eps}, {"t", t}}, energy.value,
                    energy.std_error, energy.n_samples);
            rep.add("ito_energy_oracle", {{"epsilon", eps}, {"t", t}}, oracle, 0.0, 0);
            rep.add("ito_energy_zscore", {{"epsilon", eps}, {"t", t}}, z, 0.0, energy.n_samples);
            if (z > 3.0) rep.ok = false;
        }
    }
    return rep;
}

Report ergodic_sampler(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.burn_in >= plan.solver.t_final)
        throw std::invalid_argument("ergodic_sampler: burn_in must be < t_final");
    Report rep;
    add_schedule_flags(rep, plan);

    constexpr int kBins = 32;
    double sup_v2 = 0.0;

    for (std::size_t ei = 0; ei < plan.epsilon_list.size(); ++ei) {
        const double eps = plan.epsilon_list[ei];
        const CovarianceSpec cov = plan.covariance_at(eps);

        // Fixed bin edges from the Gaussian scale, so reruns bin identically.
        const double v_scale = std::sqrt(linear_oracle::stationary_v_moment(cov, eps, plan.trunc));
        const double h_scale = std::sqrt(linear_oracle::stationary_h_moment(cov, eps, plan.trunc));
        const double v_hi = 6.0 * v_scale;
        const double h_hi = 6.0 * h_scale;
        const double half_time = 0.5 * (plan.burn_in + plan.solver.t_final);

        // Slots: n, sum h2, sum v2, first-half n, first-half v2,
        //        ball hits per radius, h-histogram, v-histogram.
        const std::size_t n_radii = plan.radii.size();
        const std::size_t slots = 5 + n_radii + 2 * kBins;
        auto accumulate = [&](std::vector<double>& acc, const SpectralField& u) {
            const double h = norm_h(u);
            const double v = norm_v(u);
            acc[0] += 1.0;
            acc[1] += h * h;
            acc[2] += v * v;
            for (std::size_t r = 0; r < n_radii; ++r)
                if (h < plan.radii[r]) acc[5 + r] += 1.0;
            const int hb = std::min(kBins - 1, static_cast<int>(h / h_hi * kBins));
            const int vb = std::min(kBins - 1, static_cast<int>(v / v_hi * kBins));
            acc[5 + n_radii + hb] += 1.0;
            acc[5 + n_radii + kBins + vb] += 1.0;
        };
        // First-half accumulation needs the time; wrap the plain collector.
        auto traj_fn = [&](int traj, FourierWorkspace& ws) -> std::vector<double> {
            const RngStream rng(plan.seed, trajectory_id(ei, plan.trajectories, traj));
            SpectralField start = plan.solver.nonlinear
                                      ? SpectralField(plan.trunc)
                                      : ou_stationary_field(plan.trunc, cov, eps, rng, 0);
            std::vector<double> acc(slots, 0.0);
            run_stochastic(start, cov, eps, rng, plan.solver, ws,
                           [&](std::int64_t step, double t, const SpectralField& u) {
                               if (t <= plan.burn_in) return;
                               if (step % plan.solver.record_stride != 0) return;
                               accumulate(acc, u);
                               if (t <= half_time) {
                                   acc[3] += 1.0;
                                   const double v = norm_v(u);
                                   acc[4] += v * v;
                               }
                           });
            return acc;
        };
        const auto rows = run_trajectories(plan.trajectories, plan.threads, plan.trunc, traj_fn);

        // Per-trajectory time averages, then replica statistics.
        std::vector<double> h2_means, v2_means, first_means, second_means;
        double total_snapshots = 0.0;
        for (const auto& r : rows) {
            const double n = r[0];
            if (n <= 0.0) throw std::runtime_error("ergodic_sampler: no post-burn-in snapshots");
            total_snapshots += n;
            h2_means.push_back(r[1] / n);
            v2_means.push_back(r[2] / n);
            const double n1 = r[3];
            if (n1 > 0.0 && n - n1 > 0.0) {
                first_means.push_back(r[4] / n1);
                second_means.push_back((r[2] - r[4]) / (n - n1));
            }
        }
        const Estimate h2 = mean_estimate(h2_means);
        const Estimate v2 = mean_estimate(v2_means);
        rep.add("invariant_h2_moment", {{"epsilon", eps}}, h2.value, h2.std_error,
                static_cast<std::int64_t>(total_snapshots));
        rep.add("invariant_v2_moment", {{"epsilon", eps}}, v2.value, v2.std_error,
                static_cast<std::int64_t>(total_snapshots));
        sup_v2 = std::max(sup_v2, v2.value);

        if (!first_means.empty()) {
            const Estimate e1 = mean_estimate(first_means);
            const Estimate e2 = mean_estimate(second_means);
            const double sigma = std::hypot(e1.std_error, e2.std_error);
            if (sigma > 0.0 && std::abs(e1.value - e2.value) > 5.0 * sigma) {
                rep.flags.push_back("non-stationarity at eps=" + std::to_string(eps) +
                                    ": half means differ by " +
                                    std::to_string(std::abs(e1.value - e2.value) / sigma) +
                                    " sigma");
                rep.ok = false;
            }
        }

        for (std::size_t r = 0; r < n_radii; ++r) {
            std::vector<double> fractions;
            for (const auto& row : rows) fractions.push_back(row[5 + r] / row[0]);
            const Estimate m = mean_estimate(fractions);
            rep.add("mass_in_h_ball", {{"epsilon", eps}, {"R", plan.radii[r]}}, m.value,
                    m.std_error, static_cast<std::int64_t>(total_snapshots));
        }

        for (int b = 0; b < kBins; ++b) {
            double hc = 0.0, vc = 0.0;
            for (const auto& row : rows) {
                hc += row[5 + n_radii + b];
                vc += row[5 + n_radii + kBins + b];
            }
            rep.add("hist_h_norm",
                    {{"epsilon", eps},
                     {"bin_lo", b * h_hi / kBins},
                     {"bin_hi", (b + 1) * h_hi / kBins}},
                    hc / total_snapshots, 0.0, static_cast<std::int64_t>(total_snapshots));
            rep.add("hist_v_norm",
                    {{"epsilon", eps},
                     {"bin_lo", b * v_hi / kBins},
                     {"bin_hi", (b + 1) * v_hi / kBins}},
                    vc / total_snapshots, 0.0, static_cast<std::int64_t>(total_snapshots));
        }

        if (!plan.solver.nonlinear) {
            const double oracle = linear_oracle::stationary_v_moment(cov, eps, plan.trunc);
            const double z = std::abs(v2.value - oracle) / std::max(v2.std_error, 1e-300);
            rep.add("invariant_v2_oracle", {{"epsilon", eps}}, oracle, 0.0, 0);
            rep.add("invariant_v2_zscore", {{"epsilon", eps}}, z, 0.0, v2.n_samples);
            if (z > 3.0) rep.ok = false;
        }
    }
    rep.add("invariant_v2_sup_over_eps", {}, sup_v2, 0.0, 0);
    return rep;
}

Report tail_probability(const ExperimentPlan& plan, const std::vector<double>& radii) {
    plan.validate();
    if (radii.empty()) throw std::invalid_argument("tail_probability: no radii");
    Report rep;
    add_schedule_flags(rep, plan);

    for (std::size_t ei = 0; ei < plan.epsilon_list.size(); ++ei) {
        const double eps = plan.epsilon_list[ei];
        const CovarianceSpec cov = plan.covariance_at(eps);

        const std::size_t slots = 1 + radii.size();
        auto traj_fn = [&](int traj, FourierWorkspace& ws) -> std::vector<double> {
            const RngStream rng(plan.seed, trajectory_id(ei, plan.trajectories, traj));
            SpectralField start = plan.solver.nonlinear
                                      ? SpectralField(plan.trunc)
                                      : ou_stationary_field(plan.trunc, cov, eps, rng, 0);
            std::vector<double> acc(slots, 0.0);
            run_stochastic(start, cov, eps, rng, plan.solver, ws,
                           [&](std::int64_t step, double t, const SpectralField& u) {
                               if (t <= plan.burn_in) return;
                               if (step % plan.solver.record_stride != 0) return;
                               acc[0] += 1.0;
                               const double v = norm_v(u);
                               for (std::size_t r = 0; r < radii.size(); ++r)
                                   if (v > radii[r]) acc[1 + r] += 1.0;
                           });
            return acc;
        };
        const auto rows = run_trajectories(plan.trajectories, plan.threads, plan.trunc, traj_fn);

        double total = 0.0;
        for (const auto& r : rows) total += r[0];

        std::vector<double> r2_list, neg_log_list;
        for (std::size_t r = 0; r < radii.size(); ++r) {
            std::vector<double> fractions;
            double hits = 0.0;
            for (const auto& row : rows) {
                fractions.push_back(row[1 + r] / row[0]);
                hits += row[1 + r];
            }
            const Estimate frac = mean_estimate(fractions);
            const WilsonInterval wi =
                wilson_interval(static_cast<std::int64_t>(hits), static_cast<std::int64_t>(total));
            const double R = radii[r];

            if (hits == 0.0) {
                rep.add("tail_prob_upper_bound", {{"epsilon", eps}, {"R", R}}, wi.upper, 0.0,
                        static_cast<std::int64_t>(total));
                rep.flags.push_back("tails: zero hits at eps=" + std::to_string(eps) +
                                    ", R=" + std::to_string(R) + "; upper bound reported");
                continue;
            }
            if (hits < 10.0)
                rep.flags.push_back("tails: expected count < 10 at eps=" + std::to_string(eps) +
                                    ", R=" + std::to_string(R));

            rep.add("tail_prob", {{"epsilon", eps}, {"R", R}}, frac.value, frac.std_error,
                    static_cast<std::int64_t>(total));
            rep.add("tail_wilson_lo", {{"epsilon", eps}, {"R", R}}, wi.lower, 0.0,
                    static_cast<std::int64_t>(total));
            rep.add("tail_wilson_hi", {{"epsilon", eps}, {"R", R}}, wi.upper, 0.0,
                    static_cast<std::int64_t>(total));
            const double neg_log = -eps * std::log(frac.value);
            rep.add("neg_eps_log_tail", {{"epsilon", eps}, {"R", R}, {"R2", R * R}}, neg_log,
                    eps * frac.std_error / frac.value, static_cast<std::int64_t>(total));
            r2_list.push_back(R * R);
            neg_log_list.push_back(neg_log);

            if (!plan.solver.nonlinear) {
                const double oracle = linear_oracle::stationary_v_tail(cov, eps, plan.trunc, R);
                const double z = std::abs(frac.value - oracle) / std::max(frac.std_error, 1e-300);
                rep.add("tail_prob_oracle", {{"epsilon", eps}, {"R", R}}, oracle, 0.0, 0);
                rep.add("tail_prob_zscore", {{"epsilon", eps}, {"R", R}}, z, 0.0,
                        static_cast<std::int64_t>(total));
                if (z > 3.0) rep.ok = false;
            }
        }
        if (r2_list.size() >= 2) {
            const LineFit fit = fit_line(r2_list, neg_log_list);
            rep.add("tail_r2_slope", {{"epsilon", eps}}, fit.slope, 0.0,
                    static_cast<std::int64_t>(r2_list.size()));
            rep.add("tail_r2_intercept", {{"epsilon", eps}}, fit.intercept, 0.0,
                    static_cast<std::int64_t>(r2_list.size()));
        }
    }
    return rep;
}

namespace {

// Shared core of ball_probability / uniformity_probe for one start+target.
struct BallEstimates {
    std::vector<double> p_hat, se;  // per epsilon; p_hat = -1 marks censored
};

BallEstimates ball_probability_core(const ExperimentPlan& plan, const SpectralField& start,
                                    const DiscretePath& target, double delta_ball,
                                    std::uint64_t traj_offset, Report* rep,
                                    const std::map<std::string, double>& extra) {
    target.validate();
    if (std::abs(target.dt() - plan.solver.dt * plan.solver.record_stride) > 1e-12)
        throw std::invalid_argument("ball_probability: target grid must match solver recording");
    BallEstimates out;
    for (std::size_t ei = 0; ei < plan.epsilon_list.size(); ++ei) {
        const double eps = plan.epsilon_list[ei];
        const CovarianceSpec cov = plan.covariance_at(eps);
        auto traj_fn = [&](int traj, FourierWorkspace& ws) -> std::vector<double> {
            const RngStream rng(plan.seed, traj_offset + trajectory_id(ei, plan.trajectories,
                                                                       traj));
            double sup = 0.0;
            std::size_t node = 0;
            run_stochastic(start, cov, eps, rng, plan.solver, ws,
                           [&](std::int64_t step, double, const SpectralField& u) {
                               if (step % plan.solver.record_stride != 0) return;
                               if (node < target.size())
                                   sup = std::max(sup, norm_h(u - target.states[node]));
                               ++node;
                           });
            return {sup < delta_ball ? 1.0 : 0.0};
        };
        const auto rows = run_trajectories(plan.trajectories, plan.threads, plan.trunc, traj_fn);
        double hits = 0.0;
        for (const auto& r : rows) hits += r[0];
        const auto n = static_cast<std::int64_t>(rows.size());
        const WilsonInterval wi = wilson_interval(static_cast<std::int64_t>(hits), n);
        std::map<std::string, double> params = extra;
        params["epsilon"] = eps;
        params["delta"] = delta_ball;
        if (hits == 0.0) {
            out.p_hat.push_back(-1.0);
            out.se.push_back(0.0);
            if (rep) {
                rep->add("ball_prob_upper_bound", params, wi.upper, 0.0, n);
                rep->flags.push_back("ball: zero hits at eps=" + std::to_string(eps) +
                                     "; censored");
            }
            continue;
        }
        out.p_hat.push_back(wi.p_hat);
        out.se.push_back(wi.std_error);
        if (rep) {
            rep->add("ball_prob", params, wi.p_hat, wi.std_error, n);
            rep->add("neg_eps_log_ball", params, -eps * std::log(wi.p_hat),
                     eps * wi.std_error / wi.p_hat, n);
        }
    }
    return out;
}

}  // namespace

Report ball_probability(const ExperimentPlan& plan, const DiscretePath& target,
                        double delta_ball) {
    plan.validate();
    if (delta_ball <= 0.0) throw std::invalid_argument("ball_probability: delta must be > 0");
    Report rep;
    add_schedule_flags(rep, plan);

    {
        FourierWorkspace ws(plan.trunc);
        const ActionResult act = action_it(target, ws);
        rep.add("target_action", {}, act.value, 0.0, 0);
    }

    const BallEstimates est =
        ball_probability_core(plan, target.states.front(), target, delta_ball, 0, &rep, {});

    std::vector<double> eps_pts, rate_pts;
    for (std::size_t i = 0; i < plan.epsilon_list.size(); ++i) {
        if (est.p_hat[i] < 0.0) continue;
        eps_pts.push_back(plan.epsilon_list[i]);
        rate_pts.push_back(-plan.epsilon_list[i] * std::log(est.p_hat[i]));
    }
    if (eps_pts.size() >= 2) {
        const LineFit fit = fit_line(eps_pts, rate_pts);
        rep.add("ball_rate_intercept", {}, fit.intercept, 0.0,
                static_cast<std::int64_t>(eps_pts.size()));
        rep.add("ball_rate_slope", {}, fit.slope, 0.0, static_cast<std::int64_t>(eps_pts.size()));
    }

    if (!plan.solver.nonlinear) {
        // Oversampled oracle: same linear model at 10x trajectories on a
        // disjoint stream range.
        ExperimentPlan oracle_plan = plan;
        oracle_plan.trajectories = plan.trajectories * 10;
        Report oracle_rep;
        const BallEstimates oracle =
            ball_probability_core(oracle_plan, target.states.front(), target, delta_ball,
                                  std::uint64_t{1} << 40, &oracle_rep, {});
        for (std::size_t i = 0; i < plan.epsilon_list.size(); ++i) {
            if (est.p_hat[i] < 0.0 || oracle.p_hat[i] < 0.0) continue;
            const double eps = plan.epsilon_list[i];
            const double sigma = std::hypot(est.se[i], oracle.se[i]);
            const double z = std::abs(est.p_hat[i] - oracle.p_hat[i]) / std::max(sigma, 1e-300);
            rep.add("ball_prob_oracle", {{"epsilon", eps}}, oracle.p_hat[i], oracle.se[i],
                    oracle_plan.trajectories);
            rep.add("ball_prob_zscore", {{"epsilon", eps}}, z, 0.0, plan.trajectories);
            if (z > 3.0) rep.ok = false;
        }
    }
    return rep;
}

Report uniformity_probe(const ExperimentPlan& plan, const std::vector<SpectralField>& starts,
                        const ControlPath& control, double delta_ball) {
    plan.validate();
    if (starts.empty()) throw std::invalid_argument("uniformity_probe: no starts");
    Report rep;
    add_schedule_flags(rep, plan);

    FourierWorkspace ws(plan.trunc);
    std::vector<std::vector<double>> rates(plan.epsilon_list.size());
    for (std::size_t s = 0; s < starts.size(); ++s) {
        // Shared control, per-start reference path.
        DiscretePath ref = replay_control(starts[s], control, plan.solver, ws);
        if (plan.solver.record_stride > 1) {
            DiscretePath thin;
            for (std::size_t i = 0; i < ref.size(); i += plan.solver.record_stride) {
                thin.times.push_back(ref.times[i]);
                thin.states.push_back(ref.states[i]);
            }
            ref = std::move(thin);
        }
        ExperimentPlan sub = plan;
        sub.solver.t_final = control.total_time();
        const BallEstimates est = ball_probability_core(
            sub, starts[s], ref, delta_ball, (std::uint64_t{2} << 40) * (s + 1), &rep,
            {{"start", static_cast<double>(s)}});
        for (std::size_t i = 0; i < est.p_hat.size(); ++i)
            if (est.p_hat[i] > 0.0)
                rates[i].push_back(-plan.epsilon_list[i] * std::log(est.p_hat[i]));
    }
    for (std::size_t i = 0; i < plan.epsilon_list.size(); ++i) {
        if (rates[i].size() < 2) continue;
        const auto [lo, hi] = std::minmax_element(rates[i].begin(), rates[i].end());
        rep.add("uniformity_rate_spread", {{"epsilon", plan.epsilon_list[i]}}, *hi - *lo, 0.0,
                static_cast<std::int64_t>(rates[i].size()));
    }
    return rep;
}

Report linear_oracle_gate(const ExperimentPlan& plan) {
    ExperimentPlan linear = plan;
    linear.solver.nonlinear = false;
    Report rep;
    add_schedule_flags(rep, plan);

    Report energy = energy_balance_check(linear);
    Report inv = ergodic_sampler(linear);
    std::vector<double> radii = plan.radii;
    if (radii.empty()) {
        const CovarianceSpec cov = plan.covariance_at(plan.epsilon_list.front());
        radii = {1.5 * std::sqrt(linear_oracle::stationary_v_moment(
                            cov, plan.epsilon_list.front(), plan.trunc))};
    }
    Report tails = tail_probability(linear, radii);

    rep.ok = energy.ok && inv.ok && tails.ok;
    for (Report* part : {&energy, &inv, &tails}) {
        for (auto& r : part->rows) rep.rows.push_back(std::move(r));
        for (auto& f : part->flags) rep.flags.push_back(std::move(f));
    }
    rep.flags.push_back(std::string("linear oracle gate: ") + (rep.ok ? "pass" : "FAIL"));
    return rep;
}

DiscretePath ldp_target_path(const ExperimentPlan& plan, FourierWorkspace& ws) {
    SolverConfig cfg = plan.solver;
    cfg.record_stride = 1;
    if (plan.targets.empty()) {
        // No target: the unforced path from a deterministic random start.
        const SpectralField x0 =
            random_field_with_norm(plan.trunc, RngStream(plan.seed, 0), /*tag=*/999, 0.5);
        DiscretePath p = solve_unforced(x0, cfg, ws);
        return p;
    }
    const SpectralField x = plan.target_field();
    const ControlPath control =
        control_for_target(x, /*lambda=*/0.01, /*t1=*/0.0, /*t2=*/cfg.t_final, cfg, ws,
                           /*replay_tolerance=*/0.1);
    return replay_control(SpectralField(plan.trunc), control, cfg, ws);
}

Report rerun(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.kind == "energy") return energy_balance_check(plan);
    if (plan.kind == "invariant") return ergodic_sampler(plan);
    if (plan.kind == "tails") return tail_probability(plan, plan.radii);
    if (plan.kind == "oracle") return linear_oracle_gate(plan);
    if (plan.kind == "ldp") {
        FourierWorkspace ws(plan.trunc);
        ExperimentPlan sub = plan;
        sub.solver.record_stride = 1;
        const DiscretePath target = ldp_target_path(plan, ws);
        const double delta_ball = plan.radii.empty() ? 0.3 : plan.radii.front();
        return ball_probability(sub, target, delta_ball);
    }
    throw std::invalid_argument("rerun: unsupported kind '" + plan.kind + "'");
}

}  // namespace torusns
