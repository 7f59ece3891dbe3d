#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "cmdplab/cmdp.hpp"
#include "cmdplab/estimator.hpp"
#include "cmdplab/rng.hpp"

namespace cmdplab {

/// Nonnegative Lagrange multipliers; the projection cap depends on the
/// episode's tau, so it is passed at update time.
struct DualVector {
    std::vector<double> lambda;

    static DualVector zeros(int num_constraints) {
        return DualVector{std::vector<double>(num_constraints, 0.0)};
    }
};

/// eta_k = (k+3)^(-alpha_eta), tau_k = (k+3)^(-alpha_tau), k starting at 1.
struct Schedule {
    double alpha_eta = 0.53;
    double alpha_tau = 0.4;
    double delta = 0.1;

    double eta(long k) const;
    double tau(long k) const;
    /// Validates alpha_eta in (0.5,1), alpha_tau in (0,0.5), their sum < 1,
    /// delta in (0,1].
    void validate() const;

    static Schedule experiment_preset() { return {0.53, 0.4, 0.1}; }
    static Schedule corollary_preset() { return {11.0 / 14.0, 1.0 / 7.0, 0.1}; }
};

enum class VariantTag {
    UOptRPGPD,
    NoRegularization,  // tau_k forced to 0
    NoUPACBonus,       // naive bonus with a fixed episode budget
    NoAdjustment,      // constant eta and tau
    NaivePrimalDual,
};

struct AlgoVariant {
    VariantTag tag = VariantTag::UOptRPGPD;
    std::int64_t naive_budget = 100000;  // K for naive-bonus users
    double fixed_eta = 0.1;              // NoAdjustment / NaivePrimalDual
    double fixed_tau = 0.1;              // NoAdjustment

    std::string name() const;
};

/// Algorithm 3 style optimistic evaluation under the empirical kernel:
///   q_h = r_h + (1 + tau ln A) H beta_h + Pbar_h V_{h+1}
///   Q_h = min{q_h, (1 + tau ln A)(H-h+1)}
///   V_h = pi_h (Q_h - tau ln pi_h)
ValueTables eval_policy_optimistic(const std::vector<double>& reward,
                                   const BonusTable& beta, const EmpiricalModel& model,
                                   const Policy& policy, double tau);

/// Same pass with the true kernel in place of the empirical one (test and
/// oracle use).
ValueTables eval_policy_optimistic_true_kernel(const std::vector<double>& reward,
                                               const BonusTable& beta,
                                               const TabularCmdp& cmdp,
                                               const Policy& policy, double tau);

/// Q = Q^0 + sum_n lambda_n Q^n, entrywise.
std::vector<double> combined_q(const ValueTables& q0, const std::vector<ValueTables>& qn,
                               const DualVector& lambda);

/// pi'(.|x) proportional to pi(.|x)^(1 - eta tau) exp(eta Q(x,.)), computed in
/// log space with per-row max subtraction.
Policy policy_mirror_step(const Policy& policy, const std::vector<double>& q, double eta,
                          double tau);

/// lambda_n <- clip(lambda_n + eta (b_n - v_n - tau lambda_n), 0, H(1+tau ln A)/gap).
DualVector lagrange_step(const DualVector& lambda, const std::vector<double>& v_constraints,
                         const std::vector<double>& thresholds, double eta, double tau,
                         double slater_gap, int num_actions, int horizon);

/// Per-episode record captured by a metrics sink. True-model quantities are
/// instrumentation only; the learner never sees them.
struct EpisodeRecord {
    long episode = 0;
    double opt_gap = 0.0;
    double violation = 0.0;
    bool has_gaps = false;
    double optimistic_v0 = 0.0;  // V~^{k,0}_1(x1), for diagnostics
    std::vector<double> lambda;
    double eta = 0.0;
    double tau = 0.0;
};

using MetricsSink = std::function<void(const EpisodeRecord&)>;

/// Stepwise primal-dual runner covering UOpt-RPGPD, its ablations, and the
/// naive baseline; exposes its full state for exact checkpoint-resume.
class PrimalDualRunner {
public:
    PrimalDualRunner(const TabularCmdp& cmdp, Schedule schedule, double slater_gap,
                     AlgoVariant variant, std::uint64_t seed, double bonus_scale = 1.0);

    /// Runs one episode: bonus, EvalPolicy per reward, combined Q, mirror
    /// step, dual step, rollout, count update. Returns the record for the
    /// policy in force at this episode. Gaps are measured under the true
    /// kernel against set_reference's V*; pass with_gaps = false on thinned
    /// episodes to skip the exact evaluations.
    EpisodeRecord step(bool with_gaps = true);

    /// Supplies the oracle's V* so records carry true gaps.
    void set_reference(double v_star) { v_star_ = v_star; }

    long episode() const { return episode_; }
    const Policy& policy() const { return policy_; }
    const DualVector& dual() const { return dual_; }
    const EmpiricalModel& model() const { return model_; }

    std::string checkpoint_json() const;
    static PrimalDualRunner restore(const TabularCmdp& cmdp, Schedule schedule,
                                    double slater_gap, AlgoVariant variant,
                                    double bonus_scale, const std::string& json_text);

private:
    const TabularCmdp& cmdp_;
    Schedule schedule_;
    double slater_gap_;
    AlgoVariant variant_;
    double bonus_scale_;
    Rng rng_;
    long episode_ = 0;  // completed episodes
    Policy policy_;
    DualVector dual_;
    EmpiricalModel model_;
    double v_star_ = 0.0;

    double episode_eta(long k) const;
    double episode_tau(long k) const;
};

/// Convenience loops over PrimalDualRunner.
void run_uopt_rpgpd(const TabularCmdp& cmdp, const Schedule& schedule, double slater_gap,
                    long episodes, std::uint64_t seed, const AlgoVariant& variant,
                    const MetricsSink& sink, double v_star, double bonus_scale = 1.0);

void run_naive_primal_dual(const TabularCmdp& cmdp, long episodes, double delta,
                           double learning_rate, double slater_gap, std::uint64_t seed,
                           const MetricsSink& sink, double v_star,
                           double bonus_scale = 1.0);

}  // namespace cmdplab
