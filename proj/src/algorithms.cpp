#include "cmdplab/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace cmdplab {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

template <typename RowFn>
ValueTables eval_optimistic_impl(const std::vector<double>& reward, const BonusTable& beta,
                                 const Policy& policy, double tau, int H, int X, int A,
                                 RowFn kernel_row) {
    ValueTables out;
    out.horizon = H;
    out.num_states = X;
    out.num_actions = A;
    out.tau = tau;
    out.v.assign(static_cast<std::size_t>(H + 1) * X, 0.0);
    out.q.assign(static_cast<std::size_t>(H) * X * A, 0.0);
    const double ent_factor = 1.0 + tau * std::log(static_cast<double>(A));
    std::vector<double> row(X);

    for (int h = H - 1; h >= 0; --h) {
        const double* vnext = out.v.data() + static_cast<std::size_t>(h + 1) * X;
        const double clip = ent_factor * (H - h);
        for (int x = 0; x < X; ++x) {
            const double* pi = policy.row(h, x);
            double vx = 0.0;
            for (int a = 0; a < A; ++a) {
                const double* p = kernel_row(h, x, a, row.data());
                double pv = 0.0;
                for (int y = 0; y < X; ++y) pv += p[y] * vnext[y];
                std::size_t i = (static_cast<std::size_t>(h) * X + x) * A + a;
                double qa = reward[i] + ent_factor * H * beta.at(h, x, a) + pv;
                if (qa > clip) qa = clip;
                out.q[i] = qa;
                if (tau > 0.0) {
                    if (pi[a] <= 0.0)
                        throw DegenerateEntropyError(
                            "eval_policy_optimistic: non-positive policy entry with tau > 0");
                    vx += pi[a] * (qa - tau * std::log(pi[a]));
                } else {
                    vx += pi[a] * qa;
                }
            }
            out.v[static_cast<std::size_t>(h) * X + x] = vx;
        }
    }
    return out;
}

}  // namespace

double Schedule::eta(long k) const { return std::pow(static_cast<double>(k + 3), -alpha_eta); }
double Schedule::tau(long k) const { return std::pow(static_cast<double>(k + 3), -alpha_tau); }

void Schedule::validate() const {
    if (!(alpha_eta > 0.5 && alpha_eta < 1.0))
        throw std::invalid_argument("Schedule: alpha_eta must lie in (0.5, 1)");
    if (!(alpha_tau > 0.0 && alpha_tau < 0.5))
        throw std::invalid_argument("Schedule: alpha_tau must lie in (0, 0.5)");
    if (!(alpha_eta + alpha_tau < 1.0))
        throw std::invalid_argument("Schedule: alpha_eta + alpha_tau must be < 1");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("Schedule: delta outside (0,1]");
}

std::string AlgoVariant::name() const {
    switch (tag) {
        case VariantTag::UOptRPGPD: return "uopt-rpgpd";
        case VariantTag::NoRegularization: return "no-regularization";
        case VariantTag::NoUPACBonus: return "no-upac-bonus";
        case VariantTag::NoAdjustment: return "no-adjustment";
        case VariantTag::NaivePrimalDual: return "naive-primal-dual";
    }
    return "unknown";
}

ValueTables eval_policy_optimistic(const std::vector<double>& reward,
                                   const BonusTable& beta, const EmpiricalModel& model,
                                   const Policy& policy, double tau) {
    const int H = model.horizon, X = model.num_states, A = model.num_actions;
    if (reward.size() != static_cast<std::size_t>(H) * X * A)
        throw std::invalid_argument("eval_policy_optimistic: reward shape mismatch");
    return eval_optimistic_impl(
        reward, beta, policy, tau, H, X, A,
        [&model](int h, int x, int a, double* scratch) -> const double* {
            model.phat_row(h, x, a, scratch);
            return scratch;
        });
}

ValueTables eval_policy_optimistic_true_kernel(const std::vector<double>& reward,
                                               const BonusTable& beta,
                                               const TabularCmdp& cmdp,
                                               const Policy& policy, double tau) {
    return eval_optimistic_impl(
        reward, beta, policy, tau, cmdp.horizon, cmdp.num_states, cmdp.num_actions,
        [&cmdp](int h, int x, int a, double*) -> const double* {
            return cmdp.kernel_row(h, x, a);
        });
}

std::vector<double> combined_q(const ValueTables& q0, const std::vector<ValueTables>& qn,
                               const DualVector& lambda) {
    if (qn.size() != lambda.lambda.size())
        throw std::invalid_argument("combined_q: constraint count mismatch");
    std::vector<double> q = q0.q;
    for (std::size_t n = 0; n < qn.size(); ++n) {
        if (qn[n].q.size() != q.size())
            throw std::invalid_argument("combined_q: shape mismatch");
        double l = lambda.lambda[n];
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += l * qn[n].q[i];
    }
    return q;
}

Policy policy_mirror_step(const Policy& policy, const std::vector<double>& q, double eta,
                          double tau) {
    if (q.size() != policy.probs.size())
        throw std::invalid_argument("policy_mirror_step: shape mismatch");
    if (eta * tau >= 1.0)
        throw std::invalid_argument("policy_mirror_step: eta * tau must be < 1");
    const int H = policy.horizon, X = policy.num_states, A = policy.num_actions;
    Policy out = policy;
    const double keep = 1.0 - eta * tau;
    std::vector<double> logits(A);
    for (int h = 0; h < H; ++h)
        for (int x = 0; x < X; ++x) {
            const double* pi = policy.row(h, x);
            const double* qx = q.data() + policy.idx(h, x, 0);
            double maxl = -1e300;
            for (int a = 0; a < A; ++a) {
                if (!std::isfinite(qx[a]))
                    throw std::invalid_argument("policy_mirror_step: non-finite Q entry");
                logits[a] = keep * std::log(pi[a]) + eta * qx[a];
                maxl = std::max(maxl, logits[a]);
            }
            double z = 0.0;
            for (int a = 0; a < A; ++a) {
                logits[a] = std::exp(logits[a] - maxl);
                z += logits[a];
            }
            double* row = out.row(h, x);
            for (int a = 0; a < A; ++a) row[a] = logits[a] / z;
        }
    return out;
}

DualVector lagrange_step(const DualVector& lambda, const std::vector<double>& v_constraints,
                         const std::vector<double>& thresholds, double eta, double tau,
                         double slater_gap, int num_actions, int horizon) {
    if (slater_gap <= 0.0)
        throw std::invalid_argument("lagrange_step: slater_gap must be positive");
    if (v_constraints.size() != lambda.lambda.size() ||
        thresholds.size() != lambda.lambda.size())
        throw std::invalid_argument("lagrange_step: constraint count mismatch");
    const double cap =
        horizon * (1.0 + tau * std::log(static_cast<double>(num_actions))) / slater_gap;
    DualVector out = lambda;
    for (std::size_t n = 0; n < out.lambda.size(); ++n) {
        double l = lambda.lambda[n] +
                   eta * (thresholds[n] - v_constraints[n] - tau * lambda.lambda[n]);
        out.lambda[n] = std::clamp(l, 0.0, cap);
    }
    return out;
}

PrimalDualRunner::PrimalDualRunner(const TabularCmdp& cmdp, Schedule schedule,
                                   double slater_gap, AlgoVariant variant,
                                   std::uint64_t seed, double bonus_scale)
    : cmdp_(cmdp),
      schedule_(schedule),
      slater_gap_(slater_gap),
      variant_(variant),
      bonus_scale_(bonus_scale),
      rng_(seed),
      policy_(Policy::uniform(cmdp.horizon, cmdp.num_states, cmdp.num_actions)),
      dual_(DualVector::zeros(cmdp.num_constraints)),
      model_(EmpiricalModel::empty(cmdp.horizon, cmdp.num_states, cmdp.num_actions)) {
    if (slater_gap_ <= 0.0)
        throw std::invalid_argument("PrimalDualRunner: slater_gap must be positive");
}

double PrimalDualRunner::episode_eta(long k) const {
    switch (variant_.tag) {
        case VariantTag::NoAdjustment:
        case VariantTag::NaivePrimalDual:
            return variant_.fixed_eta;
        default:
            return schedule_.eta(k);
    }
}

double PrimalDualRunner::episode_tau(long k) const {
    switch (variant_.tag) {
        case VariantTag::NoRegularization:
        case VariantTag::NaivePrimalDual:
            return 0.0;
        case VariantTag::NoAdjustment:
            return variant_.fixed_tau;
        default:
            return schedule_.tau(k);
    }
}

EpisodeRecord PrimalDualRunner::step(bool with_gaps) {
    const long k = episode_ + 1;
    const double eta = episode_eta(k);
    const double tau = episode_tau(k);
    const bool naive = variant_.tag == VariantTag::NoUPACBonus ||
                       variant_.tag == VariantTag::NaivePrimalDual;
    BonusTable beta = naive ? naive_bonus(model_, schedule_.delta, variant_.naive_budget,
                                          bonus_scale_)
                            : upac_bonus(model_, schedule_.delta, bonus_scale_);

    ValueTables q0 = eval_policy_optimistic(cmdp_.rewards[0], beta, model_, policy_, tau);
    std::vector<ValueTables> qn;
    qn.reserve(cmdp_.num_constraints);
    for (int n = 1; n <= cmdp_.num_constraints; ++n)
        qn.push_back(eval_policy_optimistic(cmdp_.rewards[n], beta, model_, policy_, 0.0));

    EpisodeRecord rec;
    rec.episode = k;
    rec.lambda = dual_.lambda;
    rec.eta = eta;
    rec.tau = tau;
    rec.optimistic_v0 = q0.initial_value(cmdp_);
    if (with_gaps) {
        rec.has_gaps = true;
        double v0 = eval_policy_exact(cmdp_, 0, policy_, 0.0).initial_value(cmdp_);
        rec.opt_gap = std::max(v_star_ - v0, 0.0);
        double worst = -1e300;
        for (int n = 1; n <= cmdp_.num_constraints; ++n) {
            double vn = eval_policy_exact(cmdp_, n, policy_, 0.0).initial_value(cmdp_);
            worst = std::max(worst, cmdp_.thresholds[n - 1] - vn);
        }
        rec.violation = cmdp_.num_constraints > 0 ? std::max(worst, 0.0) : 0.0;
    }

    std::vector<double> q = combined_q(q0, qn, dual_);
    Policy next_policy = policy_mirror_step(policy_, q, eta, tau);

    std::vector<double> v_constraints(cmdp_.num_constraints);
    for (int n = 0; n < cmdp_.num_constraints; ++n)
        v_constraints[n] = qn[n].initial_value(cmdp_);
    dual_ = lagrange_step(dual_, v_constraints, cmdp_.thresholds, eta, tau, slater_gap_,
                          cmdp_.num_actions, cmdp_.horizon);

    policy_ = std::move(next_policy);
    Trajectory traj = rollout(cmdp_, policy_, rng_);
    update_counts(model_, traj);
    ++episode_;
    return rec;
}

std::string PrimalDualRunner::checkpoint_json() const {
    std::ostringstream os;
    os << "{\"episode\":" << episode_ << ",\"rng_state\":\"" << rng_.state()
       << "\",\"lambda\":[";
    for (std::size_t n = 0; n < dual_.lambda.size(); ++n) {
        if (n) os << ",";
        os << fmt17(dual_.lambda[n]);
    }
    os << "],\"policy\":[";
    for (std::size_t i = 0; i < policy_.probs.size(); ++i) {
        if (i) os << ",";
        os << fmt17(policy_.probs[i]);
    }
    os << "],\"n\":[";
    for (std::size_t i = 0; i < model_.n.size(); ++i) {
        if (i) os << ",";
        os << model_.n[i];
    }
    os << "],\"m\":[";
    for (std::size_t i = 0; i < model_.m.size(); ++i) {
        if (i) os << ",";
        os << model_.m[i];
    }
    os << "]}";
    return os.str();
}

PrimalDualRunner PrimalDualRunner::restore(const TabularCmdp& cmdp, Schedule schedule,
                                           double slater_gap, AlgoVariant variant,
                                           double bonus_scale,
                                           const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    PrimalDualRunner r(cmdp, schedule, slater_gap, variant, 0, bonus_scale);
    r.episode_ = j.at("episode").get<long>();
    r.rng_.set_state(std::stoull(j.at("rng_state").get<std::string>()));
    auto lam = j.at("lambda").get<std::vector<double>>();
    if (lam.size() != r.dual_.lambda.size())
        throw std::invalid_argument("checkpoint: lambda size mismatch");
    r.dual_.lambda = std::move(lam);
    auto probs = j.at("policy").get<std::vector<double>>();
    if (probs.size() != r.policy_.probs.size())
        throw std::invalid_argument("checkpoint: policy size mismatch");
    r.policy_.probs = std::move(probs);
    auto n = j.at("n").get<std::vector<std::int64_t>>();
    auto m = j.at("m").get<std::vector<std::int64_t>>();
    if (n.size() != r.model_.n.size() || m.size() != r.model_.m.size())
        throw std::invalid_argument("checkpoint: count size mismatch");
    r.model_.n = std::move(n);
    r.model_.m = std::move(m);
    return r;
}

void run_uopt_rpgpd(const TabularCmdp& cmdp, const Schedule& schedule, double slater_gap,
                    long episodes, std::uint64_t seed, const AlgoVariant& variant,
                    const MetricsSink& sink, double v_star, double bonus_scale) {
    PrimalDualRunner runner(cmdp, schedule, slater_gap, variant, seed, bonus_scale);
    runner.set_reference(v_star);
    for (long k = 0; k < episodes; ++k) {
        EpisodeRecord rec = runner.step();
        if (sink) sink(rec);
    }
}

void run_naive_primal_dual(const TabularCmdp& cmdp, long episodes, double delta,
                           double learning_rate, double slater_gap, std::uint64_t seed,
                           const MetricsSink& sink, double v_star, double bonus_scale) {
    if (episodes < 1)
        throw std::invalid_argument("run_naive_primal_dual: episode budget must be >= 1");
    AlgoVariant variant;
    variant.tag = VariantTag::NaivePrimalDual;
    variant.naive_budget = episodes;
    variant.fixed_eta = learning_rate;
    Schedule schedule;
    schedule.delta = delta;
    run_uopt_rpgpd(cmdp, schedule, slater_gap, episodes, seed, variant, sink, v_star,
                   bonus_scale);
}

}  // namespace cmdplab
