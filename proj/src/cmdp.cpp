#include "cmdplab/cmdp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cmdplab {

namespace {

constexpr double kRowTol = 1e-9;
constexpr double kRenormTol = 1e-6;

void check_row(double* row, int n, const std::string& what) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        if (row[i] < 0.0) throw std::invalid_argument(what + ": negative probability");
        sum += row[i];
    }
    double drift = std::abs(sum - 1.0);
    if (drift > kRenormTol) throw std::invalid_argument(what + ": row sum off by " + std::to_string(drift));
    if (drift > kRowTol) {
        for (int i = 0; i < n; ++i) row[i] /= sum;
    }
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void TabularCmdp::validate() {
    if (num_states < 1 || num_actions < 1 || horizon < 1 || num_constraints < 0)
        throw std::invalid_argument("TabularCmdp: nonpositive dimensions");
    if (initial_state < 0 || initial_state >= num_states)
        throw std::invalid_argument("TabularCmdp: initial_state out of range");
    const std::size_t cells =
        static_cast<std::size_t>(horizon) * num_states * num_actions;
    if (kernel.size() != cells * num_states)
        throw std::invalid_argument("TabularCmdp: kernel shape mismatch");
    if (rewards.size() != static_cast<std::size_t>(num_constraints) + 1)
        throw std::invalid_argument("TabularCmdp: expected N+1 reward tensors");
    if (thresholds.size() != static_cast<std::size_t>(num_constraints))
        throw std::invalid_argument("TabularCmdp: threshold count mismatch");

    for (int h = 0; h < horizon; ++h)
        for (int x = 0; x < num_states; ++x)
            for (int a = 0; a < num_actions; ++a)
                check_row(kernel.data() + kidx(h, x, a, 0), num_states, "kernel row");

    for (const auto& r : rewards) {
        if (r.size() != cells) throw std::invalid_argument("TabularCmdp: reward shape mismatch");
        for (double v : r)
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument("TabularCmdp: reward outside [0,1]");
    }
    for (double b : thresholds)
        if (b < 0.0 || b > horizon)
            throw std::invalid_argument("TabularCmdp: threshold outside [0,H]");
}

Policy Policy::uniform(int horizon, int num_states, int num_actions) {
    Policy p;
    p.horizon = horizon;
    p.num_states = num_states;
    p.num_actions = num_actions;
    p.probs.assign(static_cast<std::size_t>(horizon) * num_states * num_actions,
                   1.0 / num_actions);
    return p;
}

bool Policy::strictly_positive() const {
    for (double v : probs)
        if (v <= 0.0) return false;
    return true;
}

void Policy::validate() const {
    for (int h = 0; h < horizon; ++h)
        for (int x = 0; x < num_states; ++x) {
            double sum = 0.0;
            for (int a = 0; a < num_actions; ++a) {
                double v = row(h, x)[a];
                if (v < 0.0) throw std::invalid_argument("Policy: negative probability");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("Policy: row not normalized");
        }
}

ValueTables eval_policy_exact_reward(const TabularCmdp& cmdp,
                                     const std::vector<double>& reward,
                                     const Policy& policy, double tau) {
    const int H = cmdp.horizon, X = cmdp.num_states, A = cmdp.num_actions;
    if (reward.size() != static_cast<std::size_t>(H) * X * A)
        throw std::invalid_argument("eval_policy_exact: reward shape mismatch");
    ValueTables out;
    out.horizon = H;
    out.num_states = X;
    out.num_actions = A;
    out.tau = tau;
    out.v.assign(static_cast<std::size_t>(H + 1) * X, 0.0);
    out.q.assign(static_cast<std::size_t>(H) * X * A, 0.0);

    for (int h = H - 1; h >= 0; --h) {
        const double* vnext = out.v.data() + static_cast<std::size_t>(h + 1) * X;
        for (int x = 0; x < X; ++x) {
            const double* pi = policy.row(h, x);
            double vx = 0.0;
            for (int a = 0; a < A; ++a) {
                const double* p = cmdp.kernel_row(h, x, a);
                double pv = 0.0;
                for (int y = 0; y < X; ++y) pv += p[y] * vnext[y];
                double qa = reward[cmdp.sidx(h, x, a)] + pv;
                out.q[cmdp.sidx(h, x, a)] = qa;
                if (tau > 0.0) {
                    if (pi[a] <= 0.0)
                        throw DegenerateEntropyError(
                            "eval_policy_exact: non-positive policy entry with tau > 0");
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

ValueTables eval_policy_exact(const TabularCmdp& cmdp, int reward_index,
                              const Policy& policy, double tau) {
    if (reward_index < 0 || reward_index > cmdp.num_constraints)
        throw std::invalid_argument("eval_policy_exact: reward index out of range");
    return eval_policy_exact_reward(cmdp, cmdp.rewards[reward_index], policy, tau);
}

OccupancyMeasure occupancy(const TabularCmdp& cmdp, const Policy& policy) {
    const int H = cmdp.horizon, X = cmdp.num_states, A = cmdp.num_actions;
    OccupancyMeasure out;
    out.horizon = H;
    out.num_states = X;
    out.num_actions = A;
    out.w.assign(static_cast<std::size_t>(H) * X * A, 0.0);

    std::vector<double> state_dist(X, 0.0);
    state_dist[cmdp.initial_state] = 1.0;
    std::vector<double> next(X);
    for (int h = 0; h < H; ++h) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int x = 0; x < X; ++x) {
            if (state_dist[x] == 0.0) continue;
            const double* pi = policy.row(h, x);
            for (int a = 0; a < A; ++a) {
                double mass = state_dist[x] * pi[a];
                out.w[cmdp.sidx(h, x, a)] = mass;
                if (mass == 0.0) continue;
                const double* p = cmdp.kernel_row(h, x, a);
                for (int y = 0; y < X; ++y) next[y] += mass * p[y];
            }
        }
        state_dist.swap(next);
    }
    return out;
}

double value_from_occupancy(const OccupancyMeasure& w, const std::vector<double>& reward) {
    if (w.w.size() != reward.size())
        throw std::invalid_argument("value_from_occupancy: shape mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < w.w.size(); ++i) v += w.w[i] * reward[i];
    return v;
}

double entropy_value_identity_check(const TabularCmdp& cmdp, const Policy& policy,
                                    int reward_index, double tau) {
    double lhs = eval_policy_exact(cmdp, reward_index, policy, tau).initial_value(cmdp);
    double plain = eval_policy_exact(cmdp, reward_index, policy, 0.0).initial_value(cmdp);
    if (tau == 0.0) return std::abs(lhs - plain);
    // Entropy term as a plain value function under reward -ln pi.
    std::vector<double> neg_log(policy.probs.size());
    for (std::size_t i = 0; i < neg_log.size(); ++i) {
        if (policy.probs[i] <= 0.0)
            throw DegenerateEntropyError("entropy identity: non-positive policy entry");
        neg_log[i] = -std::log(policy.probs[i]);
    }
    // eval_policy_exact_reward rejects rewards only through TabularCmdp::validate,
    // so -ln pi outside [0,1] is fine here.
    double ent = eval_policy_exact_reward(cmdp, neg_log, policy, 0.0).initial_value(cmdp);
    return std::abs(lhs - plain - tau * ent);
}

std::string cmdp_to_json(const TabularCmdp& m) {
    std::ostringstream os;
    os << "{\"X\":" << m.num_states << ",\"A\":" << m.num_actions
       << ",\"H\":" << m.horizon << ",\"N\":" << m.num_constraints
       << ",\"initial_state\":" << m.initial_state << ",\"kernel\":[";
    for (int h = 0; h < m.horizon; ++h) {
        os << (h ? ",[" : "[");
        for (int x = 0; x < m.num_states; ++x) {
            os << (x ? ",[" : "[");
            for (int a = 0; a < m.num_actions; ++a) {
                os << (a ? ",[" : "[");
                for (int y = 0; y < m.num_states; ++y) {
                    if (y) os << ",";
                    os << fmt17(m.kernel[m.kidx(h, x, a, y)]);
                }
                os << "]";
            }
            os << "]";
        }
        os << "]";
    }
    os << "],\"rewards\":[";
    for (std::size_t n = 0; n < m.rewards.size(); ++n) {
        os << (n ? ",[" : "[");
        for (int h = 0; h < m.horizon; ++h) {
            os << (h ? ",[" : "[");
            for (int x = 0; x < m.num_states; ++x) {
                os << (x ? ",[" : "[");
                for (int a = 0; a < m.num_actions; ++a) {
                    if (a) os << ",";
                    os << fmt17(m.rewards[n][m.sidx(h, x, a)]);
                }
                os << "]";
            }
            os << "]";
        }
        os << "]";
    }
    os << "],\"thresholds\":[";
    for (std::size_t n = 0; n < m.thresholds.size(); ++n) {
        if (n) os << ",";
        os << fmt17(m.thresholds[n]);
    }
    os << "]}";
    return os.str();
}

TabularCmdp cmdp_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    TabularCmdp m;
    m.num_states = j.at("X").get<int>();
    m.num_actions = j.at("A").get<int>();
    m.horizon = j.at("H").get<int>();
    m.num_constraints = j.at("N").get<int>();
    m.initial_state = j.at("initial_state").get<int>();
    const auto& jk = j.at("kernel");
    m.kernel.reserve(static_cast<std::size_t>(m.horizon) * m.num_states *
                     m.num_actions * m.num_states);
    for (const auto& jh : jk)
        for (const auto& jx : jh)
            for (const auto& ja : jx)
                for (const auto& jy : ja) m.kernel.push_back(jy.get<double>());
    for (const auto& jn : j.at("rewards")) {
        std::vector<double> r;
        r.reserve(static_cast<std::size_t>(m.horizon) * m.num_states * m.num_actions);
        for (const auto& jh : jn)
            for (const auto& jx : jh)
                for (const auto& ja : jx) r.push_back(ja.get<double>());
        m.rewards.push_back(std::move(r));
    }
    for (const auto& jb : j.at("thresholds")) m.thresholds.push_back(jb.get<double>());
    m.validate();
    return m;
}

TabularCmdp load_cmdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return cmdp_from_json(ss.str());
}

void save_cmdp(const TabularCmdp& cmdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << cmdp_to_json(cmdp) << "\n";
}

}  // namespace cmdplab
