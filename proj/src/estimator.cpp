#include "cmdplab/estimator.hpp"

#include <cmath>

namespace cmdplab {

EmpiricalModel EmpiricalModel::empty(int horizon, int num_states, int num_actions) {
    EmpiricalModel em;
    em.horizon = horizon;
    em.num_states = num_states;
    em.num_actions = num_actions;
    em.n.assign(static_cast<std::size_t>(horizon) * num_states * num_actions, 0);
    em.m.assign(em.n.size() * num_states, 0);
    return em;
}

void EmpiricalModel::phat_row(int h, int x, int a, double* out) const {
    std::int64_t c = n[sidx(h, x, a)];
    double denom = static_cast<double>(c > 0 ? c : 1);
    const std::int64_t* row = m.data() + kidx(h, x, a, 0);
    for (int y = 0; y < num_states; ++y)
        out[y] = static_cast<double>(row[y]) / denom;
}

void update_counts(EmpiricalModel& model, const Trajectory& traj) {
    if (static_cast<int>(traj.steps.size()) != model.horizon)
        throw std::invalid_argument("update_counts: trajectory length mismatch");
    for (int h = 0; h < model.horizon; ++h) {
        const auto& s = traj.steps[h];
        if (s.state < 0 || s.state >= model.num_states || s.action < 0 ||
            s.action >= model.num_actions || s.next_state < 0 ||
            s.next_state >= model.num_states)
            throw std::invalid_argument("update_counts: index out of range");
        model.n[model.sidx(h, s.state, s.action)] += 1;
        model.m[model.kidx(h, s.state, s.action, s.next_state)] += 1;
    }
}

double llnp(double x) {
    if (x < 0.0) throw std::invalid_argument("llnp: negative argument");
    const double e = 2.718281828459045;
    return std::log(std::log(x > e ? x : e));
}

double upac_bonus_cell(std::int64_t n, const double* phat_row, int num_states,
                       double delta, int X, int A, int H) {
    double denom = static_cast<double>(n > 0 ? n : 1);
    double log_term = std::log(48.0 * X * static_cast<double>(X) * A * H / delta);
    double phi = std::sqrt((2.0 * llnp(2.0 * static_cast<double>(n)) + 2.0 * log_term) / denom);
    if (phi > 1.0) phi = 1.0;
    double beta = 0.0;
    for (int y = 0; y < num_states; ++y)
        beta += 2.0 * std::sqrt(phat_row[y]) * phi + 5.0 * phi * phi;
    return beta;
}

BonusTable upac_bonus(const EmpiricalModel& model, double delta, double scale) {
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("upac_bonus: delta outside (0,1]");
    BonusTable b;
    b.horizon = model.horizon;
    b.num_states = model.num_states;
    b.num_actions = model.num_actions;
    b.scale = scale;
    b.beta.resize(model.n.size());
    std::vector<double> row(model.num_states);
    for (int h = 0; h < model.horizon; ++h)
        for (int x = 0; x < model.num_states; ++x)
            for (int a = 0; a < model.num_actions; ++a) {
                model.phat_row(h, x, a, row.data());
                b.beta[model.sidx(h, x, a)] =
                    upac_bonus_cell(model.count(h, x, a), row.data(), model.num_states,
                                    delta, model.num_states, model.num_actions,
                                    model.horizon);
            }
    return b;
}

double naive_bonus_cell(std::int64_t n, double delta, std::int64_t budget) {
    double denom = static_cast<double>(n > 0 ? n : 1);
    double l = std::log(static_cast<double>(budget) / delta);
    return l / denom + std::sqrt(l / denom);
}

BonusTable naive_bonus(const EmpiricalModel& model, double delta, std::int64_t budget,
                       double scale) {
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("naive_bonus: delta outside (0,1]");
    if (budget < 1) throw std::invalid_argument("naive_bonus: budget < 1");
    BonusTable b;
    b.horizon = model.horizon;
    b.num_states = model.num_states;
    b.num_actions = model.num_actions;
    b.scale = scale;
    b.beta.resize(model.n.size());
    for (std::size_t i = 0; i < model.n.size(); ++i)
        b.beta[i] = naive_bonus_cell(model.n[i], delta, budget);
    return b;
}

}  // namespace cmdplab
