#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "cmdplab/algorithms.hpp"
#include "cmdplab/cmdp.hpp"

namespace cmdplab {

/// (temporal optimality gap, temporal constraint violation) of a policy,
/// both clamped at zero, measured exactly under the true kernel.
std::pair<double, double> compute_gaps(const TabularCmdp& cmdp, double v_star,
                                       const Policy& policy);

struct MetricsRow {
    long episode;
    double opt_gap;
    double violation;
    double regret_opt;
    double regret_vio;
    double lambda_1;
    double eta;
    double tau;
};

/// Cumulative regrets and per-epsilon mistake counters. Thinned episode
/// streams (record spacing > 1) contribute trapezoidal regret weight.
class RunMetrics {
public:
    explicit RunMetrics(std::vector<double> eps_grid = {0.5, 0.2, 0.1, 0.05});

    MetricsRow accumulate(long episode, double opt_gap, double violation,
                          double lambda_1, double eta, double tau);

    const std::vector<MetricsRow>& rows() const { return rows_; }
    const std::vector<double>& eps_grid() const { return eps_grid_; }
    long mistakes_opt(std::size_t eps_index) const { return n_opt_[eps_index]; }
    long mistakes_vio(std::size_t eps_index) const { return n_vio_[eps_index]; }
    double regret_opt() const { return regret_opt_; }
    double regret_vio() const { return regret_vio_; }

    std::string state_json() const;
    void restore_state(const std::string& json_text);

private:
    std::vector<double> eps_grid_;
    std::vector<MetricsRow> rows_;
    std::vector<long> n_opt_, n_vio_;
    double regret_opt_ = 0.0, regret_vio_ = 0.0;
    long last_episode_ = 0;
    double last_gap_opt_ = 0.0, last_gap_vio_ = 0.0;
};

struct ExperimentConfig {
    // Either a path to a CMDP JSON or generation parameters.
    std::string env_path;
    std::uint64_t env_seed = 0;
    int env_states = 30;
    int env_actions = 3;
    int env_horizon = 10;

    std::vector<std::string> variants;  // names per AlgoVariant::name()
    std::vector<std::uint64_t> seeds = {1};
    long episodes = 100000;
    double alpha_eta = 0.53;
    double alpha_tau = 0.4;
    double delta = 0.1;
    double bonus_scale = 1e-3;
    std::int64_t naive_budget = 100000;
    double fixed_eta = 0.1;
    double fixed_tau = 0.1;
    std::vector<double> eps_grid = {0.5, 0.2, 0.1, 0.05};
    long thin_after = 10000;
    long thin_stride = 10;
    int workers = 1;
    std::string output_dir = ".";

    static ExperimentConfig from_json_file(const std::string& path);
    void validate() const;
};

AlgoVariant variant_from_name(const std::string& name, const ExperimentConfig& cfg);

/// Runs every (variant, seed) pair, writing one CSV per run plus
/// manifest.json into output_dir. Returns the manifest path.
std::string run_experiment(const ExperimentConfig& config);

/// One run with optional checkpoint handling. When checkpoint_path is
/// nonempty the run resumes from it if present; checkpoint_every > 0 writes
/// it periodically. The CSV is appended to on resume so an interrupted and
/// resumed run produces byte-identical output.
void run_single(const TabularCmdp& cmdp, double v_star, double slater_gap,
                const Schedule& schedule, const AlgoVariant& variant, std::uint64_t seed,
                long episodes, double bonus_scale, const std::vector<double>& eps_grid,
                long thin_after, long thin_stride, const std::string& csv_path,
                const std::string& checkpoint_path = "", long checkpoint_every = 0);

/// Two-panel SVG (optimality gap, constraint violation vs episode).
void emit_chart(const std::vector<std::string>& csv_paths, const std::string& out_path);

}  // namespace cmdplab
