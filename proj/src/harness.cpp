#include "cmdplab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cmdplab/env.hpp"
#include "cmdplab/oracle.hpp"

namespace fs = std::filesystem;

namespace cmdplab {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::pair<double, double> compute_gaps(const TabularCmdp& cmdp, double v_star,
                                       const Policy& policy) {
    double v0 = eval_policy_exact(cmdp, 0, policy, 0.0).initial_value(cmdp);
    double gap_r = std::max(v_star - v0, 0.0);
    double worst = 0.0;
    for (int n = 1; n <= cmdp.num_constraints; ++n) {
        double vn = eval_policy_exact(cmdp, n, policy, 0.0).initial_value(cmdp);
        worst = std::max(worst, cmdp.thresholds[n - 1] - vn);
    }
    return {gap_r, std::max(worst, 0.0)};
}

RunMetrics::RunMetrics(std::vector<double> eps_grid) : eps_grid_(std::move(eps_grid)) {
    n_opt_.assign(eps_grid_.size(), 0);
    n_vio_.assign(eps_grid_.size(), 0);
}

MetricsRow RunMetrics::accumulate(long episode, double opt_gap, double violation,
                                  double lambda_1, double eta, double tau) {
    if (episode <= last_episode_)
        throw std::invalid_argument("RunMetrics: episodes must be increasing");
    long span = episode - last_episode_;
    if (span == 1) {
        regret_opt_ += opt_gap;
        regret_vio_ += violation;
    } else {
        // Thinned stream: trapezoidal weight over the skipped episodes.
        regret_opt_ += 0.5 * (last_gap_opt_ + opt_gap) * span;
        regret_vio_ += 0.5 * (last_gap_vio_ + violation) * span;
    }
    for (std::size_t i = 0; i < eps_grid_.size(); ++i) {
        if (opt_gap > eps_grid_[i]) n_opt_[i] += span;
        if (violation > eps_grid_[i]) n_vio_[i] += span;
    }
    last_episode_ = episode;
    last_gap_opt_ = opt_gap;
    last_gap_vio_ = violation;
    MetricsRow row{episode, opt_gap, violation, regret_opt_, regret_vio_,
                   lambda_1, eta, tau};
    rows_.push_back(row);
    return row;
}

std::string RunMetrics::state_json() const {
    nlohmann::json j;
    j["last_episode"] = last_episode_;
    j["last_gap_opt"] = last_gap_opt_;
    j["last_gap_vio"] = last_gap_vio_;
    j["regret_opt"] = fmt17(regret_opt_);
    j["regret_vio"] = fmt17(regret_vio_);
    j["n_opt"] = n_opt_;
    j["n_vio"] = n_vio_;
    return j.dump();
}

void RunMetrics::restore_state(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    last_episode_ = j.at("last_episode").get<long>();
    last_gap_opt_ = j.at("last_gap_opt").get<double>();
    last_gap_vio_ = j.at("last_gap_vio").get<double>();
    regret_opt_ = std::stod(j.at("regret_opt").get<std::string>());
    regret_vio_ = std::stod(j.at("regret_vio").get<std::string>());
    n_opt_ = j.at("n_opt").get<std::vector<long>>();
    n_vio_ = j.at("n_vio").get<std::vector<long>>();
    rows_.clear();
}

AlgoVariant variant_from_name(const std::string& name, const ExperimentConfig& cfg) {
    AlgoVariant v;
    v.naive_budget = cfg.naive_budget;
    v.fixed_eta = cfg.fixed_eta;
    v.fixed_tau = cfg.fixed_tau;
    if (name == "uopt-rpgpd") v.tag = VariantTag::UOptRPGPD;
    else if (name == "no-regularization") v.tag = VariantTag::NoRegularization;
    else if (name == "no-upac-bonus") v.tag = VariantTag::NoUPACBonus;
    else if (name == "no-adjustment") v.tag = VariantTag::NoAdjustment;
    else if (name == "naive-primal-dual") v.tag = VariantTag::NaivePrimalDual;
    else throw std::invalid_argument("unknown algorithm variant: " + name);
    return v;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    nlohmann::json j;
    in >> j;
    ExperimentConfig c;
    fs::path base = fs::path(path).parent_path();
    if (j.contains("env_path"))
        c.env_path = (base / j.at("env_path").get<std::string>()).string();
    if (j.contains("env_seed")) c.env_seed = j.at("env_seed").get<std::uint64_t>();
    if (j.contains("env_states")) c.env_states = j.at("env_states").get<int>();
    if (j.contains("env_actions")) c.env_actions = j.at("env_actions").get<int>();
    if (j.contains("env_horizon")) c.env_horizon = j.at("env_horizon").get<int>();
    if (j.contains("variants"))
        c.variants = j.at("variants").get<std::vector<std::string>>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("episodes")) c.episodes = j.at("episodes").get<long>();
    if (j.contains("alpha_eta")) c.alpha_eta = j.at("alpha_eta").get<double>();
    if (j.contains("alpha_tau")) c.alpha_tau = j.at("alpha_tau").get<double>();
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    if (j.contains("bonus_scale")) c.bonus_scale = j.at("bonus_scale").get<double>();
    if (j.contains("naive_budget")) c.naive_budget = j.at("naive_budget").get<std::int64_t>();
    if (j.contains("fixed_eta")) c.fixed_eta = j.at("fixed_eta").get<double>();
    if (j.contains("fixed_tau")) c.fixed_tau = j.at("fixed_tau").get<double>();
    if (j.contains("eps_grid")) c.eps_grid = j.at("eps_grid").get<std::vector<double>>();
    if (j.contains("thin_after")) c.thin_after = j.at("thin_after").get<long>();
    if (j.contains("thin_stride")) c.thin_stride = j.at("thin_stride").get<long>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("output_dir"))
        c.output_dir = (base / j.at("output_dir").get<std::string>()).string();
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    if (episodes < 0) throw std::invalid_argument("config: episodes must be >= 0");
    if (seeds.empty()) throw std::invalid_argument("config: at least one seed required");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("config: delta outside (0,1]");
    if (thin_stride < 1 || thin_after < 0)
        throw std::invalid_argument("config: bad thinning parameters");
    for (const auto& name : variants) variant_from_name(name, *this);
    // Schedule violations only warn: ablation configs break them on purpose.
    Schedule s{alpha_eta, alpha_tau, delta};
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config warning: %s\n", e.what());
    }
}

void run_single(const TabularCmdp& cmdp, double v_star, double slater_gap,
                const Schedule& schedule, const AlgoVariant& variant, std::uint64_t seed,
                long episodes, double bonus_scale, const std::vector<double>& eps_grid,
                long thin_after, long thin_stride, const std::string& csv_path,
                const std::string& checkpoint_path, long checkpoint_every) {
    RunMetrics metrics(eps_grid);
    std::unique_ptr<PrimalDualRunner> runner;
    bool resumed = false;

    if (!checkpoint_path.empty() && fs::exists(checkpoint_path)) {
        std::ifstream in(checkpoint_path);
        nlohmann::json j;
        in >> j;
        runner = std::make_unique<PrimalDualRunner>(PrimalDualRunner::restore(
            cmdp, schedule, slater_gap, variant, bonus_scale, j.at("runner").dump()));
        metrics.restore_state(j.at("metrics").dump());
        // Drop any CSV rows written after the checkpoint was taken.
        auto bytes = j.at("csv_bytes").get<std::uintmax_t>();
        if (fs::exists(csv_path) && fs::file_size(csv_path) > bytes)
            fs::resize_file(csv_path, bytes);
        resumed = true;
    } else {
        runner = std::make_unique<PrimalDualRunner>(cmdp, schedule, slater_gap, variant,
                                                    seed, bonus_scale);
    }
    runner->set_reference(v_star);

    std::ofstream csv(csv_path, resumed ? std::ios::app : std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    if (!resumed)
        csv << "episode,algo,seed,opt_gap,violation,regret_opt,regret_vio,lambda_1,eta,tau\n";

    const std::string algo = variant.name();
    for (long k = runner->episode() + 1; k <= episodes; ++k) {
        bool recorded = k <= thin_after || k % thin_stride == 0 || k == episodes;
        EpisodeRecord rec = runner->step(recorded);
        if (recorded) {
            double lambda1 = rec.lambda.empty() ? 0.0 : rec.lambda[0];
            MetricsRow row =
                metrics.accumulate(k, rec.opt_gap, rec.violation, lambda1, rec.eta, rec.tau);
            csv << row.episode << ',' << algo << ',' << seed << ',' << fmt17(row.opt_gap)
                << ',' << fmt17(row.violation) << ',' << fmt17(row.regret_opt) << ','
                << fmt17(row.regret_vio) << ',' << fmt17(row.lambda_1) << ','
                << fmt17(row.eta) << ',' << fmt17(row.tau) << '\n';
        }
        if (!checkpoint_path.empty() && checkpoint_every > 0 &&
            k % checkpoint_every == 0 && k < episodes) {
            csv.flush();
            nlohmann::json j;
            j["runner"] = nlohmann::json::parse(runner->checkpoint_json());
            j["metrics"] = nlohmann::json::parse(metrics.state_json());
            j["csv_bytes"] = static_cast<std::uintmax_t>(fs::file_size(csv_path));
            std::ofstream out(checkpoint_path + ".tmp");
            out << j.dump();
            out.close();
            fs::rename(checkpoint_path + ".tmp", checkpoint_path);
        }
    }
}

std::string run_experiment(const ExperimentConfig& config) {
    TabularCmdp cmdp;
    double gap, threshold;
    if (!config.env_path.empty()) {
        cmdp = load_cmdp(config.env_path);
        gap = slater_gap(cmdp);
        threshold = cmdp.thresholds.empty() ? 0.0 : cmdp.thresholds[0];
    } else {
        GeneratedEnv env = generate_random_cmdp(config.env_seed, config.env_states,
                                                config.env_actions, config.env_horizon);
        cmdp = std::move(env.cmdp);
        gap = env.slater_gap;
        threshold = env.threshold;
    }
    double v_star = cmdp.num_constraints > 0 ? solve_cmdp_lp(cmdp).value
                                             : unconstrained_max(cmdp, 0).first;

    fs::create_directories(config.output_dir);
    Schedule schedule{config.alpha_eta, config.alpha_tau, config.delta};

    struct RunItem {
        std::string variant_name;
        std::uint64_t seed;
        std::string csv;
    };
    std::vector<RunItem> items;
    for (const auto& vn : config.variants)
        for (auto s : config.seeds) {
            std::string csv =
                (fs::path(config.output_dir) / (vn + "_seed" + std::to_string(s) + ".csv"))
                    .string();
            items.push_back({vn, s, csv});
        }

    auto work = [&](const RunItem& item) {
        AlgoVariant variant = variant_from_name(item.variant_name, config);
        // Exploration stream is independent per (algorithm, seed) pair.
        std::uint64_t run_seed =
            item.seed * 1000003ULL + static_cast<std::uint64_t>(variant.tag) * 7919ULL;
        run_single(cmdp, v_star, gap, schedule, variant, run_seed, config.episodes,
                   config.bonus_scale, config.eps_grid, config.thin_after,
                   config.thin_stride, item.csv);
    };

    int workers = std::max(1, config.workers);
    if (workers == 1 || items.size() <= 1) {
        for (const auto& item : items) work(item);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        int nthreads = std::min<std::size_t>(workers, items.size());
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= items.size()) return;
                    work(items[i]);
                }
            });
        for (auto& th : pool) th.join();
    }

    nlohmann::json manifest;
    manifest["episodes"] = config.episodes;
    manifest["v_star"] = v_star;
    manifest["threshold"] = threshold;
    manifest["slater_gap"] = gap;
    manifest["bonus_scale"] = config.bonus_scale;
    manifest["thin_after"] = config.thin_after;
    manifest["thin_stride"] = config.thin_stride;
    manifest["eps_grid"] = config.eps_grid;
    manifest["runs"] = nlohmann::json::array();
    for (const auto& item : items)
        manifest["runs"].push_back({{"algo", item.variant_name},
                                    {"seed", item.seed},
                                    {"csv", fs::path(item.csv).filename().string()}});
    std::string manifest_path = (fs::path(config.output_dir) / "manifest.json").string();
    std::ofstream out(manifest_path);
    out << manifest.dump(2) << "\n";
    return manifest_path;
}

namespace {

struct Series {
    std::string label;
    std::vector<double> episode, opt_gap, violation;
};

Series read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Series s;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() < 5) continue;
        s.episode.push_back(std::stod(fields[0]));
        if (s.label.empty()) s.label = fields[1];
        s.opt_gap.push_back(std::stod(fields[3]));
        s.violation.push_back(std::stod(fields[4]));
    }
    if (s.label.empty()) s.label = fs::path(path).stem().string();
    return s;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf"};

void draw_panel(std::ostringstream& svg, const std::vector<Series>& series,
                bool violation_panel, double x0, double y0, double w, double h,
                const std::string& title) {
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& s : series) {
        const auto& ys = violation_panel ? s.violation : s.opt_gap;
        for (std::size_t i = 0; i < s.episode.size(); ++i) {
            xmin = std::min(xmin, s.episode[i]);
            xmax = std::max(xmax, s.episode[i]);
            ymax = std::max(ymax, ys[i]);
        }
    }
    if (ymax <= 0.0) ymax = 1.0;
    if (xmax <= xmin) xmax = xmin + 1.0;

    svg << "<rect x='" << x0 << "' y='" << y0 << "' width='" << w << "' height='" << h
        << "' fill='none' stroke='#333'/>\n";
    svg << "<text x='" << x0 + w / 2 << "' y='" << y0 - 8
        << "' text-anchor='middle' font-size='14'>" << title << "</text>\n";
    svg << "<text x='" << x0 + w / 2 << "' y='" << y0 + h + 28
        << "' text-anchor='middle' font-size='11'>episode</text>\n";
    svg << "<text x='" << x0 - 6 << "' y='" << y0 + h << "' text-anchor='end' font-size='10'>"
        << 0 << "</text>\n";
    svg << "<text x='" << x0 - 6 << "' y='" << y0 + 10 << "' text-anchor='end' font-size='10'>"
        << ymax << "</text>\n";
    svg << "<text x='" << x0 << "' y='" << y0 + h + 14
        << "' text-anchor='middle' font-size='10'>" << static_cast<long>(xmin) << "</text>\n";
    svg << "<text x='" << x0 + w << "' y='" << y0 + h + 14
        << "' text-anchor='middle' font-size='10'>" << static_cast<long>(xmax) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const auto& ys = violation_panel ? s.violation : s.opt_gap;
        std::size_t npts = s.episode.size();
        std::size_t stride = std::max<std::size_t>(1, npts / 1500);
        svg << "<polyline fill='none' stroke='" << kPalette[si % 7]
            << "' stroke-width='1' points='";
        for (std::size_t i = 0; i < npts; i += stride) {
            double px = x0 + (s.episode[i] - xmin) / (xmax - xmin) * w;
            double py = y0 + h - std::min(ys[i], ymax) / ymax * h;
            svg << px << ',' << py << ' ';
        }
        svg << "'/>\n";
    }
}

}  // namespace

void emit_chart(const std::vector<std::string>& csv_paths, const std::string& out_path) {
    if (csv_paths.empty()) throw std::invalid_argument("emit_chart: no input CSVs");
    std::vector<Series> series;
    for (const auto& p : csv_paths) series.push_back(read_csv(p));

    const double W = 980, H = 380;
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
    draw_panel(svg, series, false, 60, 50, 380, 260, "optimality gap");
    draw_panel(svg, series, true, 540, 50, 380, 260, "constraint violation");
    for (std::size_t i = 0; i < series.size(); ++i) {
        double lx = 60 + 150.0 * i, ly = H - 16;
        svg << "<line x1='" << lx << "' y1='" << ly - 4 << "' x2='" << lx + 22 << "' y2='"
            << ly - 4 << "' stroke='" << kPalette[i % 7] << "' stroke-width='2'/>\n";
        svg << "<text x='" << lx + 28 << "' y='" << ly << "' font-size='11'>"
            << series[i].label << "</text>\n";
    }
    svg << "</svg>\n";
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << svg.str();
}

}  // namespace cmdplab
