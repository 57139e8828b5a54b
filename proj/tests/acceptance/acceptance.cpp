// Acceptance harness: one PASS/FAIL line per criterion, measured values next
// to their limits. Run a single criterion with --criterion N, or all with 0.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pinch/config.hpp"
#include "pinch/core_model.hpp"
#include "pinch/io.hpp"
#include "pinch/montecarlo.hpp"
#include "pinch/neural/cnn.hpp"
#include "pinch/neural/dataset.hpp"
#include "pinch/neural/training.hpp"
#include "pinch/oracles.hpp"
#include "pinch/placement.hpp"
#include "pinch/power_alloc.hpp"
#include "pinch/rng.hpp"

namespace fs = std::filesystem;
using namespace pinch;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

struct Context {
    std::string cli;
    fs::path work;
    std::size_t workers = 1;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ChannelState random_state(std::mt19937_64& rng, std::size_t users)
{
    std::uniform_real_distribution<double> mag(-10.0, -7.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::vector<cplx> g(users);
    for (auto& v : g) {
        v = std::polar(std::pow(10.0, mag(rng)), ang(rng));
    }
    return make_channel_state(std::move(g));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// --- 1: max-min output on random instances ---------------------------------
Verdict maxmin_property(const Context&)
{
    constexpr double zeta = default_bisection_tol;
    std::mt19937_64 rng(mix_seed(2024, 1));
    std::uniform_int_distribution<std::size_t> kd(1, 6);
    std::uniform_real_distribution<double> pdb(-20.0, 10.0);
    std::uniform_real_distribution<double> frac(0.05, 0.999);
    const double sigma2 = 1e-12;
    double worst_budget = 0.0, worst_spread = 0.0, worst_lp = 0.0;
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_state(rng, kd(rng));
        const double p = std::pow(10.0, pdb(rng) / 10.0);
        const auto mm = maxmin_power(s, p, sigma2);
        const double budget = std::abs(mm.q_opt.total() - p) / p;
        const auto sinr = decode_chain_sinrs(s, mm.q_opt, sigma2);
        const auto [lo, hi] = std::minmax_element(sinr.begin(), sinr.end());
        const double spread = (*hi - *lo) / *hi;

        const double t = frac(rng) * mm.t_opt;
        const auto rec = feasibility_min_power(s, t, p, sigma2);
        const auto lp = oracle::lp_min_power(s, t, p, sigma2);
        double lp_err = 0.0;
        if (!rec || !lp) {
            lp_err = 1.0;
        } else {
            for (std::size_t u = 0; u < s.size(); ++u) {
                lp_err = std::max(lp_err, rel(rec->q[u], (*lp)[u]));
            }
        }
        worst_budget = std::max(worst_budget, budget);
        worst_spread = std::max(worst_spread, spread);
        worst_lp = std::max(worst_lp, lp_err);
        bad += (budget > 1e-9 || spread > 2.0 * zeta || lp_err > 1e-9) ? 1 : 0;
    }
    return {bad == 0, "1000 instances, " + std::to_string(bad) + " violations; max |sum q - P|/P " +
                          fmt(worst_budget) + " (<= 1e-9), max SINR spread " + fmt(worst_spread) +
                          " (<= 2e-6), max LP disagreement " + fmt(worst_lp) + " (<= 1e-9)"};
}

// --- 2: two equal-gain users -----------------------------------------------
Verdict equal_gain_pair(const Context&)
{
    const double gamma = 1e-8;
    const double sigma2 = 1e-12;
    const double p = 8.0 * sigma2 / gamma;
    const auto s = make_channel_state({cplx(std::sqrt(gamma), 0.0), cplx(0.0, std::sqrt(gamma))});
    const auto mm = maxmin_power(s, p, sigma2);
    const double want_t = -1.0 + std::sqrt(1.0 + p * gamma / sigma2);
    const double et = rel(mm.t_opt, want_t);
    const double e0 = rel(std::max(mm.q_opt.q[0], mm.q_opt.q[1]), 0.75 * p);
    const double e1 = rel(std::min(mm.q_opt.q[0], mm.q_opt.q[1]), 0.25 * p);
    const double worst = std::max({et, e0, e1});
    return {worst <= 1e-6, "t_opt " + fmt(mm.t_opt) + " vs " + fmt(want_t) + ", q = (" + fmt(mm.q_opt.q[0] / p) +
                               ", " + fmt(mm.q_opt.q[1] / p) + ") P; max relative error " + fmt(worst) +
                               " (<= 1e-6)"};
}

// --- 3: simplex projection -------------------------------------------------
std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n, double scale)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v) {
        x = e(rng);
        s += x;
    }
    for (auto& x : v) {
        x *= scale / s;
    }
    return v;
}

double dist(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

Verdict projection_optimality(const Context&)
{
    std::mt19937_64 rng(mix_seed(2024, 3));
    std::uniform_int_distribution<std::size_t> kd(1, 6);
    std::uniform_real_distribution<double> val(-1.0, 2.0);
    std::normal_distribution<double> jitter(0.0, 1e-3);
    const double p = 1.0;
    std::size_t closer = 0, not_idempotent = 0, noop_broken = 0, inside = 0;
    double worst_margin = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = kd(rng);
        std::vector<double> q_hat;
        if (i % 3 == 0) {
            // Uniform point of {q >= 0, sum q <= P}: drop the slack coordinate.
            q_hat = dirichlet(rng, k + 1, p);
            q_hat.pop_back();
        } else {
            q_hat.resize(k);
            for (auto& v : q_hat) {
                v = val(rng);
            }
        }
        const bool feasible_in = std::all_of(q_hat.begin(), q_hat.end(), [](double v) { return v >= 0.0; }) &&
                                 std::accumulate(q_hat.begin(), q_hat.end(), 0.0) <= p;
        const auto q = simplex_project(q_hat, p).q_proj.q;
        if (feasible_in) {
            ++inside;
            noop_broken += q == q_hat ? 0 : 1;
        }
        not_idempotent += simplex_project(q, p).q_proj.q == q ? 0 : 1;

        const double best = dist(q, q_hat);
        for (int c = 0; c < 10000; ++c) {
            // Candidates on {q >= 0, sum q = P}, the set the threshold rule projects onto
            // whenever the input is not already feasible.
            std::vector<double> cand;
            if (c % 2 == 0) {
                cand = dirichlet(rng, k, p);
            } else {
                // Neighbour of the projection on the same face.
                cand = q;
                double s = 0.0;
                for (auto& v : cand) {
                    v = std::max(0.0, v + jitter(rng));
                    s += v;
                }
                if (!(s > 0.0)) {
                    continue;
                }
                for (auto& v : cand) {
                    v *= p / s;
                }
            }
            const double margin = best - dist(cand, q_hat);
            worst_margin = std::max(worst_margin, margin);
            closer += margin > 1e-9 ? 1 : 0;
        }
    }
    const bool pass = closer == 0 && not_idempotent == 0 && noop_broken == 0;
    return {pass, "1000 inputs x 1e4 candidates on the budget face: " + std::to_string(closer) +
                      " closer by > 1e-9 (largest margin " + fmt(worst_margin) + "); " +
                      std::to_string(not_idempotent) + " not idempotent; " + std::to_string(noop_broken) + "/" +
                      std::to_string(inside) + " feasible inputs changed"};
}

// --- 4: iterative vs brute-force placement gaps -----------------------------
Verdict placement_gaps(const Context& ctx)
{
    const SystemConfig base;
    const auto params = PlacementParams::defaults(base);
    const std::vector<std::size_t> users = {3, 4};
    const std::vector<double> snrs = {10.0, 20.0};
    const auto cells = mc::table1_validation(base, params, users, snrs, 30, 12, 1, ctx.workers);
    bool pass = true;
    std::string detail = "G=12, 30 layouts;";
    for (const auto& c : cells) {
        pass = pass && c.mrg <= 0.05 && c.xrg <= 0.10;
        detail += " K=" + std::to_string(c.users) + "/" + fmt(c.snr_db) + "dB MRG " + fmt(c.mrg) + " XRG " +
                  fmt(c.xrg) + ";";
    }
    detail += " limits MRG <= 0.05, XRG <= 0.10";
    return {pass, detail};
}

// --- 5: initialisation weight robustness ------------------------------------
Verdict alpha_robustness(const Context& ctx)
{
    SystemConfig cfg;
    cfg.users = 4;
    cfg.antennas = 5;
    cfg.total_power_w = dbm_to_watts(10.0);
    const auto params = PlacementParams::defaults(cfg);
    std::vector<double> alphas;
    for (int i = 1; i <= 9; ++i) {
        alphas.push_back(0.1 * i);
    }
    const auto study = mc::alpha_study(cfg, params, 200, alphas, 1, ctx.workers);
    std::size_t negative = 0;
    double min_median = std::numeric_limits<double>::infinity();
    std::size_t positive_medians = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        for (double d : study.delta_sr[i]) {
            negative += d < 0.0 ? 1 : 0;
        }
        min_median = std::min(min_median, study.stats[i].median);
        positive_medians += study.stats[i].median > 0.0 ? 1 : 0;
    }
    return {negative == 0 && min_median >= 0.0,
            "9 alphas x 200 layouts: " + std::to_string(negative) + " negative gains; smallest median gain " +
                fmt(min_median) + " bps/Hz (>= 0); " + std::to_string(positive_medians) +
                "/9 medians strictly positive"};
}

// --- 6: backprop against central differences --------------------------------
Verdict gradient_check(const Context&)
{
    auto model = nn::make_model(4);
    nn::init_glorot(model, mix_seed(2024, 6));
    std::mt19937_64 rng(mix_seed(2024, 7));
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto block : model.params.blocks()) {
        for (auto& v : block) {
            v += 0.05 * n(rng);
        }
    }
    nn::FeatureMap x(4, 2, 1);
    for (auto& v : x.data) {
        v = n(rng);
    }
    const std::vector<double> target = {0.4, 0.3, 0.2, 0.1};
    nn::ForwardCache cache;
    std::mt19937_64 unused(0);
    const auto pred = nn::forward(model, x, nn::Mode::infer, unused, &cache);
    auto analytic = model.params.zeros_like();
    nn::backward(model, cache, nn::mae_grad(pred, target), analytic);
    const auto numeric = oracle::cnn_numeric_gradient(model, x, target, 1e-5);

    const auto ab = std::as_const(analytic).blocks();
    const auto nb = numeric.blocks();
    std::size_t count = 0, bad = 0;
    double worst = 0.0;
    for (std::size_t b = 0; b < ab.size(); ++b) {
        for (std::size_t i = 0; i < ab[b].size(); ++i) {
            ++count;
            // Entries that are zero on both sides (inactive units) agree exactly.
            const double scale = std::max({std::abs(ab[b][i]), std::abs(nb[b][i]), 1e-7});
            const double err = std::abs(ab[b][i] - nb[b][i]) / scale;
            worst = std::max(worst, err);
            bad += err > 1e-4 ? 1 : 0;
        }
    }
    return {bad == 0, std::to_string(count) + " parameters, " + std::to_string(bad) +
                          " over tolerance; worst relative error " + fmt(worst) + " (<= 1e-4)"};
}

// --- 7: training efficacy at desk scale -------------------------------------
Verdict training_efficacy(const Context&)
{
    SystemConfig cfg;
    cfg.users = 4;
    cfg.antennas = 4;
    cfg.total_power_w = mc::power_from_snr_db(10.0, cfg.noise_power_w);
    nn::DatasetOptions opt;
    opt.n_train = 1000;
    opt.n_test = 200;
    opt.seed = 7;
    const auto [train, test] = nn::generate_dataset(cfg, PlacementParams::defaults(cfg), opt);
    nn::TrainConfig tc;
    tc.seed = 7;
    const auto result = nn::train(train, tc);

    std::size_t improved = 0;
    std::string folds;
    for (const auto& f : result.folds) {
        improved += f.val_mae.back() < f.val_mae.front() ? 1 : 0;
        folds += " " + fmt(f.val_mae.front()) + "->" + fmt(f.val_mae.back());
    }
    std::size_t feasible = 0;
    double deviation = 0.0;
    for (const auto& s : test.samples) {
        const auto q_hat = nn::predict_power(result.model, s.gains, s.total_power_w);
        const auto proj = simplex_project(q_hat, s.total_power_w).q_proj;
        feasible += proj.feasible() ? 1 : 0;
        double l1 = 0.0;
        for (std::size_t k = 0; k < q_hat.size(); ++k) {
            l1 += std::abs(proj.q[k] - q_hat[k]);
        }
        deviation += l1 / s.total_power_w;
    }
    deviation /= static_cast<double>(test.size());
    const bool pass = improved == result.folds.size() && feasible == test.size() && deviation <= 0.02;
    return {pass, "val MAE first->final per fold:" + folds + "; " + std::to_string(feasible) + "/" +
                      std::to_string(test.size()) + " feasible; mean projection deviation " + fmt(deviation) +
                      " P (<= 0.02 P)"};
}

// --- 8: scheme orderings ----------------------------------------------------
Verdict scheme_orderings(const Context& ctx)
{
    SystemConfig sys;
    sys.users = 5;
    sys.antennas = 8;
    const auto params = PlacementParams::defaults(sys);
    bool pass = true;
    std::string detail;
    for (double snr : {10.0, 20.0, 30.0}) {
        auto cfg = sys;
        cfg.total_power_w = mc::power_from_snr_db(snr, cfg.noise_power_w);
        nn::DatasetOptions opt;
        opt.n_train = 1000;
        opt.n_test = 0;
        opt.seed = mix_seed(8, static_cast<std::uint64_t>(snr));
        const auto data = nn::generate_dataset(cfg, params, opt).first;
        nn::TrainConfig tc;
        tc.seed = opt.seed;
        const auto model = std::make_shared<nn::CnnModel>(nn::train(data, tc).model);

        mc::ExperimentSpec spec;
        spec.schemes = {mc::Scheme::cnn_noma, mc::Scheme::fpa_noma, mc::Scheme::pa_oma, mc::Scheme::c_oma};
        spec.sweep_values = {snr};
        spec.trials = 500;
        spec.base_seed = 88;
        spec.system = cfg;
        spec.placement = params;
        spec.models[cfg.users] = model;
        spec.workers = ctx.workers;
        const auto result = mc::run_experiment(spec);

        std::map<mc::Scheme, double> mean;
        std::map<mc::Scheme, std::size_t> count;
        std::vector<double> pooled;
        for (const auto& r : result.records) {
            mean[r.scheme] += r.sum_rate;
            ++count[r.scheme];
            if (r.scheme == mc::Scheme::cnn_noma || r.scheme == mc::Scheme::fpa_noma) {
                pooled.push_back(r.far_user_rate);
            }
        }
        for (auto& [s, m] : mean) {
            m /= static_cast<double>(count[s]);
        }
        // Targets spread over the observed far-user rates.
        std::vector<double> targets = {0.0};
        for (int i = 1; i <= 19; ++i) {
            targets.push_back(mc::quantile(pooled, 0.05 * i));
        }
        targets.push_back(*std::max_element(pooled.begin(), pooled.end()) * 1.01);
        const auto curve = mc::outage_from_records(result.records, targets);
        const auto& cnn = curve.probability.at(mc::Scheme::cnn_noma);
        const auto& fpa = curve.probability.at(mc::Scheme::fpa_noma);
        std::size_t worse = 0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            worse += cnn[i] > fpa[i] ? 1 : 0;
        }
        const bool ok = mean[mc::Scheme::cnn_noma] >= mean[mc::Scheme::fpa_noma] &&
                        mean[mc::Scheme::pa_oma] >= mean[mc::Scheme::c_oma] && worse == 0 &&
                        result.failures.empty();
        pass = pass && ok;
        detail += " " + fmt(snr) + "dB: CNN " + fmt(mean[mc::Scheme::cnn_noma]) + " vs FPA " +
                  fmt(mean[mc::Scheme::fpa_noma]) + ", PA-OMA " + fmt(mean[mc::Scheme::pa_oma]) + " vs C-OMA " +
                  fmt(mean[mc::Scheme::c_oma]) + ", outage CNN > FPA at " + std::to_string(worse) + "/" +
                  std::to_string(targets.size()) + " targets;";
    }
    detail.pop_back();
    return {pass, "M=8 K=5, 500 paired trials per SNR;" + detail};
}

// --- 9: curvature of the channel power --------------------------------------
Verdict curvature(const Context&)
{
    const SystemConfig cfg;
    std::mt19937_64 rng(mix_seed(2024, 9));
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Point3 user{u(rng), u(rng), 0.0};
        const double a1 = u(rng);
        const double a2 = u(rng);
        worst = std::max(worst, rel(channel_power_curvature(a1, a2, user, cfg),
                                    oracle::curvature_exact(a1, a2, user, cfg)));
    }
    std::size_t pos = 0, neg = 0;
    const Point3 user{0.0, 2.0, 0.0};
    for (int i = 0; i < 2000; ++i) {
        const double c = channel_power_curvature(-0.5 + 2e-4 * i, 1.0, user, cfg);
        pos += c > 0.0 ? 1 : 0;
        neg += c < 0.0 ? 1 : 0;
    }
    return {worst <= 1e-4 && pos > 0 && neg > 0,
            "100 geometries, worst relative error " + fmt(worst) + " (<= 1e-4); sweep of 2000 points: " +
                std::to_string(pos) + " convex, " + std::to_string(neg) + " concave"};
}

// --- 10: reruns are byte-identical ------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            files[fs::relative(e.path(), dir).string()] = s.str();
        }
    }
    return files;
}

int run_cli(const Context& ctx, const std::string& args, const fs::path& out)
{
    fs::create_directories(out);
    const std::string cmd = "\"" + ctx.cli + "\" " + args + " --out \"" + out.string() + "\" > \"" +
                            (out / "stdout.txt").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism(const Context& ctx)
{
    const auto root = ctx.work / "c10";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto write = [&](const std::string& name, const std::string& text) {
        io::write_text(root / name, text);
        return (root / name).string();
    };
    const auto base = write("base.json", R"({
  "system": {"users": 3, "antennas": 3, "snr_db": 20},
  "dataset": {"n_train": 60, "n_test": 20},
  "train": {"epochs": 3, "batch": 10},
  "experiment": {"schemes": ["CNN-NOMA", "C-NOMA", "FPA-NOMA", "PA-OMA", "C-OMA"],
                 "sweep_values": [10, 20], "trials": 3,
                 "table_users": [2], "table_snr_db": [10], "grid_points": 6}
})");
    const auto outage = write("outage.json", R"({
  "system": {"users": 3, "antennas": 3},
  "experiment": {"schemes": ["C-NOMA", "FPA-NOMA", "PA-OMA", "C-OMA"],
                 "sweep_var": "target_rate", "sweep_values": [0, 1e-6, 1e-5], "trials": 4}
})");
    const auto alpha = write("alpha.json", R"({
  "system": {"users": 3, "antennas": 4},
  "experiment": {"sweep_var": "alpha", "sweep_values": [0.2, 0.8], "trials": 3}
})");
    const auto gains = write("gains.csv", "re_g,im_g\n3e-5,1e-5\n-8e-6,2e-6\n1e-6,-4e-6\n");

    // Reference artefacts shared by both runs of the dependent commands.
    const auto ref = root / "ref";
    if (run_cli(ctx, "dataset --config " + base, ref) != 0 ||
        run_cli(ctx, "train --config " + base + " --data " + (ref / "train.csv").string(), ref) != 0) {
        return {false, "could not prepare the reference dataset and model"};
    }
    const auto model = (ref / "model.pcnn").string();
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"placement", "placement --config " + base + " --seed 7"},
        {"power", "power --gains " + gains},
        {"dataset", "dataset --config " + base + " --seed 7"},
        {"train", "train --config " + base + " --seed 7 --data " + (ref / "train.csv").string()},
        {"infer", "infer --config " + base + " --model " + model + " --data " + (ref / "test.csv").string()},
        {"sweep", "sweep --config " + base + " --seed 7 --model " + model},
        {"sweep-workers", "sweep --config " + base + " --seed 7 --workers 3 --model " + model},
        {"outage", "outage --config " + outage + " --seed 7"},
        {"alpha", "alpha --config " + alpha + " --seed 7"},
        {"table1", "table1 --config " + base + " --seed 7 --trials 2"},
        {"validate", "validate --seed 7"},
    };
    bool pass = true;
    std::string detail;
    for (const auto& [name, args] : commands) {
        const auto a = root / (name + "_a");
        const auto b = root / (name + "_b");
        const int ra = run_cli(ctx, args, a);
        const int rb = run_cli(ctx, args, b);
        const auto sa = snapshot(a);
        const bool same = ra == 0 && rb == 0 && sa == snapshot(b);
        pass = pass && same;
        detail += " " + name + (same ? " ok" : " DIFFERS (exit " + std::to_string(ra) + "/" + std::to_string(rb) + ")") +
                  " [" + std::to_string(sa.size()) + " files];";
    }
    const bool threads_agree = snapshot(root / "sweep_a") == snapshot(root / "sweep-workers_a");
    pass = pass && threads_agree;
    detail += std::string(" 1 vs 3 workers ") + (threads_agree ? "identical" : "DIFFER");
    return {pass, "each command run twice, outputs compared byte for byte:" + detail};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    int which = 0;
    Context ctx;
    ctx.work = "acceptance_work";
    std::string work;
    app.add_option("--criterion", which, "Criterion number, 0 for all")->check(CLI::Range(0, 10));
    app.add_option("--cli", ctx.cli, "Path to the pinch executable");
    app.add_option("--work", work, "Scratch directory");
    app.add_option("--workers", ctx.workers, "Worker threads for the Monte-Carlo criteria");
    CLI11_PARSE(app, argc, argv);
    if (!work.empty()) {
        ctx.work = work;
    }
    fs::create_directories(ctx.work);

    struct Criterion {
        const char* title;
        double budget_s;  // 0: no runtime limit
        std::function<Verdict(const Context&)> run;
    };
    const std::map<int, Criterion> criteria = {
        {1, {"max-min correctness", 10.0, maxmin_property}},
        {2, {"equal-gain closed form", 0.0, equal_gain_pair}},
        {3, {"projection optimality", 20.0, projection_optimality}},
        {4, {"placement gaps vs brute force", 600.0, placement_gaps}},
        {5, {"initialisation robustness", 900.0, alpha_robustness}},
        {6, {"CNN gradient check", 60.0, gradient_check}},
        {7, {"CNN training efficacy", 1200.0, training_efficacy}},
        {8, {"scheme orderings", 1800.0, scheme_orderings}},
        {9, {"channel curvature", 10.0, curvature}},
        {10, {"determinism", 0.0, determinism}},
    };

    bool all = true;
    for (const auto& [n, c] : criteria) {
        if (which != 0 && which != n) {
            continue;
        }
        if (n == 10 && ctx.cli.empty()) {
            std::printf("FAIL criterion 10 (%s): --cli was not given\n", c.title);
            all = false;
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run(ctx);
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
        const bool pass = v.pass && in_time;
        char limit[64] = "";
        if (c.budget_s > 0.0) {
            std::snprintf(limit, sizeof limit, " (< %.0f s%s)", c.budget_s, in_time ? "" : ", EXCEEDED");
        }
        std::printf("%s criterion %d (%s): %s; runtime %.1f s%s\n", pass ? "PASS" : "FAIL", n, c.title,
                    v.detail.c_str(), secs, limit);
        std::fflush(stdout);
        all = all && pass;
    }
    return all ? 0 : 1;
}
