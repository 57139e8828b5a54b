// Command-line front end: placement, power allocation, dataset generation,
// CNN training/inference, Monte-Carlo experiments and the oracle suites.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinch/config.hpp"
#include "pinch/errors.hpp"
#include "pinch/io.hpp"
#include "pinch/layout.hpp"
#include "pinch/model_file.hpp"
#include "pinch/montecarlo.hpp"
#include "pinch/neural/training.hpp"
#include "pinch/placement.hpp"
#include "pinch/power_alloc.hpp"
#include "pinch/rng.hpp"
#include "pinch/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace pinch;

namespace {

enum ExitCode { ok = 0, config_error = 1, infeasible = 2, corrupt = 3, validation_failed = 4 };

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::size_t workers = 1;
    std::string model;
    std::optional<std::size_t> trials;
    bool timing = false;
};

RunConfig load_run_config(const CommonFlags& f)
{
    RunConfig rc = f.config.empty() ? parse_config("{}") : load_config(f.config);
    if (f.seed) {
        rc.set_seed(*f.seed);
    }
    if (f.trials) {
        rc.experiment.trials = *f.trials;
    }
    if (f.workers < 1) {
        throw ConfigError("workers: must be >= 1");
    }
    return rc;
}

std::string trace_csv(const PlacementSolution& sol)
{
    std::string out = "iteration,sum_rate_bpshz\n";
    for (std::size_t i = 0; i < sol.trace.size(); ++i) {
        out += std::to_string(i) + "," + io::format_double(sol.trace[i]) + "\n";
    }
    return out;
}

UserLayout read_layout_csv(const std::string& path)
{
    std::istringstream in(io::read_text(path));
    std::string line;
    if (!std::getline(in, line) || line != "x_m,y_m") {
        throw ConfigError("layout: expected header 'x_m,y_m' in " + path);
    }
    UserLayout layout;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("layout: malformed row '" + line + "'");
        }
        layout.positions.push_back({io::parse_double(line.substr(0, comma)), io::parse_double(line.substr(comma + 1)), 0.0});
    }
    return layout;
}

int cmd_placement(const CommonFlags& f, const std::string& layout_path)
{
    auto rc = load_run_config(f);
    UserLayout layout;
    if (layout_path.empty()) {
        std::mt19937_64 rng(mix_seed(rc.seed, 0, 0));
        layout = sample_layout(rc.system, rng);
    } else {
        layout = read_layout_csv(layout_path);
        rc.system.users = layout.size();
    }
    const auto params = rc.resolved_placement();
    const auto sol = refine_placement(layout, rc.system, params);

    ordered_json users = ordered_json::array();
    for (const auto& u : layout.positions) {
        users.push_back({u.x, u.y});
    }
    const ordered_json doc = {
        {"seed", rc.seed},
        {"users_xy_m", users},
        {"antenna_x_m", sol.placement.xs},
        {"height_m", sol.placement.height},
        {"sr_init_bpshz", sol.sr_init},
        {"sr_final_bpshz", sol.sr_final},
        {"iterations", sol.iterations},
    };
    io::write_text(fs::path(f.out) / "placement.json", doc.dump(2) + "\n");
    io::write_text(fs::path(f.out) / "trace.csv", trace_csv(sol));
    std::cout << "SR_init " << io::format_double(sol.sr_init) << " bps/Hz\n"
              << "SR_final " << io::format_double(sol.sr_final) << " bps/Hz\n"
              << "iterations " << sol.iterations << "\n";
    return ok;
}

int cmd_power(const CommonFlags& f, const std::string& gains_path, std::optional<double> power_w,
              std::optional<double> noise_w)
{
    const auto rc = load_run_config(f);
    if (gains_path.empty()) {
        throw ConfigError("gains: a gains CSV is required");
    }
    const double p = power_w.value_or(rc.system.total_power_w);
    const double sigma2 = noise_w.value_or(rc.system.noise_power_w);
    if (!(p > 0.0) || !(sigma2 > 0.0)) {
        throw ConfigError("power_w/noise_w: must be > 0");
    }
    const auto state = make_channel_state(io::parse_gains_csv(io::read_text(gains_path)));
    if (state.size() == 0) {
        throw ConfigError("gains: no users in " + gains_path);
    }
    const auto res = maxmin_power(state, p, sigma2);
    const ordered_json doc = {
        {"q_w", res.q_opt.q},
        {"t_opt", res.t_opt},
        {"achieved_sinrs", res.achieved_sinrs},
        {"iterations", res.iterations},
    };
    io::write_text(fs::path(f.out) / "allocation.json", doc.dump(2) + "\n");
    std::cout << "t_opt " << io::format_double(res.t_opt) << "\n";
    return ok;
}

int cmd_dataset(const CommonFlags& f)
{
    const auto rc = load_run_config(f);
    const auto [train, test] = nn::generate_dataset(rc.system, rc.resolved_placement(), rc.dataset);
    io::write_text(fs::path(f.out) / "train.csv", io::dataset_csv(train));
    io::write_text(fs::path(f.out) / "test.csv", io::dataset_csv(test));
    std::cout << "train " << train.size() << " samples, test " << test.size() << " samples\n";
    return ok;
}

int cmd_train(const CommonFlags& f, const std::string& data_path)
{
    const auto rc = load_run_config(f);
    const auto path = data_path.empty() ? fs::path(f.out) / "train.csv" : fs::path(data_path);
    const auto data = io::parse_dataset_csv(io::read_text(path));
    const auto result = nn::train(data, rc.train);
    const auto model_path = f.model.empty() ? fs::path(f.out) / "model.pcnn" : fs::path(f.model);
    if (model_path.has_parent_path()) {
        fs::create_directories(model_path.parent_path());
    }
    save_model(result.model, model_path);
    io::write_text(fs::path(f.out) / "curves.csv", io::curves_csv(result));
    ordered_json folds = ordered_json::array();
    for (const auto& c : result.folds) {
        folds.push_back({{"epochs", c.val_mae.size()},
                         {"first_val_mae", c.val_mae.front()},
                         {"best_val_mae", c.best_val_mae},
                         {"best_epoch", c.best_epoch}});
    }
    const ordered_json doc = {{"samples", data.size()}, {"best_fold", result.best_fold}, {"folds", folds}};
    io::write_text(fs::path(f.out) / "train_summary.json", doc.dump(2) + "\n");
    std::cout << "best fold " << result.best_fold << ", validation MAE "
              << io::format_double(result.folds[result.best_fold].best_val_mae) << "\n";
    return ok;
}

int cmd_infer(const CommonFlags& f, const std::string& data_path)
{
    load_run_config(f);
    if (f.model.empty()) {
        throw ConfigError("model: --model is required");
    }
    const auto model = load_model(f.model);
    const auto path = data_path.empty() ? fs::path(f.out) / "test.csv" : fs::path(data_path);
    const auto data = io::parse_dataset_csv(io::read_text(path));
    std::string csv = "sample_id,k,q_hat_w,q_proj_w,q_target_w\n";
    double deviation = 0.0;
    std::size_t feasible = 0;
    for (const auto& s : data.samples) {
        const auto q_hat = nn::predict_power(model, s.gains, s.total_power_w);
        const auto proj = simplex_project(q_hat, s.total_power_w).q_proj;
        double l1 = 0.0;
        for (std::size_t k = 0; k < q_hat.size(); ++k) {
            l1 += std::abs(proj.q[k] - q_hat[k]);
            csv += std::to_string(s.id) + "," + std::to_string(k) + "," + io::format_double(q_hat[k]) + "," +
                   io::format_double(proj.q[k]) + "," + io::format_double(s.target_q[k]) + "\n";
        }
        deviation += l1 / s.total_power_w;
        feasible += proj.feasible() ? 1 : 0;
    }
    const double n = static_cast<double>(std::max<std::size_t>(data.size(), 1));
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const ordered_json doc = {
        {"samples", data.size()},
        {"mae_budget_fraction", nn::evaluate_mae(model, data, all)},
        {"mean_projection_deviation_fraction", deviation / n},
        {"feasible_fraction", static_cast<double>(feasible) / n},
    };
    io::write_text(fs::path(f.out) / "allocations.csv", csv);
    io::write_text(fs::path(f.out) / "infer_summary.json", doc.dump(2) + "\n");
    return ok;
}

mc::ModelMap load_models(const CommonFlags& f, const RunConfig& rc)
{
    mc::ModelMap models;
    if (!rc.experiment.model_dir.empty()) {
        const std::regex name(R"(model_K(\d+)\.pcnn)");
        for (const auto& entry : fs::directory_iterator(rc.experiment.model_dir)) {
            std::smatch m;
            const auto file = entry.path().filename().string();
            if (std::regex_match(file, m, name)) {
                auto model = std::make_shared<const nn::CnnModel>(load_model(entry.path()));
                models[model->trained_k] = model;
            }
        }
    }
    if (!f.model.empty()) {
        auto model = std::make_shared<const nn::CnnModel>(load_model(f.model));
        models[model->trained_k] = model;
    }
    return models;
}

mc::ExperimentSpec make_spec(const CommonFlags& f, const RunConfig& rc)
{
    mc::ExperimentSpec spec;
    spec.schemes = rc.experiment.schemes;
    spec.sweep_var = rc.experiment.sweep_var;
    spec.sweep_values = rc.experiment.sweep_values;
    spec.trials = rc.experiment.trials;
    spec.base_seed = rc.seed;
    spec.system = rc.system;
    spec.placement = rc.resolved_placement();
    spec.derive_placement_geometry = !rc.placement_guard_set && !rc.placement_bounds_set;
    spec.target_rate = rc.experiment.target_rate_bpshz;
    spec.workers = f.workers;
    if (std::find(spec.schemes.begin(), spec.schemes.end(), mc::Scheme::cnn_noma) != spec.schemes.end()) {
        spec.models = load_models(f, rc);
    }
    return spec;
}

void write_experiment(const CommonFlags& f, const mc::ExperimentResult& result)
{
    io::write_text(fs::path(f.out) / "results.csv", io::results_csv(result, f.timing));
    io::write_text(fs::path(f.out) / "summary.json", io::summary_json(result));
    std::cout << result.records.size() << " records, " << result.failures.size() << " failed trials\n";
}

int cmd_sweep(const CommonFlags& f)
{
    const auto rc = load_run_config(f);
    write_experiment(f, mc::run_experiment(make_spec(f, rc)));
    return ok;
}

int cmd_outage(const CommonFlags& f)
{
    const auto rc = load_run_config(f);
    auto spec = make_spec(f, rc);
    spec.sweep_var = mc::SweepVar::target_rate;
    const auto result = mc::run_experiment(spec);
    write_experiment(f, result);
    const auto curve = mc::outage_from_records(result.records, spec.sweep_values);
    std::string csv = "scheme,target_rate_bpshz,outage_probability\n";
    for (const auto& [scheme, probs] : curve.probability) {
        for (std::size_t i = 0; i < probs.size(); ++i) {
            csv += std::string(mc::scheme_name(scheme)) + "," + io::format_double(curve.targets[i]) + "," +
                   io::format_double(probs[i]) + "\n";
        }
    }
    io::write_text(fs::path(f.out) / "outage.csv", csv);
    return ok;
}

int cmd_alpha(const CommonFlags& f)
{
    const auto rc = load_run_config(f);
    std::vector<double> alphas = rc.experiment.sweep_values;
    if (rc.experiment.sweep_var != mc::SweepVar::alpha) {
        alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    }
    const auto study =
        mc::alpha_study(rc.system, rc.resolved_placement(), rc.experiment.trials, alphas, rc.seed, f.workers);
    std::string csv = "alpha,layout,sr_init_bpshz,sr_final_bpshz,delta_sr_bpshz\n";
    ordered_json stats = ordered_json::array();
    for (std::size_t i = 0; i < study.alphas.size(); ++i) {
        for (std::size_t t = 0; t < study.delta_sr[i].size(); ++t) {
            csv += io::format_double(study.alphas[i]) + "," + std::to_string(t) + "," +
                   io::format_double(study.sr_init[i][t]) + "," + io::format_double(study.sr_final[i][t]) + "," +
                   io::format_double(study.delta_sr[i][t]) + "\n";
        }
        const auto& b = study.stats[i];
        stats.push_back({{"alpha", study.alphas[i]},
                         {"median", b.median},
                         {"q1", b.q1},
                         {"q3", b.q3},
                         {"iqr", b.iqr},
                         {"whisker_lo", b.whisker_lo},
                         {"whisker_hi", b.whisker_hi},
                         {"outliers", b.outliers}});
    }
    io::write_text(fs::path(f.out) / "alpha_samples.csv", csv);
    io::write_text(fs::path(f.out) / "alpha_summary.json", ordered_json{{"layouts", rc.experiment.trials}, {"stats", stats}}.dump(2) + "\n");
    return ok;
}

int cmd_table1(const CommonFlags& f)
{
    const auto rc = load_run_config(f);
    const auto cells = mc::table1_validation(rc.system, rc.resolved_placement(), rc.experiment.table_users,
                                             rc.experiment.table_snr_db, rc.experiment.trials,
                                             rc.experiment.grid_points, rc.seed, f.workers);
    std::string csv = "K,snr_db,mean_sr_it_bpshz,mean_sr_bf_bpshz,mrg,xrg\n";
    ordered_json doc = ordered_json::array();
    for (const auto& c : cells) {
        csv += std::to_string(c.users) + "," + io::format_double(c.snr_db) + "," + io::format_double(c.mean_sr_it) +
               "," + io::format_double(c.mean_sr_bf) + "," + io::format_double(c.mrg) + "," +
               io::format_double(c.xrg) + "\n";
        doc.push_back({{"K", c.users}, {"snr_db", c.snr_db}, {"mean_sr_it_bpshz", c.mean_sr_it},
                       {"mean_sr_bf_bpshz", c.mean_sr_bf}, {"mrg", c.mrg}, {"xrg", c.xrg}, {"gaps", c.gaps}});
        std::cout << "K=" << c.users << " SNR=" << c.snr_db << " dB  MRG " << io::format_double(c.mrg) << "  XRG "
                  << io::format_double(c.xrg) << "\n";
    }
    io::write_text(fs::path(f.out) / "table1.csv", csv);
    io::write_text(fs::path(f.out) / "table1.json", doc.dump(2) + "\n");
    return ok;
}

int cmd_validate(const CommonFlags& f, double perturbation)
{
    ValidationOptions opt;
    opt.seed = f.seed.value_or(1);
    opt.gradient_perturbation = perturbation;
    bool all = true;
    for (const auto& s : run_validation(opt)) {
        std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << "  " << (s.checks - s.failures) << "/" << s.checks
                  << " checks  (" << s.detail << ")\n";
        all = all && s.passed();
    }
    return all ? ok : validation_failed;
}

void add_common(CLI::App* sub, CommonFlags& f)
{
    sub->add_option("--config", f.config, "JSON configuration file");
    sub->add_option("--seed", f.seed, "Base seed (overrides the config)");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--workers", f.workers, "Worker threads");
    sub->add_option("--model", f.model, "Model file");
    sub->add_option("--trials", f.trials, "Trial / layout count");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pinching-antenna NOMA placement, power allocation and simulation"};
    app.require_subcommand(1);
    CommonFlags flags;
    std::string layout_path, gains_path, data_path;
    std::optional<double> power_w, noise_w;
    double perturbation = 0.0;
    std::function<int()> action;

    auto* placement = app.add_subcommand("placement", "Two-stage antenna placement for one layout");
    add_common(placement, flags);
    placement->add_option("--layout", layout_path, "CSV of user positions (x_m,y_m)");
    placement->callback([&] { action = [&] { return cmd_placement(flags, layout_path); }; });

    auto* power = app.add_subcommand("power", "Max-min power allocation for given channels");
    add_common(power, flags);
    power->add_option("--gains", gains_path, "CSV of complex gains (re_g,im_g)");
    power->add_option("--power-w", power_w, "Total power budget in W");
    power->add_option("--noise-w", noise_w, "Noise power in W");
    power->callback([&] { action = [&] { return cmd_power(flags, gains_path, power_w, noise_w); }; });

    auto* dataset = app.add_subcommand("dataset", "Generate train/test datasets");
    add_common(dataset, flags);
    dataset->callback([&] { action = [&] { return cmd_dataset(flags); }; });

    auto* train = app.add_subcommand("train", "Train the power-allocation CNN");
    add_common(train, flags);
    train->add_option("--data", data_path, "Training dataset CSV");
    train->callback([&] { action = [&] { return cmd_train(flags, data_path); }; });

    auto* infer = app.add_subcommand("infer", "Run a trained CNN on a dataset");
    add_common(infer, flags);
    infer->add_option("--data", data_path, "Dataset CSV");
    infer->callback([&] { action = [&] { return cmd_infer(flags, data_path); }; });

    for (auto [name, help, fn] : {std::tuple{"sweep", "Sum-rate sweep over one variable", &cmd_sweep},
                                  std::tuple{"outage", "Far-user outage over target rates", &cmd_outage},
                                  std::tuple{"alpha", "Initialisation-weight robustness study", &cmd_alpha},
                                  std::tuple{"table1", "Iterative vs brute-force placement gaps", &cmd_table1}}) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, flags);
        sub->add_flag("--timing", flags.timing, "Write measured wall times");
        sub->callback([&, fn] { action = [&, fn] { return fn(flags); }; });
    }

    auto* validate = app.add_subcommand("validate", "Run the oracle suites");
    add_common(validate, flags);
    validate->add_option("--perturb-gradient", perturbation, "Inject a relative error into one gradient entry")
        ->group("");
    validate->callback([&] { action = [&] { return cmd_validate(flags, perturbation); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const CorruptArtifact& e) {
        std::cerr << "corrupt artifact: " << e.what() << "\n";
        return corrupt;
    } catch (const Infeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const DegenerateChannel& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const DegenerateGeometry& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const BudgetExceeded& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_error;
    }
}
