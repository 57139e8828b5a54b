#include "pinch/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pinch/errors.hpp"

namespace pinch {

using nlohmann::json;

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

// Walks one section, dispatching each key to its handler and rejecting the rest.
class Section {
public:
    Section(const json& doc, std::string name) : name_(std::move(name))
    {
        if (doc.contains(name_)) {
            node_ = &doc.at(name_);
            if (!node_->is_object()) {
                throw ConfigError(name_ + ": must be an object");
            }
        }
    }

    template <typename T>
    void get(const std::string& key, T& out)
    {
        known_.insert(key);
        if (!node_ || !node_->contains(key)) {
            return;
        }
        try {
            out = node_->at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path(key) + ": wrong type");
        }
        seen_.insert(key);
    }

    void get_count(const std::string& key, std::size_t& out)
    {
        double v = static_cast<double>(out);
        get(key, v);
        if (!(v >= 0.0) || v != std::floor(v)) {
            throw ConfigError(path(key) + ": must be a non-negative integer");
        }
        out = static_cast<std::size_t>(v);
    }

    bool has(const std::string& key) const { return seen_.count(key) != 0; }

    void finish() const
    {
        if (!node_) {
            return;
        }
        for (const auto& [key, value] : node_->items()) {
            if (!known_.count(key)) {
                throw ConfigError(path(key) + ": unknown key");
            }
        }
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }

private:
    std::string name_;
    const json* node_ = nullptr;
    std::set<std::string> known_;
    std::set<std::string> seen_;
};

void read_system(const json& doc, RunConfig& rc)
{
    Section s(doc, "system");
    auto& sys = rc.system;
    double fc_ghz = sys.carrier_freq_hz / 1e9;
    s.get("fc_ghz", fc_ghz);
    sys.carrier_freq_hz = fc_ghz * 1e9;
    s.get("kappa", sys.kappa);
    s.get("height_m", sys.waveguide_height_m);
    s.get("d1_m", sys.region_d1_m);
    s.get("d2_m", sys.region_d2_m);
    sys.feed_x_m = -0.5 * sys.region_d1_m;
    s.get("feed_x_m", sys.feed_x_m);
    double noise_dbm = -90.0;
    s.get("noise_dbm", noise_dbm);
    sys.noise_power_w = dbm_to_watts(noise_dbm);
    double power_dbm = 10.0;
    double snr_db = 0.0;
    s.get("power_dbm", power_dbm);
    s.get("snr_db", snr_db);
    if (s.has("power_dbm") && s.has("snr_db")) {
        throw ConfigError("system.power_dbm: give either power_dbm or snr_db, not both");
    }
    sys.total_power_w = s.has("snr_db") ? mc::power_from_snr_db(snr_db, sys.noise_power_w) : dbm_to_watts(power_dbm);
    s.get_count("antennas", sys.antennas);
    s.get_count("users", sys.users);
    s.finish();
}

void read_placement(const json& doc, RunConfig& rc)
{
    Section s(doc, "placement");
    auto& p = rc.placement;
    s.get("alpha", p.alpha);
    s.get("guard_m", p.guard_m);
    s.get("step_m", p.step);
    s.get("fd_delta_m", p.fd_delta_m);
    s.get("tol_rel", p.tol);
    s.get_count("max_iters", p.max_iters);
    s.get_count("max_halvings", p.max_halvings);
    s.get("a_min_m", p.a_min);
    s.get("a_max_m", p.a_max);
    rc.placement_guard_set = s.has("guard_m");
    rc.placement_bounds_set = s.has("a_min_m") || s.has("a_max_m");
    if (rc.placement_bounds_set && !(s.has("a_min_m") && s.has("a_max_m"))) {
        throw ConfigError("placement.a_min_m: a_min_m and a_max_m must be given together");
    }
    s.finish();
}

void read_train(const json& doc, RunConfig& rc)
{
    Section s(doc, "train");
    auto& t = rc.train;
    s.get("lr", t.lr);
    s.get_count("batch", t.batch);
    s.get_count("epochs", t.epochs);
    s.get_count("folds", t.folds);
    s.get("decay", t.decay);
    s.get_count("decay_every", t.decay_every);
    s.get_count("patience", t.patience);
    s.get("min_delta", t.min_delta);
    s.finish();
}

void read_dataset(const json& doc, RunConfig& rc)
{
    Section s(doc, "dataset");
    auto& d = rc.dataset;
    s.get_count("n_train", d.n_train);
    s.get_count("n_test", d.n_test);
    std::string placement = d.placement == nn::PlacementMode::optimized ? "optimized" : "fixed";
    s.get("placement", placement);
    if (placement == "optimized") {
        d.placement = nn::PlacementMode::optimized;
    } else if (placement == "fixed") {
        d.placement = nn::PlacementMode::fixed;
    } else {
        throw ConfigError("dataset.placement: expected \"optimized\" or \"fixed\"");
    }
    std::string source = d.source == nn::ChannelSource::physical ? "physical" : "gaussian";
    s.get("source", source);
    if (source == "physical") {
        d.source = nn::ChannelSource::physical;
    } else if (source == "gaussian") {
        d.source = nn::ChannelSource::gaussian;
    } else {
        throw ConfigError("dataset.source: expected \"physical\" or \"gaussian\"");
    }
    s.finish();
}

void read_experiment(const json& doc, RunConfig& rc)
{
    Section s(doc, "experiment");
    auto& e = rc.experiment;
    std::vector<std::string> schemes;
    s.get("schemes", schemes);
    if (s.has("schemes")) {
        if (schemes.empty()) {
            throw ConfigError("experiment.schemes: list is empty");
        }
        e.schemes.clear();
        for (const auto& name : schemes) {
            e.schemes.push_back(mc::parse_scheme(name));
        }
    }
    std::string sweep(mc::sweep_name(e.sweep_var));
    s.get("sweep_var", sweep);
    e.sweep_var = mc::parse_sweep(sweep);
    s.get("sweep_values", e.sweep_values);
    s.get_count("trials", e.trials);
    s.get("target_rate_bpshz", e.target_rate_bpshz);
    s.get_count("grid_points", e.grid_points);
    s.get("table_users", e.table_users);
    s.get("table_snr_db", e.table_snr_db);
    s.get("model_dir", e.model_dir);
    s.finish();
}

} // namespace

PlacementParams RunConfig::resolved_placement() const
{
    auto p = placement;
    const auto d = PlacementParams::defaults(system);
    if (!placement_guard_set) {
        p.guard_m = d.guard_m;
    }
    if (!placement_bounds_set) {
        p.a_min = d.a_min;
        p.a_max = d.a_max;
    }
    return p;
}

void RunConfig::set_seed(std::uint64_t s)
{
    seed = s;
    train.seed = s;
    dataset.seed = s;
}

RunConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    static const std::set<std::string> sections = {"system", "placement", "train", "dataset", "experiment", "seed"};
    for (const auto& [key, value] : doc.items()) {
        if (!sections.count(key)) {
            throw ConfigError(key + ": unknown key");
        }
    }
    RunConfig rc;
    rc.placement = PlacementParams::defaults(rc.system);
    read_system(doc, rc);
    read_placement(doc, rc);
    read_train(doc, rc);
    read_dataset(doc, rc);
    read_experiment(doc, rc);
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw ConfigError("seed: must be a non-negative integer");
        }
        rc.set_seed(doc.at("seed").get<std::uint64_t>());
    } else {
        rc.set_seed(rc.seed);
    }
    rc.system.validate();
    rc.train.validate();
    return rc;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& rc)
{
    const auto p = rc.resolved_placement();
    json doc;
    doc["seed"] = rc.seed;
    doc["system"] = {
        {"fc_ghz", rc.system.carrier_freq_hz / 1e9},
        {"kappa", rc.system.kappa},
        {"height_m", rc.system.waveguide_height_m},
        {"feed_x_m", rc.system.feed_x_m},
        {"d1_m", rc.system.region_d1_m},
        {"d2_m", rc.system.region_d2_m},
        {"power_dbm", watts_to_dbm(rc.system.total_power_w)},
        {"noise_dbm", watts_to_dbm(rc.system.noise_power_w)},
        {"antennas", rc.system.antennas},
        {"users", rc.system.users},
    };
    doc["placement"] = {
        {"alpha", p.alpha},           {"guard_m", p.guard_m},   {"step_m", p.step},
        {"fd_delta_m", p.fd_delta_m}, {"tol_rel", p.tol},     {"max_iters", p.max_iters},
        {"max_halvings", p.max_halvings}, {"a_min_m", p.a_min}, {"a_max_m", p.a_max},
    };
    doc["train"] = {
        {"lr", rc.train.lr},         {"batch", rc.train.batch},         {"epochs", rc.train.epochs},
        {"folds", rc.train.folds},   {"decay", rc.train.decay},         {"decay_every", rc.train.decay_every},
        {"patience", rc.train.patience}, {"min_delta", rc.train.min_delta},
    };
    doc["dataset"] = {
        {"n_train", rc.dataset.n_train},
        {"n_test", rc.dataset.n_test},
        {"placement", rc.dataset.placement == nn::PlacementMode::optimized ? "optimized" : "fixed"},
        {"source", rc.dataset.source == nn::ChannelSource::physical ? "physical" : "gaussian"},
    };
    std::vector<std::string> schemes;
    for (auto s : rc.experiment.schemes) {
        schemes.emplace_back(mc::scheme_name(s));
    }
    doc["experiment"] = {
        {"schemes", schemes},
        {"sweep_var", std::string(mc::sweep_name(rc.experiment.sweep_var))},
        {"sweep_values", rc.experiment.sweep_values},
        {"trials", rc.experiment.trials},
        {"target_rate_bpshz", rc.experiment.target_rate_bpshz},
        {"grid_points", rc.experiment.grid_points},
        {"table_users", rc.experiment.table_users},
        {"table_snr_db", rc.experiment.table_snr_db},
        {"model_dir", rc.experiment.model_dir},
    };
    return doc.dump(2) + "\n";
}

} // namespace pinch
