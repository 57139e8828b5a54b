#include "pinch/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "pinch/errors.hpp"
#include "pinch/layout.hpp"
#include "pinch/neural/training.hpp"
#include "pinch/power_alloc.hpp"
#include "pinch/rng.hpp"

namespace pinch::mc {

namespace {

constexpr std::size_t resample_cap = 100;

struct SchemeName {
    Scheme scheme;
    std::string_view name;
};

constexpr SchemeName scheme_names[] = {
    {Scheme::cnn_noma, "CNN-NOMA"}, {Scheme::c_noma, "C-NOMA"}, {Scheme::fpa_noma, "FPA-NOMA"},
    {Scheme::pa_oma, "PA-OMA"},     {Scheme::c_oma, "C-OMA"},
};

struct SweepName {
    SweepVar var;
    std::string_view name;
};

constexpr SweepName sweep_names[] = {
    {SweepVar::antennas, "M"}, {SweepVar::users, "K"},           {SweepVar::snr_db, "snr_db"},
    {SweepVar::d1, "D1"},      {SweepVar::target_rate, "target_rate"}, {SweepVar::alpha, "alpha"},
};

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::size_t as_count(double v, const char* key)
{
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e6) {
        throw ConfigError("experiment.sweep_values (" + std::string(key) + "): sweep value must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

bool needs_placement(Scheme s) { return s == Scheme::cnn_noma || s == Scheme::fpa_noma; }

SchemeOutcome from_state(const ChannelState& state, const PowerAllocation& q, double noise)
{
    SchemeOutcome out;
    out.rates = user_rates(state, q, noise);
    out.gain_power.resize(state.size());
    for (std::size_t u = 0; u < state.size(); ++u) {
        out.gain_power[u] = state.gain_power(u);
    }
    return out;
}

// One slot of 1/K per user at full power, each over its own single-antenna channel.
SchemeOutcome oma_outcome(const UserLayout& layout, const SystemConfig& cfg,
                          const std::function<double(const Point3&)>& antenna_x)
{
    const auto users = layout.size();
    SchemeOutcome out;
    out.rates.resize(users);
    out.gain_power.resize(users);
    for (std::size_t u = 0; u < users; ++u) {
        const AntennaPlacement single{{antenna_x(layout.positions[u])}, cfg.waveguide_height_m};
        const double g = std::norm(effective_channel(layout.positions[u], single, cfg));
        out.gain_power[u] = g;
        out.rates[u] = std::log2(1.0 + g * cfg.total_power_w / cfg.noise_power_w) / static_cast<double>(users);
    }
    return out;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first failing
// index (in index order) has its exception rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn)
{
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            guarded(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    guarded(i);
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

struct SweepPoint {
    SystemConfig system;
    PlacementParams params;
    double target_rate = 0.0;
    double value = 0.0;
    std::size_t seed_index = 0;
};

SweepPoint make_point(const ExperimentSpec& spec, std::size_t index, double value)
{
    SweepPoint p{spec.system, spec.placement, spec.target_rate, value, index};
    apply_sweep(spec.sweep_var, value, p.system, p.params, p.target_rate);
    if (spec.derive_placement_geometry) {
        const auto d = PlacementParams::defaults(p.system);
        p.params.guard_m = d.guard_m;
        p.params.a_min = d.a_min;
        p.params.a_max = d.a_max;
    }
    p.system.validate();
    p.params.validate(p.system.antennas);
    return p;
}

struct TrialOutput {
    std::vector<MetricsRecord> records;
    std::optional<TrialFailure> failure;
};

TrialOutput run_trial(const ExperimentSpec& spec, const SweepPoint& point, std::size_t trial)
{
    TrialOutput out;
    const auto seed = mix_seed(spec.base_seed, point.seed_index, trial);
    std::mt19937_64 rng(seed);
    const nn::CnnModel* model = nullptr;
    if (std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::cnn_noma) != spec.schemes.end()) {
        model = spec.models.at(point.system.users).get();
    }
    std::string last_error;
    for (std::size_t attempt = 0; attempt < resample_cap; ++attempt) {
        const auto layout = sample_layout(point.system, rng);
        std::optional<AntennaPlacement> optimized;
        try {
            std::vector<MetricsRecord> records;
            for (auto scheme : spec.schemes) {
                const auto t0 = std::chrono::steady_clock::now();
                if (needs_placement(scheme) && !optimized) {
                    optimized = refine_placement(layout, point.system, point.params).placement;
                }
                const SchemeContext ctx{&point.system, &point.params, model, optimized ? &*optimized : nullptr};
                auto outcome = scheme_rate(scheme, layout, ctx);
                const auto t1 = std::chrono::steady_clock::now();

                MetricsRecord r;
                r.scheme = scheme;
                r.sweep_value = point.value;
                r.sweep_index = point.seed_index;
                r.trial = trial;
                r.seed = seed;
                r.sum_rate = 0.0;
                for (double v : outcome.rates) {
                    r.sum_rate += v;
                }
                r.min_rate = *std::min_element(outcome.rates.begin(), outcome.rates.end());
                r.far_user_rate = outcome.rates[outcome.far_user];
                r.outage = r.far_user_rate < point.target_rate;
                r.user_rates = std::move(outcome.rates);
                r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                records.push_back(std::move(r));
            }
            out.records = std::move(records);
            return out;
        } catch (const DegenerateGeometry& e) {
            last_error = e.what();
        } catch (const DegenerateChannel& e) {
            last_error = e.what();
        }
    }
    out.failure = TrialFailure{point.seed_index, trial, seed,
                               "gave up after " + std::to_string(resample_cap) + " resamples: " + last_error};
    return out;
}

} // namespace

std::string_view scheme_name(Scheme s)
{
    for (const auto& e : scheme_names) {
        if (e.scheme == s) {
            return e.name;
        }
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    for (const auto& e : scheme_names) {
        if (iequals(e.name, name)) {
            return e.scheme;
        }
    }
    throw ConfigError("experiment.schemes: unknown scheme '" + std::string(name) + "'");
}

std::string_view sweep_name(SweepVar v)
{
    for (const auto& e : sweep_names) {
        if (e.var == v) {
            return e.name;
        }
    }
    return "?";
}

SweepVar parse_sweep(std::string_view name)
{
    for (const auto& e : sweep_names) {
        if (iequals(e.name, name)) {
            return e.var;
        }
    }
    throw ConfigError("experiment.sweep_var: unknown sweep variable '" + std::string(name) + "'");
}

double power_from_snr_db(double snr_db, double noise_power_w)
{
    return noise_power_w * std::pow(10.0, snr_db / 10.0);
}

void apply_sweep(SweepVar var, double value, SystemConfig& system, PlacementParams& params, double& target_rate)
{
    switch (var) {
    case SweepVar::antennas:
        system.antennas = as_count(value, "antennas");
        break;
    case SweepVar::users:
        system.users = as_count(value, "users");
        break;
    case SweepVar::snr_db:
        system.total_power_w = power_from_snr_db(value, system.noise_power_w);
        break;
    case SweepVar::d1:
        // The feed stays at the left edge of the region.
        system.region_d1_m = value;
        system.feed_x_m = -0.5 * value;
        break;
    case SweepVar::target_rate:
        if (!(value >= 0.0)) {
            throw ConfigError("experiment.target_rate_bpshz: must be >= 0");
        }
        target_rate = value;
        break;
    case SweepVar::alpha:
        params.alpha = value;
        break;
    }
}

void ExperimentSpec::validate() const
{
    if (schemes.empty()) {
        throw ConfigError("experiment.schemes: list is empty");
    }
    if (sweep_values.empty()) {
        throw ConfigError("experiment.sweep_values: list is empty");
    }
    if (trials < 1) {
        throw ConfigError("experiment.trials: must be >= 1");
    }
    if (workers < 1) {
        throw ConfigError("experiment.workers: must be >= 1");
    }
    const bool cnn = std::find(schemes.begin(), schemes.end(), Scheme::cnn_noma) != schemes.end();
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        const auto p = make_point(*this, i, sweep_values[i]);
        if (cnn) {
            const auto it = models.find(p.system.users);
            if (it == models.end() || !it->second) {
                throw ConfigError("model: CNN-NOMA needs a model trained for K=" + std::to_string(p.system.users));
            }
        }
    }
}

SchemeOutcome scheme_rate(Scheme scheme, const UserLayout& layout, const SchemeContext& ctx)
{
    if (!ctx.system || !ctx.placement) {
        throw ConfigError("scheme_rate: system and placement parameters are required");
    }
    const auto& cfg = *ctx.system;
    const auto& params = *ctx.placement;
    if (layout.size() == 0) {
        throw ShapeError("scheme_rate: layout has no users");
    }
    const AntennaPlacement conventional{{0.0}, cfg.waveguide_height_m};

    auto optimized = [&]() -> AntennaPlacement {
        if (ctx.optimized) {
            return *ctx.optimized;
        }
        return refine_placement(layout, cfg, params).placement;
    };

    SchemeOutcome out;
    switch (scheme) {
    case Scheme::cnn_noma: {
        if (!ctx.model) {
            throw ConfigError("model: CNN-NOMA requires a trained model");
        }
        const auto state = channel_state(layout, optimized(), cfg);
        out = from_state(state, nn::infer_allocation(*ctx.model, state, cfg.total_power_w), cfg.noise_power_w);
        break;
    }
    case Scheme::c_noma: {
        const auto state = channel_state(layout, conventional, cfg);
        out = from_state(state, maxmin_power(state, cfg.total_power_w, cfg.noise_power_w).q_opt,
                         cfg.noise_power_w);
        break;
    }
    case Scheme::fpa_noma: {
        const auto state = channel_state(layout, optimized(), cfg);
        out = from_state(state, fixed_power_coeffs(state, cfg.total_power_w), cfg.noise_power_w);
        break;
    }
    case Scheme::pa_oma:
        out = oma_outcome(layout, cfg, [&](const Point3& u) { return std::clamp(u.x, params.a_min, params.a_max); });
        break;
    case Scheme::c_oma:
        out = oma_outcome(layout, cfg, [](const Point3&) { return 0.0; });
        break;
    }
    out.far_user = static_cast<std::size_t>(
        std::min_element(out.gain_power.begin(), out.gain_power.end()) - out.gain_power.begin());
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    ExperimentResult result;
    result.sweep_var = spec.sweep_var;

    // Target-rate sweeps share layouts across targets: evaluate once, relabel per target.
    const bool target_sweep = spec.sweep_var == SweepVar::target_rate;
    std::vector<SweepPoint> points;
    if (target_sweep) {
        points.push_back(make_point(spec, 0, spec.sweep_values.front()));
    } else {
        for (std::size_t i = 0; i < spec.sweep_values.size(); ++i) {
            points.push_back(make_point(spec, i, spec.sweep_values[i]));
        }
    }

    std::vector<TrialOutput> outputs(points.size() * spec.trials);
    parallel_for(outputs.size(), spec.workers, [&](std::size_t i) {
        outputs[i] = run_trial(spec, points[i / spec.trials], i % spec.trials);
    });

    if (target_sweep) {
        for (std::size_t s = 0; s < spec.sweep_values.size(); ++s) {
            const double target = spec.sweep_values[s];
            for (const auto& o : outputs) {
                for (auto r : o.records) {
                    r.sweep_value = target;
                    r.sweep_index = s;
                    r.outage = r.far_user_rate < target;
                    result.records.push_back(std::move(r));
                }
                if (o.failure && s == 0) {
                    result.failures.push_back(*o.failure);
                }
            }
        }
        return result;
    }
    for (auto& o : outputs) {
        for (auto& r : o.records) {
            result.records.push_back(std::move(r));
        }
        if (o.failure) {
            result.failures.push_back(std::move(*o.failure));
        }
    }
    return result;
}

OutageCurve outage_from_records(std::span<const MetricsRecord> records, std::span<const double> targets)
{
    OutageCurve curve;
    curve.targets.assign(targets.begin(), targets.end());
    std::map<Scheme, std::vector<double>> far_rates;
    for (const auto& r : records) {
        far_rates[r.scheme].push_back(r.far_user_rate);
    }
    for (const auto& [scheme, rates] : far_rates) {
        auto& probs = curve.probability[scheme];
        for (double target : targets) {
            const auto below = std::count_if(rates.begin(), rates.end(), [&](double v) { return v < target; });
            probs.push_back(static_cast<double>(below) / static_cast<double>(rates.size()));
        }
    }
    return curve;
}

OutageCurve outage_curve(const ExperimentSpec& spec, std::span<const double> targets)
{
    if (targets.empty()) {
        throw ConfigError("experiment.sweep_values: target list is empty");
    }
    ExperimentSpec single = spec;
    single.sweep_var = SweepVar::target_rate;
    single.sweep_values = {targets.front()};
    const auto result = run_experiment(single);
    return outage_from_records(result.records, targets);
}

double quantile(std::vector<double> samples, double p)
{
    if (samples.empty()) {
        throw EmptyData("quantile of an empty sample");
    }
    std::sort(samples.begin(), samples.end());
    const double h = (static_cast<double>(samples.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

BoxplotStats boxplot_stats(std::span<const double> samples)
{
    if (samples.empty()) {
        throw EmptyData("boxplot of an empty sample");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    BoxplotStats b;
    b.q1 = quantile(sorted, 0.25);
    b.median = quantile(sorted, 0.5);
    b.q3 = quantile(sorted, 0.75);
    b.iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * b.iqr;
    const double hi_fence = b.q3 + 1.5 * b.iqr;
    b.whisker_lo = std::numeric_limits<double>::infinity();
    b.whisker_hi = -std::numeric_limits<double>::infinity();
    for (double v : sorted) {
        if (v < lo_fence || v > hi_fence) {
            b.outliers.push_back(v);
        } else {
            b.whisker_lo = std::min(b.whisker_lo, v);
            b.whisker_hi = std::max(b.whisker_hi, v);
        }
    }
    return b;
}

AlphaStudy alpha_study(const SystemConfig& system, const PlacementParams& params, std::size_t layouts,
                       std::span<const double> alphas, std::uint64_t base_seed, std::size_t workers)
{
    if (layouts < 2) {
        throw ConfigError("experiment.trials: alpha study needs at least 2 layouts");
    }
    if (alphas.empty()) {
        throw ConfigError("experiment.sweep_values: alpha grid is empty");
    }
    system.validate();
    for (double a : alphas) {
        auto p = params;
        p.alpha = a;
        p.validate(system.antennas);
    }

    AlphaStudy study;
    study.alphas.assign(alphas.begin(), alphas.end());
    const auto na = alphas.size();
    study.delta_sr.assign(na, std::vector<double>(layouts));
    study.sr_init.assign(na, std::vector<double>(layouts));
    study.sr_final.assign(na, std::vector<double>(layouts));

    parallel_for(layouts, workers, [&](std::size_t t) {
        std::mt19937_64 rng(mix_seed(base_seed, 0, t));
        const auto layout = sample_layout(system, rng);
        const auto objective = maxmin_sum_rate_objective(layout, system);
        for (std::size_t i = 0; i < na; ++i) {
            auto p = params;
            p.alpha = alphas[i];
            const auto sol = refine_placement(layout, system, p, objective);
            study.sr_init[i][t] = sol.sr_init;
            study.sr_final[i][t] = sol.sr_final;
            study.delta_sr[i][t] = sol.sr_final - sol.sr_init;
        }
    });
    for (const auto& d : study.delta_sr) {
        study.stats.push_back(boxplot_stats(d));
    }
    return study;
}

std::vector<Table1Cell> table1_validation(const SystemConfig& base, const PlacementParams& params,
                                          std::span<const std::size_t> users, std::span<const double> snrs_db,
                                          std::size_t trials, std::size_t grid_points, std::uint64_t base_seed,
                                          std::size_t workers)
{
    if (trials < 1) {
        throw ConfigError("experiment.trials: must be >= 1");
    }
    std::vector<Table1Cell> cells;
    std::size_t cell_index = 0;
    for (auto k : users) {
        for (double snr : snrs_db) {
            SystemConfig cfg = base;
            cfg.users = k;
            cfg.antennas = k;
            cfg.total_power_w = power_from_snr_db(snr, cfg.noise_power_w);
            cfg.validate();
            params.validate(k);
            const double combos = std::pow(static_cast<double>(grid_points), static_cast<double>(k));
            if (combos > default_brute_force_budget) {
                throw BudgetExceeded("brute force needs " + std::to_string(combos) + " evaluations");
            }

            Table1Cell cell;
            cell.users = k;
            cell.snr_db = snr;
            std::vector<double> sr_it(trials);
            std::vector<double> sr_bf(trials);
            cell.gaps.resize(trials);
            parallel_for(trials, workers, [&](std::size_t t) {
                std::mt19937_64 rng(mix_seed(base_seed, cell_index, t));
                const auto layout = sample_layout(cfg, rng);
                const auto objective = maxmin_sum_rate_objective(layout, cfg);
                sr_it[t] = refine_placement(layout, cfg, params, objective).sr_final;
                const auto bf = brute_force_placement(objective, k, grid_points, params, cfg.waveguide_height_m);
                sr_bf[t] = objective(bf.xs);
                cell.gaps[t] = relative_gap(sr_bf[t], sr_it[t]);
            });
            for (std::size_t t = 0; t < trials; ++t) {
                cell.mean_sr_it += sr_it[t] / static_cast<double>(trials);
                cell.mean_sr_bf += sr_bf[t] / static_cast<double>(trials);
            }
            const auto summary = mrg_xrg(cell.gaps);
            cell.mrg = summary.mrg;
            cell.xrg = summary.xrg;
            cells.push_back(std::move(cell));
            ++cell_index;
        }
    }
    return cells;
}

} // namespace pinch::mc
