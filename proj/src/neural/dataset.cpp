#include "pinch/neural/dataset.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pinch/errors.hpp"
#include "pinch/layout.hpp"
#include "pinch/power_alloc.hpp"
#include "pinch/rng.hpp"

namespace pinch::nn {

namespace {

Sample draw_sample(const SystemConfig& config, const PlacementParams& params, const DatasetOptions& options,
                   std::mt19937_64& rng)
{
    Sample s;
    s.total_power_w = config.total_power_w;
    s.noise_power_w = config.noise_power_w;
    s.antennas = config.antennas;
    if (options.source == ChannelSource::gaussian) {
        const double sd = std::sqrt(0.5 * config.eta()) / config.waveguide_height_m;
        std::normal_distribution<double> n(0.0, sd);
        s.gains.resize(config.users);
        for (auto& g : s.gains) {
            const double re = n(rng);
            const double im = n(rng);
            g = cplx(re, im);
        }
    } else {
        const auto layout = sample_layout(config, rng);
        AntennaPlacement placement;
        if (options.placement == PlacementMode::optimized) {
            placement = refine_placement(layout, config, params).placement;
        } else {
            placement = AntennaPlacement{
                project_feasible(uniform_grid(params.a_min, params.a_max, config.antennas), params),
                config.waveguide_height_m};
        }
        s.gains = channel_state(layout, placement, config).gains;
    }
    const auto state = make_channel_state(s.gains);
    s.target_q = maxmin_power(state, config.total_power_w, config.noise_power_w).q_opt.q;
    return s;
}

Dataset generate_split(const SystemConfig& config, const PlacementParams& params, const DatasetOptions& options,
                       Split split, std::size_t count, std::uint64_t first_id)
{
    Dataset data;
    data.split = split;
    data.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(mix_seed(options.seed, split == Split::train ? 0 : 1, i));
        for (std::size_t attempt = 0;; ++attempt) {
            try {
                auto s = draw_sample(config, params, options, rng);
                s.id = first_id + i;
                data.samples.push_back(std::move(s));
                break;
            } catch (const DegenerateGeometry&) {
                if (attempt + 1 >= options.resample_cap) {
                    throw;
                }
            } catch (const DegenerateChannel&) {
                if (attempt + 1 >= options.resample_cap) {
                    throw;
                }
            }
        }
    }
    return data;
}

} // namespace

std::pair<Dataset, Dataset> generate_dataset(const SystemConfig& config, const PlacementParams& params,
                                             const DatasetOptions& options)
{
    config.validate();
    params.validate(config.antennas);
    auto train = generate_split(config, params, options, Split::train, options.n_train, 0);
    auto test = generate_split(config, params, options, Split::test, options.n_test, options.n_train);
    return {std::move(train), std::move(test)};
}

NormStats compute_norm_stats(const Dataset& data)
{
    NormStats ns;
    double n = 0.0;
    double sr = 0.0, si = 0.0;
    for (const auto& s : data.samples) {
        for (const auto& g : s.gains) {
            sr += g.real();
            si += g.imag();
            n += 1.0;
        }
    }
    if (n == 0.0) {
        return ns;
    }
    ns.mean_re = sr / n;
    ns.mean_im = si / n;
    double vr = 0.0, vi = 0.0;
    for (const auto& s : data.samples) {
        for (const auto& g : s.gains) {
            vr += (g.real() - ns.mean_re) * (g.real() - ns.mean_re);
            vi += (g.imag() - ns.mean_im) * (g.imag() - ns.mean_im);
        }
    }
    ns.std_re = std::sqrt(vr / n);
    ns.std_im = std::sqrt(vi / n);
    if (!(ns.std_re > 0.0)) {
        ns.std_re = 1.0;
    }
    if (!(ns.std_im > 0.0)) {
        ns.std_im = 1.0;
    }
    return ns;
}

FeatureMap make_features(std::span<const cplx> gains, const NormStats& norm)
{
    const auto state = make_channel_state({gains.begin(), gains.end()});
    FeatureMap x(gains.size(), 2, 1);
    for (std::size_t r = 0; r < gains.size(); ++r) {
        const cplx g = gains[state.sic_order[r]];
        x.at(r, 0, 0) = (g.real() - norm.mean_re) / norm.std_re;
        x.at(r, 1, 0) = (g.imag() - norm.mean_im) / norm.std_im;
    }
    return x;
}

std::vector<double> make_target(const Sample& sample)
{
    const auto state = make_channel_state(sample.gains);
    std::vector<double> t(sample.gains.size());
    for (std::size_t r = 0; r < t.size(); ++r) {
        t[r] = sample.target_q[state.sic_order[r]] / sample.total_power_w;
    }
    return t;
}

} // namespace pinch::nn
