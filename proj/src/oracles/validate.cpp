#include "pinch/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "pinch/config.hpp"
#include "pinch/core_model.hpp"
#include "pinch/layout.hpp"
#include "pinch/neural/cnn.hpp"
#include "pinch/oracles.hpp"
#include "pinch/placement.hpp"
#include "pinch/power_alloc.hpp"
#include "pinch/rng.hpp"

namespace pinch {

namespace {

ChannelState random_state(std::mt19937_64& rng, std::size_t users, double eta)
{
    std::uniform_real_distribution<double> dist(3.0, 10.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    std::vector<cplx> g(users);
    for (auto& v : g) {
        v = std::polar(std::sqrt(eta) / dist(rng), ang(rng));
    }
    return make_channel_state(std::move(g));
}

SuiteResult lp_vs_recursion(std::uint64_t seed)
{
    SuiteResult s{"lp-vs-recursion", 0, 0, {}};
    const SystemConfig cfg;
    std::mt19937_64 rng(mix_seed(seed, 11));
    std::uniform_int_distribution<std::size_t> kdist(1, 6);
    std::uniform_real_distribution<double> pdb(0.0, 30.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto state = random_state(rng, kdist(rng), cfg.eta());
        const double p = dbm_to_watts(pdb(rng));
        const auto res = maxmin_power(state, p, cfg.noise_power_w);
        const double t = 0.999 * res.t_opt;
        const auto rec = feasibility_min_power(state, t, p, cfg.noise_power_w);
        const auto lp = oracle::lp_min_power(state, t, p, cfg.noise_power_w);
        ++s.checks;
        if (!rec || !lp) {
            ++s.failures;
            continue;
        }
        for (std::size_t u = 0; u < state.size(); ++u) {
            const double err = std::abs(rec->q[u] - (*lp)[u]) / std::max(std::abs((*lp)[u]), 1e-300);
            worst = std::max(worst, err);
            if (err > 1e-9) {
                ++s.failures;
                break;
            }
        }
        ++s.checks;
        if (std::abs(res.q_opt.total() - p) > 1e-9 * p) {
            ++s.failures;
        }
    }
    std::ostringstream d;
    d << "worst relative gap " << worst;
    s.detail = d.str();
    return s;
}

SuiteResult projection_qp(std::uint64_t seed)
{
    SuiteResult s{"projection-qp", 0, 0, {}};
    std::mt19937_64 rng(mix_seed(seed, 12));
    std::uniform_int_distribution<std::size_t> kdist(1, 6);
    std::uniform_real_distribution<double> val(-1.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto k = kdist(rng);
        std::vector<double> q_hat(k);
        for (auto& v : q_hat) {
            v = val(rng);
        }
        const double p = 1.0;
        const auto got = simplex_project(q_hat, p).q_proj;
        const double sum = std::accumulate(q_hat.begin(), q_hat.end(), 0.0);
        const bool inside = std::all_of(q_hat.begin(), q_hat.end(), [](double v) { return v >= 0.0; }) &&
                            sum <= p * (1.0 + 1e-9);
        ++s.checks;
        if (inside) {
            if (got.q != q_hat) {
                ++s.failures;
            }
            continue;
        }
        const auto ref = oracle::projection_by_threshold(q_hat, p);
        for (std::size_t j = 0; j < k; ++j) {
            worst = std::max(worst, std::abs(got.q[j] - ref[j]));
        }
        if (std::any_of(ref.begin(), ref.end(), [&, j = std::size_t{0}](double r) mutable {
                return std::abs(got.q[j++] - r) > 1e-9 * p;
            })) {
            ++s.failures;
        }
    }
    std::ostringstream d;
    d << "worst abs deviation " << worst;
    s.detail = d.str();
    return s;
}

SuiteResult gradient_check(std::uint64_t seed, double perturbation)
{
    SuiteResult s{"gradient-check", 0, 0, {}};
    auto model = nn::make_model(4);
    nn::init_glorot(model, mix_seed(seed, 13));
    std::mt19937_64 rng(mix_seed(seed, 14));
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
    const std::vector<double> target = {0.1, 0.2, 0.3, 0.4};

    nn::ForwardCache cache;
    std::mt19937_64 unused(0);
    const auto pred = nn::forward(model, x, nn::Mode::infer, unused, &cache);
    auto analytic = model.params.zeros_like();
    nn::backward(model, cache, nn::mae_grad(pred, target), analytic);
    if (perturbation != 0.0) {
        auto& w = analytic.conv1.weights[0];
        w = w == 0.0 ? perturbation : w * (1.0 + perturbation);
    }
    const auto numeric = oracle::cnn_numeric_gradient(model, x, target, 1e-5);

    const auto ab = std::as_const(analytic).blocks();
    const auto nb = numeric.blocks();
    double worst = 0.0;
    for (std::size_t b = 0; b < ab.size(); ++b) {
        for (std::size_t i = 0; i < ab[b].size(); ++i) {
            ++s.checks;
            const double scale = std::max({std::abs(ab[b][i]), std::abs(nb[b][i]), 1e-7});
            const double err = std::abs(ab[b][i] - nb[b][i]) / scale;
            worst = std::max(worst, err);
            if (err > 1e-4) {
                ++s.failures;
            }
        }
    }
    std::ostringstream d;
    d << "worst relative error " << worst;
    s.detail = d.str();
    return s;
}

SuiteResult curvature_signs(std::uint64_t seed)
{
    SuiteResult s{"curvature-signs", 0, 0, {}};
    const SystemConfig cfg;
    std::mt19937_64 rng(mix_seed(seed, 15));
    std::uniform_real_distribution<double> xy(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Point3 user{xy(rng), xy(rng), 0.0};
        const double a1 = xy(rng);
        const double a2 = xy(rng);
        const double fd = channel_power_curvature(a1, a2, user, cfg);
        const double exact = oracle::curvature_exact(a1, a2, user, cfg);
        const double err = std::abs(fd - exact) / std::abs(exact);
        worst = std::max(worst, err);
        ++s.checks;
        if (err > 1e-4) {
            ++s.failures;
        }
    }
    bool pos = false, neg = false;
    const Point3 user{0.0, 2.0, 0.0};
    for (int i = 0; i < 400; ++i) {
        const double a1 = -0.5 + 1e-3 * i;
        const double c = channel_power_curvature(a1, 1.0, user, cfg);
        pos = pos || c > 0.0;
        neg = neg || c < 0.0;
    }
    ++s.checks;
    if (!(pos && neg)) {
        ++s.failures;
    }
    std::ostringstream d;
    d << "worst relative error " << worst << ", both signs " << (pos && neg ? "seen" : "missing");
    s.detail = d.str();
    return s;
}

SuiteResult brute_force_mrg(std::uint64_t seed)
{
    SuiteResult s{"brute-force-mrg", 0, 0, {}};
    SystemConfig cfg;
    cfg.users = 3;
    cfg.antennas = 3;
    cfg.total_power_w = cfg.noise_power_w * 10.0;
    const auto params = PlacementParams::defaults(cfg);
    std::vector<double> gaps;
    for (std::size_t t = 0; t < 10; ++t) {
        std::mt19937_64 rng(mix_seed(seed, 16, t));
        const auto layout = sample_layout(cfg, rng);
        const auto objective = maxmin_sum_rate_objective(layout, cfg);
        const double it = refine_placement(layout, cfg, params, objective).sr_final;
        const auto bf = brute_force_placement(objective, cfg.antennas, 12, params, cfg.waveguide_height_m);
        gaps.push_back(relative_gap(objective(bf.xs), it));
    }
    const auto g = mrg_xrg(gaps);
    s.checks = 1;
    s.failures = g.mrg > 0.05 ? 1 : 0;
    std::ostringstream d;
    d << "MRG " << g.mrg << ", XRG " << g.xrg;
    s.detail = d.str();
    return s;
}

} // namespace

std::vector<SuiteResult> run_validation(const ValidationOptions& options)
{
    return {
        lp_vs_recursion(options.seed),
        projection_qp(options.seed),
        gradient_check(options.seed, options.gradient_perturbation),
        curvature_signs(options.seed),
        brute_force_mrg(options.seed),
    };
}

} // namespace pinch
