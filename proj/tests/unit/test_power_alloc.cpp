#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "pinch/errors.hpp"
#include "pinch/oracles.hpp"
#include "pinch/power_alloc.hpp"

using namespace pinch;

namespace {

ChannelState gains_state(std::vector<double> gain_power)
{
    std::vector<cplx> g;
    for (double p : gain_power) {
        g.emplace_back(std::sqrt(p), 0.0);
    }
    return make_channel_state(std::move(g));
}

ChannelState random_state(std::mt19937_64& rng, std::size_t users)
{
    std::uniform_real_distribution<double> mag(-10.0, -7.0);
    std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
    std::vector<cplx> g(users);
    for (auto& v : g) {
        v = std::polar(std::pow(10.0, mag(rng)), ang(rng));
    }
    return make_channel_state(std::move(g));
}

double dist2(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return s;
}

} // namespace

TEST_CASE("feasibility at zero target needs no power")
{
    const auto s = gains_state({1.0, 2.0, 3.0});
    const auto q = feasibility_min_power(s, 0.0, 1.0, 1.0);
    REQUIRE(q);
    for (double v : q->q) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("equal-gain pair closed form")
{
    const double gamma = 2.5;
    const double sigma2 = 0.4;
    const double p = 8.0 * sigma2 / gamma;
    const auto s = gains_state({gamma, gamma});
    const auto q = feasibility_min_power(s, 2.0, p, sigma2);
    REQUIRE(q);
    CHECK(q->q[0] == doctest::Approx(6.0 * sigma2 / gamma).epsilon(1e-14));
    CHECK(q->q[1] == doctest::Approx(2.0 * sigma2 / gamma).epsilon(1e-14));
    CHECK(q->total() == doctest::Approx(p).epsilon(1e-14));

    const auto mm = maxmin_power(s, p, sigma2);
    CHECK(mm.t_opt == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(mm.q_opt.q[0] == doctest::Approx(0.75 * p).epsilon(1e-6));
    CHECK(mm.q_opt.q[1] == doctest::Approx(0.25 * p).epsilon(1e-6));
}

TEST_CASE("infeasible targets and zero gains")
{
    const auto s = gains_state({1.0, 1.0});
    CHECK_FALSE(feasibility_min_power(s, 100.0, 1.0, 1.0));
    const auto z = make_channel_state({cplx(0, 0), cplx(1, 0)});
    CHECK_THROWS_AS(feasibility_min_power(z, 1.0, 1.0, 1.0), DegenerateChannel);
    CHECK_THROWS_AS(maxmin_power(z, 1.0, 1.0), DegenerateChannel);
}

TEST_CASE("recursion agrees with the LP oracle")
{
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> kd(1, 5);
    std::uniform_real_distribution<double> frac(0.05, 0.999);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_state(rng, kd(rng));
        const double p = 1e-2;
        const double sigma2 = 1e-12;
        const double t = frac(rng) * maxmin_power(s, p, sigma2).t_opt;
        const auto rec = feasibility_min_power(s, t, p, sigma2);
        const auto lp = oracle::lp_min_power(s, t, p, sigma2);
        REQUIRE(rec);
        REQUIRE(lp);
        for (std::size_t u = 0; u < s.size(); ++u) {
            CHECK(std::abs(rec->q[u] - (*lp)[u]) <= 1e-9 * std::abs((*lp)[u]));
        }
    }
}

TEST_CASE("minimum power grows with the target")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> tt(0.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_state(rng, 1 + i % 6);
        double a = tt(rng), b = tt(rng);
        if (a > b) {
            std::swap(a, b);
        }
        if (a == b) {
            continue;
        }
        const auto qa = feasibility_min_power(s, a, 1e30, 1e-12);
        const auto qb = feasibility_min_power(s, b, 1e30, 1e-12);
        CHECK(qa->total() < qb->total());
    }
}

TEST_CASE("single user takes the whole budget")
{
    const auto s = gains_state({0.3});
    const auto mm = maxmin_power(s, 2.0, 0.1);
    CHECK(mm.q_opt.q[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mm.t_opt == doctest::Approx(0.3 * 2.0 / 0.1).epsilon(1e-6));
}

TEST_CASE("max-min output binds the budget and equalises SINR")
{
    const double zeta = default_bisection_tol;
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<std::size_t> kd(1, 6);
    std::uniform_real_distribution<double> pdb(-20.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const auto s = random_state(rng, kd(rng));
        const double p = std::pow(10.0, pdb(rng) / 10.0);
        const auto mm = maxmin_power(s, p, 1e-12);
        CHECK(std::abs(mm.q_opt.total() - p) <= 1e-9 * p);
        const auto sinr = decode_chain_sinrs(s, mm.q_opt, 1e-12);
        const auto [lo, hi] = std::minmax_element(sinr.begin(), sinr.end());
        CHECK(*hi - *lo <= 2.0 * zeta * (1.0 + mm.t_opt));
        for (double v : sinr) {
            CHECK(v >= mm.t_opt - zeta * (1.0 + mm.t_opt));
        }
    }
}

TEST_CASE("three-user optimum matches a simplex grid search")
{
    std::mt19937_64 rng(15);
    for (int i = 0; i < 5; ++i) {
        const auto s = random_state(rng, 3);
        const double p = 1e-2;
        const double sigma2 = 1e-12;
        const double grid = oracle::grid_maxmin_sinr(s, p, sigma2, 1000);
        const double t = maxmin_power(s, p, sigma2).t_opt;
        CHECK(t >= grid * (1.0 - 1e-9));
        CHECK(std::abs(t - grid) <= 1e-2 * t);
    }
}

TEST_CASE("projection hand cases")
{
    const double p = 2.0;
    SUBCASE("inside passes through")
    {
        const std::vector<double> q = {0.5 * p, 0.5 * p};
        const auto r = simplex_project(q, p);
        CHECK(r.q_proj.q == q);
        CHECK(r.theta == 0.0);
        CHECK(r.rho == 2);
    }
    SUBCASE("symmetric excess")
    {
        const auto r = simplex_project(std::vector<double>{p, p}, p);
        CHECK(r.q_proj.q == std::vector<double>{0.5 * p, 0.5 * p});
        CHECK(r.theta == 0.5 * p);
        CHECK(r.rho == 2);
    }
    SUBCASE("one negative entry")
    {
        const std::vector<double> q = {1.5 * p, -0.2 * p};
        const auto r = simplex_project(q, p);
        CHECK(r.q_proj.q[0] == doctest::Approx(p).epsilon(1e-15));
        CHECK(r.q_proj.q[1] == 0.0);
        CHECK(r.theta == doctest::Approx(0.5 * p).epsilon(1e-15));
        CHECK(r.rho == 1);
        const auto ref = oracle::projection_by_threshold(q, p);
        CHECK(r.q_proj.q[0] == doctest::Approx(ref[0]).epsilon(1e-12));
    }
}

TEST_CASE("projection is closest, idempotent and order-equivariant")
{
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> val(-1.0, 2.0);
    std::exponential_distribution<double> expo(1.0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = 1 + i % 6;
        std::vector<double> q_hat(k);
        for (auto& v : q_hat) {
            v = val(rng);
        }
        const double p = 1.0;
        const auto r = simplex_project(q_hat, p);
        const auto& q = r.q_proj.q;
        CHECK(std::all_of(q.begin(), q.end(), [](double v) { return v >= 0.0; }));
        const double best = dist2(q, q_hat);
        const bool inside = std::all_of(q_hat.begin(), q_hat.end(), [](double v) { return v >= 0.0; }) &&
                            std::accumulate(q_hat.begin(), q_hat.end(), 0.0) <= p;
        if (!inside) {
            CHECK(std::accumulate(q.begin(), q.end(), 0.0) == doctest::Approx(p).epsilon(1e-12));
            for (int c = 0; c < 1000; ++c) {
                std::vector<double> cand(k);
                double s = 0.0;
                for (auto& v : cand) {
                    v = expo(rng);
                    s += v;
                }
                for (auto& v : cand) {
                    v *= p / s;
                }
                CHECK(std::sqrt(best) <= std::sqrt(dist2(cand, q_hat)) + 1e-9);
            }
        }
        CHECK(simplex_project(q, p).q_proj.q == q);

        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> shuffled(k);
        for (std::size_t j = 0; j < k; ++j) {
            shuffled[j] = q_hat[perm[j]];
        }
        const auto rs = simplex_project(shuffled, p);
        for (std::size_t j = 0; j < k; ++j) {
            CHECK(rs.q_proj.q[j] == q[perm[j]]);
        }
    }
}

TEST_CASE("fixed NOMA shares")
{
    const auto one = gains_state({1.0});
    CHECK(fixed_power_coeffs(one, 3.0).q == std::vector<double>{3.0});

    const auto two = gains_state({2.0, 1.0});
    const auto q2 = fixed_power_coeffs(two, 3.0);
    CHECK(q2.q[1] == doctest::Approx(2.0));
    CHECK(q2.q[0] == doctest::Approx(1.0));

    const auto three = gains_state({1.0, 2.0, 3.0});
    const auto q3 = fixed_power_coeffs(three, 7.0);
    CHECK(q3.q == std::vector<double>{4.0, 2.0, 1.0});
    CHECK(q3.total() == 7.0);

    const std::vector<double> w = {1.0, 1.0, 2.0};
    const auto qw = fixed_power_coeffs(three, 4.0, w);
    CHECK(qw.q == std::vector<double>{1.0, 1.0, 2.0});
    CHECK_THROWS_AS(fixed_power_coeffs(three, 4.0, std::vector<double>{1.0}), ShapeError);
}
