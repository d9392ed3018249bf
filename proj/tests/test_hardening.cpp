#include <doctest.h>

#include <cmath>

#include "flexmimo/hardening.hpp"

using namespace flexmimo;

namespace {

// Independent oracle: harmonic numbers by direct summation, order statistics
// of exponentials via the spacing representation evaluated term by term.
double oracle_harmonic(int n) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / i;
    return h;
}

double oracle_harmonic2(int n) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / (static_cast<double>(i) * i);
    return h;
}

double oracle_topk_mean(int k, int n) {
    // S = sum_m min(m,k)/m * E_m; E[E_m] = 1.
    double mean = 0.0;
    for (int m = 1; m <= n; ++m) mean += std::min(m, k) / static_cast<double>(m);
    return mean;
}

double oracle_topk_var(int k, int n) {
    double var = 0.0;
    for (int m = 1; m <= n; ++m) {
        const double c = std::min(m, k) / static_cast<double>(m);
        var += c * c;  // Var(c E_m) = c^2
    }
    return var;
}

double oracle_flp_variance(int k, int n) {
    const double mean = oracle_topk_mean(k, n);
    return oracle_topk_var(k, n) / (mean * mean);
}

}  // namespace

TEST_SUITE_BEGIN("hardening");

TEST_CASE("fip_variance is 1/M") {
    CHECK(fip_variance(1) == 1.0);
    CHECK(fip_variance(20) == doctest::Approx(0.05));
    CHECK(fip_variance(4) == doctest::Approx(0.25));
    CHECK_THROWS_AS(fip_variance(0), std::invalid_argument);
}

TEST_CASE("topk_sum_stats against the direct-summation oracle") {
    auto [m1, v1] = topk_sum_stats(1, 1);
    CHECK(m1 == doctest::Approx(1.0));
    CHECK(v1 == doctest::Approx(1.0));

    auto [m7, v7] = topk_sum_stats(7, 7);
    CHECK(m7 == doctest::Approx(7.0));
    CHECK(v7 == doctest::Approx(7.0));

    auto [m170, v170] = topk_sum_stats(1, 170);
    CHECK(m170 == doctest::Approx(5.715952394926).epsilon(1e-9));
    CHECK(v170 == doctest::Approx(1.639068981022).epsilon(1e-9));
    CHECK(m170 == doctest::Approx(oracle_harmonic(170)).epsilon(1e-12));
    CHECK(v170 == doctest::Approx(oracle_harmonic2(170)).epsilon(1e-12));

    for (int k : {1, 2, 3, 5, 8}) {
        for (int n : {8, 13, 40, 170}) {
            if (k > n) continue;
            auto [mean, var] = topk_sum_stats(k, n);
            REQUIRE(mean == doctest::Approx(oracle_topk_mean(k, n)).epsilon(1e-12));
            REQUIRE(var == doctest::Approx(oracle_topk_var(k, n)).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(topk_sum_stats(0, 5), std::invalid_argument);
    CHECK_THROWS_AS(topk_sum_stats(6, 5), std::invalid_argument);
}

TEST_CASE("flp_variance_analytic anchors") {
    CHECK(flp_variance_analytic(1, 1) == doctest::Approx(1.0));
    CHECK(flp_variance_analytic(1, 170) == doctest::Approx(0.0501672188).epsilon(1e-8));
    CHECK(flp_variance_analytic(4, 30) == doctest::Approx(0.0517283658).epsilon(1e-8));
}

TEST_CASE("flp_variance_analytic reduces to fip at k=N") {
    for (int k = 1; k <= 64; ++k) CHECK(flp_variance_analytic(k, k) == fip_variance(k));
}

TEST_CASE("flp_variance_analytic non-increasing in N") {
    for (int k : {1, 2, 4, 8}) {
        double prev = flp_variance_analytic(k, k);
        for (int n = k + 1; n <= 2048; ++n) {
            const double cur = flp_variance_analytic(k, n);
            REQUIRE(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

TEST_CASE("Monte Carlo matches the closed form") {
    HardeningConfig cfg;
    cfg.flexible_antennas = 20;
    cfg.positions = 20;
    cfg.trials = 200000;
    cfg.seed = RngStream{7, rng_tag::hardening};
    const HardeningResult full = flp_variance_mc(cfg);
    CHECK(std::abs(full.variance - 0.05) <= 3.0 * full.stderr_variance);
    CHECK(full.mean_gain == doctest::Approx(20.0).epsilon(0.01));

    cfg.flexible_antennas = 1;
    cfg.positions = 170;
    const HardeningResult top1 = flp_variance_mc(cfg);
    CHECK(std::abs(top1.variance - oracle_flp_variance(1, 170)) <= 3.0 * top1.stderr_variance);

    const HardeningResult again = flp_variance_mc(cfg);
    CHECK(again.variance == top1.variance);
    CHECK(again.mean_gain == top1.mean_gain);
    CHECK(again.stderr_variance == top1.stderr_variance);
}

TEST_CASE("Monte Carlo within 3 standard errors on randomized cases") {
    const RngStream gen{2468, 0};
    for (int i = 0; i < 20; ++i) {
        const int k = 1 + static_cast<int>(gen.bits(static_cast<std::uint64_t>(i), 0) % 8);
        const int n = k + static_cast<int>(gen.bits(static_cast<std::uint64_t>(i), 1) % 57);
        HardeningConfig cfg;
        cfg.flexible_antennas = k;
        cfg.positions = n;
        cfg.trials = 20000;
        cfg.seed = RngStream{gen.bits(static_cast<std::uint64_t>(i), 2), rng_tag::hardening};
        const HardeningResult res = flp_variance_mc(cfg);
        REQUIRE(res.stderr_variance > 0.0);
        REQUIRE(std::abs(res.variance - oracle_flp_variance(k, n)) <= 3.0 * res.stderr_variance);
    }
}

TEST_CASE("config validation") {
    HardeningConfig cfg;
    cfg.flexible_antennas = 3;
    cfg.positions = 2;
    CHECK_THROWS_AS(flp_variance_mc(cfg), std::invalid_argument);
    cfg.positions = 3;
    cfg.trials = 0;
    CHECK_THROWS_AS(flp_variance_mc(cfg), std::invalid_argument);
}

TEST_CASE("equivalent_positions windows and minimality") {
    CHECK(equivalent_positions(1, 1) == 1);

    const int n1 = equivalent_positions(1, 20);
    CHECK(n1 >= 168);
    CHECK(n1 <= 175);
    CHECK(flp_variance_analytic(1, n1) <= 0.05);
    CHECK(flp_variance_analytic(1, n1 - 1) > 0.05);

    const int n4 = equivalent_positions(4, 20);
    CHECK(n4 >= 29);
    CHECK(n4 <= 35);
    CHECK(flp_variance_analytic(4, n4) <= 0.05);
    CHECK(flp_variance_analytic(4, n4 - 1) > 0.05);

    for (int k : {1, 2, 3, 6}) {
        for (int target : {2, 5, 9}) {
            const int n = equivalent_positions(k, target);
            REQUIRE(n >= k);
            REQUIRE(flp_variance_analytic(k, n) <= 1.0 / target);
            if (n > k) REQUIRE(flp_variance_analytic(k, n - 1) > 1.0 / target);
        }
    }
}

TEST_CASE("hardening_curve layout") {
    const auto table = hardening_curve({1, 2, 4, 8}, 200, 20);
    REQUIRE(table.size() == 200);
    CHECK(table.front().index == 1);
    REQUIRE(table.front().fip.has_value());
    CHECK(*table.front().fip == 1.0);
    REQUIRE(table[19].fip.has_value());
    CHECK(*table[19].fip == doctest::Approx(1.0 / 20.0));
    CHECK_FALSE(table[20].fip.has_value());  // beyond M_max

    // Column k=4 defined from index 4 on, matches the closed form, non-increasing.
    CHECK_FALSE(table[2].flp[2].has_value());
    double prev = 1e9;
    for (std::size_t r = 3; r < table.size(); ++r) {
        REQUIRE(table[r].flp[2].has_value());
        const double v = *table[r].flp[2];
        REQUIRE(v == doctest::Approx(flp_variance_analytic(4, static_cast<int>(r) + 1)));
        REQUIRE(v <= prev + 1e-15);
        prev = v;
    }

    CHECK_THROWS_AS(hardening_curve({}, 10, 10), std::invalid_argument);
    CHECK_THROWS_AS(hardening_curve({4}, 3, 10), std::invalid_argument);
}

TEST_SUITE_END();
