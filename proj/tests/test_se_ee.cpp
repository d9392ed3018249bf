#include <doctest.h>

#include <cmath>

#include "flexmimo/rng.hpp"
#include "flexmimo/se_ee.hpp"

using namespace flexmimo;

namespace {

// Quadrature oracle for E[log2(1+X)], X ~ Exp(1), via the survival integral
// E = int_0^inf exp(1 - 2^t) dt (Simpson on [0, 40], integrand decays
// double-exponentially).
double oracle_single_antenna_se() {
    const int n = 4000;  // even
    const double a = 0.0, b = 40.0;
    const double h = (b - a) / n;
    auto f = [](double t) { return std::exp(1.0 - std::exp2(t)); };
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

PowerModel amp_only() {
    PowerModel pm;
    pm.amp_efficiency = 0.4;
    pm.fixed_circuit = 0.0;
    pm.per_antenna_circuit = 0.0;
    pm.move_cost = 0.0;
    pm.bandwidth = 1.0;
    return pm;
}

std::vector<double> default_sweep() {
    std::vector<double> sweep;
    for (double p = 0.05; p < 60.0; p *= 1.45) sweep.push_back(p);
    return sweep;
}

}  // namespace

TEST_SUITE_BEGIN("se_ee");

TEST_CASE("expected_se closed-form anchor for one fixed antenna") {
    const double oracle = oracle_single_antenna_se();
    CHECK(oracle == doctest::Approx(0.860347382).epsilon(1e-6));
    const SeStats stats = expected_se_stats(SystemKind::Fixed(1), 1.0, 1.0, 200000, 99);
    CHECK(std::abs(stats.mean - oracle) <= 3.0 * stats.stderr_mean);
}

TEST_CASE("expected_se basics") {
    CHECK(expected_se(SystemKind::Fixed(3), 0.0, 1.0, 100, 1) == 0.0);
    CHECK(expected_se(SystemKind::Flexible(2, 8), 1.0, 1.0, 500, 1) ==
          expected_se(SystemKind::Flexible(2, 8), 1.0, 1.0, 500, 1));

    SystemKind bad = SystemKind::Flexible(5, 3);
    CHECK_THROWS_AS(expected_se(bad, 1.0, 1.0, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(expected_se(SystemKind::Fixed(0), 1.0, 1.0, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(expected_se(SystemKind::Fixed(1), 1.0, 0.0, 100, 1), std::invalid_argument);
}

TEST_CASE("fixed array and full-selection flexible array coincide") {
    for (int m : {1, 2, 4, 8}) {
        const double fixed = expected_se(SystemKind::Fixed(m), 2.0, 1.0, 20000, 5);
        const double flex = expected_se(SystemKind::Flexible(m, m), 2.0, 1.0, 20000, 5);
        REQUIRE(fixed == doctest::Approx(flex).epsilon(1e-12));
    }
}

TEST_CASE("SE strictly increasing in transmit power under a shared seed") {
    for (const SystemKind kind : {SystemKind::Fixed(4), SystemKind::Flexible(2, 10)}) {
        double prev = expected_se(kind, 0.01, 1.0, 2000, 3);
        for (double p : {0.02, 0.05, 0.1, 0.5, 1.0, 2.0, 10.0}) {
            const double cur = expected_se(kind, p, 1.0, 2000, 3);
            REQUIRE(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("se_ee_curve rows satisfy the EE identity exactly") {
    PowerModel pm;
    const SystemKind kind = SystemKind::Flexible(4, 30);
    const auto curve = se_ee_curve(kind, default_sweep(), pm, 1.0, 2000, 11);
    REQUIRE(curve.size() == default_sweep().size());
    double prev_se = -1.0;
    for (const SeEePoint& pt : curve) {
        const double power = total_power(pm, 1, pt.tx_power, kind.chains(), kind.travel_length());
        REQUIRE(std::abs(pt.ee * power - pm.bandwidth * pt.se) <=
                1e-12 * std::max(1.0, pm.bandwidth * pt.se));
        REQUIRE(pt.se > prev_se);
        prev_se = pt.se;
    }

    const auto again = se_ee_curve(kind, default_sweep(), pm, 1.0, 2000, 11);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        REQUIRE(curve[i].se == again[i].se);
        REQUIRE(curve[i].ee == again[i].ee);
    }
}

TEST_CASE("se_ee_curve input validation") {
    PowerModel pm;
    CHECK_THROWS_AS(se_ee_curve(SystemKind::Fixed(2), {}, pm, 1.0, 100, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(se_ee_curve(SystemKind::Fixed(2), {2.0, 1.0}, pm, 1.0, 100, 0),
                    std::invalid_argument);
}

TEST_CASE("amplifier-only EE is strictly decreasing in power") {
    const auto curve = se_ee_curve(SystemKind::Fixed(1), default_sweep(), amp_only(), 1.0, 5000, 2);
    // EE -> B*eta*E[S]/(sigma^2 ln2) as p -> 0; with unit-mean gain ~ 0.577.
    CHECK(curve.front().ee == doctest::Approx(0.4 / std::log(2.0)).epsilon(0.1));
    for (std::size_t i = 1; i < curve.size(); ++i) REQUIRE(curve[i].ee < curve[i - 1].ee);
}

TEST_CASE("max_ee_point selection and tie-breaking") {
    const std::vector<SeEePoint> curve = {{1.0, 1.0, 0.2}, {2.0, 2.0, 0.5}, {4.0, 3.0, 0.4}};
    const SeEePoint peak = max_ee_point(curve);
    CHECK(peak.tx_power == 2.0);
    CHECK(peak.ee == 0.5);

    const std::vector<SeEePoint> tie = {{1.0, 0.5, 0.5}, {2.0, 0.5, 0.5}};
    CHECK(max_ee_point(tie).tx_power == 1.0);

    const std::vector<SeEePoint> single = {{3.0, 1.0, 0.1}};
    CHECK(max_ee_point(single).tx_power == 3.0);

    CHECK_THROWS_AS(max_ee_point({}), std::invalid_argument);
}

TEST_CASE("system comparison reproduces the qualitative tradeoffs") {
    PowerModel pm;
    const auto sweep = default_sweep();
    const auto table = compare_systems(
        {SystemKind::Fixed(20), SystemKind::Flexible(4, 30), SystemKind::Flexible(4, 60),
         SystemKind::Fixed(4)},
        pm, 1.0, sweep, 10000, 17);

    const auto& fip20 = table[0];
    const auto& flp30 = table[1];
    const auto& flp60 = table[2];
    const auto& fip4 = table[3];

    CHECK(flp30.max_ee.ee > fip20.max_ee.ee);           // flexible beats fixed on EE
    CHECK(flp60.se_at_max_p > flp30.se_at_max_p);       // more positions, more SE
    CHECK(flp60.max_ee.ee < flp30.max_ee.ee);           // but lower peak EE
    CHECK(fip20.se_at_max_p > fip4.se_at_max_p);        // more fixed antennas, more SE

    CHECK_THROWS_AS(compare_systems({SystemKind::Fixed(2)}, pm, 1.0, sweep, 100, 0),
                    std::invalid_argument);
}

TEST_CASE("max EE non-increasing in movement cost") {
    const auto sweep = default_sweep();
    double prev = 1e18;
    for (double c_move : {0.0, 0.5, 1.0, 5.0, 20.0}) {
        PowerModel pm;
        pm.move_cost = c_move;
        const auto curve = se_ee_curve(SystemKind::Flexible(4, 30), sweep, pm, 1.0, 4000, 23);
        const double peak = max_ee_point(curve).ee;
        REQUIRE(peak <= prev);
        prev = peak;
    }
}

TEST_SUITE_END();
