#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>

#include "flexmimo/channel.hpp"
#include "flexmimo/geometry.hpp"
#include "flexmimo/power.hpp"
#include "flexmimo/rng.hpp"

using namespace flexmimo;

namespace {

ChannelParams params_with(double beta0, double alpha) {
    ChannelParams p;
    p.beta0 = beta0;
    p.alpha = alpha;
    return p;
}

Scene unit_scene(double l, std::vector<Vec2> users, std::vector<Vec2> antennas, double h0) {
    Scene s;
    s.region_size = l;
    s.antenna_height = h0;
    s.users = std::move(users);
    s.antenna_init = std::move(antennas);
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("core_model");

TEST_CASE("rng stream is a pure function of its counters") {
    const RngStream a{42, rng_tag::fading};
    for (int i = 0; i < 10000; ++i) {
        const RngStream probe{a.bits(static_cast<std::uint64_t>(i), 7), rng_tag::fading};
        const std::uint64_t c0 = probe.bits(1, 2, 3);
        const std::uint64_t c1 = probe.bits(1, 2, 3);
        REQUIRE(c0 == c1);
    }
    CHECK(a.bits(0) != a.bits(1));
    CHECK(RngStream{42, 1}.bits(5) != RngStream{42, 2}.bits(5));
    CHECK(RngStream{42, 1}.bits(5) != RngStream{43, 1}.bits(5));
}

TEST_CASE("uniform draws stay in (0,1]") {
    const RngStream rng{9, 0};
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform(static_cast<std::uint64_t>(i));
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
    }
}

TEST_CASE("path_gain closed-form examples") {
    CHECK(path_gain(0.0, 1.0, params_with(1.0, 2.0)) == doctest::Approx(1.0));
    CHECK(path_gain(1.0, 0.0, params_with(1.0, 3.7)) == doctest::Approx(1.0));
    CHECK(path_gain(10.0, 0.0, params_with(1.0, 2.0)) == doctest::Approx(0.01));
    CHECK(path_gain(3.0, 4.0, params_with(2.0, 2.0)) == doctest::Approx(2.0 / 25.0));
}

TEST_CASE("path_gain rejects invalid arguments") {
    CHECK_THROWS_AS(path_gain(-1.0, 0.0, params_with(1.0, 2.0)), std::invalid_argument);
    CHECK_THROWS_AS(path_gain(1.0, -1.0, params_with(1.0, 2.0)), std::invalid_argument);
    CHECK_THROWS_AS(path_gain(1.0, 1.0, params_with(0.0, 2.0)), std::invalid_argument);
    CHECK_THROWS_AS(path_gain(1.0, 1.0, params_with(-1.0, 2.0)), std::invalid_argument);
}

TEST_CASE("path_gain strictly decreasing in distance") {
    for (double alpha : {2.0, 3.0, 3.7}) {
        const ChannelParams p = params_with(1.0, alpha);
        double prev = path_gain(0.0, 2.0, p);
        for (int i = 1; i <= 1000; ++i) {
            const double g = path_gain(0.05 * i, 2.0, p);
            REQUIRE(g < prev);
            prev = g;
        }
    }
}

TEST_CASE("small_scale_gain purity and stream separation") {
    const RngStream rng{123, rng_tag::fading};
    const RngStream probe{7, 0};
    int collisions = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto cx = static_cast<std::int64_t>(probe.bits(static_cast<std::uint64_t>(i), 0) % 4096) - 2048;
        const auto cy = static_cast<std::int64_t>(probe.bits(static_cast<std::uint64_t>(i), 1) % 4096) - 2048;
        const auto id = static_cast<std::int64_t>(probe.bits(static_cast<std::uint64_t>(i), 2) % 16);
        const std::complex<double> g0 = small_scale_gain(rng, cx, cy, id);
        const std::complex<double> g1 = small_scale_gain(rng, cx, cy, id);
        REQUIRE(g0.real() == g1.real());
        REQUIRE(g0.imag() == g1.imag());
        const std::complex<double> other = small_scale_gain(RngStream{124, rng_tag::fading}, cx, cy, id);
        if (other == g0) ++collisions;
    }
    CHECK(collisions == 0);
}

TEST_CASE("small_scale_gain has unit second moment and zero mean") {
    const RngStream rng{2024, rng_tag::fading};
    double power = 0.0;
    std::complex<double> mean{0.0, 0.0};
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const std::complex<double> g = small_scale_gain(rng, i % 1000, i / 1000, 0);
        power += std::norm(g);
        mean += g;
    }
    power /= n;
    mean /= static_cast<double>(n);
    CHECK(power > 0.99);
    CHECK(power < 1.01);
    CHECK(std::abs(mean) < 0.01);
}

TEST_CASE("channel_matrix at the user's location reduces to the fading gain") {
    const Scene scene = unit_scene(10.0, {{4.0, 4.0}}, {{4.0, 4.0}}, 1.0);
    ChannelParams p = params_with(1.0, 2.0);
    const RngStream rng{55, rng_tag::fading};
    const Eigen::MatrixXcd h = channel_matrix(scene, {{4.0, 4.0}}, p, rng);
    REQUIRE(h.rows() == 1);
    REQUIRE(h.cols() == 1);
    const std::complex<double> g =
        small_scale_gain(rng, fading_cell(4.0, p.cell_size), fading_cell(4.0, p.cell_size), 0);
    CHECK(std::norm(h(0, 0)) == doctest::Approx(std::norm(g)).epsilon(1e-12));
}

TEST_CASE("channel_matrix determinism and alpha=0 identity") {
    const Scene scene = unit_scene(10.0, {{1.0, 2.0}, {8.0, 9.0}}, {{5.0, 5.0}}, 2.0);
    ChannelParams p = params_with(3.0, 0.0);
    const RngStream rng{1, rng_tag::fading};
    const std::vector<Vec2> pos = {{2.0, 3.0}, {7.0, 1.0}};
    const Eigen::MatrixXcd h0 = channel_matrix(scene, pos, p, rng);
    const Eigen::MatrixXcd h1 = channel_matrix(scene, pos, p, rng);
    CHECK(h0 == h1);

    p.small_scale = false;
    const Eigen::MatrixXcd h = channel_matrix(scene, pos, p, rng);
    for (Eigen::Index m = 0; m < h.rows(); ++m)
        for (Eigen::Index k = 0; k < h.cols(); ++k)
            CHECK(std::norm(h(m, k)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("channel_matrix rejects bad inputs") {
    const Scene scene = unit_scene(10.0, {{1.0, 1.0}}, {{2.0, 2.0}}, 2.0);
    const ChannelParams p = params_with(1.0, 3.0);
    const RngStream rng{0, rng_tag::fading};
    CHECK_THROWS_AS(channel_matrix(scene, {}, p, rng), std::invalid_argument);
    CHECK_THROWS_AS(channel_matrix(scene, {{11.0, 1.0}}, p, rng), std::invalid_argument);
}

TEST_CASE("sinr_mrc hand examples") {
    Eigen::MatrixXcd h(2, 1);
    h << std::complex<double>{1.0, 0.0}, std::complex<double>{0.0, 0.0};
    const Eigen::VectorXd single = sinr_mrc(h, 1.0, 1.0);
    CHECK(single(0) == doctest::Approx(1.0));

    Eigen::MatrixXcd ortho(2, 2);
    ortho << 1.0, 0.0, 0.0, 1.0;
    const Eigen::VectorXd s2 = sinr_mrc(ortho, 1.0, 1.0);
    CHECK(s2(0) == doctest::Approx(1.0));
    CHECK(s2(1) == doctest::Approx(1.0));

    Eigen::MatrixXcd same(2, 2);
    same << 1.0, 1.0, 0.0, 0.0;
    const Eigen::VectorXd s3 = sinr_mrc(same, 1.0, 1.0);
    CHECK(s3(0) == doctest::Approx(0.5));
    CHECK(s3(1) == doctest::Approx(0.5));
}

TEST_CASE("sinr_mrc K=1 reduces to p*norm^2/noise") {
    const RngStream rng{77, 0};
    for (int i = 0; i < 200; ++i) {
        Eigen::MatrixXcd h(3, 1);
        for (int m = 0; m < 3; ++m)
            h(m, 0) = rng.cgaussian(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(m));
        const double p = 0.1 + rng.uniform(static_cast<std::uint64_t>(i), 100);
        const double noise = 0.1 + rng.uniform(static_cast<std::uint64_t>(i), 101);
        const double expected = p * h.col(0).squaredNorm() / noise;
        const double got = sinr_mrc(h, p, noise)(0);
        REQUIRE(std::abs(got - expected) <= 1e-12 * std::abs(expected));
    }
}

TEST_CASE("sinr_mrc edge cases") {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
    h(0, 1) = 1.0;
    const Eigen::VectorXd s = sinr_mrc(h, 1.0, 1.0);
    CHECK(s(0) == 0.0);  // all-zero column is defined, not an error
    CHECK(s(1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(sinr_mrc(h, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sinr_mrc(h, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("sum_se examples and errors") {
    Eigen::VectorXd v(2);
    v << 1.0, 1.0;
    CHECK(sum_se(v) == doctest::Approx(2.0));
    CHECK(sum_se(Eigen::VectorXd{}) == 0.0);
    Eigen::VectorXd w(1);
    w << 3.0;
    CHECK(sum_se(w) == doctest::Approx(2.0));
    w << -0.5;
    CHECK_THROWS_AS(sum_se(w), std::invalid_argument);
}

TEST_CASE("total_power hand sum and linearity") {
    PowerModel zero;
    zero.amp_efficiency = 1.0;
    zero.fixed_circuit = 0.0;
    zero.per_antenna_circuit = 0.0;
    zero.move_cost = 0.0;
    CHECK(total_power(zero, 1, 0.0, 4, 10.0) == 0.0);

    PowerModel pm;
    pm.amp_efficiency = 0.4;
    pm.fixed_circuit = 10.0;
    pm.per_antenna_circuit = 1.0;
    pm.move_cost = 0.1;
    CHECK(total_power(pm, 1, 1.0, 4, 10.0) == doctest::Approx(17.5));

    const double base = total_power(pm, 1, 1.0, 4, 0.0);
    const double once = total_power(pm, 1, 1.0, 4, 10.0);
    const double twice = total_power(pm, 1, 1.0, 4, 20.0);
    CHECK(twice - once == doctest::Approx(once - base));
    CHECK(once - base == doctest::Approx(1.0));

    CHECK_THROWS_AS(total_power(pm, -1, 1.0, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(total_power(pm, 1, -1.0, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(total_power(pm, 1, 1.0, 4, -2.0), std::invalid_argument);
}

TEST_CASE("energy_efficiency identity") {
    CHECK(energy_efficiency(0.0, 4.0, 1.0) == 0.0);
    CHECK(energy_efficiency(2.0, 4.0, 1.0) == doctest::Approx(0.5));
    CHECK(energy_efficiency(2.0, 4.0, 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(energy_efficiency(2.0, 0.0, 1.0), std::invalid_argument);

    PowerModel pm;
    const RngStream rng{31, 0};
    for (int i = 0; i < 100; ++i) {
        const double se = 10.0 * rng.uniform(static_cast<std::uint64_t>(i), 0);
        const double p = 0.01 + 5.0 * rng.uniform(static_cast<std::uint64_t>(i), 1);
        const double len = 3.0 * rng.uniform(static_cast<std::uint64_t>(i), 2);
        const double power = total_power(pm, 2, p, 4, len);
        const double ee = energy_efficiency(se, power, pm.bandwidth);
        REQUIRE(std::abs(ee * power - pm.bandwidth * se) <= 1e-12 * pm.bandwidth * se + 1e-15);
    }
}

TEST_CASE("scene validation") {
    CHECK_THROWS_AS(unit_scene(10.0, {}, {{1.0, 1.0}}, 2.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(unit_scene(10.0, {{1.0, 1.0}}, {}, 2.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(unit_scene(10.0, {{11.0, 1.0}}, {{1.0, 1.0}}, 2.0).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(unit_scene(10.0, {{1.0, 1.0}}, {{1.0, 1.0}}, -2.0).validate(),
                    std::invalid_argument);
    CHECK_NOTHROW(unit_scene(10.0, {{1.0, 1.0}}, {{1.0, 1.0}}, 2.0).validate());
}

TEST_SUITE_END();
