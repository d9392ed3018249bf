#include <cmath>
#include <numbers>
#include <stdexcept>

#include "flexmimo/channel.hpp"
#include "flexmimo/geometry.hpp"
#include "flexmimo/power.hpp"
#include "flexmimo/rng.hpp"

namespace flexmimo {

double RngStream::exponential(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2,
                              std::uint64_t c3) const noexcept {
    return -std::log(uniform(c0, c1, c2, c3));
}

std::complex<double> RngStream::cgaussian(std::uint64_t c0, std::uint64_t c1,
                                          std::uint64_t c2) const noexcept {
    // Box-Muller in polar form: |g|^2 ~ Exp(1), phase uniform.
    const double radius = std::sqrt(-std::log(uniform(c0, c1, c2, 0)));
    const double phase = 2.0 * std::numbers::pi * uniform(c0, c1, c2, 1);
    return {radius * std::cos(phase), radius * std::sin(phase)};
}

double RngStream::gaussian(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2) const noexcept {
    return cgaussian(c0, c1, c2).real() * std::numbers::sqrt2;
}

void Scene::validate() const {
    if (region_size < 0.0 || !std::isfinite(region_size))
        throw std::invalid_argument("scene: region_size must be finite and >= 0");
    if (antenna_height < 0.0 || !std::isfinite(antenna_height))
        throw std::invalid_argument("scene: antenna_height must be finite and >= 0");
    if (users.empty()) throw std::invalid_argument("scene: at least one user required");
    if (antenna_init.empty()) throw std::invalid_argument("scene: at least one antenna required");
    for (const Vec2& u : users)
        if (!std::isfinite(u.x) || !std::isfinite(u.y) || !contains(u))
            throw std::invalid_argument("scene: user outside region");
    for (const Vec2& a : antenna_init)
        if (!std::isfinite(a.x) || !std::isfinite(a.y) || !contains(a))
            throw std::invalid_argument("scene: antenna start outside region");
}

void ChannelParams::validate() const {
    if (!(beta0 > 0.0)) throw std::invalid_argument("channel: beta0 must be > 0");
    if (alpha < 0.0) throw std::invalid_argument("channel: alpha must be >= 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("channel: noise_power must be > 0");
    if (tx_power < 0.0) throw std::invalid_argument("channel: tx_power must be >= 0");
    if (!(cell_size > 0.0)) throw std::invalid_argument("channel: cell_size must be > 0");
}

double path_gain(double d, double h0, const ChannelParams& params) {
    if (d < 0.0) throw std::invalid_argument("path_gain: negative distance");
    if (h0 < 0.0) throw std::invalid_argument("path_gain: negative height");
    if (!(params.beta0 > 0.0)) throw std::invalid_argument("path_gain: beta0 must be > 0");
    return params.beta0 * std::pow(d * d + h0 * h0, -0.5 * params.alpha);
}

std::int64_t fading_cell(double coord, double cell_size) {
    return static_cast<std::int64_t>(std::floor(coord / cell_size));
}

std::complex<double> small_scale_gain(const RngStream& rng, std::int64_t cell_x,
                                      std::int64_t cell_y, std::int64_t endpoint_id) {
    return rng.cgaussian(static_cast<std::uint64_t>(cell_x), static_cast<std::uint64_t>(cell_y),
                         static_cast<std::uint64_t>(endpoint_id));
}

Eigen::MatrixXcd channel_matrix(const Scene& scene, const std::vector<Vec2>& antenna_positions,
                                const ChannelParams& params, const RngStream& rng) {
    scene.validate();
    params.validate();
    if (antenna_positions.empty())
        throw std::invalid_argument("channel_matrix: empty antenna list");
    for (const Vec2& p : antenna_positions)
        if (!scene.contains(p))
            throw std::invalid_argument("channel_matrix: antenna position outside region");

    const auto antennas = static_cast<Eigen::Index>(antenna_positions.size());
    const auto users = static_cast<Eigen::Index>(scene.users.size());
    Eigen::MatrixXcd h(antennas, users);
    for (Eigen::Index m = 0; m < antennas; ++m) {
        const Vec2 pos = antenna_positions[static_cast<std::size_t>(m)];
        const std::int64_t cx = fading_cell(pos.x, params.cell_size);
        const std::int64_t cy = fading_cell(pos.y, params.cell_size);
        for (Eigen::Index k = 0; k < users; ++k) {
            const double d = distance(pos, scene.users[static_cast<std::size_t>(k)]);
            const double beta = path_gain(d, scene.antenna_height, params);
            const std::complex<double> g =
                params.small_scale ? small_scale_gain(rng, cx, cy, k) : std::complex<double>{1.0, 0.0};
            h(m, k) = std::sqrt(beta) * g;
        }
    }
    return h;
}

Eigen::VectorXd sinr_mrc(const Eigen::MatrixXcd& H, double p, double noise) {
    if (!(noise > 0.0)) throw std::invalid_argument("sinr_mrc: noise must be > 0");
    if (p < 0.0) throw std::invalid_argument("sinr_mrc: negative transmit power");

    const Eigen::Index users = H.cols();
    Eigen::VectorXd sinr(users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const double norm2 = H.col(k).squaredNorm();
        if (norm2 == 0.0) {
            sinr(k) = 0.0;
            continue;
        }
        double interference = 0.0;
        for (Eigen::Index j = 0; j < users; ++j) {
            if (j == k) continue;
            interference += std::norm(H.col(k).dot(H.col(j)));
        }
        sinr(k) = p * norm2 * norm2 / (p * interference + noise * norm2);
    }
    return sinr;
}

double sum_se(const Eigen::VectorXd& sinr) {
    double se = 0.0;
    for (Eigen::Index k = 0; k < sinr.size(); ++k) {
        if (sinr(k) < 0.0) throw std::invalid_argument("sum_se: negative SINR entry");
        se += std::log2(1.0 + sinr(k));
    }
    return se;
}

void PowerModel::validate() const {
    if (!(amp_efficiency > 0.0) || amp_efficiency > 1.0)
        throw std::invalid_argument("power: amp_efficiency must be in (0,1]");
    if (fixed_circuit < 0.0 || per_antenna_circuit < 0.0 || move_cost < 0.0)
        throw std::invalid_argument("power: circuit/movement constants must be >= 0");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("power: bandwidth must be > 0");
}

double total_power(const PowerModel& pm, int users, double tx_power, int antennas,
                   double path_len) {
    pm.validate();
    if (users < 0 || antennas < 0)
        throw std::invalid_argument("total_power: negative counts");
    if (tx_power < 0.0 || path_len < 0.0)
        throw std::invalid_argument("total_power: negative power or path length");
    return users * tx_power / pm.amp_efficiency + pm.fixed_circuit +
           antennas * pm.per_antenna_circuit + pm.move_cost * path_len;
}

double energy_efficiency(double se, double power, double bandwidth) {
    if (!(power > 0.0)) throw std::invalid_argument("energy_efficiency: power must be > 0");
    if (se < 0.0) throw std::invalid_argument("energy_efficiency: negative SE");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("energy_efficiency: bandwidth must be > 0");
    return bandwidth * se / power;
}

}  // namespace flexmimo
