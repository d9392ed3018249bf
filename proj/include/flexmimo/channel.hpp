#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "flexmimo/geometry.hpp"
#include "flexmimo/rng.hpp"

namespace flexmimo {

// Channel constants. Noise is normalized to 1 W by default so tx_power plays
// the role of an SNR-like ratio.
struct ChannelParams {
    double beta0 = 1.0;        // large-scale gain at unit reference distance
    double alpha = 3.0;        // pathloss exponent
    double noise_power = 1.0;  // sigma^2, W
    double tx_power = 1.0;     // p per user, W
    double cell_size = 0.5;    // lattice pitch of the frozen fading field, m
    bool small_scale = true;   // false -> unit gains (deterministic channels)

    void validate() const;
};

// beta0 * (d^2 + h0^2)^(-alpha/2); bounded at d = 0 whenever h0 > 0.
double path_gain(double d, double h0, const ChannelParams& params);

// Frozen Rayleigh fading: a pure function of (stream, lattice cell, endpoint).
// Unit second moment in distribution.
std::complex<double> small_scale_gain(const RngStream& rng, std::int64_t cell_x,
                                      std::int64_t cell_y, std::int64_t endpoint_id);

std::int64_t fading_cell(double coord, double cell_size);

// M x K channel, entry h_mk = sqrt(beta(d_mk)) * g_mk. Deterministic given
// (scene, positions, params, rng).
Eigen::MatrixXcd channel_matrix(const Scene& scene, const std::vector<Vec2>& antenna_positions,
                                const ChannelParams& params, const RngStream& rng);

// Uplink maximum-ratio combining:
//   SINR_k = p * |h_k|^4 / (p * sum_{j!=k} |h_k^H h_j|^2 + noise * |h_k|^2).
// An all-zero user column yields SINR 0.
Eigen::VectorXd sinr_mrc(const Eigen::MatrixXcd& H, double p, double noise);

// sum_k log2(1 + SINR_k), bit/s/Hz.
double sum_se(const Eigen::VectorXd& sinr);

}  // namespace flexmimo
