#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace flexmimo {

enum class Activation {
    rectifier,  // max(0, x)
    silu        // x * sigmoid(x)
};

// Fully-connected net, 64-bit floats, hidden activations only (linear output).
// Weights are (fan_in x fan_out), stored per layer.
struct DenseNet {
    std::vector<int> layer_sizes;
    Activation activation = Activation::silu;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
};

struct NetGrads {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

// Symmetric uniform init scaled by 1/sqrt(fan_in), zero biases, deterministic
// per seed.
DenseNet net_init(const std::vector<int>& layer_sizes, Activation activation,
                  std::uint64_t seed);

// batch is (n x input_size); returns (n x output_size).
Eigen::MatrixXd net_forward(const DenseNet& net, const Eigen::MatrixXd& batch);

// Gradients of sum(upstream .* output) w.r.t. every parameter.
NetGrads net_backward(const DenseNet& net, const Eigen::MatrixXd& batch,
                      const Eigen::MatrixXd& upstream);

// Bias-corrected adaptive-moment update; moments are lazily shaped on the
// first step.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step = 0;
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;
};

void adam_step(AdamState& state, DenseNet& net, const NetGrads& grads);

// Flat binary checkpoint: magic "FLXNN1", u32 layer count, u32 sizes, then
// parameters as little-endian f64 in layer order (weights row-major, then
// biases). The activation is not stored; pass it at load time.
void save_checkpoint(const DenseNet& net, const std::string& path);
DenseNet load_checkpoint(const std::string& path, Activation activation = Activation::silu);

}  // namespace flexmimo
