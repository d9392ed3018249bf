#include "flexmimo/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "flexmimo/rng.hpp"

namespace flexmimo {

namespace {

double activate(double x, Activation act) {
    if (act == Activation::rectifier) return x > 0.0 ? x : 0.0;
    return x / (1.0 + std::exp(-x));  // silu
}

// Derivative as a function of the pre-activation input.
double activate_grad(double x, Activation act) {
    if (act == Activation::rectifier) return x > 0.0 ? 1.0 : 0.0;
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

void check_shapes(const DenseNet& net) {
    const std::size_t layers = net.layer_sizes.size() - 1;
    if (net.weights.size() != layers || net.biases.size() != layers)
        throw std::invalid_argument("net: parameter arrays inconsistent with layer_sizes");
    for (std::size_t l = 0; l < layers; ++l) {
        if (net.weights[l].rows() != net.layer_sizes[l] ||
            net.weights[l].cols() != net.layer_sizes[l + 1] ||
            net.biases[l].size() != net.layer_sizes[l + 1])
            throw std::invalid_argument("net: parameter shape mismatch");
    }
}

}  // namespace

DenseNet net_init(const std::vector<int>& layer_sizes, Activation activation,
                  std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("net_init: need at least 2 layer sizes");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("net_init: layer sizes must be >= 1");

    DenseNet net;
    net.layer_sizes = layer_sizes;
    net.activation = activation;
    const RngStream rng{seed, rng_tag::net_init};
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l], fan_out = layer_sizes[l + 1];
        Eigen::MatrixXd w(fan_in, fan_out);
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (int i = 0; i < fan_in; ++i)
            for (int j = 0; j < fan_out; ++j)
                w(i, j) = scale * (2.0 * rng.uniform(l, static_cast<std::uint64_t>(i),
                                                     static_cast<std::uint64_t>(j)) -
                                   1.0);
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return net;
}

Eigen::MatrixXd net_forward(const DenseNet& net, const Eigen::MatrixXd& batch) {
    check_shapes(net);
    if (batch.cols() != net.input_size())
        throw std::invalid_argument("net_forward: input width mismatch");

    Eigen::MatrixXd h = batch;
    const std::size_t layers = net.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = (h * net.weights[l]).rowwise() + net.biases[l].transpose();
        if (l + 1 < layers)
            z = z.unaryExpr([&](double x) { return activate(x, net.activation); });
        h = std::move(z);
    }
    return h;
}

NetGrads net_backward(const DenseNet& net, const Eigen::MatrixXd& batch,
                      const Eigen::MatrixXd& upstream) {
    check_shapes(net);
    if (batch.cols() != net.input_size())
        throw std::invalid_argument("net_backward: input width mismatch");
    if (upstream.rows() != batch.rows() || upstream.cols() != net.output_size())
        throw std::invalid_argument("net_backward: upstream shape mismatch");

    const std::size_t layers = net.weights.size();
    std::vector<Eigen::MatrixXd> inputs(layers);      // layer inputs
    std::vector<Eigen::MatrixXd> pre_acts(layers);    // pre-activation values
    Eigen::MatrixXd h = batch;
    for (std::size_t l = 0; l < layers; ++l) {
        inputs[l] = h;
        Eigen::MatrixXd z = (h * net.weights[l]).rowwise() + net.biases[l].transpose();
        pre_acts[l] = z;
        if (l + 1 < layers)
            z = z.unaryExpr([&](double x) { return activate(x, net.activation); });
        h = std::move(z);
    }

    NetGrads grads;
    grads.weights.resize(layers);
    grads.biases.resize(layers);
    Eigen::MatrixXd delta = upstream;  // dL/dz of the output layer (linear)
    for (std::size_t l = layers; l-- > 0;) {
        grads.weights[l] = inputs[l].transpose() * delta;
        grads.biases[l] = delta.colwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd back = delta * net.weights[l].transpose();
        delta = back.cwiseProduct(pre_acts[l - 1].unaryExpr(
            [&](double x) { return activate_grad(x, net.activation); }));
    }
    return grads;
}

void adam_step(AdamState& state, DenseNet& net, const NetGrads& grads) {
    check_shapes(net);
    const std::size_t layers = net.weights.size();
    if (grads.weights.size() != layers || grads.biases.size() != layers)
        throw std::invalid_argument("adam_step: gradient shape mismatch");

    if (state.m_weights.empty()) {
        for (std::size_t l = 0; l < layers; ++l) {
            state.m_weights.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
            state.v_weights.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
            state.m_biases.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
            state.v_biases.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
        }
    }

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double corr1 = 1.0 - std::pow(state.beta1, t);
    const double corr2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t l = 0; l < layers; ++l) {
        if (grads.weights[l].rows() != net.weights[l].rows() ||
            grads.weights[l].cols() != net.weights[l].cols() ||
            grads.biases[l].size() != net.biases[l].size())
            throw std::invalid_argument("adam_step: gradient shape mismatch");

        auto update = [&](auto& m, auto& v, const auto& g, auto& param) {
            m = state.beta1 * m + (1.0 - state.beta1) * g;
            v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
            const auto m_hat = m / corr1;
            const auto v_hat = v / corr2;
            param -= state.lr * (m_hat.array() / (v_hat.array().sqrt() + state.epsilon)).matrix();
        };
        update(state.m_weights[l], state.v_weights[l], grads.weights[l], net.weights[l]);
        update(state.m_biases[l], state.v_biases[l], grads.biases[l], net.biases[l]);
    }
}

namespace {

constexpr char kMagic[6] = {'F', 'L', 'X', 'N', 'N', '1'};

void put_u32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& f) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ofstream& f, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::ifstream& f) {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_checkpoint(const DenseNet& net, const std::string& path) {
    check_shapes(net);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    f.write(kMagic, sizeof(kMagic));
    put_u32(f, static_cast<std::uint32_t>(net.layer_sizes.size()));
    for (int s : net.layer_sizes) put_u32(f, static_cast<std::uint32_t>(s));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const auto& w = net.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) put_f64(f, w(i, j));
        for (Eigen::Index j = 0; j < net.biases[l].size(); ++j) put_f64(f, net.biases[l](j));
    }
    if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

DenseNet load_checkpoint(const std::string& path, Activation activation) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[6];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path);

    const std::uint32_t count = get_u32(f);
    if (!f || count < 2 || count > 1024)
        throw std::runtime_error("load_checkpoint: bad layer count in " + path);
    std::vector<int> sizes(count);
    for (auto& s : sizes) s = static_cast<int>(get_u32(f));

    DenseNet net;
    net.layer_sizes = sizes;
    net.activation = activation;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Eigen::MatrixXd w(sizes[l], sizes[l + 1]);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = get_f64(f);
        Eigen::VectorXd b(sizes[l + 1]);
        for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = get_f64(f);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    if (!f) throw std::runtime_error("load_checkpoint: truncated file " + path);
    return net;
}

}  // namespace flexmimo
