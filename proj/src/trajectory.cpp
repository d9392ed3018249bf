#include "flexmimo/trajectory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flexmimo {

namespace {

// Sub-stream salts under rng_tag::optimizer.
constexpr std::uint64_t kSaltUniform = 0x756e6966;
constexpr std::uint64_t kSaltCem = 0x63656d;
constexpr std::uint64_t kSaltPolicy = 0x706f6c;
constexpr std::uint64_t kSaltDiffTime = 0x646974;
constexpr std::uint64_t kSaltDiffEps = 0x646965;
constexpr std::uint64_t kSaltDiffSample = 0x646973;
constexpr std::uint64_t kSaltDiffIter = 0x646969;

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct BestTracker {
    double value = 0.0;
    Waypoints waypoints;
    bool has_value = false;
    std::vector<double> curve;

    // First-encountered maximum wins.
    void offer(double v, const Waypoints& wp) {
        if (!has_value || v > value) {
            value = v;
            waypoints = wp;
            has_value = true;
        }
    }
    void close_iteration() { curve.push_back(value); }

    OptimizerReport report(std::int64_t evaluations, double wall_time) const {
        return {value, waypoints, curve, evaluations, wall_time};
    }
};

Waypoints uniform_waypoints(const TrajectoryProblem& problem, const RngStream& rng,
                            std::uint64_t trial) {
    const int antennas = static_cast<int>(problem.scene.antenna_init.size());
    Waypoints wp = Waypoints::zeros(antennas, problem.steps);
    const double l = problem.scene.region_size;
    std::uint64_t idx = 0;
    for (Vec2& p : wp.points) {
        p.x = l * rng.uniform(trial, idx++);
        p.y = l * rng.uniform(trial, idx++);
    }
    return wp;
}

// Generative optimizers work on [-1,1]-normalized coordinates.
Eigen::VectorXd normalize_coords(const Waypoints& wp, double region_size) {
    Eigen::VectorXd v = flatten(wp);
    if (region_size > 0.0) v = (2.0 / region_size) * v - Eigen::VectorXd::Ones(v.size());
    return v;
}

Waypoints denormalize_coords(const Eigen::VectorXd& v, double region_size, int antennas,
                             int steps) {
    Eigen::VectorXd coords = v;
    if (region_size > 0.0)
        coords = 0.5 * region_size * (v + Eigen::VectorXd::Ones(v.size()));
    else
        coords.setZero();
    return unflatten(coords, antennas, steps);
}

Eigen::VectorXd user_condition(const Scene& scene) {
    Eigen::VectorXd cond(2 * static_cast<Eigen::Index>(scene.users.size()));
    const double l = scene.region_size;
    for (std::size_t k = 0; k < scene.users.size(); ++k) {
        cond(2 * static_cast<Eigen::Index>(k)) = l > 0.0 ? scene.users[k].x / l : 0.0;
        cond(2 * static_cast<Eigen::Index>(k) + 1) = l > 0.0 ? scene.users[k].y / l : 0.0;
    }
    return cond;
}

// Indices of the n_elite largest values; ties resolved toward earlier samples.
std::vector<int> elite_indices(const std::vector<double>& values, int n_elite) {
    std::vector<int> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return values[static_cast<std::size_t>(a)] >
                                                values[static_cast<std::size_t>(b)]; });
    idx.resize(static_cast<std::size_t>(n_elite));
    return idx;
}

}  // namespace

void TrajectoryProblem::validate() const {
    scene.validate();
    channel.validate();
    power.validate();
    if (steps < 1) throw std::invalid_argument("trajectory: steps must be >= 1");
    if (budget < 0.0) throw std::invalid_argument("trajectory: budget must be >= 0");
}

Eigen::VectorXd flatten(const Waypoints& wp) {
    Eigen::VectorXd v(2 * static_cast<Eigen::Index>(wp.points.size()));
    for (std::size_t i = 0; i < wp.points.size(); ++i) {
        v(2 * static_cast<Eigen::Index>(i)) = wp.points[i].x;
        v(2 * static_cast<Eigen::Index>(i) + 1) = wp.points[i].y;
    }
    return v;
}

Waypoints unflatten(const Eigen::VectorXd& v, int antennas, int steps) {
    if (v.size() != 2 * static_cast<Eigen::Index>(antennas) * steps)
        throw std::invalid_argument("unflatten: vector size mismatch");
    Waypoints wp = Waypoints::zeros(antennas, steps);
    for (std::size_t i = 0; i < wp.points.size(); ++i) {
        wp.points[i].x = v(2 * static_cast<Eigen::Index>(i));
        wp.points[i].y = v(2 * static_cast<Eigen::Index>(i) + 1);
    }
    return wp;
}

double path_length(const Waypoints& wp, int antenna, Vec2 init) {
    if (antenna < 0 || antenna >= wp.antennas)
        throw std::invalid_argument("path_length: antenna index out of range");
    double len = 0.0;
    Vec2 prev = init;
    for (int t = 0; t < wp.steps; ++t) {
        const Vec2 cur = wp.at(antenna, t);
        len += distance(prev, cur);
        prev = cur;
    }
    return len;
}

double total_path_length(const Waypoints& wp, const Scene& scene) {
    double len = 0.0;
    for (int m = 0; m < wp.antennas; ++m)
        len += path_length(wp, m, scene.antenna_init[static_cast<std::size_t>(m)]);
    return len;
}

bool is_feasible(const Waypoints& wp, const TrajectoryProblem& problem) {
    const double l = problem.scene.region_size;
    for (const Vec2& p : wp.points)
        if (!(p.x >= -kFeasibilityTol && p.x <= l + kFeasibilityTol &&
              p.y >= -kFeasibilityTol && p.y <= l + kFeasibilityTol))
            return false;
    for (int m = 0; m < wp.antennas; ++m)
        if (path_length(wp, m, problem.scene.antenna_init[static_cast<std::size_t>(m)]) >
            problem.budget + kFeasibilityTol)
            return false;
    return true;
}

Waypoints project_feasible(const Waypoints& wp, const TrajectoryProblem& problem) {
    const double l = problem.scene.region_size;
    Waypoints out = wp;
    for (Vec2& p : out.points) {
        p.x = std::clamp(p.x, 0.0, l);
        p.y = std::clamp(p.y, 0.0, l);
    }
    for (int m = 0; m < out.antennas; ++m) {
        const Vec2 init = problem.scene.antenna_init[static_cast<std::size_t>(m)];
        const double len = path_length(out, m, init);
        if (len > problem.budget * (1.0 + 1e-12)) {
            const double s = problem.budget / len;
            for (int t = 0; t < out.steps; ++t) out.at(m, t) = init + s * (out.at(m, t) - init);
        }
    }
    return out;
}

double evaluate(const TrajectoryProblem& problem, const Waypoints& wp) {
    problem.validate();
    if (wp.antennas != static_cast<int>(problem.scene.antenna_init.size()) ||
        wp.steps != problem.steps)
        throw std::invalid_argument("evaluate: waypoint shape mismatch");
    if (!is_feasible(wp, problem))
        throw std::invalid_argument("evaluate: infeasible waypoints (project first)");

    const double l = problem.scene.region_size;
    std::vector<Vec2> finals(static_cast<std::size_t>(wp.antennas));
    for (int m = 0; m < wp.antennas; ++m) {
        Vec2 p = wp.final_position(m);
        finals[static_cast<std::size_t>(m)] = {std::clamp(p.x, 0.0, l), std::clamp(p.y, 0.0, l)};
    }

    const Eigen::MatrixXcd h =
        channel_matrix(problem.scene, finals, problem.channel, problem.fading_seed);
    const double se =
        sum_se(sinr_mrc(h, problem.channel.tx_power, problem.channel.noise_power));
    if (problem.objective == Objective::sum_se) return se;

    const double power = total_power(problem.power, static_cast<int>(problem.scene.users.size()),
                                     problem.channel.tx_power, wp.antennas,
                                     total_path_length(wp, problem.scene));
    return energy_efficiency(se, power, problem.power.bandwidth);
}

OptimizerReport brute_force_oracle(const TrajectoryProblem& problem, int grid_resolution) {
    problem.validate();
    if (grid_resolution < 2)
        throw std::invalid_argument("brute_force_oracle: grid_resolution must be >= 2");
    const int antennas = static_cast<int>(problem.scene.antenna_init.size());
    if (antennas > 2)
        throw std::invalid_argument("brute_force_oracle: unsupported for more than 2 antennas");

    Stopwatch clock;
    const double l = problem.scene.region_size;
    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>(grid_resolution) * grid_resolution);
    for (int i = 0; i < grid_resolution; ++i)
        for (int j = 0; j < grid_resolution; ++j)
            nodes.push_back({l * i / (grid_resolution - 1), l * j / (grid_resolution - 1)});

    // Single-segment feasibility: straight line from the start.
    std::vector<std::vector<Vec2>> feasible(static_cast<std::size_t>(antennas));
    for (int m = 0; m < antennas; ++m) {
        const Vec2 init = problem.scene.antenna_init[static_cast<std::size_t>(m)];
        for (const Vec2& node : nodes)
            if (distance(init, node) <= problem.budget + kFeasibilityTol)
                feasible[static_cast<std::size_t>(m)].push_back(node);
        if (feasible[static_cast<std::size_t>(m)].empty())
            throw std::invalid_argument("brute_force_oracle: budget excludes every grid node");
    }

    auto hold_at = [&](const std::vector<Vec2>& finals) {
        Waypoints wp = Waypoints::zeros(antennas, problem.steps);
        for (int m = 0; m < antennas; ++m)
            for (int t = 0; t < problem.steps; ++t)
                wp.at(m, t) = finals[static_cast<std::size_t>(m)];
        return wp;
    };

    BestTracker best;
    std::int64_t evaluations = 0;
    if (antennas == 1) {
        for (const Vec2& a : feasible[0]) {
            const Waypoints wp = hold_at({a});
            best.offer(evaluate(problem, wp), wp);
            best.close_iteration();
            ++evaluations;
        }
    } else {
        for (const Vec2& a : feasible[0]) {
            for (const Vec2& b : feasible[1]) {
                const Waypoints wp = hold_at({a, b});
                best.offer(evaluate(problem, wp), wp);
                best.close_iteration();
                ++evaluations;
            }
        }
    }
    return best.report(evaluations, clock.seconds());
}

OptimizerReport random_search(const TrajectoryProblem& problem, std::int64_t n,
                              std::uint64_t seed) {
    problem.validate();
    if (n < 1) throw std::invalid_argument("random_search: n must be >= 1");

    Stopwatch clock;
    const RngStream rng = RngStream{seed, rng_tag::optimizer}.derived(kSaltUniform);
    BestTracker best;
    for (std::int64_t t = 0; t < n; ++t) {
        const Waypoints wp =
            project_feasible(uniform_waypoints(problem, rng, static_cast<std::uint64_t>(t)), problem);
        best.offer(evaluate(problem, wp), wp);
        best.close_iteration();
    }
    return best.report(n, clock.seconds());
}

OptimizerReport cem_optimize(const TrajectoryProblem& problem, int iterations, int population,
                             double elite_fraction, std::uint64_t seed) {
    CemConfig cfg;
    cfg.iterations = iterations;
    cfg.population = population;
    cfg.elite_fraction = elite_fraction;
    return cem_optimize(problem, cfg, seed);
}

OptimizerReport cem_optimize(const TrajectoryProblem& problem, const CemConfig& cfg,
                             std::uint64_t seed) {
    problem.validate();
    if (cfg.iterations < 1 || cfg.population < 1)
        throw std::invalid_argument("cem_optimize: iterations and population must be >= 1");
    const int n_elite = static_cast<int>(cfg.population * cfg.elite_fraction);
    if (n_elite < 1)
        throw std::invalid_argument("cem_optimize: population * elite_fraction must be >= 1");

    Stopwatch clock;
    const int antennas = static_cast<int>(problem.scene.antenna_init.size());
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(antennas) * problem.steps;
    const RngStream rng = RngStream{seed, rng_tag::optimizer}.derived(kSaltCem);

    // Start centered on the parked array.
    Eigen::VectorXd mean(dim);
    for (int m = 0; m < antennas; ++m) {
        const Vec2 init = problem.scene.antenna_init[static_cast<std::size_t>(m)];
        for (int t = 0; t < problem.steps; ++t) {
            mean(2 * (static_cast<Eigen::Index>(m) * problem.steps + t)) = init.x;
            mean(2 * (static_cast<Eigen::Index>(m) * problem.steps + t) + 1) = init.y;
        }
    }
    Eigen::VectorXd std_dev =
        Eigen::VectorXd::Constant(dim, cfg.init_std_factor * problem.scene.region_size);

    BestTracker best;
    std::vector<Eigen::VectorXd> pop_vectors(static_cast<std::size_t>(cfg.population));
    std::vector<double> pop_values(static_cast<std::size_t>(cfg.population));
    for (int it = 0; it < cfg.iterations; ++it) {
        for (int s = 0; s < cfg.population; ++s) {
            Eigen::VectorXd x(dim);
            for (Eigen::Index d = 0; d < dim; ++d)
                x(d) = mean(d) + std_dev(d) * rng.gaussian(static_cast<std::uint64_t>(it),
                                                           static_cast<std::uint64_t>(s),
                                                           static_cast<std::uint64_t>(d));
            const Waypoints wp =
                project_feasible(unflatten(x, antennas, problem.steps), problem);
            pop_vectors[static_cast<std::size_t>(s)] = flatten(wp);
            pop_values[static_cast<std::size_t>(s)] = evaluate(problem, wp);
            best.offer(pop_values[static_cast<std::size_t>(s)], wp);
        }
        best.close_iteration();

        const std::vector<int> elites = elite_indices(pop_values, n_elite);
        Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(dim);
        for (int e : elites) new_mean += pop_vectors[static_cast<std::size_t>(e)];
        new_mean /= static_cast<double>(n_elite);
        Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
        for (int e : elites) {
            const Eigen::VectorXd diff = pop_vectors[static_cast<std::size_t>(e)] - new_mean;
            var += diff.cwiseProduct(diff);
        }
        var /= static_cast<double>(n_elite);
        mean = new_mean;
        std_dev = var.cwiseSqrt().cwiseMax(cfg.min_std);
    }
    return best.report(static_cast<std::int64_t>(cfg.iterations) * cfg.population,
                       clock.seconds());
}

OptimizerReport pg_optimize(const TrajectoryProblem& problem, int episodes,
                            const PolicyGradientConfig& cfg, std::uint64_t seed) {
    problem.validate();
    if (episodes < 1) throw std::invalid_argument("pg_optimize: episodes must be >= 1");
    if (cfg.batch < 1) throw std::invalid_argument("pg_optimize: batch must be >= 1");

    Stopwatch clock;
    const int antennas = static_cast<int>(problem.scene.antenna_init.size());
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(antennas) * problem.steps;
    const Eigen::VectorXd cond = user_condition(problem.scene);
    const RngStream rng = RngStream{seed, rng_tag::optimizer}.derived(kSaltPolicy);

    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(cond.size()));
    sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
    sizes.push_back(static_cast<int>(dim));
    DenseNet policy = net_init(sizes, Activation::rectifier, rng.bits(0));
    AdamState adam;
    adam.lr = cfg.lr;

    Eigen::VectorXd init_flat(dim);
    for (int m = 0; m < antennas; ++m) {
        const Vec2 init = problem.scene.antenna_init[static_cast<std::size_t>(m)];
        for (int t = 0; t < problem.steps; ++t) {
            init_flat(2 * (static_cast<Eigen::Index>(m) * problem.steps + t)) = init.x;
            init_flat(2 * (static_cast<Eigen::Index>(m) * problem.steps + t) + 1) = init.y;
        }
    }

    const Eigen::MatrixXd input = cond.transpose().replicate(cfg.batch, 1);
    double explore_std = cfg.explore_std_factor * problem.scene.region_size;

    BestTracker best;
    for (int ep = 0; ep < episodes; ++ep) {
        const Eigen::MatrixXd mu = net_forward(policy, input);
        Eigen::MatrixXd noise(cfg.batch, dim);
        Eigen::VectorXd rewards(cfg.batch);
        for (int b = 0; b < cfg.batch; ++b) {
            for (Eigen::Index d = 0; d < dim; ++d)
                noise(b, d) = rng.gaussian(static_cast<std::uint64_t>(ep),
                                           static_cast<std::uint64_t>(b),
                                           static_cast<std::uint64_t>(d));
            const Eigen::VectorXd action =
                init_flat + mu.row(b).transpose() + explore_std * noise.row(b).transpose();
            const Waypoints wp =
                project_feasible(unflatten(action, antennas, problem.steps), problem);
            rewards(b) = evaluate(problem, wp);
            best.offer(rewards(b), wp);
        }
        best.close_iteration();

        if (explore_std > 0.0) {
            const double baseline = rewards.mean();
            Eigen::MatrixXd upstream(cfg.batch, dim);
            for (int b = 0; b < cfg.batch; ++b)
                upstream.row(b) = -(rewards(b) - baseline) / explore_std * noise.row(b);
            upstream /= static_cast<double>(cfg.batch);
            const NetGrads grads = net_backward(policy, input, upstream);
            adam_step(adam, policy, grads);
        }
        explore_std *= cfg.explore_decay;
    }
    return best.report(static_cast<std::int64_t>(episodes) * cfg.batch, clock.seconds());
}

std::vector<double> DiffusionConfig::linear_alpha_bar(int steps, double final_value) {
    if (steps < 1) throw std::invalid_argument("alpha_bar: steps must be >= 1");
    if (!(final_value > 0.0) || final_value >= 1.0)
        throw std::invalid_argument("alpha_bar: final value must be in (0,1)");
    std::vector<double> ab(static_cast<std::size_t>(steps) + 1);
    for (int t = 0; t <= steps; ++t)
        ab[static_cast<std::size_t>(t)] = 1.0 - (1.0 - final_value) * t / steps;
    return ab;
}

void DiffusionConfig::validate() const {
    if (denoise_steps < 1) throw std::invalid_argument("diffusion: denoise_steps must be >= 1");
    if (!alpha_bar.empty()) {
        if (alpha_bar.size() != static_cast<std::size_t>(denoise_steps) + 1)
            throw std::invalid_argument("diffusion: alpha_bar must have denoise_steps + 1 entries");
        if (alpha_bar.front() != 1.0)
            throw std::invalid_argument("diffusion: alpha_bar must start at 1");
        for (std::size_t t = 1; t < alpha_bar.size(); ++t) {
            if (!(alpha_bar[t] > 0.0) || alpha_bar[t] >= 1.0)
                throw std::invalid_argument("diffusion: alpha_bar tail must be in (0,1)");
            if (alpha_bar[t] > alpha_bar[t - 1])
                throw std::invalid_argument("diffusion: alpha_bar must be non-increasing");
        }
    }
    if (outer_iterations < 1 || samples_per_iteration < 1)
        throw std::invalid_argument("diffusion: outer iteration/sample counts must be >= 1");
    if (!(elite_fraction > 0.0) || elite_fraction > 1.0)
        throw std::invalid_argument("diffusion: elite_fraction must be in (0,1]");
    if (static_cast<int>(samples_per_iteration * elite_fraction) < 1)
        throw std::invalid_argument("diffusion: samples * elite_fraction must be >= 1");
    if (train_epochs < 1 || draws_per_sample < 1)
        throw std::invalid_argument("diffusion: train_epochs and draws_per_sample must be >= 1");
    if (hidden_sizes.empty()) throw std::invalid_argument("diffusion: hidden_sizes empty");
    if (!(lr > 0.0)) throw std::invalid_argument("diffusion: lr must be > 0");
}

namespace {

std::vector<double> resolved_alpha_bar(const DiffusionConfig& cfg) {
    return cfg.alpha_bar.empty() ? DiffusionConfig::linear_alpha_bar(cfg.denoise_steps)
                                 : cfg.alpha_bar;
}

}  // namespace

ReverseCoeffs diffusion_reverse_coeffs(double alpha_bar_prev, double alpha_bar_cur) {
    if (!(alpha_bar_cur > 0.0) || alpha_bar_cur >= 1.0 || alpha_bar_prev < alpha_bar_cur ||
        alpha_bar_prev > 1.0)
        throw std::invalid_argument("diffusion_reverse_coeffs: invalid schedule pair");
    const double alpha = alpha_bar_cur / alpha_bar_prev;
    const double beta = 1.0 - alpha;
    ReverseCoeffs c;
    c.inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    c.eps_coeff = beta / std::sqrt(1.0 - alpha_bar_cur);
    c.sigma = std::sqrt(beta * (1.0 - alpha_bar_prev) / (1.0 - alpha_bar_cur));
    return c;
}

DenseNet diffusion_train(const std::vector<Eigen::VectorXd>& samples,
                         const std::vector<double>& weights, const DiffusionConfig& cfg,
                         const Eigen::VectorXd& condition) {
    return diffusion_train(samples, weights, cfg, condition, DenseNet{}, nullptr);
}

DenseNet diffusion_train(const std::vector<Eigen::VectorXd>& samples,
                         const std::vector<double>& weights, const DiffusionConfig& cfg,
                         const Eigen::VectorXd& condition, DenseNet net, double* final_loss) {
    cfg.validate();
    if (samples.empty()) throw std::invalid_argument("diffusion_train: empty sample set");
    if (weights.size() != samples.size())
        throw std::invalid_argument("diffusion_train: weights/samples size mismatch");
    double weight_sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("diffusion_train: negative weight");
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) throw std::invalid_argument("diffusion_train: all weights zero");

    const Eigen::Index dim = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != dim) throw std::invalid_argument("diffusion_train: ragged samples");
    const Eigen::Index in_size = dim + 1 + condition.size();

    if (net.layer_sizes.empty()) {
        std::vector<int> sizes;
        sizes.push_back(static_cast<int>(in_size));
        sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
        sizes.push_back(static_cast<int>(dim));
        net = net_init(sizes, Activation::silu, RngStream{cfg.seed, rng_tag::optimizer}.bits(0));
    }
    if (net.input_size() != in_size || net.output_size() != dim)
        throw std::invalid_argument("diffusion_train: net shape does not fit data");

    const std::vector<double> ab = resolved_alpha_bar(cfg);
    const RngStream rng_t = RngStream{cfg.seed, rng_tag::optimizer}.derived(kSaltDiffTime);
    const RngStream rng_eps = RngStream{cfg.seed, rng_tag::optimizer}.derived(kSaltDiffEps);

    AdamState adam;
    adam.lr = cfg.lr;
    const int rows = static_cast<int>(samples.size()) * cfg.draws_per_sample;
    Eigen::MatrixXd input(rows, in_size);
    Eigen::MatrixXd target(rows, dim);
    Eigen::VectorXd row_weight(rows);

    double loss = 0.0;
    for (int epoch = 0; epoch < cfg.train_epochs; ++epoch) {
        int row = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            for (int r = 0; r < cfg.draws_per_sample; ++r, ++row) {
                const int t = 1 + static_cast<int>(rng_t.bits(static_cast<std::uint64_t>(epoch),
                                                              i, static_cast<std::uint64_t>(r)) %
                                                   static_cast<std::uint64_t>(cfg.denoise_steps));
                const double ab_t = ab[static_cast<std::size_t>(t)];
                for (Eigen::Index d = 0; d < dim; ++d) {
                    const double eps = rng_eps.gaussian(
                        static_cast<std::uint64_t>(epoch),
                        i * static_cast<std::uint64_t>(cfg.draws_per_sample) +
                            static_cast<std::uint64_t>(r),
                        static_cast<std::uint64_t>(d));
                    input(row, d) = std::sqrt(ab_t) * samples[i](d) + std::sqrt(1.0 - ab_t) * eps;
                    target(row, d) = eps;
                }
                input(row, dim) = ab_t;
                input.row(row).tail(condition.size()) = condition.transpose();
                row_weight(row) = weights[i] / weight_sum;
            }
        }

        const Eigen::MatrixXd pred = net_forward(net, input);
        const Eigen::MatrixXd resid = pred - target;
        const double scale = 1.0 / (static_cast<double>(cfg.draws_per_sample) * static_cast<double>(dim));
        loss = 0.0;
        for (int r = 0; r < rows; ++r) loss += row_weight(r) * resid.row(r).squaredNorm() * scale;
        Eigen::MatrixXd upstream = resid;
        upstream.array().colwise() *= row_weight.array();
        upstream *= 2.0 * scale;
        adam_step(adam, net, net_backward(net, input, upstream));
    }
    if (final_loss != nullptr) *final_loss = loss;
    return net;
}

std::vector<Eigen::VectorXd> diffusion_sample(const DenseNet& net, const DiffusionConfig& cfg,
                                              int n, std::uint64_t seed,
                                              const Eigen::VectorXd& condition) {
    cfg.validate();
    if (n < 0) throw std::invalid_argument("diffusion_sample: n must be >= 0");
    if (n == 0) return {};
    const Eigen::Index dim = net.output_size();
    if (net.input_size() != dim + 1 + condition.size())
        throw std::invalid_argument("diffusion_sample: net shape does not fit condition");

    const std::vector<double> ab = resolved_alpha_bar(cfg);
    const RngStream rng = RngStream{seed, rng_tag::optimizer}.derived(kSaltDiffSample);

    Eigen::MatrixXd x(n, dim);
    for (int j = 0; j < n; ++j)
        for (Eigen::Index d = 0; d < dim; ++d)
            x(j, d) = rng.gaussian(static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(d),
                                   static_cast<std::uint64_t>(cfg.denoise_steps) + 1);

    Eigen::MatrixXd input(n, net.input_size());
    for (int t = cfg.denoise_steps; t >= 1; --t) {
        const ReverseCoeffs c = diffusion_reverse_coeffs(ab[static_cast<std::size_t>(t) - 1],
                                                         ab[static_cast<std::size_t>(t)]);
        input.leftCols(dim) = x;
        input.col(dim).setConstant(ab[static_cast<std::size_t>(t)]);
        input.rightCols(condition.size()) = condition.transpose().replicate(n, 1);
        const Eigen::MatrixXd eps_hat = net_forward(net, input);
        x = c.inv_sqrt_alpha * (x - c.eps_coeff * eps_hat);
        if (c.sigma > 0.0) {
            for (int j = 0; j < n; ++j)
                for (Eigen::Index d = 0; d < dim; ++d)
                    x(j, d) += c.sigma * rng.gaussian(static_cast<std::uint64_t>(j),
                                                      static_cast<std::uint64_t>(d),
                                                      static_cast<std::uint64_t>(t));
        }
    }

    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out.push_back(x.row(j).transpose());
    return out;
}

OptimizerReport diffusion_optimize(const TrajectoryProblem& problem, const DiffusionConfig& cfg) {
    problem.validate();
    cfg.validate();

    Stopwatch clock;
    const int antennas = static_cast<int>(problem.scene.antenna_init.size());
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(antennas) * problem.steps;
    const Eigen::VectorXd cond = user_condition(problem.scene);
    const double l = problem.scene.region_size;
    const RngStream rng_uniform = RngStream{cfg.seed, rng_tag::optimizer}.derived(kSaltUniform);
    const RngStream rng_iter = RngStream{cfg.seed, rng_tag::optimizer}.derived(kSaltDiffIter);
    const int n_elite = static_cast<int>(cfg.samples_per_iteration * cfg.elite_fraction);

    DenseNet net;  // initialized on the first training call
    BestTracker best;
    Eigen::VectorXd best_vector;
    std::vector<Eigen::VectorXd> batch_vectors(static_cast<std::size_t>(cfg.samples_per_iteration));
    std::vector<double> batch_values(static_cast<std::size_t>(cfg.samples_per_iteration));

    for (int it = 0; it < cfg.outer_iterations; ++it) {
        std::vector<Eigen::VectorXd> raw;
        if (it == 0) {
            raw.reserve(static_cast<std::size_t>(cfg.samples_per_iteration));
            for (int j = 0; j < cfg.samples_per_iteration; ++j) {
                Eigen::VectorXd x(dim);
                for (Eigen::Index d = 0; d < dim; ++d)
                    x(d) = 2.0 * rng_uniform.uniform(static_cast<std::uint64_t>(j),
                                                     static_cast<std::uint64_t>(d)) -
                           1.0;
                raw.push_back(std::move(x));
            }
        } else {
            raw = diffusion_sample(net, cfg, cfg.samples_per_iteration,
                                   rng_iter.bits(static_cast<std::uint64_t>(it)), cond);
        }

        for (int j = 0; j < cfg.samples_per_iteration; ++j) {
            const Waypoints wp = project_feasible(
                denormalize_coords(raw[static_cast<std::size_t>(j)], l, antennas, problem.steps),
                problem);
            const double value = evaluate(problem, wp);
            batch_vectors[static_cast<std::size_t>(j)] = normalize_coords(wp, l);
            batch_values[static_cast<std::size_t>(j)] = value;
            if (!best.has_value || value > best.value)
                best_vector = batch_vectors[static_cast<std::size_t>(j)];
            best.offer(value, wp);
        }
        best.close_iteration();

        if (it + 1 == cfg.outer_iterations) break;

        const std::vector<int> elites = elite_indices(batch_values, n_elite);
        std::vector<Eigen::VectorXd> train_set;
        std::vector<double> train_values;
        for (int e : elites) {
            train_set.push_back(batch_vectors[static_cast<std::size_t>(e)]);
            train_values.push_back(batch_values[static_cast<std::size_t>(e)]);
        }
        // Keep the incumbent in the training pool.
        train_set.push_back(best_vector);
        train_values.push_back(best.value);

        double lo = train_values.front(), hi = train_values.front();
        for (double v : train_values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        std::vector<double> train_weights(train_values.size(), 1.0);
        if (hi > lo)
            for (std::size_t i = 0; i < train_values.size(); ++i)
                train_weights[i] = 0.25 + (train_values[i] - lo) / (hi - lo);

        DiffusionConfig train_cfg = cfg;
        train_cfg.seed = rng_iter.bits(static_cast<std::uint64_t>(it), 0x7261696e);
        net = diffusion_train(train_set, train_weights, train_cfg, cond, std::move(net), nullptr);
    }
    return best.report(
        static_cast<std::int64_t>(cfg.outer_iterations) * cfg.samples_per_iteration,
        clock.seconds());
}

}  // namespace flexmimo
