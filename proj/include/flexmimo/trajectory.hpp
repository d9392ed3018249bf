#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "flexmimo/channel.hpp"
#include "flexmimo/geometry.hpp"
#include "flexmimo/nn.hpp"
#include "flexmimo/power.hpp"
#include "flexmimo/rng.hpp"

namespace flexmimo {

enum class Objective { sum_se, total_ee };

// Move M antennas over T waypoints each, at most `budget` meters of travel per
// antenna, to maximize the objective at the final positions. The fading field
// is frozen by fading_seed so the objective is a pure function of waypoints.
struct TrajectoryProblem {
    Scene scene;
    ChannelParams channel;
    PowerModel power;
    Objective objective = Objective::sum_se;
    int steps = 1;         // T
    double budget = 5.0;   // D, meters per antenna
    RngStream fading_seed{0, rng_tag::fading};

    void validate() const;
};

inline constexpr double kFeasibilityTol = 1e-9;

// Row m = polyline of antenna m; the implicit start is scene.antenna_init[m].
struct Waypoints {
    int antennas = 0;
    int steps = 0;
    std::vector<Vec2> points;  // antennas * steps, antenna-major

    Vec2& at(int antenna, int step) { return points[antenna * steps + step]; }
    Vec2 at(int antenna, int step) const { return points[antenna * steps + step]; }
    Vec2 final_position(int antenna) const { return at(antenna, steps - 1); }

    static Waypoints zeros(int antennas, int steps) {
        return Waypoints{antennas, steps, std::vector<Vec2>(static_cast<std::size_t>(antennas) * steps)};
    }
};

Eigen::VectorXd flatten(const Waypoints& wp);
Waypoints unflatten(const Eigen::VectorXd& v, int antennas, int steps);

struct OptimizerReport {
    double best_objective = 0.0;
    Waypoints best_waypoints;
    std::vector<double> curve;  // best-so-far, non-decreasing, ends at best
    std::int64_t evaluations = 0;
    double wall_time_s = 0.0;   // informational; never serialized
};

// Polyline length from init through the T waypoints of one antenna.
double path_length(const Waypoints& wp, int antenna, Vec2 init);
double total_path_length(const Waypoints& wp, const Scene& scene);

bool is_feasible(const Waypoints& wp, const TrajectoryProblem& problem);

// Clamp every point into the region, then uniformly scale each antenna's
// displacement sequence about its start until the path fits the budget.
// Idempotent.
Waypoints project_feasible(const Waypoints& wp, const TrajectoryProblem& problem);

// Objective at the final positions; movement enters only through the EE power
// term (path length of all antennas). Throws on infeasible waypoints.
double evaluate(const TrajectoryProblem& problem, const Waypoints& wp);

// Exhaustive single-segment search over a grid_resolution^2 lattice of final
// positions; ground truth for small instances (M <= 2).
OptimizerReport brute_force_oracle(const TrajectoryProblem& problem, int grid_resolution);

// Best of n uniform samples, projected feasible.
OptimizerReport random_search(const TrajectoryProblem& problem, std::int64_t n,
                              std::uint64_t seed);

// Gaussian cross-entropy over the flattened waypoint vector.
struct CemConfig {
    int iterations = 30;
    int population = 64;
    double elite_fraction = 0.125;
    double init_std_factor = 0.5;  // initial std = factor * L
    double min_std = 1e-6;
};

OptimizerReport cem_optimize(const TrajectoryProblem& problem, int iterations, int population,
                             double elite_fraction, std::uint64_t seed);
OptimizerReport cem_optimize(const TrajectoryProblem& problem, const CemConfig& cfg,
                             std::uint64_t seed);

// Score-function gradient on a Gaussian policy over waypoint displacements,
// trained with the dense-net module. Baseline: per-episode batch mean reward.
struct PolicyGradientConfig {
    int batch = 16;
    std::vector<int> hidden_sizes = {32, 32};
    double lr = 3e-3;
    double explore_std_factor = 0.25;  // initial std = factor * L
    double explore_decay = 0.995;      // per episode
};

OptimizerReport pg_optimize(const TrajectoryProblem& problem, int episodes,
                            const PolicyGradientConfig& cfg, std::uint64_t seed);

// Denoising-diffusion generative optimizer. The forward process is
// x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps; the net learns to predict eps
// from (x_t, abar_t, condition) and an ancestral reverse pass generates new
// candidates. Outer loop: sample, evaluate, keep elites, retrain on them
// weighted by objective, resample.
struct DiffusionConfig {
    int denoise_steps = 20;                   // T_d
    std::vector<double> alpha_bar;            // size T_d+1, 1.0 -> 0.02, non-increasing
    int outer_iterations = 30;
    int samples_per_iteration = 64;
    double elite_fraction = 0.125;
    int train_epochs = 40;
    int draws_per_sample = 8;                 // (t, eps) pairs per elite per epoch
    std::vector<int> hidden_sizes = {64, 64};
    double lr = 3e-3;
    std::uint64_t seed = 0;

    static std::vector<double> linear_alpha_bar(int steps, double final_value = 0.02);
    void validate() const;
};

// Scalars of one ancestral reverse step t -> t-1:
//   x_{t-1} = (x_t - eps_coeff * eps_hat) * inv_sqrt_alpha + sigma * z.
// sigma is 0 at the final step (alpha_bar_prev = 1).
struct ReverseCoeffs {
    double inv_sqrt_alpha = 1.0;
    double eps_coeff = 0.0;
    double sigma = 0.0;
};
ReverseCoeffs diffusion_reverse_coeffs(double alpha_bar_prev, double alpha_bar_cur);

DenseNet diffusion_train(const std::vector<Eigen::VectorXd>& samples,
                         const std::vector<double>& weights, const DiffusionConfig& cfg,
                         const Eigen::VectorXd& condition);
DenseNet diffusion_train(const std::vector<Eigen::VectorXd>& samples,
                         const std::vector<double>& weights, const DiffusionConfig& cfg,
                         const Eigen::VectorXd& condition, DenseNet net, double* final_loss);

std::vector<Eigen::VectorXd> diffusion_sample(const DenseNet& net, const DiffusionConfig& cfg,
                                              int n, std::uint64_t seed,
                                              const Eigen::VectorXd& condition);

OptimizerReport diffusion_optimize(const TrajectoryProblem& problem, const DiffusionConfig& cfg);

}  // namespace flexmimo
