#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flexmimo/channel.hpp"
#include "flexmimo/geometry.hpp"
#include "flexmimo/power.hpp"
#include "flexmimo/se_ee.hpp"
#include "flexmimo/trajectory.hpp"

namespace flexmimo {

// Experiment settings; every default the underlying papers leave open lives
// here, in one place.
struct HardeningRun {
    int flexible = 1;             // k for the Monte Carlo printout
    int positions = 170;          // N
    int antennas = 20;            // fixed-array size for parity / curve
    std::int64_t trials = 100000;
    std::vector<int> k_list = {1, 2, 4, 8};
};

struct SeEeRun {
    std::vector<SystemKind> systems = {SystemKind::Fixed(20), SystemKind::Flexible(4, 30),
                                       SystemKind::Flexible(4, 60)};
    double power_min = 0.05;  // W, sweep is log-spaced
    double power_max = 50.0;
    int power_points = 40;
    std::int64_t trials = 10000;
};

struct TrajectoryRun {
    Objective objective = Objective::sum_se;
    int steps = 1;
    double budget = 5.0;
    std::string optimizer = "diffusion";  // diffusion | cem | random | pg | oracle
    int iterations = 30;                  // outer iterations / episodes
    int population = 64;                  // samples per iteration / policy batch
    double elite_fraction = 0.125;
    int denoise_steps = 20;
    int train_epochs = 40;
    double lr = 3e-3;
    int grid_resolution = 11;  // oracle only
};

struct SystemConfig {
    std::uint64_t seed = 0;
    Scene scene;
    ChannelParams channel;
    PowerModel power;
    HardeningRun hardening;
    SeEeRun se_ee;
    TrajectoryRun trajectory;

    static SystemConfig defaults();
    void validate() const;
};

struct RunConfig {
    std::string experiment;  // hardening | se-ee | trajectory
    SystemConfig system;
    std::filesystem::path out_dir;  // empty -> print only
};

// Strict parsing: unknown keys anywhere are an error. Missing keys fall back
// to defaults.
SystemConfig parse_config_json(const std::string& text);
SystemConfig load_config(const std::filesystem::path& path);

// Canonical form: sorted keys, 2-space indent, trailing newline. Parsing the
// output reproduces the config exactly.
std::string canonical_config_json(const SystemConfig& cfg);

}  // namespace flexmimo
