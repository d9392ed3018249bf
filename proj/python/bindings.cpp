#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "flexmimo/channel.hpp"
#include "flexmimo/cli.hpp"
#include "flexmimo/config.hpp"
#include "flexmimo/geometry.hpp"
#include "flexmimo/hardening.hpp"
#include "flexmimo/nn.hpp"
#include "flexmimo/power.hpp"
#include "flexmimo/se_ee.hpp"
#include "flexmimo/trajectory.hpp"

namespace py = pybind11;
using namespace flexmimo;

PYBIND11_MODULE(_flexmimo, m) {
    m.doc() = "Flexible-position MIMO simulation and trajectory optimization";

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init([](double x, double y) { return Vec2{x, y}; }), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](const Vec2& v) {
            std::ostringstream s;
            s << "Vec2(" << v.x << ", " << v.y << ")";
            return s.str();
        });
    m.def("distance", &distance, py::arg("a"), py::arg("b"));

    py::class_<Scene>(m, "Scene")
        .def(py::init<>())
        .def_readwrite("region_size", &Scene::region_size)
        .def_readwrite("antenna_height", &Scene::antenna_height)
        .def_readwrite("users", &Scene::users)
        .def_readwrite("antenna_init", &Scene::antenna_init)
        .def("validate", &Scene::validate);

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init<>())
        .def_readwrite("beta0", &ChannelParams::beta0)
        .def_readwrite("alpha", &ChannelParams::alpha)
        .def_readwrite("noise_power", &ChannelParams::noise_power)
        .def_readwrite("tx_power", &ChannelParams::tx_power)
        .def_readwrite("cell_size", &ChannelParams::cell_size)
        .def_readwrite("small_scale", &ChannelParams::small_scale);

    py::class_<PowerModel>(m, "PowerModel")
        .def(py::init<>())
        .def_readwrite("amp_efficiency", &PowerModel::amp_efficiency)
        .def_readwrite("fixed_circuit", &PowerModel::fixed_circuit)
        .def_readwrite("per_antenna_circuit", &PowerModel::per_antenna_circuit)
        .def_readwrite("move_cost", &PowerModel::move_cost)
        .def_readwrite("bandwidth", &PowerModel::bandwidth);

    py::class_<RngStream>(m, "RngStream")
        .def(py::init([](std::uint64_t seed, std::uint32_t tag) {
                 return RngStream{seed, tag};
             }),
             py::arg("seed") = 0, py::arg("tag") = 0)
        .def_readwrite("seed", &RngStream::seed)
        .def_readwrite("tag", &RngStream::tag);
    m.attr("RNG_TAG_HARDENING") = rng_tag::hardening;
    m.attr("RNG_TAG_FADING") = rng_tag::fading;
    m.attr("RNG_TAG_OPTIMIZER") = rng_tag::optimizer;

    m.def("path_gain", &path_gain, py::arg("d"), py::arg("h0"), py::arg("params"));
    m.def("small_scale_gain", &small_scale_gain, py::arg("rng"), py::arg("cell_x"),
          py::arg("cell_y"), py::arg("endpoint_id"));
    m.def("channel_matrix", &channel_matrix, py::arg("scene"), py::arg("antenna_positions"),
          py::arg("params"), py::arg("rng"));
    m.def("sinr_mrc", &sinr_mrc, py::arg("H"), py::arg("p"), py::arg("noise"));
    m.def("sum_se", &sum_se, py::arg("sinr"));
    m.def("total_power", &total_power, py::arg("pm"), py::arg("users"), py::arg("tx_power"),
          py::arg("antennas"), py::arg("path_len"));
    m.def("energy_efficiency", &energy_efficiency, py::arg("se"), py::arg("power"),
          py::arg("bandwidth"));

    py::class_<HardeningConfig>(m, "HardeningConfig")
        .def(py::init<>())
        .def_readwrite("flexible_antennas", &HardeningConfig::flexible_antennas)
        .def_readwrite("positions", &HardeningConfig::positions)
        .def_readwrite("trials", &HardeningConfig::trials)
        .def_readwrite("seed", &HardeningConfig::seed);
    py::class_<HardeningResult>(m, "HardeningResult")
        .def_readonly("mean_gain", &HardeningResult::mean_gain)
        .def_readonly("variance", &HardeningResult::variance)
        .def_readonly("stderr_variance", &HardeningResult::stderr_variance);
    m.def("fip_variance", &fip_variance, py::arg("antennas"));
    m.def("topk_sum_stats", &topk_sum_stats, py::arg("k"), py::arg("n"));
    m.def("flp_variance_analytic", &flp_variance_analytic, py::arg("k"), py::arg("n"));
    m.def("flp_variance_mc", &flp_variance_mc, py::arg("config"));
    m.def("equivalent_positions", &equivalent_positions, py::arg("k"), py::arg("target_antennas"));
    m.def(
        "hardening_curve",
        [](const std::vector<int>& k_list, int n_max, int m_max) {
            py::list rows;
            for (const auto& row : hardening_curve(k_list, n_max, m_max))
                rows.append(py::make_tuple(row.index, row.fip, row.flp));
            return rows;
        },
        py::arg("k_list"), py::arg("n_max"), py::arg("m_max"),
        "rows of (index, fip or None, [flp per k or None])");

    py::class_<SystemKind> system_kind(m, "SystemKind");
    system_kind.def_static("fixed", &SystemKind::Fixed, py::arg("antennas"))
        .def_static("flexible", &SystemKind::Flexible, py::arg("antennas"), py::arg("positions"),
                    py::arg("spacing") = 0.05)
        .def_readwrite("antennas", &SystemKind::antennas)
        .def_readwrite("positions", &SystemKind::positions)
        .def_readwrite("spacing", &SystemKind::spacing)
        .def("label", &SystemKind::label)
        .def("travel_length", &SystemKind::travel_length);
    py::class_<SeEePoint>(m, "SeEePoint")
        .def_readonly("tx_power", &SeEePoint::tx_power)
        .def_readonly("se", &SeEePoint::se)
        .def_readonly("ee", &SeEePoint::ee);
    m.def("expected_se", &expected_se, py::arg("kind"), py::arg("p"), py::arg("noise_power"),
          py::arg("trials"), py::arg("seed"));
    m.def("se_ee_curve", &se_ee_curve, py::arg("kind"), py::arg("p_sweep"), py::arg("pm"),
          py::arg("noise_power"), py::arg("trials"), py::arg("seed"));
    m.def("max_ee_point", &max_ee_point, py::arg("curve"));

    py::enum_<Objective>(m, "Objective")
        .value("sum_se", Objective::sum_se)
        .value("total_ee", Objective::total_ee);

    py::class_<TrajectoryProblem>(m, "TrajectoryProblem")
        .def(py::init<>())
        .def_readwrite("scene", &TrajectoryProblem::scene)
        .def_readwrite("channel", &TrajectoryProblem::channel)
        .def_readwrite("power", &TrajectoryProblem::power)
        .def_readwrite("objective", &TrajectoryProblem::objective)
        .def_readwrite("steps", &TrajectoryProblem::steps)
        .def_readwrite("budget", &TrajectoryProblem::budget)
        .def_readwrite("fading_seed", &TrajectoryProblem::fading_seed)
        .def("validate", &TrajectoryProblem::validate);

    py::class_<Waypoints>(m, "Waypoints")
        .def(py::init<>())
        .def_readonly("antennas", &Waypoints::antennas)
        .def_readonly("steps", &Waypoints::steps)
        .def("at", py::overload_cast<int, int>(&Waypoints::at, py::const_), py::arg("antenna"),
             py::arg("step"))
        .def("final_position", &Waypoints::final_position, py::arg("antenna"));
    m.def("flatten", &flatten, py::arg("waypoints"));
    m.def("unflatten", &unflatten, py::arg("vector"), py::arg("antennas"), py::arg("steps"));

    py::class_<OptimizerReport>(m, "OptimizerReport")
        .def_readonly("best_objective", &OptimizerReport::best_objective)
        .def_readonly("best_waypoints", &OptimizerReport::best_waypoints)
        .def_readonly("curve", &OptimizerReport::curve)
        .def_readonly("evaluations", &OptimizerReport::evaluations)
        .def_readonly("wall_time_s", &OptimizerReport::wall_time_s);

    m.def("path_length", &path_length, py::arg("waypoints"), py::arg("antenna"), py::arg("init"));
    m.def("project_feasible", &project_feasible, py::arg("waypoints"), py::arg("problem"));
    m.def("evaluate", &evaluate, py::arg("problem"), py::arg("waypoints"));
    m.def("brute_force_oracle", &brute_force_oracle, py::arg("problem"),
          py::arg("grid_resolution"));
    m.def("random_search", &random_search, py::arg("problem"), py::arg("n"), py::arg("seed"));
    m.def("cem_optimize",
          py::overload_cast<const TrajectoryProblem&, int, int, double, std::uint64_t>(
              &cem_optimize),
          py::arg("problem"), py::arg("iterations"), py::arg("population"),
          py::arg("elite_fraction"), py::arg("seed"));

    py::class_<PolicyGradientConfig>(m, "PolicyGradientConfig")
        .def(py::init<>())
        .def_readwrite("batch", &PolicyGradientConfig::batch)
        .def_readwrite("hidden_sizes", &PolicyGradientConfig::hidden_sizes)
        .def_readwrite("lr", &PolicyGradientConfig::lr)
        .def_readwrite("explore_std_factor", &PolicyGradientConfig::explore_std_factor)
        .def_readwrite("explore_decay", &PolicyGradientConfig::explore_decay);
    m.def("pg_optimize", &pg_optimize, py::arg("problem"), py::arg("episodes"), py::arg("config"),
          py::arg("seed"));

    py::class_<DiffusionConfig>(m, "DiffusionConfig")
        .def(py::init<>())
        .def_readwrite("denoise_steps", &DiffusionConfig::denoise_steps)
        .def_readwrite("alpha_bar", &DiffusionConfig::alpha_bar)
        .def_readwrite("outer_iterations", &DiffusionConfig::outer_iterations)
        .def_readwrite("samples_per_iteration", &DiffusionConfig::samples_per_iteration)
        .def_readwrite("elite_fraction", &DiffusionConfig::elite_fraction)
        .def_readwrite("train_epochs", &DiffusionConfig::train_epochs)
        .def_readwrite("draws_per_sample", &DiffusionConfig::draws_per_sample)
        .def_readwrite("hidden_sizes", &DiffusionConfig::hidden_sizes)
        .def_readwrite("lr", &DiffusionConfig::lr)
        .def_readwrite("seed", &DiffusionConfig::seed)
        .def_static("linear_alpha_bar", &DiffusionConfig::linear_alpha_bar, py::arg("steps"),
                    py::arg("final_value") = 0.02);
    m.def("diffusion_optimize", &diffusion_optimize, py::arg("problem"), py::arg("config"));

    py::enum_<Activation>(m, "Activation")
        .value("rectifier", Activation::rectifier)
        .value("silu", Activation::silu);
    py::class_<DenseNet>(m, "DenseNet")
        .def_readonly("layer_sizes", &DenseNet::layer_sizes)
        .def_readonly("activation", &DenseNet::activation);
    m.def("net_init", &net_init, py::arg("layer_sizes"), py::arg("activation"), py::arg("seed"));
    m.def("net_forward", &net_forward, py::arg("net"), py::arg("batch"));
    m.def(
        "diffusion_train",
        [](const std::vector<Eigen::VectorXd>& samples, const std::vector<double>& weights,
           const DiffusionConfig& cfg, const Eigen::VectorXd& condition) {
            return diffusion_train(samples, weights, cfg, condition);
        },
        py::arg("samples"), py::arg("weights"), py::arg("config"), py::arg("condition"));
    m.def("diffusion_sample", &diffusion_sample, py::arg("net"), py::arg("config"), py::arg("n"),
          py::arg("seed"), py::arg("condition"));

    m.def("parse_config_json", &parse_config_json, py::arg("text"));
    m.def(
        "canonical_config_json",
        [](const std::string& text) { return canonical_config_json(parse_config_json(text)); },
        py::arg("text"), "parse a config and return its canonical serialization");
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "run a CLI invocation in-process; returns (exit_code, stdout, stderr)");
}
