#include "flexmimo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flexmimo/config.hpp"
#include "flexmimo/hardening.hpp"
#include "flexmimo/io.hpp"
#include "flexmimo/se_ee.hpp"
#include "flexmimo/trajectory.hpp"

namespace flexmimo {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> log_spaced(double lo, double hi, int points) {
    std::vector<double> sweep(static_cast<std::size_t>(points));
    const double step = (std::log(hi) - std::log(lo)) / (points - 1);
    for (int i = 0; i < points; ++i)
        sweep[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * i);
    sweep.back() = hi;
    return sweep;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir.string());
}

const char* objective_name(Objective obj) {
    return obj == Objective::sum_se ? "sum_se" : "total_ee";
}

int run_hardening(const SystemConfig& cfg, const fs::path& out_dir, std::ostream& out) {
    const int k = cfg.hardening.flexible;
    const int n = cfg.hardening.positions;
    const int m = cfg.hardening.antennas;

    const double analytic = flp_variance_analytic(k, n);
    HardeningConfig hc;
    hc.flexible_antennas = k;
    hc.positions = n;
    hc.trials = cfg.hardening.trials;
    hc.seed = RngStream{cfg.seed, rng_tag::hardening};
    const HardeningResult mc = flp_variance_mc(hc);

    out << "flp k=" << k << " N=" << n << " trials=" << cfg.hardening.trials
        << ": variance=" << format_num(mc.variance) << " stderr=" << format_num(mc.stderr_variance)
        << " mean_gain=" << format_num(mc.mean_gain) << "\n";
    out << "analytic flp variance=" << format_num(analytic)
        << ", fip M=" << m << " variance=" << format_num(fip_variance(m)) << "\n";
    out << "equivalent_positions(k=" << k << ", M=" << m
        << ") = " << equivalent_positions(k, m) << "\n";

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        const auto table = hardening_curve(cfg.hardening.k_list, n, m);
        std::vector<CsvRow> rows;
        CsvRow header = {"index", "fip"};
        for (int kk : cfg.hardening.k_list) header.push_back("flp_k" + std::to_string(kk));
        rows.push_back(header);
        for (const auto& row : table) {
            CsvRow csv_row = {std::to_string(row.index),
                              row.fip ? format_num(*row.fip) : std::string{}};
            for (const auto& cell : row.flp)
                csv_row.push_back(cell ? format_num(*cell) : std::string{});
            rows.push_back(csv_row);
        }
        write_csv(rows, out_dir / "hardening_curve.csv");

        std::vector<Series> series;
        Series fip_series{"fip", {}, {}};
        for (const auto& row : table)
            if (row.fip) {
                fip_series.x.push_back(row.index);
                fip_series.y.push_back(*row.fip);
            }
        series.push_back(fip_series);
        for (std::size_t i = 0; i < cfg.hardening.k_list.size(); ++i) {
            Series s{"flp k=" + std::to_string(cfg.hardening.k_list[i]), {}, {}};
            for (const auto& row : table)
                if (row.flp[i]) {
                    s.x.push_back(row.index);
                    s.y.push_back(*row.flp[i]);
                }
            series.push_back(s);
        }
        write_svg(series, "Channel hardening variance", "antennas / positions", "variance",
                  out_dir / "hardening.svg");

        json summary;
        summary["flexible"] = k;
        summary["positions"] = n;
        summary["antennas"] = m;
        summary["trials"] = cfg.hardening.trials;
        summary["seed"] = cfg.seed;
        summary["mc_variance"] = mc.variance;
        summary["mc_stderr"] = mc.stderr_variance;
        summary["analytic_variance"] = analytic;
        summary["equivalent_positions"] = equivalent_positions(k, m);
        write_text_file(summary.dump(2) + "\n", out_dir / "summary.json");
    }
    return 0;
}

int run_se_ee(const SystemConfig& cfg, const fs::path& out_dir, std::ostream& out) {
    const auto sweep = log_spaced(cfg.se_ee.power_min, cfg.se_ee.power_max, cfg.se_ee.power_points);
    if (!out_dir.empty()) ensure_dir(out_dir);

    json summary = json::array();
    std::vector<Series> series;
    out << "system        max_ee            se@max_ee     p@max_ee      se@max_p\n";
    for (const SystemKind& kind : cfg.se_ee.systems) {
        const auto curve =
            se_ee_curve(kind, sweep, cfg.power, cfg.channel.noise_power, cfg.se_ee.trials, cfg.seed);
        const SeEePoint peak = max_ee_point(curve);
        out << kind.label() << "  " << format_num(peak.ee) << "  " << format_num(peak.se) << "  "
            << format_num(peak.tx_power) << "  " << format_num(curve.back().se) << "\n";

        if (!out_dir.empty()) {
            std::vector<CsvRow> rows{{"tx_power", "se", "ee"}};
            for (const SeEePoint& pt : curve)
                rows.push_back({format_num(pt.tx_power), format_num(pt.se), format_num(pt.ee)});
            write_csv(rows, out_dir / ("se_ee_" + kind.label() + ".csv"));

            Series s{kind.label(), {}, {}};
            for (const SeEePoint& pt : curve) {
                s.x.push_back(pt.se);
                s.y.push_back(pt.ee);
            }
            series.push_back(s);
        }
        summary.push_back({{"system", kind.label()},
                           {"max_ee", peak.ee},
                           {"se_at_max_ee", peak.se},
                           {"tx_power_at_max_ee", peak.tx_power},
                           {"se_at_max_power", curve.back().se}});
    }
    if (!out_dir.empty()) {
        write_svg(series, "SE-EE tradeoff", "SE (bit/s/Hz)", "EE (bit/Joule)",
                  out_dir / "se_ee.svg");
        json doc;
        doc["seed"] = cfg.seed;
        doc["trials"] = cfg.se_ee.trials;
        doc["systems"] = summary;
        write_text_file(doc.dump(2) + "\n", out_dir / "summary.json");
    }
    return 0;
}

int run_trajectory(const SystemConfig& cfg, const fs::path& out_dir, std::ostream& out) {
    TrajectoryProblem problem;
    problem.scene = cfg.scene;
    problem.channel = cfg.channel;
    problem.power = cfg.power;
    problem.objective = cfg.trajectory.objective;
    problem.steps = cfg.trajectory.steps;
    problem.budget = cfg.trajectory.budget;
    problem.fading_seed = RngStream{cfg.seed, rng_tag::fading};
    problem.validate();

    const TrajectoryRun& tr = cfg.trajectory;
    OptimizerReport report;
    if (tr.optimizer == "diffusion") {
        DiffusionConfig dc;
        dc.denoise_steps = tr.denoise_steps;
        dc.outer_iterations = tr.iterations;
        dc.samples_per_iteration = tr.population;
        dc.elite_fraction = tr.elite_fraction;
        dc.train_epochs = tr.train_epochs;
        dc.lr = tr.lr;
        dc.seed = cfg.seed;
        report = diffusion_optimize(problem, dc);
    } else if (tr.optimizer == "cem") {
        report = cem_optimize(problem, tr.iterations, tr.population, tr.elite_fraction, cfg.seed);
    } else if (tr.optimizer == "random") {
        report = random_search(problem, static_cast<std::int64_t>(tr.iterations) * tr.population,
                               cfg.seed);
    } else if (tr.optimizer == "pg") {
        PolicyGradientConfig pc;
        pc.batch = tr.population;
        pc.lr = tr.lr;
        report = pg_optimize(problem, tr.iterations, pc, cfg.seed);
    } else if (tr.optimizer == "oracle") {
        report = brute_force_oracle(problem, tr.grid_resolution);
    } else {
        throw std::invalid_argument("unknown optimizer: " + tr.optimizer);
    }

    out << "optimizer=" << tr.optimizer << " objective=" << objective_name(problem.objective)
        << " best=" << format_num(report.best_objective)
        << " evaluations=" << report.evaluations << "\n";

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::vector<CsvRow> traj{{"antenna", "step", "x", "y"}};
        for (int m = 0; m < report.best_waypoints.antennas; ++m) {
            const Vec2 start = cfg.scene.antenna_init[static_cast<std::size_t>(m)];
            traj.push_back({std::to_string(m), "0", format_num(start.x), format_num(start.y)});
            for (int t = 0; t < report.best_waypoints.steps; ++t) {
                const Vec2 p = report.best_waypoints.at(m, t);
                traj.push_back({std::to_string(m), std::to_string(t + 1), format_num(p.x),
                                format_num(p.y)});
            }
        }
        write_csv(traj, out_dir / "trajectory.csv");

        std::vector<CsvRow> curve{{"iteration", "best_objective"}};
        for (std::size_t i = 0; i < report.curve.size(); ++i)
            curve.push_back({std::to_string(i), format_num(report.curve[i])});
        write_csv(curve, out_dir / "curve.csv");

        Series s{tr.optimizer, {}, {}};
        for (std::size_t i = 0; i < report.curve.size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(report.curve[i]);
        }
        write_svg({s}, "Best objective so far", "iteration",
                  objective_name(problem.objective), out_dir / "curve.svg");

        json summary;
        summary["objective"] = objective_name(problem.objective);
        summary["optimizer"] = tr.optimizer;
        summary["best_objective"] = report.best_objective;
        summary["evaluations"] = report.evaluations;
        summary["seed"] = cfg.seed;
        write_text_file(summary.dump(2) + "\n", out_dir / "summary.json");
    }
    return 0;
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::int64_t trials = 0;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--out", flags.out_dir, "output directory for CSV/JSON/SVG");
    sub->add_option("--seed", flags.seed, "master RNG seed");
    sub->add_option("--trials", flags.trials, "Monte Carlo trials");
}

SystemConfig resolve_config(const CLI::App* sub, const CommonFlags& flags) {
    SystemConfig cfg = flags.config_path.empty() ? SystemConfig::defaults()
                                                 : load_config(flags.config_path);
    if (sub->count("--seed") > 0) cfg.seed = flags.seed;
    if (sub->count("--trials") > 0) {
        cfg.hardening.trials = flags.trials;
        cfg.se_ee.trials = flags.trials;
    }
    return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"flexmimo: flexible-position MIMO simulation and trajectory optimization"};
    app.name("flexmimo");
    app.require_subcommand(1);

    CommonFlags hardening_flags, se_ee_flags, trajectory_flags;
    int flexible = 0, positions = 0, antennas = 0;
    std::string optimizer, objective;
    double budget = -1.0;
    int steps = 0, iterations = 0, population = 0;

    CLI::App* hardening_cmd =
        app.add_subcommand("hardening", "channel hardening variance: fixed vs flexible arrays");
    add_common(hardening_cmd, hardening_flags);
    hardening_cmd->add_option("--flexible", flexible, "number of flexible antennas (k)");
    hardening_cmd->add_option("--positions", positions, "number of candidate positions (N)");
    hardening_cmd->add_option("--antennas", antennas, "fixed-array size for parity (M)");

    CLI::App* se_ee_cmd = app.add_subcommand("se-ee", "SE-EE tradeoff curves and max-EE table");
    add_common(se_ee_cmd, se_ee_flags);

    CLI::App* trajectory_cmd =
        app.add_subcommand("trajectory", "optimize antenna trajectories under a travel budget");
    add_common(trajectory_cmd, trajectory_flags);
    trajectory_cmd->add_option("--optimizer", optimizer, "diffusion | cem | random | pg | oracle")
        ->check(CLI::IsMember({"diffusion", "cem", "random", "pg", "oracle"}));
    trajectory_cmd->add_option("--objective", objective, "sum_se | total_ee")
        ->check(CLI::IsMember({"sum_se", "total_ee"}));
    trajectory_cmd->add_option("--budget", budget, "travel budget per antenna, meters");
    trajectory_cmd->add_option("--steps", steps, "waypoints per antenna (T)");
    trajectory_cmd->add_option("--iterations", iterations, "optimizer iterations / episodes");
    trajectory_cmd->add_option("--population", population, "samples per iteration");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (hardening_cmd->parsed()) {
            SystemConfig cfg = resolve_config(hardening_cmd, hardening_flags);
            if (hardening_cmd->count("--flexible") > 0) cfg.hardening.flexible = flexible;
            if (hardening_cmd->count("--positions") > 0) cfg.hardening.positions = positions;
            if (hardening_cmd->count("--antennas") > 0) cfg.hardening.antennas = antennas;
            cfg.validate();
            return run_hardening(cfg, hardening_flags.out_dir, out);
        }
        if (se_ee_cmd->parsed()) {
            SystemConfig cfg = resolve_config(se_ee_cmd, se_ee_flags);
            cfg.validate();
            return run_se_ee(cfg, se_ee_flags.out_dir, out);
        }
        SystemConfig cfg = resolve_config(trajectory_cmd, trajectory_flags);
        if (trajectory_cmd->count("--optimizer") > 0) cfg.trajectory.optimizer = optimizer;
        if (trajectory_cmd->count("--objective") > 0)
            cfg.trajectory.objective =
                objective == "sum_se" ? Objective::sum_se : Objective::total_ee;
        if (trajectory_cmd->count("--budget") > 0) cfg.trajectory.budget = budget;
        if (trajectory_cmd->count("--steps") > 0) cfg.trajectory.steps = steps;
        if (trajectory_cmd->count("--iterations") > 0) cfg.trajectory.iterations = iterations;
        if (trajectory_cmd->count("--population") > 0) cfg.trajectory.population = population;
        cfg.validate();
        return run_trajectory(cfg, trajectory_flags.out_dir, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace flexmimo
