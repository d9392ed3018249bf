#include "flexmimo/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace flexmimo {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: " + ctx + " must be an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument("config: unknown key \"" + item.key() + "\" in " + ctx);
    }
}

Vec2 parse_point(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("config: " + ctx + " entries must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Vec2> parse_points(const json& j, const std::string& ctx) {
    std::vector<Vec2> pts;
    if (!j.is_array()) throw std::invalid_argument("config: " + ctx + " must be an array");
    for (const auto& item : j) pts.push_back(parse_point(item, ctx));
    return pts;
}

void parse_scene(const json& j, Scene& scene) {
    check_keys(j, "scene", {"region_size", "antenna_height", "users", "antennas"});
    if (j.contains("region_size")) scene.region_size = j.at("region_size").get<double>();
    if (j.contains("antenna_height")) scene.antenna_height = j.at("antenna_height").get<double>();
    if (j.contains("users")) scene.users = parse_points(j.at("users"), "scene.users");
    if (j.contains("antennas")) scene.antenna_init = parse_points(j.at("antennas"), "scene.antennas");
}

void parse_channel(const json& j, ChannelParams& ch) {
    check_keys(j, "channel",
               {"beta0", "alpha", "noise_power", "tx_power", "cell_size", "small_scale"});
    if (j.contains("beta0")) ch.beta0 = j.at("beta0").get<double>();
    if (j.contains("alpha")) ch.alpha = j.at("alpha").get<double>();
    if (j.contains("noise_power")) ch.noise_power = j.at("noise_power").get<double>();
    if (j.contains("tx_power")) ch.tx_power = j.at("tx_power").get<double>();
    if (j.contains("cell_size")) ch.cell_size = j.at("cell_size").get<double>();
    if (j.contains("small_scale")) ch.small_scale = j.at("small_scale").get<bool>();
}

void parse_power(const json& j, PowerModel& pm) {
    check_keys(j, "power",
               {"amp_efficiency", "fixed_circuit", "per_antenna_circuit", "move_cost", "bandwidth"});
    if (j.contains("amp_efficiency")) pm.amp_efficiency = j.at("amp_efficiency").get<double>();
    if (j.contains("fixed_circuit")) pm.fixed_circuit = j.at("fixed_circuit").get<double>();
    if (j.contains("per_antenna_circuit"))
        pm.per_antenna_circuit = j.at("per_antenna_circuit").get<double>();
    if (j.contains("move_cost")) pm.move_cost = j.at("move_cost").get<double>();
    if (j.contains("bandwidth")) pm.bandwidth = j.at("bandwidth").get<double>();
}

void parse_hardening(const json& j, HardeningRun& h) {
    check_keys(j, "hardening", {"flexible", "positions", "antennas", "trials", "k_list"});
    if (j.contains("flexible")) h.flexible = j.at("flexible").get<int>();
    if (j.contains("positions")) h.positions = j.at("positions").get<int>();
    if (j.contains("antennas")) h.antennas = j.at("antennas").get<int>();
    if (j.contains("trials")) h.trials = j.at("trials").get<std::int64_t>();
    if (j.contains("k_list")) h.k_list = j.at("k_list").get<std::vector<int>>();
}

SystemKind parse_system(const json& j) {
    check_keys(j, "se_ee.systems", {"layout", "antennas", "positions", "spacing"});
    const std::string layout = j.at("layout").get<std::string>();
    if (layout == "fixed") {
        SystemKind kind = SystemKind::Fixed(j.at("antennas").get<int>());
        if (j.contains("positions") || j.contains("spacing"))
            throw std::invalid_argument("config: fixed system takes no positions/spacing");
        return kind;
    }
    if (layout == "flexible") {
        SystemKind kind = SystemKind::Flexible(j.at("antennas").get<int>(),
                                               j.at("positions").get<int>());
        if (j.contains("spacing")) kind.spacing = j.at("spacing").get<double>();
        return kind;
    }
    throw std::invalid_argument("config: system layout must be \"fixed\" or \"flexible\"");
}

void parse_se_ee(const json& j, SeEeRun& run) {
    check_keys(j, "se_ee", {"systems", "power_min", "power_max", "power_points", "trials"});
    if (j.contains("systems")) {
        run.systems.clear();
        for (const auto& item : j.at("systems")) run.systems.push_back(parse_system(item));
    }
    if (j.contains("power_min")) run.power_min = j.at("power_min").get<double>();
    if (j.contains("power_max")) run.power_max = j.at("power_max").get<double>();
    if (j.contains("power_points")) run.power_points = j.at("power_points").get<int>();
    if (j.contains("trials")) run.trials = j.at("trials").get<std::int64_t>();
}

Objective parse_objective(const std::string& name) {
    if (name == "sum_se") return Objective::sum_se;
    if (name == "total_ee") return Objective::total_ee;
    throw std::invalid_argument("config: objective must be \"sum_se\" or \"total_ee\"");
}

void parse_trajectory(const json& j, TrajectoryRun& run) {
    check_keys(j, "trajectory",
               {"objective", "steps", "budget", "optimizer", "iterations", "population",
                "elite_fraction", "denoise_steps", "train_epochs", "lr", "grid_resolution"});
    if (j.contains("objective")) run.objective = parse_objective(j.at("objective").get<std::string>());
    if (j.contains("steps")) run.steps = j.at("steps").get<int>();
    if (j.contains("budget")) run.budget = j.at("budget").get<double>();
    if (j.contains("optimizer")) run.optimizer = j.at("optimizer").get<std::string>();
    if (j.contains("iterations")) run.iterations = j.at("iterations").get<int>();
    if (j.contains("population")) run.population = j.at("population").get<int>();
    if (j.contains("elite_fraction")) run.elite_fraction = j.at("elite_fraction").get<double>();
    if (j.contains("denoise_steps")) run.denoise_steps = j.at("denoise_steps").get<int>();
    if (j.contains("train_epochs")) run.train_epochs = j.at("train_epochs").get<int>();
    if (j.contains("lr")) run.lr = j.at("lr").get<double>();
    if (j.contains("grid_resolution")) run.grid_resolution = j.at("grid_resolution").get<int>();
}

json points_json(const std::vector<Vec2>& pts) {
    json arr = json::array();
    for (const Vec2& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

json system_json(const SystemKind& kind) {
    json j;
    if (kind.layout == SystemKind::Layout::fixed) {
        j["layout"] = "fixed";
        j["antennas"] = kind.antennas;
    } else {
        j["layout"] = "flexible";
        j["antennas"] = kind.antennas;
        j["positions"] = kind.positions;
        j["spacing"] = kind.spacing;
    }
    return j;
}

}  // namespace

SystemConfig SystemConfig::defaults() {
    SystemConfig cfg;
    cfg.scene.region_size = 10.0;
    cfg.scene.antenna_height = 2.0;
    cfg.scene.users = {{2.5, 2.5}, {7.5, 2.5}, {2.5, 7.5}, {7.5, 7.5}};
    cfg.scene.antenna_init = {{4.0, 4.0}, {6.0, 4.0}, {4.0, 6.0}, {6.0, 6.0}};
    return cfg;
}

void SystemConfig::validate() const {
    scene.validate();
    channel.validate();
    power.validate();
    if (hardening.flexible < 1 || hardening.positions < hardening.flexible)
        throw std::invalid_argument("config: hardening requires 1 <= flexible <= positions");
    if (hardening.antennas < 1) throw std::invalid_argument("config: hardening.antennas >= 1");
    if (hardening.trials < 1) throw std::invalid_argument("config: hardening.trials >= 1");
    if (hardening.k_list.empty()) throw std::invalid_argument("config: hardening.k_list empty");
    for (const SystemKind& kind : se_ee.systems) kind.validate();
    if (se_ee.systems.size() < 2)
        throw std::invalid_argument("config: se_ee needs at least 2 systems");
    if (!(se_ee.power_min > 0.0) || !(se_ee.power_max > se_ee.power_min))
        throw std::invalid_argument("config: se_ee power sweep must satisfy 0 < min < max");
    if (se_ee.power_points < 2) throw std::invalid_argument("config: se_ee.power_points >= 2");
    if (se_ee.trials < 1) throw std::invalid_argument("config: se_ee.trials >= 1");
    if (trajectory.steps < 1) throw std::invalid_argument("config: trajectory.steps >= 1");
    if (trajectory.budget < 0.0) throw std::invalid_argument("config: trajectory.budget >= 0");
    if (trajectory.iterations < 1 || trajectory.population < 1)
        throw std::invalid_argument("config: trajectory iterations/population >= 1");
    if (!(trajectory.elite_fraction > 0.0) || trajectory.elite_fraction > 1.0)
        throw std::invalid_argument("config: trajectory.elite_fraction in (0,1]");
    if (trajectory.grid_resolution < 2)
        throw std::invalid_argument("config: trajectory.grid_resolution >= 2");
}

SystemConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(j, "top level",
               {"seed", "scene", "channel", "power", "hardening", "se_ee", "trajectory"});

    SystemConfig cfg = SystemConfig::defaults();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scene")) parse_scene(j.at("scene"), cfg.scene);
    if (j.contains("channel")) parse_channel(j.at("channel"), cfg.channel);
    if (j.contains("power")) parse_power(j.at("power"), cfg.power);
    if (j.contains("hardening")) parse_hardening(j.at("hardening"), cfg.hardening);
    if (j.contains("se_ee")) parse_se_ee(j.at("se_ee"), cfg.se_ee);
    if (j.contains("trajectory")) parse_trajectory(j.at("trajectory"), cfg.trajectory);
    cfg.validate();
    return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path.string());
    std::stringstream buffer;
    buffer << f.rdbuf();
    return parse_config_json(buffer.str());
}

std::string canonical_config_json(const SystemConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["scene"] = {{"region_size", cfg.scene.region_size},
                  {"antenna_height", cfg.scene.antenna_height},
                  {"users", points_json(cfg.scene.users)},
                  {"antennas", points_json(cfg.scene.antenna_init)}};
    j["channel"] = {{"beta0", cfg.channel.beta0},
                    {"alpha", cfg.channel.alpha},
                    {"noise_power", cfg.channel.noise_power},
                    {"tx_power", cfg.channel.tx_power},
                    {"cell_size", cfg.channel.cell_size},
                    {"small_scale", cfg.channel.small_scale}};
    j["power"] = {{"amp_efficiency", cfg.power.amp_efficiency},
                  {"fixed_circuit", cfg.power.fixed_circuit},
                  {"per_antenna_circuit", cfg.power.per_antenna_circuit},
                  {"move_cost", cfg.power.move_cost},
                  {"bandwidth", cfg.power.bandwidth}};
    j["hardening"] = {{"flexible", cfg.hardening.flexible},
                      {"positions", cfg.hardening.positions},
                      {"antennas", cfg.hardening.antennas},
                      {"trials", cfg.hardening.trials},
                      {"k_list", cfg.hardening.k_list}};
    json systems = json::array();
    for (const SystemKind& kind : cfg.se_ee.systems) systems.push_back(system_json(kind));
    j["se_ee"] = {{"systems", systems},
                  {"power_min", cfg.se_ee.power_min},
                  {"power_max", cfg.se_ee.power_max},
                  {"power_points", cfg.se_ee.power_points},
                  {"trials", cfg.se_ee.trials}};
    j["trajectory"] = {
        {"objective", cfg.trajectory.objective == Objective::sum_se ? "sum_se" : "total_ee"},
        {"steps", cfg.trajectory.steps},
        {"budget", cfg.trajectory.budget},
        {"optimizer", cfg.trajectory.optimizer},
        {"iterations", cfg.trajectory.iterations},
        {"population", cfg.trajectory.population},
        {"elite_fraction", cfg.trajectory.elite_fraction},
        {"denoise_steps", cfg.trajectory.denoise_steps},
        {"train_epochs", cfg.trajectory.train_epochs},
        {"lr", cfg.trajectory.lr},
        {"grid_resolution", cfg.trajectory.grid_resolution}};
    return j.dump(2) + "\n";
}

}  // namespace flexmimo
