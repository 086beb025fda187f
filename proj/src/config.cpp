#include "der/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace der {

StructureType parse_structure(const std::string& s) {
    if (s == "no_demos") return StructureType::NoDemos;
    if (s == "one_shot_all") return StructureType::OneShotAll;
    if (s == "all_shots_all") return StructureType::AllShotsAll;
    if (s == "one_shot_each") return StructureType::OneShotEach;
    throw std::invalid_argument("unknown structure_type: " + s);
}

std::string to_string(StructureType t) {
    switch (t) {
        case StructureType::NoDemos: return "no_demos";
        case StructureType::OneShotAll: return "one_shot_all";
        case StructureType::AllShotsAll: return "all_shots_all";
        case StructureType::OneShotEach: return "one_shot_each";
    }
    return "?";
}

EnvVariant parse_env(const std::string& s) {
    if (s == "peg_in_hole") return EnvVariant::PegInHole;
    if (s == "lap_joint") return EnvVariant::LapJoint;
    throw std::invalid_argument("unknown env: " + s);
}

std::string to_string(EnvVariant v) {
    return v == EnvVariant::PegInHole ? "peg_in_hole" : "lap_joint";
}

EnvConfig EnvConfig::defaults_for(EnvVariant v) {
    EnvConfig e;
    e.variant = v;
    if (v == EnvVariant::LapJoint) {
        e.clearance = 0.001;  // tight tolerance, 1mm
        e.chamfer_depth = 0.0;
        e.insert_depth = 0.010;
        e.start_height = 0.020;
        e.success_eps = 0.002;
        e.success_bonus = 100.0;
    }
    return e;
}

std::size_t ExperimentConfig::demo_zone_capacity() const {
    auto c = static_cast<std::size_t>(std::llround(demo_zone_fraction * static_cast<double>(buffer_capacity)));
    return std::max<std::size_t>(1, c);
}

void ExperimentConfig::validate() const {
    if (num_buffers < 1) throw std::invalid_argument("num_buffers must be >= 1");
    if (num_workers < 1) throw std::invalid_argument("num_workers must be >= 1");
    if (buffer_capacity < 2) throw std::invalid_argument("buffer_capacity too small");
    if (demo_zone_fraction <= 0.0 || demo_zone_fraction >= 1.0)
        throw std::invalid_argument("demo_zone_fraction must be in (0,1)");
    if (demo_zone_capacity() >= buffer_capacity)
        throw std::invalid_argument("demo zone must be smaller than the buffer");
    if (train_batch_size < 1) throw std::invalid_argument("train_batch_size must be >= 1");
    if (fragment_size < 1) throw std::invalid_argument("fragment_size must be >= 1");
    if (priority_alpha < 0.0) throw std::invalid_argument("priority_alpha must be >= 0");
    if (is_beta < 0.0) throw std::invalid_argument("is_beta must be >= 0");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0,1]");
    if (target_update_freq < 1) throw std::invalid_argument("target_update_freq must be >= 1");
    if (der_refresh_period < 1) throw std::invalid_argument("der_refresh_period must be >= 1");
    if (pool_capacity < 1) throw std::invalid_argument("pool_capacity must be >= 1");
    if (max_episode_steps < 1) throw std::invalid_argument("max_episode_steps must be >= 1");
    if (a_max <= 0.0) throw std::invalid_argument("a_max must be > 0");
    if (exploration_sigma_scale < 0.0) throw std::invalid_argument("exploration_sigma_scale must be >= 0");
    if (num_demos < 0) throw std::invalid_argument("num_demos must be >= 0");
    switch (structure_type) {
        case StructureType::NoDemos: break;
        case StructureType::OneShotAll:
        case StructureType::AllShotsAll:
            if (num_demos < 1) throw std::invalid_argument("structure requires >= 1 demo");
            break;
        case StructureType::OneShotEach:
            if (num_demos < num_buffers)
                throw std::invalid_argument("one_shot_each requires num_demos >= num_buffers");
            break;
    }
    if (env.clearance <= 0.0) throw std::invalid_argument("env.clearance must be > 0");
    if (env.clearance >= env.hole_half_width)
        throw std::invalid_argument("env.clearance must be < hole_half_width");
}

namespace {

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("bad bool: " + v);
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool env_set = false;
    std::map<std::string, std::string> kv;
    std::vector<std::string> order;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        kv[key] = val;
        order.push_back(key);
    }
    // env variant first so env.* overrides apply on top of variant defaults
    if (auto it = kv.find("env"); it != kv.end()) {
        cfg.env = EnvConfig::defaults_for(parse_env(it->second));
        env_set = true;
    }
    (void)env_set;
    std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"structure_type", [&](const std::string& v) { cfg.structure_type = parse_structure(v); }},
        {"der_enabled", [&](const std::string& v) { cfg.der_enabled = parse_bool(v); }},
        {"num_buffers", [&](const std::string& v) { cfg.num_buffers = std::stoi(v); }},
        {"num_workers", [&](const std::string& v) { cfg.num_workers = std::stoi(v); }},
        {"env", [&](const std::string&) {}},
        {"seed", [&](const std::string& v) { cfg.seed = std::stoull(v); }},
        {"iteration_timesteps", [&](const std::string& v) { cfg.iteration_timesteps = std::stoi(v); }},
        {"max_iterations", [&](const std::string& v) { cfg.max_iterations = std::stoi(v); }},
        {"buffer_capacity", [&](const std::string& v) { cfg.buffer_capacity = std::stoull(v); }},
        {"demo_zone_fraction", [&](const std::string& v) { cfg.demo_zone_fraction = std::stod(v); }},
        {"priority_alpha", [&](const std::string& v) { cfg.priority_alpha = std::stod(v); }},
        {"is_beta", [&](const std::string& v) { cfg.is_beta = std::stod(v); }},
        {"train_batch_size", [&](const std::string& v) { cfg.train_batch_size = std::stoi(v); }},
        {"fragment_size", [&](const std::string& v) { cfg.fragment_size = std::stoi(v); }},
        {"learning_rate", [&](const std::string& v) { cfg.learning_rate = std::stod(v); }},
        {"gamma", [&](const std::string& v) { cfg.gamma = std::stod(v); }},
        {"actor_loss_coef", [&](const std::string& v) { cfg.actor_loss_coef = std::stod(v); }},
        {"critic_loss_coef", [&](const std::string& v) { cfg.critic_loss_coef = std::stod(v); }},
        {"target_update_freq", [&](const std::string& v) { cfg.target_update_freq = std::stol(v); }},
        {"learning_start", [&](const std::string& v) { cfg.learning_start = std::stol(v); }},
        {"hidden1", [&](const std::string& v) { cfg.hidden1 = std::stoi(v); }},
        {"hidden2", [&](const std::string& v) { cfg.hidden2 = std::stoi(v); }},
        {"a_max", [&](const std::string& v) { cfg.a_max = std::stod(v); }},
        {"exploration_sigma_scale", [&](const std::string& v) { cfg.exploration_sigma_scale = std::stod(v); }},
        {"sigma_ladder", [&](const std::string& v) { cfg.sigma_ladder = parse_bool(v); }},
        {"max_episode_steps", [&](const std::string& v) { cfg.max_episode_steps = std::stoi(v); }},
        {"train_every", [&](const std::string& v) { cfg.train_every = std::stoi(v); }},
        {"der_refresh_period", [&](const std::string& v) { cfg.der_refresh_period = std::stol(v); }},
        {"pool_capacity", [&](const std::string& v) { cfg.pool_capacity = std::stoull(v); }},
        {"deterministic", [&](const std::string& v) { cfg.deterministic = parse_bool(v); }},
        {"num_demos", [&](const std::string& v) { cfg.num_demos = std::stoi(v); }},
        {"demo_jitter", [&](const std::string& v) { cfg.demo_jitter = std::stod(v); }},
        {"env.hole_half_width", [&](const std::string& v) { cfg.env.hole_half_width = std::stod(v); }},
        {"env.clearance", [&](const std::string& v) { cfg.env.clearance = std::stod(v); }},
        {"env.chamfer_depth", [&](const std::string& v) { cfg.env.chamfer_depth = std::stod(v); }},
        {"env.contact_stiffness", [&](const std::string& v) { cfg.env.contact_stiffness = std::stod(v); }},
        {"env.insert_depth", [&](const std::string& v) { cfg.env.insert_depth = std::stod(v); }},
        {"env.start_height", [&](const std::string& v) { cfg.env.start_height = std::stod(v); }},
        {"env.success_eps", [&](const std::string& v) { cfg.env.success_eps = std::stod(v); }},
        {"env.success_bonus", [&](const std::string& v) { cfg.env.success_bonus = std::stod(v); }},
        {"env.rot_weight", [&](const std::string& v) { cfg.env.rot_weight = std::stod(v); }},
        {"env.torque_lever", [&](const std::string& v) { cfg.env.torque_lever = std::stod(v); }},
        {"env.dt", [&](const std::string& v) { cfg.env.dt = std::stod(v); }},
        {"env.init_angle_range", [&](const std::string& v) { cfg.env.init_angle_range = std::stod(v); }},
        {"env.lap_angle_lo", [&](const std::string& v) { cfg.env.lap_angle_lo = std::stod(v); }},
        {"env.lap_angle_hi", [&](const std::string& v) { cfg.env.lap_angle_hi = std::stod(v); }},
        {"env.lap_xy_range", [&](const std::string& v) { cfg.env.lap_xy_range = std::stod(v); }},
    };
    for (const auto& key : order) {
        auto it = setters.find(key);
        if (it == setters.end()) throw std::invalid_argument("unknown config key: " + key);
        it->second(kv[key]);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    return parse_config(in);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out.precision(17);
    out << "structure_type = " << to_string(cfg.structure_type) << "\n"
        << "der_enabled = " << (cfg.der_enabled ? "true" : "false") << "\n"
        << "num_buffers = " << cfg.num_buffers << "\n"
        << "num_workers = " << cfg.num_workers << "\n"
        << "env = " << to_string(cfg.env.variant) << "\n"
        << "seed = " << cfg.seed << "\n"
        << "iteration_timesteps = " << cfg.iteration_timesteps << "\n"
        << "max_iterations = " << cfg.max_iterations << "\n"
        << "buffer_capacity = " << cfg.buffer_capacity << "\n"
        << "demo_zone_fraction = " << cfg.demo_zone_fraction << "\n"
        << "priority_alpha = " << cfg.priority_alpha << "\n"
        << "is_beta = " << cfg.is_beta << "\n"
        << "train_batch_size = " << cfg.train_batch_size << "\n"
        << "fragment_size = " << cfg.fragment_size << "\n"
        << "learning_rate = " << cfg.learning_rate << "\n"
        << "gamma = " << cfg.gamma << "\n"
        << "actor_loss_coef = " << cfg.actor_loss_coef << "\n"
        << "critic_loss_coef = " << cfg.critic_loss_coef << "\n"
        << "target_update_freq = " << cfg.target_update_freq << "\n"
        << "learning_start = " << cfg.learning_start << "\n"
        << "hidden1 = " << cfg.hidden1 << "\n"
        << "hidden2 = " << cfg.hidden2 << "\n"
        << "a_max = " << cfg.a_max << "\n"
        << "exploration_sigma_scale = " << cfg.exploration_sigma_scale << "\n"
        << "sigma_ladder = " << (cfg.sigma_ladder ? "true" : "false") << "\n"
        << "max_episode_steps = " << cfg.max_episode_steps << "\n"
        << "train_every = " << cfg.train_every << "\n"
        << "der_refresh_period = " << cfg.der_refresh_period << "\n"
        << "pool_capacity = " << cfg.pool_capacity << "\n"
        << "deterministic = " << (cfg.deterministic ? "true" : "false") << "\n"
        << "num_demos = " << cfg.num_demos << "\n"
        << "demo_jitter = " << cfg.demo_jitter << "\n"
        << "env.hole_half_width = " << cfg.env.hole_half_width << "\n"
        << "env.clearance = " << cfg.env.clearance << "\n"
        << "env.chamfer_depth = " << cfg.env.chamfer_depth << "\n"
        << "env.contact_stiffness = " << cfg.env.contact_stiffness << "\n"
        << "env.insert_depth = " << cfg.env.insert_depth << "\n"
        << "env.start_height = " << cfg.env.start_height << "\n"
        << "env.success_eps = " << cfg.env.success_eps << "\n"
        << "env.success_bonus = " << cfg.env.success_bonus << "\n"
        << "env.rot_weight = " << cfg.env.rot_weight << "\n"
        << "env.torque_lever = " << cfg.env.torque_lever << "\n"
        << "env.dt = " << cfg.env.dt << "\n"
        << "env.init_angle_range = " << cfg.env.init_angle_range << "\n"
        << "env.lap_angle_lo = " << cfg.env.lap_angle_lo << "\n"
        << "env.lap_angle_hi = " << cfg.env.lap_angle_hi << "\n"
        << "env.lap_xy_range = " << cfg.env.lap_xy_range << "\n";
}

}  // namespace der
