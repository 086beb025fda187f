#ifndef DER_CONFIG_HPP_
#define DER_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>

namespace der {

enum class StructureType { NoDemos, OneShotAll, AllShotsAll, OneShotEach };

StructureType parse_structure(const std::string& s);
std::string to_string(StructureType t);

enum class EnvVariant { PegInHole, LapJoint };

EnvVariant parse_env(const std::string& s);
std::string to_string(EnvVariant v);

/// Analytic insertion task geometry. Defaults depend on the variant; see
/// EnvConfig::defaults_for.
struct EnvConfig {
    EnvVariant variant = EnvVariant::PegInHole;
    double hole_half_width = 0.010;   // w (m)
    double clearance = 0.002;         // tol; peg half-width = w - tol
    double chamfer_depth = 0.005;     // c (m); 0 for lap joint
    double contact_stiffness = 1000;  // k (N/m)
    double insert_depth = 0.020;      // goal depth below the mouth (m)
    double start_height = 0.030;      // initial z above the mouth (m)
    double success_eps = 0.005;       // success threshold in the pose metric
    double success_bonus = 1000.0;    // R
    double rot_weight = 0.1;          // lambda, rad-to-meter factor
    double torque_lever = 0.05;       // lever arm for contact torque (m)
    double dt = 0.05;                 // integration step (s)
    double init_angle_range = 0.5236; // peg: theta0 ~ U(-range, range), rad (30 deg)
    double lap_angle_lo = -0.0349;    // lap: goal-frame theta offset range (-2 deg, 0]
    double lap_angle_hi = 0.0;
    double lap_xy_range = 0.002;      // lap: goal x offset +-2mm

    static EnvConfig defaults_for(EnvVariant v);
};

/// One ablation cell: structure x DER flag x env x seed, plus every
/// hyperparameter with its full-scale default.
struct ExperimentConfig {
    StructureType structure_type = StructureType::NoDemos;
    bool der_enabled = false;
    int num_buffers = 6;
    int num_workers = 5;
    EnvConfig env;
    std::uint64_t seed = 0;
    int iteration_timesteps = 10000;
    int max_iterations = 150;

    // replay
    std::size_t buffer_capacity = 2000000;
    double demo_zone_fraction = 0.01;
    double priority_alpha = 0.5;
    double is_beta = 0.4;
    int train_batch_size = 512;
    int fragment_size = 50;

    // learner
    double learning_rate = 1e-3;
    double gamma = 0.99;
    double actor_loss_coef = 0.1;
    double critic_loss_coef = 1.0;
    long target_update_freq = 50000;
    long learning_start = 1000;
    int hidden1 = 64;
    int hidden2 = 64;

    // worker
    double a_max = 0.05;
    double exploration_sigma_scale = 0.1;  // sigma = scale * a_max
    bool sigma_ladder = false;             // Ape-X style per-worker sigma spread
    int max_episode_steps = 300;
    int train_every = 50;  // env steps per trainer step (deterministic mode pacing)

    // DER
    long der_refresh_period = 500;
    std::size_t pool_capacity = 100;

    // harness
    bool deterministic = false;
    int num_demos = 6;
    double demo_jitter = 0.0;

    std::size_t demo_zone_capacity() const;
    void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace der

#endif  // DER_CONFIG_HPP_
