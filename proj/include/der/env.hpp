#ifndef DER_ENV_HPP_
#define DER_ENV_HPP_

#include <random>

#include "der/config.hpp"
#include "der/types.hpp"

namespace der {

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool done = false;
    bool success = false;
};

/// Minimal environment interface so tests can inject scripted stand-ins.
class EnvBase {
  public:
    virtual ~EnvBase() = default;
    virtual Observation reset(std::mt19937_64& rng) = 0;
    virtual StepResult step(const Action& action) = 0;
};

/// Planar pose (x, z, theta) of the moving piece plus the wrench produced by
/// the last contact projection.
struct EnvState {
    double x = 0.0;
    double z = 0.0;
    double theta = 0.0;
    double fx = 0.0;
    double fz = 0.0;
    double ty = 0.0;
};

Observation embed_state(const EnvState& s);
void unembed_state(const Observation& o, double& x, double& z, double& theta);

/// Analytic planar insertion task. The hole is a vertical slot of half-width
/// w centered at goal x; the peg (half-width w - tol) descends from above.
/// The chamfer widens the mouth linearly over depth c. Contact is a
/// projection of the integrated pose back onto the admissible region with a
/// spring wrench proportional to the projection.
class InsertionEnv : public EnvBase {
  public:
    explicit InsertionEnv(const EnvConfig& cfg);

    Observation reset(std::mt19937_64& rng) override;
    StepResult step(const Action& action) override;

    /// Weighted pose distance to the goal: translation + rot_weight * |dtheta|.
    double goal_distance(const EnvState& s) const;
    double goal_distance() const { return goal_distance(state_); }

    /// Linear distance reward with the success bonus inside the eps ball.
    static double reward(double distance, double eps, double bonus);

    const EnvState& state() const { return state_; }
    void set_state(const EnvState& s) { state_ = s; }
    double goal_x() const { return goal_x_; }
    double goal_z() const { return goal_z_; }
    double goal_theta() const { return goal_theta_; }
    const EnvConfig& config() const { return cfg_; }

    /// Effective peg half-width at tilt theta.
    double peg_half_width(double theta) const;
    /// Hole half-width at depth z (z <= 0 inside; chamfer widens near the mouth).
    double hole_half_width_at(double z) const;

  private:
    EnvConfig cfg_;
    EnvState state_;
    double goal_x_ = 0.0;
    double goal_z_ = 0.0;
    double goal_theta_ = 0.0;
};

/// Proportional controller toward the goal with optional jitter; retries
/// until a successful episode is produced (throws after 100 attempts).
Episode scripted_demo(InsertionEnv& env, std::mt19937_64& rng, double jitter_sigma, double a_max,
                      int max_steps);

}  // namespace der

#endif  // DER_ENV_HPP_
