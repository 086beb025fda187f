#include "der/env.hpp"

#include <cmath>
#include <stdexcept>

namespace der {

Observation embed_state(const EnvState& s) {
    return Observation::from_parts({s.x, 0.0, s.z},
                                   {0.0, std::sin(s.theta / 2.0), 0.0, std::cos(s.theta / 2.0)},
                                   {s.fx, 0.0, s.fz, 0.0, s.ty, 0.0});
}

void unembed_state(const Observation& o, double& x, double& z, double& theta) {
    x = o.data[0];
    z = o.data[2];
    theta = 2.0 * std::atan2(o.data[4], o.data[6]);
}

InsertionEnv::InsertionEnv(const EnvConfig& cfg) : cfg_(cfg) {
    if (cfg.clearance <= 0.0 || cfg.clearance >= cfg.hole_half_width)
        throw std::invalid_argument("InsertionEnv: clearance must be in (0, hole_half_width)");
    goal_z_ = -cfg_.insert_depth;
}

double InsertionEnv::peg_half_width(double theta) const {
    return (cfg_.hole_half_width - cfg_.clearance) + cfg_.torque_lever * std::abs(std::sin(theta));
}

double InsertionEnv::hole_half_width_at(double z) const {
    const double c = cfg_.chamfer_depth;
    if (c > 0.0 && z > -c) {
        // mouth widens linearly at 45 degrees over the chamfer depth
        return cfg_.hole_half_width + (z + c);
    }
    return cfg_.hole_half_width;
}

double InsertionEnv::goal_distance(const EnvState& s) const {
    double dx = s.x - goal_x_;
    double dz = s.z - goal_z_;
    double dth = s.theta - goal_theta_;
    return std::hypot(dx, dz) + cfg_.rot_weight * std::abs(dth);
}

double InsertionEnv::reward(double distance, double eps, double bonus) {
    return distance > eps ? -distance : -distance + bonus;
}

Observation InsertionEnv::reset(std::mt19937_64& rng) {
    state_ = EnvState{};
    if (cfg_.variant == EnvVariant::PegInHole) {
        std::uniform_real_distribution<double> ang(-cfg_.init_angle_range, cfg_.init_angle_range);
        state_.theta = ang(rng);
        goal_x_ = 0.0;
        goal_theta_ = 0.0;
    } else {
        std::uniform_real_distribution<double> ang(cfg_.lap_angle_lo, cfg_.lap_angle_hi);
        std::uniform_real_distribution<double> off(-cfg_.lap_xy_range, cfg_.lap_xy_range);
        goal_theta_ = ang(rng);
        goal_x_ = off(rng);
    }
    state_.x = 0.0;
    state_.z = cfg_.start_height;
    return embed_state(state_);
}

StepResult InsertionEnv::step(const Action& action) {
    for (double v : action.data)
        if (!std::isfinite(v)) throw std::invalid_argument("InsertionEnv: non-finite action");
    const double vx = action.data[0];
    const double vz = action.data[2];
    const double wy = action.data[4];

    EnvState next = state_;
    next.theta = state_.theta + wy * cfg_.dt;
    const double xr = state_.x + vx * cfg_.dt;
    const double zr = state_.z + vz * cfg_.dt;

    // project the raw pose onto the admissible region relative to the hole
    double xp = xr;
    double zp = std::max(zr, -cfg_.insert_depth);
    if (zp < 0.0) {
        const double phw = peg_half_width(next.theta);
        const double dx = xp - goal_x_;
        const double violation = std::abs(dx) + phw - hole_half_width_at(zp);
        if (violation > 0.0) {
            // lateral push toward the hole axis vs. vertical push back out;
            // take the smaller displacement
            double z_ok;  // lowest admissible depth at this lateral offset
            const double need = std::abs(dx) + phw - cfg_.hole_half_width;
            if (cfg_.chamfer_depth > 0.0 && need < cfg_.chamfer_depth)
                z_ok = need - cfg_.chamfer_depth;  // resting on the chamfer slope
            else
                z_ok = 0.0;  // resting on the top surface
            z_ok = std::max(z_ok, zp);
            const double lateral = violation;
            const double vertical = z_ok - zp;
            if (lateral <= vertical) {
                xp -= (dx >= 0.0 ? 1.0 : -1.0) * lateral;
            } else {
                zp = z_ok;
                // recheck lateral at the new depth (chamfer slope contact)
                const double v2 = std::abs(xp - goal_x_) + phw - hole_half_width_at(zp);
                if (v2 > 0.0) xp -= (dx >= 0.0 ? 1.0 : -1.0) * v2;
            }
        }
    }
    next.x = xp;
    next.z = zp;
    next.fx = cfg_.contact_stiffness * (xp - xr);
    next.fz = cfg_.contact_stiffness * (zp - zr);
    next.ty = next.fx * cfg_.torque_lever;

    state_ = next;
    StepResult res;
    const double d = goal_distance(state_);
    res.success = d <= cfg_.success_eps;
    res.done = res.success;
    res.reward = reward(d, cfg_.success_eps, cfg_.success_bonus);
    res.obs = embed_state(state_);
    return res;
}

Episode scripted_demo(InsertionEnv& env, std::mt19937_64& rng, double jitter_sigma, double a_max,
                      int max_steps) {
    std::normal_distribution<double> jitter(0.0, jitter_sigma);
    const double kp = 5.0;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Observation obs = env.reset(rng);
        std::vector<Transition> ts;
        for (int t = 0; t < max_steps; ++t) {
            const EnvState& s = env.state();
            std::array<double, kActionDim> a{};
            a[0] = kp * (env.goal_x() - s.x);
            a[2] = kp * (env.goal_z() - s.z);
            a[4] = kp * (env.goal_theta() - s.theta);
            if (jitter_sigma > 0.0)
                for (double& v : a) v += jitter(rng);
            Action act(a, a_max);
            StepResult r = env.step(act);
            bool last = r.done || t + 1 == max_steps;
            Transition tr{obs, act, r.obs, r.reward, r.done || last, r.success};
            ts.push_back(tr);
            obs = r.obs;
            if (r.done) break;
        }
        if (!ts.empty() && ts.back().success) return Episode::from_transitions(std::move(ts));
    }
    throw std::runtime_error("scripted_demo: no success in 100 attempts, check env geometry");
}

}  // namespace der
