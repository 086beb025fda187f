#ifndef DER_TYPES_HPP_
#define DER_TYPES_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace der {

inline constexpr std::size_t kObsDim = 13;
inline constexpr std::size_t kActionDim = 6;

/// 13-dim observation: position (x,y,z), orientation quaternion
/// (qx,qy,qz,qw), wrench (fx,fy,fz,tx,ty,tz). Fixed layout.
struct Observation {
    std::array<double, kObsDim> data{};

    Observation() = default;
    explicit Observation(const std::array<double, kObsDim>& d) : data(d) {
        validate();
        normalize_quaternion();
    }

    static Observation from_parts(const std::array<double, 3>& position,
                                  const std::array<double, 4>& quaternion,
                                  const std::array<double, 6>& wrench) {
        Observation o;
        for (int i = 0; i < 3; ++i) o.data[i] = position[i];
        for (int i = 0; i < 4; ++i) o.data[3 + i] = quaternion[i];
        for (int i = 0; i < 6; ++i) o.data[7 + i] = wrench[i];
        o.validate();
        o.normalize_quaternion();
        return o;
    }

    double quaternion_norm() const {
        double s = 0.0;
        for (int i = 3; i < 7; ++i) s += data[i] * data[i];
        return std::sqrt(s);
    }

    bool finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

  private:
    void validate() const {
        if (!finite()) throw std::invalid_argument("Observation: non-finite entry");
        double n = quaternion_norm();
        if (n < 1e-12) throw std::invalid_argument("Observation: zero quaternion");
    }
    void normalize_quaternion() {
        double n = quaternion_norm();
        for (int i = 3; i < 7; ++i) data[i] /= n;
    }
};

/// 6-dim action: linear velocity (m/s) then angular velocity (rad/s),
/// each component clamped to [-a_max, a_max].
struct Action {
    std::array<double, kActionDim> data{};

    Action() = default;
    Action(const std::array<double, kActionDim>& d, double a_max) : data(d) {
        for (double& v : data) {
            if (!std::isfinite(v)) throw std::invalid_argument("Action: non-finite entry");
            v = std::clamp(v, -a_max, a_max);
        }
    }
};

struct Transition {
    Observation s;
    Action a;
    Observation s_next;
    double r = 0.0;
    bool done = false;
    bool success = false;

    void check() const {
        if (!std::isfinite(r)) throw std::invalid_argument("Transition: non-finite reward");
        if (success && !done) throw std::invalid_argument("Transition: success implies done");
    }
};

struct Episode {
    std::vector<Transition> transitions;
    bool success = false;
    double total_reward = 0.0;

    std::size_t length() const { return transitions.size(); }

    static Episode from_transitions(std::vector<Transition> ts) {
        if (ts.empty()) throw std::invalid_argument("Episode: empty");
        Episode e;
        e.transitions = std::move(ts);
        e.success = e.transitions.back().success;
        e.total_reward = 0.0;
        for (const auto& t : e.transitions) e.total_reward += t.r;
        return e;
    }
};

}  // namespace der

#endif  // DER_TYPES_HPP_
