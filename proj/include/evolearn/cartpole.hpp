#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <numbers>

#include <Eigen/Core>

#include "evolearn/fast_trig.hpp"
#include "evolearn/genome.hpp"
#include "evolearn/task.hpp"

namespace evolearn {

// Cart with two hinged poles. State layout (x, x_dot, theta1, theta1_dot,
// theta2, theta2_dot); angles in radians from upright.
template <typename Scalar>
using CartPoleStateT = Eigen::Matrix<Scalar, 6, 1>;
using CartPoleState = CartPoleStateT<double>;

namespace state_index {
inline constexpr int x = 0;
inline constexpr int x_dot = 1;
inline constexpr int theta1 = 2;
inline constexpr int theta1_dot = 3;
inline constexpr int theta2 = 4;
inline constexpr int theta2_dot = 5;
}  // namespace state_index

template <typename Scalar>
using SensorVectorT = Eigen::Matrix<Scalar, 4, 1>;
using SensorVector = SensorVectorT<double>;

struct PhysicsParams {
    double cart_mass = 1.0;
    std::array<double, 2> pole_mass{0.5, 0.05};
    std::array<double, 2> pole_half_length{0.5, 0.05};
    // Signed acceleration along the upward pole axis. With the equations as
    // written, a negative value makes the upright equilibrium unstable.
    double gravity = -9.8;
    double pole_friction = 2.0e-6;
    double tau = 0.01;
    double control_interval = 0.02;
    double track_half_width = 2.4;
    double failure_angle = 36.0 * std::numbers::pi / 180.0;
    double force_bound = 10.0;

    int substeps() const { return static_cast<int>(std::lround(control_interval / tau)); }
};

inline constexpr int kEpisodeSteps = 1000;
inline constexpr int kEpisodesPerEvaluation = 8;

// Equations of motion with the per-pole constants folded once per parameter
// set. Instantiated with a wider Scalar (e.g. long double) it serves as a
// high-precision reference for the double-precision simulator.
template <typename Scalar>
class CartPoleModel {
public:
    using State = CartPoleStateT<Scalar>;

    explicit CartPoleModel(const PhysicsParams& p = {})
        : gravity_(p.gravity), cart_mass_(p.cart_mass), tau_(p.tau), substeps_(p.substeps()) {
        for (int i = 0; i < 2; ++i) {
            const Scalar m(p.pole_mass[i]);
            const Scalar l(p.pole_half_length[i]);
            mass_[i] = m;
            mass_length_[i] = m * l;
            friction_gain_[i] = Scalar(p.pole_friction) / (m * l);
            angular_gain_[i] = Scalar(-0.75) / l;
        }
    }

    // Time derivative under a constant horizontal force on the cart.
    State derivatives(const State& s, Scalar force) const {
        const Scalar th[2] = {s(state_index::theta1), s(state_index::theta2)};
        const Scalar th_dot[2] = {s(state_index::theta1_dot), s(state_index::theta2_dot)};

        Scalar cos_th[2], g_sin[2], friction[2];
        Scalar force_sum = force;
        Scalar mass_sum = cart_mass_;
        for (int i = 0; i < 2; ++i) {
            Scalar sin_th;
            pole_sincos(th[i], sin_th, cos_th[i]);
            g_sin[i] = gravity_ * sin_th;
            friction[i] = friction_gain_[i] * th_dot[i];
            // effective force and effective mass of each pole
            force_sum += mass_length_[i] * th_dot[i] * th_dot[i] * sin_th +
                         Scalar(0.75) * mass_[i] * cos_th[i] * (friction[i] + g_sin[i]);
            mass_sum += mass_[i] * (Scalar(1) - Scalar(0.75) * cos_th[i] * cos_th[i]);
        }
        const Scalar x_acc = force_sum / mass_sum;

        State d;
        d(state_index::x) = s(state_index::x_dot);
        d(state_index::x_dot) = x_acc;
        d(state_index::theta1) = th_dot[0];
        d(state_index::theta1_dot) = angular_gain_[0] * (x_acc * cos_th[0] + g_sin[0] + friction[0]);
        d(state_index::theta2) = th_dot[1];
        d(state_index::theta2_dot) = angular_gain_[1] * (x_acc * cos_th[1] + g_sin[1] + friction[1]);
        return d;
    }

    // One classical fourth-order Runge-Kutta step of size h, force held constant.
    State rk4_step(const State& s, Scalar force, Scalar h) const {
        const Scalar half = h / Scalar(2);
        const State k1 = derivatives(s, force);
        const State k2 = derivatives(s + half * k1, force);
        const State k3 = derivatives(s + half * k2, force);
        const State k4 = derivatives(s + h * k3, force);
        return s + (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
    }

    State rk4_step(const State& s, Scalar force) const { return rk4_step(s, force, tau_); }

    // Advances one control interval (control_interval / tau RK4 steps).
    State control_step(const State& s, Scalar force) const {
        State out = s;
        for (int k = 0; k < substeps_; ++k) out = rk4_step(out, force, tau_);
        return out;
    }

private:
    Scalar gravity_;
    Scalar cart_mass_;
    Scalar tau_;
    int substeps_;
    Scalar mass_[2];
    Scalar mass_length_[2];
    Scalar friction_gain_[2];
    Scalar angular_gain_[2];
};

template <typename Scalar>
CartPoleStateT<Scalar> derivatives(const CartPoleStateT<Scalar>& s, Scalar force, const PhysicsParams& p) {
    return CartPoleModel<Scalar>(p).derivatives(s, force);
}

template <typename Scalar>
CartPoleStateT<Scalar> rk4_step(const CartPoleStateT<Scalar>& s, Scalar force, const PhysicsParams& p, Scalar h) {
    return CartPoleModel<Scalar>(p).rk4_step(s, force, h);
}

template <typename Scalar>
CartPoleStateT<Scalar> rk4_step(const CartPoleStateT<Scalar>& s, Scalar force, const PhysicsParams& p) {
    return CartPoleModel<Scalar>(p).rk4_step(s, force);
}

template <typename Scalar>
CartPoleStateT<Scalar> control_step(const CartPoleStateT<Scalar>& s, Scalar force, const PhysicsParams& p) {
    return CartPoleModel<Scalar>(p).control_step(s, force);
}

// Position-only sensors: x scaled to [-0.5, 0.5] over the track, angles
// scaled so the failure angle maps to 5*pi/13, plus a constant 0.5 bias.
template <typename Scalar>
SensorVectorT<Scalar> sensor_readout(const CartPoleStateT<Scalar>& s, const PhysicsParams& p = {}) {
    const Scalar angle_gain = Scalar(5.0 * std::numbers::pi / 13.0) / Scalar(p.failure_angle);
    SensorVectorT<Scalar> out;
    out << s(state_index::x) / Scalar(2.0 * p.track_half_width), s(state_index::theta1) * angle_gain,
        s(state_index::theta2) * angle_gain, Scalar(0.5);
    return out;
}

inline bool out_of_bounds(const CartPoleState& s, const PhysicsParams& p) {
    return std::abs(s(state_index::x)) > p.track_half_width || std::abs(s(state_index::theta1)) > p.failure_angle ||
           std::abs(s(state_index::theta2)) > p.failure_angle;
}

// Fully recurrent hidden layer of logistic units feeding one logistic output.
struct ControllerTopology {
    int hidden = 10;

    static constexpr int n_inputs = 4;

    // Gene order: input->hidden (per hidden unit, per input), hidden->hidden
    // (per target unit, per source unit), hidden biases, hidden->output,
    // output bias.
    int parameter_count() const { return n_inputs * hidden + hidden * hidden + hidden + hidden + 1; }
};

class ControllerNet {
public:
    ControllerNet(const Eigen::MatrixXd& input_weights, const Eigen::MatrixXd& recurrent_weights,
                  Eigen::VectorXd hidden_bias, Eigen::VectorXd output_weights, double output_bias);

    int hidden_units() const { return static_cast<int>(hidden_bias_.size()); }

    Eigen::MatrixXd input_weights() const { return weights_.leftCols(ControllerTopology::n_inputs); }
    Eigen::MatrixXd recurrent_weights() const { return weights_.rightCols(hidden_units()); }
    const Eigen::VectorXd& hidden_bias() const { return hidden_bias_; }
    const Eigen::VectorXd& output_weights() const { return output_weights_; }
    double output_bias() const { return output_bias_; }
    Eigen::VectorXd hidden_state() const { return input_.tail(hidden_units()); }

    void reset() { input_.tail(hidden_units()).setZero(); }

    // Updates the hidden state from the sensors and the previous hidden state
    // and returns the force (o - 0.5) * 2 * force_bound for output o in [0, 1].
    double activate(const SensorVector& sensors, double force_bound = 10.0);

private:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    RowMatrix weights_;  // [input | recurrent], hidden x (4 + hidden)
    Eigen::VectorXd hidden_bias_;
    Eigen::VectorXd output_weights_;
    double output_bias_;
    Eigen::VectorXd input_;  // [sensors | previous hidden state]
    Eigen::VectorXd net_input_;
};

ControllerNet decode_controller(const IntGenotype& g, const ControllerTopology& topology = {});

inline double net_activate(ControllerNet& net, const SensorVector& sensors) { return net.activate(sensors); }

struct EpisodeResult {
    double fitness = 0.0;  // completed steps / 1000
    int steps = 0;
};

// Receives each control step: index, state before the step, applied force.
class TrajectorySink {
public:
    virtual ~TrajectorySink() = default;
    virtual void record(int step, const CartPoleState& s, double force) = 0;
};

// Resets the hidden state and runs up to 1000 control steps. The range check
// precedes every step, and only completed steps are counted.
EpisodeResult run_episode(ControllerNet& net, const CartPoleState& init, const PhysicsParams& p = {},
                          TrajectorySink* sink = nullptr);

// Writes "step,x,x_dot,theta1,theta1_dot,theta2,theta2_dot,force" rows.
EpisodeResult write_trajectory(std::ostream& os, ControllerNet& net, const CartPoleState& init,
                               const PhysicsParams& p = {});

enum class InitialStates { fixed, random };

const std::array<CartPoleState, kEpisodesPerEvaluation>& fixed_initial_states();

// Per-variable half-ranges for random initial states, in state layout order.
const CartPoleState& random_state_half_range();

// Draws x, x_dot, theta1, theta2, theta1_dot, theta2_dot in that order.
CartPoleState draw_initial_state(Rng& rng);

struct EpisodeProtocol {
    InitialStates mode = InitialStates::fixed;
};

// Mean episode fitness over 8 episodes; steps = completed control steps.
EvalOutcome evaluate_controller(const IntGenotype& g, const EpisodeProtocol& protocol, Rng& rng,
                                const ControllerTopology& topology = {}, const PhysicsParams& p = {});

class DoublePoleTask final : public Task {
public:
    explicit DoublePoleTask(EpisodeProtocol protocol, ControllerTopology topology = {}, PhysicsParams params = {});

    const SharedBounds& bounds() const override { return bounds_; }
    EvalOutcome evaluate(const IntGenotype& g, Rng& rng) const override;
    bool deterministic() const override { return protocol_.mode == InitialStates::fixed; }

    const EpisodeProtocol& protocol() const { return protocol_; }
    const ControllerTopology& topology() const { return topology_; }
    const PhysicsParams& params() const { return params_; }

private:
    EpisodeProtocol protocol_;
    ControllerTopology topology_;
    PhysicsParams params_;
    SharedBounds bounds_;
};

}  // namespace evolearn
