#include "evolearn/cartpole.hpp"

#include <ostream>
#include <stdexcept>

namespace evolearn {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

class CsvSink final : public TrajectorySink {
public:
    explicit CsvSink(std::ostream& os) : os_(os) {}

    void record(int step, const CartPoleState& s, double force) override {
        os_ << step;
        for (int k = 0; k < 6; ++k) os_ << ',' << s(k);
        os_ << ',' << force << '\n';
    }

private:
    std::ostream& os_;
};

}  // namespace

ControllerNet::ControllerNet(const Eigen::MatrixXd& input_weights, const Eigen::MatrixXd& recurrent_weights,
                             Eigen::VectorXd hidden_bias, Eigen::VectorXd output_weights, double output_bias)
    : hidden_bias_(std::move(hidden_bias)), output_weights_(std::move(output_weights)), output_bias_(output_bias) {
    const auto h = hidden_bias_.size();
    constexpr int n_in = ControllerTopology::n_inputs;
    if (input_weights.rows() != h || input_weights.cols() != n_in || recurrent_weights.rows() != h ||
        recurrent_weights.cols() != h || output_weights_.size() != h) {
        throw std::invalid_argument("ControllerNet: inconsistent weight shapes");
    }
    weights_.resize(h, n_in + h);
    weights_ << input_weights, recurrent_weights;
    input_ = Eigen::VectorXd::Zero(n_in + h);
    net_input_ = Eigen::VectorXd::Zero(h);
}

double ControllerNet::activate(const SensorVector& sensors, double force_bound) {
    const Eigen::Index h = hidden_bias_.size();
    input_.head<ControllerTopology::n_inputs>() = sensors;
    net_input_.noalias() = weights_ * input_;
    double out = output_bias_;
    for (Eigen::Index j = 0; j < h; ++j) {
        const double a = logistic(net_input_[j] + hidden_bias_[j]);
        input_[ControllerTopology::n_inputs + j] = a;
        out += output_weights_[j] * a;
    }
    return (logistic(out) - 0.5) * 2.0 * force_bound;
}

ControllerNet decode_controller(const IntGenotype& g, const ControllerTopology& topology) {
    const int h = topology.hidden;
    if (h < 1) throw std::invalid_argument("decode_controller: hidden units must be positive");
    if (static_cast<int>(g.size()) != topology.parameter_count()) {
        throw std::invalid_argument("decode_controller: genotype length does not match topology");
    }
    const auto genes = g.genes();
    std::size_t k = 0;
    auto next = [&] { return decode_weight(genes[k++]); };

    Eigen::MatrixXd w_in(h, ControllerTopology::n_inputs);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < ControllerTopology::n_inputs; ++i) w_in(j, i) = next();
    Eigen::MatrixXd w_rec(h, h);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < h; ++i) w_rec(j, i) = next();
    Eigen::VectorXd b_hidden(h);
    for (int j = 0; j < h; ++j) b_hidden(j) = next();
    Eigen::VectorXd w_out(h);
    for (int j = 0; j < h; ++j) w_out(j) = next();
    const double b_out = next();
    return ControllerNet(w_in, w_rec, std::move(b_hidden), std::move(w_out), b_out);
}

EpisodeResult run_episode(ControllerNet& net, const CartPoleState& init, const PhysicsParams& p, TrajectorySink* sink) {
    const CartPoleModel<double> model(p);
    net.reset();
    CartPoleState s = init;
    int completed = 0;
    while (completed < kEpisodeSteps && !out_of_bounds(s, p)) {
        const double force = net.activate(sensor_readout<double>(s, p), p.force_bound);
        if (sink) sink->record(completed, s, force);
        s = model.control_step(s, force);
        ++completed;
    }
    return {static_cast<double>(completed) / kEpisodeSteps, completed};
}

EpisodeResult write_trajectory(std::ostream& os, ControllerNet& net, const CartPoleState& init,
                               const PhysicsParams& p) {
    os << "step,x,x_dot,theta1,theta1_dot,theta2,theta2_dot,force\n";
    CsvSink sink(os);
    return run_episode(net, init, p, &sink);
}

const std::array<CartPoleState, kEpisodesPerEvaluation>& fixed_initial_states() {
    static const std::array<CartPoleState, kEpisodesPerEvaluation> states = [] {
        std::array<CartPoleState, kEpisodesPerEvaluation> s;
        for (auto& v : s) v.setZero();
        s[0](state_index::x) = -1.944;
        s[1](state_index::x) = 1.944;
        s[2](state_index::x_dot) = -1.215;
        s[3](state_index::x_dot) = 1.215;
        s[4](state_index::theta1) = -0.10472;
        s[5](state_index::theta1) = 0.10472;
        s[6](state_index::theta2) = -0.135088;
        s[7](state_index::theta2) = 0.135088;
        return s;
    }();
    return states;
}

const CartPoleState& random_state_half_range() {
    static const CartPoleState range = (CartPoleState() << 1.944, 1.215, 0.10472, 0.10472, 0.135088, 0.135088).finished();
    return range;
}

CartPoleState draw_initial_state(Rng& rng) {
    using namespace state_index;
    const CartPoleState& r = random_state_half_range();
    CartPoleState s;
    for (int idx : {x, x_dot, theta1, theta2, theta1_dot, theta2_dot}) s(idx) = rng.uniform(-r(idx), r(idx));
    return s;
}

EvalOutcome evaluate_controller(const IntGenotype& g, const EpisodeProtocol& protocol, Rng& rng,
                                const ControllerTopology& topology, const PhysicsParams& p) {
    ControllerNet net = decode_controller(g, topology);
    double fitness_sum = 0.0;
    std::int64_t steps = 0;
    for (int e = 0; e < kEpisodesPerEvaluation; ++e) {
        const CartPoleState init =
            protocol.mode == InitialStates::fixed ? fixed_initial_states()[e] : draw_initial_state(rng);
        const EpisodeResult r = run_episode(net, init, p);
        fitness_sum += r.fitness;
        steps += r.steps;
    }
    return {fitness_sum / kEpisodesPerEvaluation, steps};
}

DoublePoleTask::DoublePoleTask(EpisodeProtocol protocol, ControllerTopology topology, PhysicsParams params)
    : protocol_(protocol),
      topology_(topology),
      params_(params),
      bounds_(std::make_shared<const GeneBounds>(
          GeneBounds::uniform(static_cast<std::size_t>(topology.parameter_count()), 0, kWeightGeneMax))) {}

EvalOutcome DoublePoleTask::evaluate(const IntGenotype& g, Rng& rng) const {
    return evaluate_controller(g, protocol_, rng, topology_, params_);
}

}  // namespace evolearn
