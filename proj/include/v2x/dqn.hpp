#pragma once

// Fully connected Q-network with rectifier hidden layers, exact backpropagation of the
// mean squared TD error, RMSProp, a FIFO replay memory and epsilon-greedy action selection.
// Network math is templated on the scalar type; the simulator instantiates double.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2x/rng.hpp"

namespace v2x::dqn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct DenseLayer {
    Matrix<Scalar> weights;  // out x in
    Vector<Scalar> bias;     // out
};

/// Parameters of a multilayer perceptron. The same type holds gradients and optimizer moments.
template <typename Scalar>
struct QNetwork {
    std::vector<DenseLayer<Scalar>> layers;

    int input_size() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols()); }
    int output_size() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows()); }

    std::vector<int> layer_sizes() const {
        std::vector<int> sizes;
        if (layers.empty()) return sizes;
        sizes.push_back(input_size());
        for (const auto& l : layers) sizes.push_back(static_cast<int>(l.weights.rows()));
        return sizes;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.weights.size() + l.bias.size();
        return n;
    }

    bool all_finite() const {
        for (const auto& l : layers)
            if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
        return true;
    }

    /// Same shape, all zeros.
    QNetwork zeros_like() const {
        QNetwork z;
        for (const auto& l : layers)
            z.layers.push_back({Matrix<Scalar>::Zero(l.weights.rows(), l.weights.cols()),
                                Vector<Scalar>::Zero(l.bias.size())});
        return z;
    }
};

/// Uniform Glorot initialization, zero biases. `sizes` lists input, hidden..., output widths.
template <typename Scalar = double>
QNetwork<Scalar> make_network(const std::vector<int>& sizes, Rng& rng) {
    if (sizes.size() < 2) throw std::invalid_argument("make_network: need at least input and output sizes");
    QNetwork<Scalar> net;
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        const int fan_in = sizes[i - 1];
        const int fan_out = sizes[i];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        DenseLayer<Scalar> layer{Matrix<Scalar>(fan_out, fan_in), Vector<Scalar>::Zero(fan_out)};
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
            for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
                layer.weights(r, c) = static_cast<Scalar>((2.0 * uniform01(rng) - 1.0) * limit);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

/// Q-values for a batch of column states (in x B) -> (actions x B).
template <typename Scalar, typename Derived>
Matrix<Scalar> forward_batch(const QNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& states) {
    if (states.rows() != net.input_size())
        throw std::invalid_argument("forward: state has " + std::to_string(states.rows()) + " entries, network expects " +
                                    std::to_string(net.input_size()));
    Matrix<Scalar> a = states.template cast<Scalar>();
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Matrix<Scalar> z = (net.layers[l].weights * a).colwise() + net.layers[l].bias;
        a = (l + 1 < net.layers.size()) ? Matrix<Scalar>(z.cwiseMax(Scalar(0))) : std::move(z);
    }
    return a;
}

template <typename Scalar, typename Derived>
Vector<Scalar> forward(const QNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& state) {
    return forward_batch(net, state).col(0);
}

template <typename Scalar>
struct LossAndGradient {
    Scalar loss;
    QNetwork<Scalar> gradient;
};

/// Exact gradient of (1/B) * sum_b (target_b - Q(s_b, a_b))^2. Only the taken action's output carries loss.
template <typename Scalar>
LossAndGradient<Scalar> gradients(const QNetwork<Scalar>& net, const Matrix<Scalar>& states,
                                  const std::vector<int>& actions, const Vector<Scalar>& targets) {
    const Eigen::Index batch = states.cols();
    if (batch == 0 || static_cast<Eigen::Index>(actions.size()) != batch || targets.size() != batch)
        throw std::invalid_argument("gradients: batch, actions and targets must be non-empty and aligned");
    if (states.rows() != net.input_size()) throw std::invalid_argument("gradients: state dimension mismatch");

    const std::size_t depth = net.layers.size();
    std::vector<Matrix<Scalar>> activations;  // activations[0] = input
    std::vector<Matrix<Scalar>> pre;
    activations.reserve(depth + 1);
    pre.reserve(depth);
    activations.push_back(states);
    for (std::size_t l = 0; l < depth; ++l) {
        pre.push_back((net.layers[l].weights * activations.back()).colwise() + net.layers[l].bias);
        activations.push_back(l + 1 < depth ? Matrix<Scalar>(pre.back().cwiseMax(Scalar(0))) : pre.back());
    }

    const Matrix<Scalar>& q = activations.back();
    Matrix<Scalar> delta = Matrix<Scalar>::Zero(q.rows(), batch);
    Scalar loss = 0;
    for (Eigen::Index b = 0; b < batch; ++b) {
        const int a = actions[b];
        if (a < 0 || a >= q.rows()) throw std::invalid_argument("gradients: action index out of range");
        const Scalar err = q(a, b) - targets(b);
        loss += err * err;
        delta(a, b) = Scalar(2) * err / Scalar(batch);
    }
    loss /= Scalar(batch);

    LossAndGradient<Scalar> out{loss, net.zeros_like()};
    for (std::size_t l = depth; l-- > 0;) {
        out.gradient.layers[l].weights.noalias() = delta * activations[l].transpose();
        out.gradient.layers[l].bias = delta.rowwise().sum();
        if (l > 0) {
            Matrix<Scalar> back = net.layers[l].weights.transpose() * delta;
            delta = back.cwiseProduct((pre[l - 1].array() > Scalar(0)).matrix().template cast<Scalar>());
        }
    }
    return out;
}

/// Running average of squared gradients, one entry per parameter.
template <typename Scalar>
struct RmsPropState {
    QNetwork<Scalar> mean_square;

    explicit RmsPropState(const QNetwork<Scalar>& net) : mean_square(net.zeros_like()) {}
};

/// v <- decay*v + (1-decay)*g^2;  theta <- theta - lr*g/(sqrt(v)+eps)
template <typename Scalar>
void rmsprop_step(QNetwork<Scalar>& net, RmsPropState<Scalar>& state, const QNetwork<Scalar>& grad, Scalar lr,
                  Scalar decay = Scalar(0.9), Scalar eps = Scalar(1e-8)) {
    if (grad.layers.size() != net.layers.size()) throw std::invalid_argument("rmsprop_step: shape mismatch");
    auto update = [&](auto& theta, auto& v, const auto& g) {
        if (theta.rows() != g.rows() || theta.cols() != g.cols())
            throw std::invalid_argument("rmsprop_step: shape mismatch");
        v.array() = decay * v.array() + (Scalar(1) - decay) * g.array().square();
        theta.array() -= lr * g.array() / (v.array().sqrt() + eps);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        update(net.layers[l].weights, state.mean_square.layers[l].weights, grad.layers[l].weights);
        update(net.layers[l].bias, state.mean_square.layers[l].bias, grad.layers[l].bias);
    }
}

struct Transition {
    Eigen::VectorXd state;
    int action = 0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool terminal = false;
};

/// Bounded FIFO of transitions; the oldest entry is evicted first.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayMemory: capacity must be positive");
    }

    void push(Transition t) {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(t));
        } else {
            items_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// i = 0 is the oldest stored transition.
    const Transition& at(std::size_t i) const { return items_.at((head_ + i) % items_.size()); }

    /// Uniform draws with replacement, as positions for at(). Empty when fewer than `batch` items are stored.
    std::optional<std::vector<std::size_t>> sample(std::size_t batch, Rng& rng) const {
        if (batch == 0 || items_.size() < batch) return std::nullopt;
        std::vector<std::size_t> idx(batch);
        for (auto& i : idx) i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(items_.size()));
        return idx;
    }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> items_;
};

/// r for terminal transitions, r + gamma * max_a' Q(s', a') otherwise.
template <typename Scalar>
Vector<Scalar> td_targets(const std::vector<const Transition*>& batch, const QNetwork<Scalar>& net, Scalar gamma) {
    Vector<Scalar> targets(static_cast<Eigen::Index>(batch.size()));
    if (batch.empty()) return targets;
    Matrix<Scalar> next(net.input_size(), static_cast<Eigen::Index>(batch.size()));
    for (std::size_t b = 0; b < batch.size(); ++b) next.col(b) = batch[b]->next_state.template cast<Scalar>();
    const Matrix<Scalar> q_next = forward_batch(net, next);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Scalar r = static_cast<Scalar>(batch[b]->reward);
        targets(b) = batch[b]->terminal ? r : r + gamma * q_next.col(b).maxCoeff();
    }
    return targets;
}

struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.02;
    int decay_episodes = 1600;
};

/// Linear decay from start to end over decay_episodes, then constant.
inline double epsilon_for_episode(int episode, const EpsilonSchedule& schedule) {
    if (episode < 0) throw std::invalid_argument("epsilon_for_episode: negative episode");
    if (episode >= schedule.decay_episodes) return schedule.end;
    const double eps = schedule.start - (schedule.start - schedule.end) * episode / schedule.decay_episodes;
    return std::max(schedule.end, eps);
}

/// Lowest index among the maxima.
template <typename Derived>
int argmax(const Eigen::MatrixBase<Derived>& q) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < q.size(); ++i)
        if (q(i) > q(best)) best = i;
    return static_cast<int>(best);
}

template <typename Scalar>
int act(const QNetwork<Scalar>& net, const Eigen::VectorXd& state, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && uniform01(rng) < epsilon) return uniform_index(rng, net.output_size());
    return argmax(forward(net, state));
}

}  // namespace v2x::dqn
