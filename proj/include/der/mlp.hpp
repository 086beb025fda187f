#ifndef DER_MLP_HPP_
#define DER_MLP_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace der {

enum class OutputActivation { Identity, Tanh };

/// Flat parameter snapshot for one network: shape manifest + values.
/// Flatten/unflatten round trips are bit exact.
struct ModelParameters {
    std::vector<int> widths;  // input, hidden..., output
    OutputActivation output_activation = OutputActivation::Identity;
    std::vector<double> values;

    bool same_shape(const ModelParameters& other) const {
        return widths == other.widths && output_activation == other.output_activation;
    }
};

void save_parameters(const ModelParameters& p, const std::string& path);
ModelParameters load_parameters(const std::string& path);

/// target <- exact copy of online (tau = 1 soft update).
void hard_update(ModelParameters& target, const ModelParameters& online);

struct MlpGradients {
    std::vector<std::vector<double>> dw;     // per layer, row-major [in][out]
    std::vector<std::vector<double>> db;     // per layer
    std::vector<double> dinput;              // batch x input_dim
    std::vector<double> flatten() const;
};

/// Activations cached by a batch forward pass, consumed by backward.
struct MlpCache {
    int batch = 0;
    std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output; batch x width
    std::vector<std::vector<double>> pre;  // pre-activation per layer
};

/// Feed-forward net, relu hidden layers, identity or tanh output.
class Mlp {
  public:
    Mlp() = default;
    Mlp(std::vector<int> widths, OutputActivation out_act);

    /// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    void init(std::mt19937_64& rng);

    int input_dim() const { return widths_.front(); }
    int output_dim() const { return widths_.back(); }
    std::size_t parameter_count() const;

    std::vector<double> forward(const std::vector<double>& input) const;

    /// input is batch x input_dim row-major; cache.act.back() is the output.
    MlpCache forward_batch(const std::vector<double>& input, int batch) const;

    /// Gradients of sum_b output_b . upstream_b w.r.t. parameters and input.
    MlpGradients backward_batch(const MlpCache& cache, const std::vector<double>& upstream) const;

    ModelParameters flatten() const;
    void set_parameters(const ModelParameters& p);
    void set_flat(const std::vector<double>& flat);
    std::vector<double> flat_values() const;

    const std::vector<int>& widths() const { return widths_; }
    OutputActivation output_activation() const { return out_act_; }

  private:
    std::vector<int> widths_;
    OutputActivation out_act_ = OutputActivation::Identity;
    std::vector<std::vector<double>> w_;  // layer l: widths[l] x widths[l+1]
    std::vector<std::vector<double>> b_;
};

/// Bias-corrected Adam; non-finite gradients reject the step and bump
/// skipped_steps.
struct AdamState {
    long t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m;
    std::vector<double> v;
    long skipped_steps = 0;

    explicit AdamState(std::size_t n = 0, double learning_rate = 1e-3)
        : lr(learning_rate), m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state);

}  // namespace der

#endif  // DER_MLP_HPP_
