#pragma once

#include "invc/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace invc {

// Multi-layer LSTM with a per-timestep linear head, all math in 64-bit.
// Parameters live in one flat vector with a named-tensor layout so the
// optimizer, the gradient checker and the checkpoint format all see the
// same storage.
//
// Per layer (input width I, units U), gate blocks ordered i, f, g, o:
//   w_x  [I][4U]   input weights, input-major
//   w_h  [U][4U]   recurrent weights
//   b    [4U]      biases, forget block initialized to 1
// plus a head of U weights and one bias.

struct TensorInfo {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::size_t offset = 0;
    std::size_t size = 0;
};

struct LstmStack {
    int layers = 2;
    int units = 64;
    std::vector<TensorInfo> tensors;
    std::vector<double> params;

    int input_dim(int layer) const { return layer == 0 ? 1 : units; }

    double* tensor(const std::string& name);
    const double* tensor(const std::string& name) const;
    const TensorInfo& tensor_info(const std::string& name) const;
};

// Tensor layout for the given shape, params zero-initialized.
LstmStack make_stack(int layers, int units);

// Glorot-uniform weights drawn from the seed (limit treats each layer's
// input+recurrent kernel as one (I+U) x 4U matrix), zero biases, forget
// bias 1.0.
LstmStack init_params(int layers, int units, std::uint64_t seed);

struct ForwardCache {
    struct Layer {
        std::vector<double> gates;  // [T][4U] post-activation i,f,g,o
        std::vector<double> c;      // [T][U]
        std::vector<double> tanh_c; // [T][U]
        std::vector<double> h;      // [T][U]
    };
    std::vector<double> input; // the audio segment
    std::vector<Layer> layers;
    std::size_t steps = 0;
};

// Runs the stack over one audio segment (zero initial state), returning the
// per-timestep prediction. Fills `cache` with everything backward needs when
// it is non-null.
std::vector<double> forward(const LstmStack& stack, const std::vector<double>& audio,
                            ForwardCache* cache = nullptr);

// Mean over batch and time of the squared error. Throws ShapeMismatch.
double mse_loss(const std::vector<double>& prediction, const std::vector<double>& target);

// d(mse)/d(prediction) for one segment: 2 (pred - target) / T.
std::vector<double> mse_gradient(const std::vector<double>& prediction,
                                 const std::vector<double>& target);

// Exact reverse-mode gradients through every timestep and layer (full BPTT),
// accumulated into `grads` (same layout/size as stack.params).
void backward(const LstmStack& stack, const ForwardCache& cache,
              const std::vector<double>& dloss_dpred, std::vector<double>& grads);

struct AdamState {
    std::vector<double> m, v;
    std::uint64_t step = 0;
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// theta <- theta - alpha * mhat / (sqrt(vhat) + eps) with the standard
// bias-corrected moments.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state);

struct TrainConfig {
    int epochs = 64;
    std::size_t batch_size = 98;
    std::uint64_t seed = 0;
    int layers = 2;
    int units = 64;
    double learning_rate = 1e-3;
    int threads = 1; // 1 = bit-exact sequential mode
};

struct EpochStats {
    int epoch = 0; // 1-based
    double train_mse = 0.0;
    double val_mse = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    LstmStack stack; // parameters from the epoch with the lowest val MSE
    AdamState adam;  // optimizer state at the end of training
    std::vector<EpochStats> log;
    int best_epoch = 0;
};

// Gesture targets are trained in units of the +-0.05 m range; predictions
// convert back to meters via this factor.
inline constexpr double kGestureScale = 1.0 / 0.05;

TrainResult train(const Dataset& data, const TrainConfig& config);

// Checkpoint format, little-endian:
//   "INVW" | version u32=1 | tensor count u32 |
//   per tensor: name u16+UTF-8, rank u8, dims u32 each, f64 data |
//   u64 Adam step count.
// Tensors are the stack parameters followed by adam.m.* and adam.v.* copies.
void save_checkpoint(const std::string& path, const LstmStack& stack, const AdamState& adam);

struct Checkpoint {
    LstmStack stack;
    AdamState adam;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace invc
