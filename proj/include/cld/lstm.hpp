#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cld/window_set.hpp"

namespace cld {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const Matrix&) const = default;
};

/// Weights feeding one gate (or the cell candidate): W x + U h + b.
struct GateParams {
    Matrix input;      // hidden_dim x input_dim
    Matrix recurrent;  // hidden_dim x hidden_dim
    std::vector<double> bias;

    bool operator==(const GateParams&) const = default;
};

/// A named, shaped view onto one parameter block.
struct ParamBlock {
    std::string_view name;
    std::size_t rows;
    std::size_t cols;
    std::span<double> values;
};

struct ConstParamBlock {
    std::string_view name;
    std::size_t rows;
    std::size_t cols;
    std::span<const double> values;
};

inline constexpr std::size_t kParamBlockCount = 14;

/// Single-layer LSTM with a scalar affine read-out.
///
/// The same type doubles as the gradient container returned by the
/// backward pass, so every block lines up with its parameter.
struct LstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    GateParams input_gate;
    GateParams forget_gate;
    GateParams output_gate;
    GateParams candidate;
    std::vector<double> output_weights;  // 1 x hidden_dim
    double output_bias = 0.0;

    /// All-zero parameters of the given shape. No validation of dims.
    static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);

    /// Blocks in file order: W_i U_i b_i W_f U_f b_f W_o U_o b_o W_g U_g b_g w_y b_y.
    std::array<ParamBlock, kParamBlockCount> blocks();
    std::array<ConstParamBlock, kParamBlockCount> blocks() const;

    std::size_t parameter_count() const;
    bool all_finite() const;

    bool operator==(const LstmParams&) const = default;
};

struct LstmState {
    std::vector<double> hidden;
    std::vector<double> cell;

    static LstmState zero(std::size_t hidden_dim) {
        return {std::vector<double>(hidden_dim, 0.0), std::vector<double>(hidden_dim, 0.0)};
    }

    bool operator==(const LstmState&) const = default;
};

struct StepOutput {
    LstmState state;
    double prediction = 0.0;
};

enum class TrainRegime {
    /// One update per window, windows visited in chronological order.
    per_step,
    /// One update per epoch from the gradient of the whole-set loss.
    full_batch,
};

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 1500;
    std::size_t hidden_dim = 23;
    std::size_t lag = 3;
    std::uint64_t rng_seed = 42;
    /// Element-wise clip applied to each gradient entry before the update.
    std::optional<double> gradient_clip;
    TrainRegime regime = TrainRegime::per_step;

    void validate() const;
};

struct TrainReport {
    /// Mean squared error of each epoch. Per-step training averages the
    /// per-window losses seen during the epoch (each taken before its
    /// update); full-batch training records the loss before the update.
    std::vector<double> epoch_loss;
    double seconds = 0.0;
};

struct TrainResult {
    LstmParams params;
    TrainReport report;
};

struct Gradients {
    LstmParams grad;
    double loss = 0.0;
};

/// Uniform weights in [-1/sqrt(h), 1/sqrt(h)], forget bias 1, other biases 0.
LstmParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t rng_seed);

/// One cell update. Pure; throws usage_error on dimension mismatch.
StepOutput forward_step(const LstmParams& params, const LstmState& state,
                        std::span<const double> input);

/// One cell step from the zero state with the whole lag window as a single
/// input vector (oldest to newest).
double predict_window(const LstmParams& params, std::span<const double> window);

/// Mean squared error of predict_window over the set.
double mse_loss(const LstmParams& params, const WindowSet& windows);

/// Exact gradient of mse_loss with respect to every parameter.
Gradients bptt_gradients(const LstmParams& params, const WindowSet& windows);

/// Unrolled BPTT over a single sequence started from the zero state; the
/// loss is the mean squared error of the per-step predictions.
Gradients bptt_sequence(const LstmParams& params, std::span<const std::vector<double>> inputs,
                        std::span<const double> targets);

double sequence_loss(const LstmParams& params, std::span<const std::vector<double>> inputs,
                     std::span<const double> targets);

/// Central-difference estimate of the mse_loss gradient.
LstmParams finite_difference_gradient(const LstmParams& params, const WindowSet& windows,
                                      double epsilon = 1e-5);

/// params -= learning_rate * grad, with each gradient entry clipped to
/// [-clip, clip] first when a clip is given.
void gradient_descent_step(LstmParams& params, const LstmParams& grad, double learning_rate,
                           std::optional<double> clip = std::nullopt);

/// Gradient descent from init_params(lag, hidden_dim, rng_seed). Throws divergence_error naming the epoch
/// when a parameter becomes non-finite.
TrainResult train(const TrainConfig& config, const WindowSet& windows);

}  // namespace cld
