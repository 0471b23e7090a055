#include "cld/lstm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "cld/error.hpp"
#include "cld/rng.hpp"

namespace cld {

namespace {

GateParams zero_gate(std::size_t input_dim, std::size_t hidden_dim) {
    return {Matrix(hidden_dim, input_dim), Matrix(hidden_dim, hidden_dim),
            std::vector<double>(hidden_dim, 0.0)};
}

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

// Everything the backward pass needs from one forward step.
struct StepCache {
    std::vector<double> x;
    std::vector<double> h_prev;
    std::vector<double> c_prev;
    std::vector<double> i, f, o, g;
    std::vector<double> c;
    std::vector<double> tanh_c;
    std::vector<double> h;
    double y = 0.0;
    bool zero_state = false;
};

void check_input(const LstmParams& params, std::span<const double> input) {
    if (input.size() != params.input_dim) {
        throw usage_error("input length " + std::to_string(input.size()) +
                          " does not match input_dim " + std::to_string(params.input_dim));
    }
}

// Pre-activation of one gate row: b + W x + U h, accumulated in that order.
double preactivation(const GateParams& gate, std::size_t row, std::span<const double> x,
                     std::span<const double> h, bool zero_state) {
    double a = gate.bias[row];
    for (std::size_t k = 0; k < x.size(); ++k) a += gate.input(row, k) * x[k];
    if (!zero_state) {
        for (std::size_t k = 0; k < h.size(); ++k) a += gate.recurrent(row, k) * h[k];
    }
    return a;
}

// zero_state skips the recurrent products, which are exactly zero then.
// Fills `s` in place so hot loops can reuse its buffers.
void forward_into(StepCache& s, const LstmParams& p, std::span<const double> x,
                  std::span<const double> h_prev, std::span<const double> c_prev, bool zero_state) {
    const std::size_t n = p.hidden_dim;
    s.x.assign(x.begin(), x.end());
    s.h_prev.assign(h_prev.begin(), h_prev.end());
    s.c_prev.assign(c_prev.begin(), c_prev.end());
    s.zero_state = zero_state;
    s.i.resize(n);
    s.f.resize(n);
    s.o.resize(n);
    s.g.resize(n);
    s.c.resize(n);
    s.tanh_c.resize(n);
    s.h.resize(n);
    double y = p.output_bias;
    for (std::size_t r = 0; r < n; ++r) {
        s.i[r] = sigmoid(preactivation(p.input_gate, r, x, h_prev, zero_state));
        s.f[r] = sigmoid(preactivation(p.forget_gate, r, x, h_prev, zero_state));
        s.o[r] = sigmoid(preactivation(p.output_gate, r, x, h_prev, zero_state));
        s.g[r] = std::tanh(preactivation(p.candidate, r, x, h_prev, zero_state));
        s.c[r] = s.f[r] * c_prev[r] + s.i[r] * s.g[r];
        s.tanh_c[r] = std::tanh(s.c[r]);
        s.h[r] = s.o[r] * s.tanh_c[r];
        y += p.output_weights[r] * s.h[r];
    }
    s.y = y;
}

StepCache forward_cached(const LstmParams& p, std::span<const double> x,
                         std::span<const double> h_prev, std::span<const double> c_prev,
                         bool zero_state) {
    StepCache s;
    forward_into(s, p, x, h_prev, c_prev, zero_state);
    return s;
}

void accumulate_gate(GateParams& grad, std::span<const double> da, const StepCache& s) {
    const std::size_t n = da.size();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < s.x.size(); ++k) grad.input(r, k) += da[r] * s.x[k];
        if (!s.zero_state) {
            for (std::size_t k = 0; k < n; ++k) grad.recurrent(r, k) += da[r] * s.h_prev[k];
        }
        grad.bias[r] += da[r];
    }
}

void add_recurrent_transpose(const GateParams& gate, std::span<const double> da,
                             std::vector<double>& dh_prev) {
    const std::size_t n = da.size();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) dh_prev[k] += gate.recurrent(r, k) * da[r];
    }
}

// Backward through one step. dh_next/dc_next carry the gradient arriving
// from later steps; dh_prev/dc_prev receive what flows to earlier ones.
struct GateDeltas {
    std::vector<double> i, f, o, g;
};

void backward_step(const LstmParams& p, const StepCache& s, double dy,
                   std::span<const double> dh_next, std::span<const double> dc_next,
                   LstmParams& grad, std::vector<double>& dh_prev, std::vector<double>& dc_prev,
                   GateDeltas& da) {
    const std::size_t n = p.hidden_dim;
    auto& da_i = da.i;
    auto& da_f = da.f;
    auto& da_o = da.o;
    auto& da_g = da.g;
    da_i.resize(n);
    da_f.resize(n);
    da_o.resize(n);
    da_g.resize(n);
    dc_prev.assign(n, 0.0);
    grad.output_bias += dy;
    for (std::size_t r = 0; r < n; ++r) {
        grad.output_weights[r] += dy * s.h[r];
        const double dh = p.output_weights[r] * dy + dh_next[r];
        const double d_o = dh * s.tanh_c[r];
        const double dc = dh * s.o[r] * (1.0 - s.tanh_c[r] * s.tanh_c[r]) + dc_next[r];
        const double d_f = dc * s.c_prev[r];
        const double d_i = dc * s.g[r];
        const double d_g = dc * s.i[r];
        dc_prev[r] = dc * s.f[r];
        da_i[r] = d_i * s.i[r] * (1.0 - s.i[r]);
        da_f[r] = d_f * s.f[r] * (1.0 - s.f[r]);
        da_o[r] = d_o * s.o[r] * (1.0 - s.o[r]);
        da_g[r] = d_g * (1.0 - s.g[r] * s.g[r]);
    }
    accumulate_gate(grad.input_gate, da_i, s);
    accumulate_gate(grad.forget_gate, da_f, s);
    accumulate_gate(grad.output_gate, da_o, s);
    accumulate_gate(grad.candidate, da_g, s);
    dh_prev.assign(n, 0.0);
    add_recurrent_transpose(p.input_gate, da_i, dh_prev);
    add_recurrent_transpose(p.forget_gate, da_f, dh_prev);
    add_recurrent_transpose(p.output_gate, da_o, dh_prev);
    add_recurrent_transpose(p.candidate, da_g, dh_prev);
}

void check_windows(const LstmParams& params, const WindowSet& windows) {
    if (windows.empty()) throw usage_error("window set is empty");
    if (windows.inputs.size() != windows.targets.size()) {
        throw usage_error("window set inputs and targets differ in length");
    }
    for (const auto& w : windows.inputs) check_input(params, w);
}

// Adds scale * d(residual^2)/d(theta) for one window into grad and returns
// the residual.
struct Workspace {
    StepCache cache;
    GateDeltas deltas;
    std::vector<double> dh_prev;
    std::vector<double> dc_prev;
    std::vector<double> zeros;

    explicit Workspace(std::size_t hidden_dim) : zeros(hidden_dim, 0.0) {}
};

double accumulate_window(const LstmParams& params, std::span<const double> x, double target,
                         double scale, LstmParams& grad, Workspace& ws) {
    forward_into(ws.cache, params, x, ws.zeros, ws.zeros, true);
    const double r = ws.cache.y - target;
    backward_step(params, ws.cache, 2.0 * r * scale, ws.zeros, ws.zeros, grad, ws.dh_prev, ws.dc_prev,
                  ws.deltas);
    return r;
}

void zero_fill(LstmParams& p) {
    for (auto& b : p.blocks()) std::fill(b.values.begin(), b.values.end(), 0.0);
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.input_gate = zero_gate(input_dim, hidden_dim);
    p.forget_gate = zero_gate(input_dim, hidden_dim);
    p.output_gate = zero_gate(input_dim, hidden_dim);
    p.candidate = zero_gate(input_dim, hidden_dim);
    p.output_weights.assign(hidden_dim, 0.0);
    p.output_bias = 0.0;
    return p;
}

namespace {

template <typename Block, typename Self>
std::array<Block, kParamBlockCount> make_blocks(Self& p) {
    const std::size_t h = p.hidden_dim;
    const std::size_t k = p.input_dim;
    auto gate = [&](auto& g, std::string_view w, std::string_view u, std::string_view b) {
        return std::array<Block, 3>{Block{w, h, k, g.input.data}, Block{u, h, h, g.recurrent.data},
                                    Block{b, 1, h, g.bias}};
    };
    const auto gi = gate(p.input_gate, "W_i", "U_i", "b_i");
    const auto gf = gate(p.forget_gate, "W_f", "U_f", "b_f");
    const auto go = gate(p.output_gate, "W_o", "U_o", "b_o");
    const auto gg = gate(p.candidate, "W_g", "U_g", "b_g");
    return {gi[0], gi[1], gi[2], gf[0], gf[1], gf[2], go[0], go[1], go[2], gg[0], gg[1], gg[2],
            Block{"w_y", 1, h, p.output_weights}, Block{"b_y", 1, 1, {&p.output_bias, 1}}};
}

}  // namespace

std::array<ParamBlock, kParamBlockCount> LstmParams::blocks() {
    return make_blocks<ParamBlock>(*this);
}

std::array<ConstParamBlock, kParamBlockCount> LstmParams::blocks() const {
    return make_blocks<ConstParamBlock>(*this);
}

std::size_t LstmParams::parameter_count() const {
    std::size_t total = 0;
    for (const auto& b : blocks()) total += b.values.size();
    return total;
}

bool LstmParams::all_finite() const {
    for (const auto& b : blocks()) {
        if (!std::all_of(b.values.begin(), b.values.end(), [](double v) { return std::isfinite(v); })) {
            return false;
        }
    }
    return true;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw usage_error("learning rate must be positive");
    }
    if (epochs < 1) throw usage_error("epochs must be at least 1");
    if (hidden_dim < 1) throw usage_error("hidden_dim must be at least 1");
    if (lag < 1 || lag > 3) throw usage_error("lag must be 1, 2 or 3");
    if (gradient_clip && !(*gradient_clip > 0.0)) throw usage_error("gradient clip must be positive");
}

LstmParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t rng_seed) {
    if (input_dim < 1 || input_dim > 3) throw usage_error("input_dim must be 1, 2 or 3");
    if (hidden_dim < 1) throw usage_error("hidden_dim must be at least 1");
    LstmParams p = LstmParams::zeros(input_dim, hidden_dim);
    Rng rng(rng_seed);
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    for (auto& block : p.blocks()) {
        if (block.name.front() == 'b') continue;
        for (double& v : block.values) v = rng.uniform(-r, r);
    }
    std::fill(p.forget_gate.bias.begin(), p.forget_gate.bias.end(), 1.0);
    return p;
}

StepOutput forward_step(const LstmParams& params, const LstmState& state,
                        std::span<const double> input) {
    check_input(params, input);
    if (state.hidden.size() != params.hidden_dim || state.cell.size() != params.hidden_dim) {
        throw usage_error("state dimension does not match hidden_dim");
    }
    StepCache s = forward_cached(params, input, state.hidden, state.cell, false);
    return {LstmState{std::move(s.h), std::move(s.c)}, s.y};
}

double predict_window(const LstmParams& params, std::span<const double> window) {
    check_input(params, window);
    const std::vector<double> zeros(params.hidden_dim, 0.0);
    return forward_cached(params, window, zeros, zeros, true).y;
}

double mse_loss(const LstmParams& params, const WindowSet& windows) {
    check_windows(params, windows);
    double sum = 0.0;
    for (std::size_t n = 0; n < windows.size(); ++n) {
        const double r = predict_window(params, windows.inputs[n]) - windows.targets[n];
        sum += r * r;
    }
    return sum / static_cast<double>(windows.size());
}

Gradients bptt_gradients(const LstmParams& params, const WindowSet& windows) {
    check_windows(params, windows);
    const std::size_t h = params.hidden_dim;
    const double count = static_cast<double>(windows.size());
    Gradients out{LstmParams::zeros(params.input_dim, h), 0.0};
    Workspace ws(h);
    double sum = 0.0;
    for (std::size_t n = 0; n < windows.size(); ++n) {
        const double r = accumulate_window(params, windows.inputs[n], windows.targets[n], 1.0 / count,
                                           out.grad, ws);
        sum += r * r;
    }
    out.loss = sum / count;
    return out;
}

double sequence_loss(const LstmParams& params, std::span<const std::vector<double>> inputs,
                     std::span<const double> targets) {
    if (inputs.empty() || inputs.size() != targets.size()) {
        throw usage_error("sequence inputs and targets must be non-empty and equal in length");
    }
    LstmState state = LstmState::zero(params.hidden_dim);
    double sum = 0.0;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        auto step = forward_step(params, state, inputs[t]);
        const double r = step.prediction - targets[t];
        sum += r * r;
        state = std::move(step.state);
    }
    return sum / static_cast<double>(inputs.size());
}

Gradients bptt_sequence(const LstmParams& params, std::span<const std::vector<double>> inputs,
                        std::span<const double> targets) {
    if (inputs.empty() || inputs.size() != targets.size()) {
        throw usage_error("sequence inputs and targets must be non-empty and equal in length");
    }
    for (const auto& x : inputs) check_input(params, x);
    const std::size_t h = params.hidden_dim;
    const double count = static_cast<double>(inputs.size());

    std::vector<StepCache> caches;
    caches.reserve(inputs.size());
    std::vector<double> h_prev(h, 0.0), c_prev(h, 0.0);
    double sum = 0.0;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        caches.push_back(forward_cached(params, inputs[t], h_prev, c_prev, false));
        const auto& s = caches.back();
        const double r = s.y - targets[t];
        sum += r * r;
        h_prev = s.h;
        c_prev = s.c;
    }

    Gradients out{LstmParams::zeros(params.input_dim, h), sum / count};
    std::vector<double> dh_next(h, 0.0), dc_next(h, 0.0), dh_prev, dc_prev;
    GateDeltas deltas;
    for (std::size_t t = inputs.size(); t-- > 0;) {
        const double dy = 2.0 * (caches[t].y - targets[t]) / count;
        backward_step(params, caches[t], dy, dh_next, dc_next, out.grad, dh_prev, dc_prev, deltas);
        dh_next.swap(dh_prev);
        dc_next.swap(dc_prev);
    }
    return out;
}

LstmParams finite_difference_gradient(const LstmParams& params, const WindowSet& windows,
                                      double epsilon) {
    if (!(epsilon > 0.0)) throw usage_error("finite-difference epsilon must be positive");
    check_windows(params, windows);
    LstmParams probe = params;
    LstmParams grad = LstmParams::zeros(params.input_dim, params.hidden_dim);
    auto probe_blocks = probe.blocks();
    auto grad_blocks = grad.blocks();
    for (std::size_t b = 0; b < kParamBlockCount; ++b) {
        auto values = probe_blocks[b].values;
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double saved = values[j];
            values[j] = saved + epsilon;
            const double up = mse_loss(probe, windows);
            values[j] = saved - epsilon;
            const double down = mse_loss(probe, windows);
            values[j] = saved;
            grad_blocks[b].values[j] = (up - down) / (2.0 * epsilon);
        }
    }
    return grad;
}

void gradient_descent_step(LstmParams& params, const LstmParams& grad, double learning_rate,
                           std::optional<double> clip) {
    if (params.input_dim != grad.input_dim || params.hidden_dim != grad.hidden_dim) {
        throw usage_error("gradient shape does not match parameters");
    }
    auto params_blocks = params.blocks();
    const auto grad_blocks = grad.blocks();
    for (std::size_t b = 0; b < kParamBlockCount; ++b) {
        auto values = params_blocks[b].values;
        const auto grads = grad_blocks[b].values;
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double d = clip ? std::clamp(grads[j], -*clip, *clip) : grads[j];
            values[j] -= learning_rate * d;
        }
    }
}

namespace {

void check_finite(const LstmParams& params, std::size_t epoch) {
    if (!params.all_finite()) {
        throw divergence_error(epoch, "training diverged: non-finite parameter at epoch " +
                                          std::to_string(epoch));
    }
}

void check_finite_loss(double loss, std::size_t epoch) {
    if (!std::isfinite(loss)) {
        throw divergence_error(epoch, "training diverged: non-finite loss at epoch " +
                                          std::to_string(epoch));
    }
}

// Per-window updates. Recurrent blocks are skipped: from the zero state their
// gradient is exactly zero, so the update would leave them unchanged.
double per_step_epoch(const TrainConfig& config, const WindowSet& windows, LstmParams& params,
                      LstmParams& grad) {
    Workspace ws(params.hidden_dim);
    double sum = 0.0;
    for (std::size_t n = 0; n < windows.size(); ++n) {
        zero_fill(grad);
        const double r = accumulate_window(params, windows.inputs[n], windows.targets[n], 1.0, grad, ws);
        sum += r * r;
        auto params_blocks = params.blocks();
        const auto grad_blocks = std::as_const(grad).blocks();
        for (std::size_t b = 0; b < kParamBlockCount; ++b) {
            if (params_blocks[b].name.starts_with("U_")) continue;
            auto values = params_blocks[b].values;
            const auto grads = grad_blocks[b].values;
            for (std::size_t j = 0; j < values.size(); ++j) {
                const double d = config.gradient_clip
                                     ? std::clamp(grads[j], -*config.gradient_clip, *config.gradient_clip)
                                     : grads[j];
                values[j] -= config.learning_rate * d;
            }
        }
    }
    return sum / static_cast<double>(windows.size());
}

}  // namespace

TrainResult train(const TrainConfig& config, const WindowSet& windows) {
    config.validate();
    if (windows.lag != config.lag) {
        throw usage_error("window set lag " + std::to_string(windows.lag) +
                          " does not match configured lag " + std::to_string(config.lag));
    }
    const auto started = std::chrono::steady_clock::now();
    TrainResult result{init_params(config.lag, config.hidden_dim, config.rng_seed), {}};
    check_windows(result.params, windows);
    result.report.epoch_loss.reserve(config.epochs);
    LstmParams grad = LstmParams::zeros(config.lag, config.hidden_dim);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        double loss = 0.0;
        if (config.regime == TrainRegime::per_step) {
            loss = per_step_epoch(config, windows, result.params, grad);
            check_finite_loss(loss, epoch);
        } else {
            Gradients g = bptt_gradients(result.params, windows);
            loss = g.loss;
            check_finite_loss(loss, epoch);
            gradient_descent_step(result.params, g.grad, config.learning_rate, config.gradient_clip);
        }
        result.report.epoch_loss.push_back(loss);
        check_finite(result.params, epoch);
    }
    result.report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace cld
