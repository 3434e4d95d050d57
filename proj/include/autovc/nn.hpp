#pragma once

#include <Eigen/Core>
#include <string>
#include <unordered_map>
#include <vector>

#include "autovc/autodiff.hpp"
#include "autovc/rng.hpp"

namespace autovc::nn {

/// Master copy of a trainable tensor. Stored in float32 (the checkpoint
/// format) while all graph math runs in double; Adam moments live here too.
struct Parameter {
    std::string name;
    Eigen::MatrixXf value;
    Eigen::MatrixXf adam_m;
    Eigen::MatrixXf adam_v;

    void init_uniform_fan_in(long rows, long cols, long fan_in, Rng& rng);
    void init_zero(long rows, long cols);
};

/// Non-trainable float state that still belongs in checkpoints
/// (batch-norm running statistics).
struct StateBlock {
    std::string name;
    Eigen::MatrixXf* data;
};

/// Per-graph binding of Parameters to leaf nodes. A parameter used several
/// times in one graph gets a single leaf, so its gradient accumulates.
class Binding {
public:
    explicit Binding(ag::Graph& graph, bool train_mode)
        : graph_(&graph), train_(train_mode) {}

    ag::Graph& graph() { return *graph_; }
    bool train_mode() const { return train_; }

    ag::Var var(Parameter& p);

    /// Gradient of the bound leaf (zeros if the parameter was never bound).
    Eigen::MatrixXd grad(const Parameter& p);

private:
    ag::Graph* graph_;
    bool train_;
    std::unordered_map<const Parameter*, ag::Var> bound_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One Adam update over a parameter list. `t` is the 1-based update count
/// used for bias correction; the caller owns and checkpoints it.
void adam_step(const std::vector<Parameter*>& params, Binding& binding,
               const AdamConfig& cfg, long t);

// ---- layers ----

class Linear {
public:
    Linear() = default;
    Linear(const std::string& name, long in, long out, Rng& rng);
    ag::Var forward(Binding& ctx, ag::Var x);
    std::vector<Parameter*> parameters();

    Parameter weight, bias;
};

/// Same-padded 1-D convolution along the time axis; kernel width must be odd.
class Conv1d {
public:
    Conv1d() = default;
    Conv1d(const std::string& name, long in_ch, long out_ch, int kernel, Rng& rng);
    ag::Var forward(Binding& ctx, ag::Var x);
    std::vector<Parameter*> parameters();
    void zero_init();

    Parameter weight, bias;
    int kernel = 1;
    long in_channels = 0;
};

class BatchNorm1d {
public:
    BatchNorm1d() = default;
    explicit BatchNorm1d(const std::string& name, long channels);
    ag::Var forward(Binding& ctx, ag::Var x);
    std::vector<Parameter*> parameters();
    std::vector<StateBlock> state();

    Parameter gamma, beta;
    Eigen::MatrixXf running_mean;  // channels x 1
    Eigen::MatrixXf running_var;   // channels x 1
    double momentum = 0.1;
    std::string name;
};

/// Single-direction LSTM. Gate rows are ordered [input, forget, cell, output];
/// the forget-gate bias starts at 1.
class Lstm {
public:
    Lstm() = default;
    Lstm(const std::string& name, long in, long cell, Rng& rng);

    /// inputs[t] is (in x batch); returns hidden state per step (cell x batch).
    std::vector<ag::Var> run(Binding& ctx, const std::vector<ag::Var>& inputs);
    std::vector<Parameter*> parameters();

    Parameter w_input, w_hidden, bias;
    long cell_size = 0;
};

/// Splits a (C x T) node into T column vars.
std::vector<ag::Var> split_cols(ag::Var x);

/// Stacks per-step columns back into a (C x T) node.
ag::Var stack_cols(const std::vector<ag::Var>& cols);

}  // namespace autovc::nn
