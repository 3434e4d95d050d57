#include "autovc/nn.hpp"

#include <cmath>

#include "autovc/errors.hpp"

namespace autovc::nn {

using ag::Var;

void Parameter::init_uniform_fan_in(long rows, long cols, long fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    value.resize(rows, cols);
    for (long j = 0; j < cols; ++j)
        for (long i = 0; i < rows; ++i)
            value(i, j) = static_cast<float>(rng.uniform(-bound, bound));
    adam_m.resize(0, 0);
    adam_v.resize(0, 0);
}

void Parameter::init_zero(long rows, long cols) {
    value = Eigen::MatrixXf::Zero(rows, cols);
    adam_m.resize(0, 0);
    adam_v.resize(0, 0);
}

Var Binding::var(Parameter& p) {
    auto it = bound_.find(&p);
    if (it != bound_.end()) return it->second;
    Var v = graph_->leaf(p.value.cast<double>(), true);
    bound_.emplace(&p, v);
    return v;
}

Eigen::MatrixXd Binding::grad(const Parameter& p) {
    auto it = bound_.find(&p);
    if (it == bound_.end())
        return Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols());
    return graph_->grad(it->second);
}

void adam_step(const std::vector<Parameter*>& params, Binding& binding,
               const AdamConfig& cfg, long t) {
    if (t < 1) throw ArgumentError("adam_step: update count must be >= 1");
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (Parameter* p : params) {
        const Eigen::MatrixXd g = binding.grad(*p);
        if (p->adam_m.size() == 0) {
            p->adam_m = Eigen::MatrixXf::Zero(p->value.rows(), p->value.cols());
            p->adam_v = Eigen::MatrixXf::Zero(p->value.rows(), p->value.cols());
        }
        for (long j = 0; j < p->value.cols(); ++j)
            for (long i = 0; i < p->value.rows(); ++i) {
                const double gi = g(i, j);
                const double m = cfg.beta1 * p->adam_m(i, j) + (1.0 - cfg.beta1) * gi;
                const double v = cfg.beta2 * p->adam_v(i, j) + (1.0 - cfg.beta2) * gi * gi;
                p->adam_m(i, j) = static_cast<float>(m);
                p->adam_v(i, j) = static_cast<float>(v);
                const double update =
                    cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
                p->value(i, j) = static_cast<float>(p->value(i, j) - update);
            }
    }
}

// ---- Linear ----

Linear::Linear(const std::string& name, long in, long out, Rng& rng) {
    weight.name = name + ".weight";
    weight.init_uniform_fan_in(out, in, in, rng);
    bias.name = name + ".bias";
    bias.init_zero(out, 1);
}

Var Linear::forward(Binding& ctx, Var x) {
    return ag::add_col_broadcast(ag::matmul(ctx.var(weight), x), ctx.var(bias));
}

std::vector<Parameter*> Linear::parameters() { return {&weight, &bias}; }

// ---- Conv1d ----

Conv1d::Conv1d(const std::string& name, long in_ch, long out_ch, int kernel_, Rng& rng)
    : kernel(kernel_), in_channels(in_ch) {
    if (kernel < 1 || kernel % 2 == 0)
        throw ArgumentError("Conv1d: kernel width must be odd");
    weight.name = name + ".weight";
    weight.init_uniform_fan_in(out_ch, in_ch * kernel, in_ch * kernel, rng);
    bias.name = name + ".bias";
    bias.init_zero(out_ch, 1);
}

Var Conv1d::forward(Binding& ctx, Var x) {
    if (x.rows() != in_channels) throw ArgumentError("Conv1d: channel mismatch");
    Var unrolled = kernel == 1 ? x : ag::im2col(x, kernel);
    return ag::add_col_broadcast(ag::matmul(ctx.var(weight), unrolled), ctx.var(bias));
}

std::vector<Parameter*> Conv1d::parameters() { return {&weight, &bias}; }

void Conv1d::zero_init() {
    weight.value.setZero();
    bias.value.setZero();
}

// ---- BatchNorm1d ----

BatchNorm1d::BatchNorm1d(const std::string& name_, long channels) : name(name_) {
    gamma.name = name + ".gamma";
    gamma.value = Eigen::MatrixXf::Ones(channels, 1);
    beta.name = name + ".beta";
    beta.init_zero(channels, 1);
    running_mean = Eigen::MatrixXf::Zero(channels, 1);
    running_var = Eigen::MatrixXf::Ones(channels, 1);
}

Var BatchNorm1d::forward(Binding& ctx, Var x) {
    if (ctx.train_mode()) {
        auto result = ag::batchnorm_train(x, ctx.var(gamma), ctx.var(beta));
        running_mean = ((1.0 - momentum) * running_mean.cast<double>().array() +
                        momentum * result.batch_mean.array())
                           .cast<float>();
        running_var = ((1.0 - momentum) * running_var.cast<double>().array() +
                       momentum * result.batch_var.array())
                          .cast<float>();
        return result.y;
    }
    return ag::batchnorm_eval(x, ctx.var(gamma), ctx.var(beta),
                              running_mean.col(0).cast<double>(),
                              running_var.col(0).cast<double>());
}

std::vector<Parameter*> BatchNorm1d::parameters() { return {&gamma, &beta}; }

std::vector<StateBlock> BatchNorm1d::state() {
    return {{name + ".running_mean", &running_mean},
            {name + ".running_var", &running_var}};
}

// ---- Lstm ----

Lstm::Lstm(const std::string& name, long in, long cell, Rng& rng) : cell_size(cell) {
    w_input.name = name + ".w_input";
    w_input.init_uniform_fan_in(4 * cell, in, in, rng);
    w_hidden.name = name + ".w_hidden";
    w_hidden.init_uniform_fan_in(4 * cell, cell, cell, rng);
    bias.name = name + ".bias";
    bias.init_zero(4 * cell, 1);
    // Forget gate starts open.
    for (long i = cell; i < 2 * cell; ++i) bias.value(i, 0) = 1.0f;
}

std::vector<Var> Lstm::run(Binding& ctx, const std::vector<Var>& inputs) {
    if (inputs.empty()) throw ArgumentError("Lstm: empty input sequence");
    ag::Graph& g = ctx.graph();
    const long batch = inputs.front().cols();
    Var wx = ctx.var(w_input);
    Var wh = ctx.var(w_hidden);
    Var b = ctx.var(bias);
    Var h = g.leaf(Eigen::MatrixXd::Zero(cell_size, batch));
    Var c = g.leaf(Eigen::MatrixXd::Zero(cell_size, batch));

    std::vector<Var> outputs;
    outputs.reserve(inputs.size());
    for (const Var& x : inputs) {
        Var pre = ag::add_col_broadcast(ag::add(ag::matmul(wx, x), ag::matmul(wh, h)), b);
        Var gate_i = ag::sigmoid(ag::slice_rows(pre, 0, cell_size));
        Var gate_f = ag::sigmoid(ag::slice_rows(pre, cell_size, cell_size));
        Var gate_g = ag::tanh_op(ag::slice_rows(pre, 2 * cell_size, cell_size));
        Var gate_o = ag::sigmoid(ag::slice_rows(pre, 3 * cell_size, cell_size));
        c = ag::add(ag::mul(gate_f, c), ag::mul(gate_i, gate_g));
        h = ag::mul(gate_o, ag::tanh_op(c));
        outputs.push_back(h);
    }
    return outputs;
}

std::vector<Parameter*> Lstm::parameters() { return {&w_input, &w_hidden, &bias}; }

std::vector<Var> split_cols(Var x) {
    std::vector<Var> cols;
    cols.reserve(x.cols());
    for (long j = 0; j < x.cols(); ++j) cols.push_back(ag::select_cols(x, {j}));
    return cols;
}

Var stack_cols(const std::vector<Var>& cols) { return ag::concat_cols(cols); }

}  // namespace autovc::nn
