#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace autovc::ag {

using Matrix = Eigen::MatrixXd;

class Graph;

/// Handle to a node in a Graph tape. Cheap to copy; valid as long as the
/// graph lives.
struct Var {
    Graph* graph = nullptr;
    int id = -1;

    const Matrix& value() const;
    long rows() const { return value().rows(); }
    long cols() const { return value().cols(); }
    double scalar() const { return value()(0, 0); }
};

/// Reverse-mode tape. Nodes are appended in topological order by the op
/// builders below; backward() walks the tape once in reverse.
class Graph {
public:
    Graph() { nodes_.reserve(1024); }
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var leaf(Matrix value, bool requires_grad = false);
    Var scalar(double v, bool requires_grad = false);

    const Matrix& value(const Var& v) const { return nodes_[v.id].value; }

    /// Gradient of the last backward() target w.r.t. v. Zero matrix if the
    /// node was never touched.
    const Matrix& grad(const Var& v);

    /// Runs backpropagation from a 1x1 loss node.
    void backward(const Var& loss);

    std::size_t size() const { return nodes_.size(); }

    // --- internals shared with the op builders ---
    int next_id() const { return static_cast<int>(nodes_.size()); }
    Var make_node(Matrix value, bool requires_grad, std::function<void()> backprop);
    void accumulate(int id, const Matrix& delta);
    bool needs_grad(const Var& v) const { return nodes_[v.id].requires_grad; }
    const Matrix& value_ref(int id) const { return nodes_[id].value; }
    const Matrix& grad_ref(int id) const { return nodes_[id].grad; }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        bool grad_live = false;
        std::function<void()> backprop;
    };
    std::vector<Node> nodes_;
    Matrix zero_;
};

inline const Matrix& Var::value() const { return graph->value(*this); }

// ---- elementwise / arithmetic ----
Var add(Var a, Var b);       // same shape, or either side 1x1 (broadcast)
Var sub(Var a, Var b);       // same shape, or either side 1x1
Var mul(Var a, Var b);       // elementwise; same shape, or either side 1x1
Var scale(Var a, double c);
Var add_const(Var a, double c);
Var powc(Var a, double p);   // elementwise a^p, p constant
Var relu(Var a);
Var tanh_op(Var a);
Var sigmoid(Var a);
Var softplus(Var a);
Var abs_op(Var a);
Var exp_op(Var a);
Var log_op(Var a);

// ---- linear algebra / shaping ----
Var matmul(Var a, Var b);
Var dot(Var a, Var b);                        // column vectors -> 1x1
Var add_col_broadcast(Var a, Var v);          // v: rows x 1, added to each column
Var mul_col_broadcast(Var a, Var v);          // v: rows x 1, scales each row
Var concat_rows(const std::vector<Var>& parts);
Var concat_cols(const std::vector<Var>& parts);
Var slice_rows(Var a, long r0, long n);
Var select_cols(Var a, std::vector<long> idx);  // gather; backward scatter-adds
Var transpose(Var a);

// ---- reductions ----
Var sum(Var a);    // 1x1
Var mean(Var a);   // 1x1
Var logsumexp_colwise(Var a);  // 1 x cols, max-shifted

// ---- structured ops ----
/// Unrolls a (C x T) sequence into a (C*k x T) matrix of zero-padded windows
/// (window offset-major, channel-minor); matmul against it is a same-padded
/// 1-D convolution with odd kernel width k.
Var im2col(Var x, int kernel);

/// Stops gradient flow: value copied into a fresh constant leaf.
Var detach(Var a);

/// Batch normalization over the time (column) axis in training mode.
/// gamma/beta are rows x 1. batch_mean/batch_var report the statistics used
/// so the caller can maintain running estimates.
struct BatchNormResult {
    Var y;
    Eigen::VectorXd batch_mean;
    Eigen::VectorXd batch_var;
};
BatchNormResult batchnorm_train(Var x, Var gamma, Var beta, double eps = 1e-5);

/// Evaluation-mode batch normalization with frozen statistics.
Var batchnorm_eval(Var x, Var gamma, Var beta, const Eigen::VectorXd& mean,
                   const Eigen::VectorXd& var, double eps = 1e-5);

}  // namespace autovc::ag
