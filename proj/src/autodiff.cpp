#include "autovc/autodiff.hpp"

#include <cmath>

#include "autovc/errors.hpp"

namespace autovc::ag {

namespace {

void check_same_graph(const Var& a, const Var& b) {
    if (a.graph != b.graph)
        throw ArgumentError("autodiff: operands belong to different graphs");
}

bool scalar_shaped(const Matrix& m) { return m.rows() == 1 && m.cols() == 1; }

void check_binary_shapes(const Matrix& a, const Matrix& b, const char* op) {
    if (scalar_shaped(a) || scalar_shaped(b)) return;
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ArgumentError(std::string(op) + ": shape mismatch");
}

Matrix broadcast_to(const Matrix& m, long rows, long cols) {
    if (m.rows() == rows && m.cols() == cols) return m;
    return Matrix::Constant(rows, cols, m(0, 0));
}

// Collapse a full-shape gradient back onto a 1x1 operand if needed.
Matrix reduce_onto(const Matrix& operand_value, const Matrix& g) {
    if (scalar_shaped(operand_value) && !scalar_shaped(g)) {
        Matrix r(1, 1);
        r(0, 0) = g.sum();
        return r;
    }
    return g;
}

// Unary elementwise op: value = f(a), backward factor = df(a, value).
template <typename FwdFn, typename GradFn>
Var unary_op(Var a, FwdFn&& fwd, GradFn&& dfn) {
    Graph& g = *a.graph;
    Matrix out = fwd(a.value());
    const bool needs = g.needs_grad(a);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id;
        bp = [gp, aid, out_id, dfn]() {
            const Matrix& go = gp->grad_ref(out_id);
            gp->accumulate(aid,
                           (go.array() * dfn(gp->value_ref(aid), gp->value_ref(out_id)).array())
                               .matrix());
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

}  // namespace

Var Graph::leaf(Matrix value, bool requires_grad) {
    return make_node(std::move(value), requires_grad, nullptr);
}

Var Graph::scalar(double v, bool requires_grad) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return leaf(std::move(m), requires_grad);
}

Var Graph::make_node(Matrix value, bool requires_grad, std::function<void()> backprop) {
    Node node;
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    node.backprop = std::move(backprop);
    nodes_.push_back(std::move(node));
    return Var{this, static_cast<int>(nodes_.size() - 1)};
}

void Graph::accumulate(int id, const Matrix& delta) {
    Node& node = nodes_[id];
    if (!node.requires_grad) return;
    if (!node.grad_live) {
        node.grad = delta;
        node.grad_live = true;
    } else {
        node.grad += delta;
    }
}

const Matrix& Graph::grad(const Var& v) {
    Node& node = nodes_[v.id];
    if (!node.grad_live) {
        zero_ = Matrix::Zero(node.value.rows(), node.value.cols());
        return zero_;
    }
    return node.grad;
}

void Graph::backward(const Var& loss) {
    if (loss.rows() != 1 || loss.cols() != 1)
        throw ArgumentError("backward: loss must be a 1x1 node");
    for (auto& node : nodes_) node.grad_live = false;
    accumulate(loss.id, Matrix::Ones(1, 1));
    for (int i = loss.id; i >= 0; --i) {
        Node& node = nodes_[i];
        if (node.grad_live && node.backprop) node.backprop();
    }
}

// ---- binary arithmetic ----

Var add(Var a, Var b) {
    check_same_graph(a, b);
    check_binary_shapes(a.value(), b.value(), "add");
    Graph& g = *a.graph;
    const long r = std::max(a.rows(), b.rows()), c = std::max(a.cols(), b.cols());
    Matrix out = broadcast_to(a.value(), r, c) + broadcast_to(b.value(), r, c);
    const bool needs = g.needs_grad(a) || g.needs_grad(b);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id, bid = b.id;
        bp = [gp, aid, bid, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            gp->accumulate(aid, reduce_onto(gp->value_ref(aid), go));
            gp->accumulate(bid, reduce_onto(gp->value_ref(bid), go));
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var sub(Var a, Var b) {
    check_same_graph(a, b);
    check_binary_shapes(a.value(), b.value(), "sub");
    Graph& g = *a.graph;
    const long r = std::max(a.rows(), b.rows()), c = std::max(a.cols(), b.cols());
    Matrix out = broadcast_to(a.value(), r, c) - broadcast_to(b.value(), r, c);
    const bool needs = g.needs_grad(a) || g.needs_grad(b);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id, bid = b.id;
        bp = [gp, aid, bid, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            gp->accumulate(aid, reduce_onto(gp->value_ref(aid), go));
            gp->accumulate(bid, reduce_onto(gp->value_ref(bid), -go));
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var mul(Var a, Var b) {
    check_same_graph(a, b);
    check_binary_shapes(a.value(), b.value(), "mul");
    Graph& g = *a.graph;
    const long r = std::max(a.rows(), b.rows()), c = std::max(a.cols(), b.cols());
    Matrix out = broadcast_to(a.value(), r, c).cwiseProduct(broadcast_to(b.value(), r, c));
    const bool needs = g.needs_grad(a) || g.needs_grad(b);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id, bid = b.id;
        long rr = r, cc = c;
        bp = [gp, aid, bid, out_id, rr, cc]() {
            const Matrix& go = gp->grad_ref(out_id);
            const Matrix& av = gp->value_ref(aid);
            const Matrix& bv = gp->value_ref(bid);
            gp->accumulate(aid,
                           reduce_onto(av, go.cwiseProduct(broadcast_to(bv, rr, cc))));
            gp->accumulate(bid,
                           reduce_onto(bv, go.cwiseProduct(broadcast_to(av, rr, cc))));
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var scale(Var a, double c) {
    return unary_op(
        a, [c](const Matrix& x) { return Matrix(c * x); },
        [c](const Matrix& x, const Matrix&) {
            return Matrix(Matrix::Constant(x.rows(), x.cols(), c));
        });
}

Var add_const(Var a, double c) {
    return unary_op(
        a, [c](const Matrix& x) { return Matrix(x.array() + c); },
        [](const Matrix& x, const Matrix&) {
            return Matrix(Matrix::Ones(x.rows(), x.cols()));
        });
}

Var powc(Var a, double p) {
    return unary_op(
        a, [p](const Matrix& x) { return Matrix(x.array().pow(p)); },
        [p](const Matrix& x, const Matrix&) {
            return Matrix(p * x.array().pow(p - 1.0));
        });
}

Var relu(Var a) {
    return unary_op(
        a, [](const Matrix& x) { return Matrix(x.cwiseMax(0.0)); },
        [](const Matrix& x, const Matrix&) {
            return Matrix((x.array() > 0.0).cast<double>());
        });
}

Var tanh_op(Var a) {
    return unary_op(
        a, [](const Matrix& x) { return Matrix(x.array().tanh()); },
        [](const Matrix&, const Matrix& y) { return Matrix(1.0 - y.array().square()); });
}

Var sigmoid(Var a) {
    return unary_op(
        a,
        [](const Matrix& x) { return Matrix((1.0 / (1.0 + (-x.array()).exp())).matrix()); },
        [](const Matrix&, const Matrix& y) { return Matrix(y.array() * (1.0 - y.array())); });
}

Var softplus(Var a) {
    return unary_op(
        a,
        [](const Matrix& x) {
            // max(x,0) + log1p(exp(-|x|)) avoids overflow.
            return Matrix(x.array().max(0.0) + (1.0 + (-x.array().abs()).exp()).log());
        },
        [](const Matrix& x, const Matrix&) {
            return Matrix((1.0 / (1.0 + (-x.array()).exp())).matrix());
        });
}

Var abs_op(Var a) {
    return unary_op(
        a, [](const Matrix& x) { return Matrix(x.cwiseAbs()); },
        [](const Matrix& x, const Matrix&) { return Matrix(x.array().sign()); });
}

Var exp_op(Var a) {
    return unary_op(
        a, [](const Matrix& x) { return Matrix(x.array().exp()); },
        [](const Matrix&, const Matrix& y) { return y; });
}

Var log_op(Var a) {
    return unary_op(
        a, [](const Matrix& x) { return Matrix(x.array().log()); },
        [](const Matrix& x, const Matrix&) { return Matrix(x.cwiseInverse()); });
}

// ---- linear algebra / shaping ----

Var matmul(Var a, Var b) {
    check_same_graph(a, b);
    if (a.cols() != b.rows()) throw ArgumentError("matmul: inner dimension mismatch");
    Graph& g = *a.graph;
    Matrix out = a.value() * b.value();
    const bool needs = g.needs_grad(a) || g.needs_grad(b);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id, bid = b.id;
        bp = [gp, aid, bid, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            gp->accumulate(aid, go * gp->value_ref(bid).transpose());
            gp->accumulate(bid, gp->value_ref(aid).transpose() * go);
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var dot(Var a, Var b) {
    check_same_graph(a, b);
    if (a.cols() != 1 || b.cols() != 1 || a.rows() != b.rows())
        throw ArgumentError("dot: needs equal-length column vectors");
    Graph& g = *a.graph;
    Matrix out(1, 1);
    out(0, 0) = a.value().col(0).dot(b.value().col(0));
    const bool needs = g.needs_grad(a) || g.needs_grad(b);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id, bid = b.id;
        bp = [gp, aid, bid, out_id]() {
            const double go = gp->grad_ref(out_id)(0, 0);
            gp->accumulate(aid, go * gp->value_ref(bid));
            gp->accumulate(bid, go * gp->value_ref(aid));
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var add_col_broadcast(Var a, Var v) {
    check_same_graph(a, v);
    if (v.cols() != 1 || v.rows() != a.rows())
        throw ArgumentError("add_col_broadcast: bias must be rows x 1");
    Graph& g = *a.graph;
    Matrix out = a.value().colwise() + Eigen::VectorXd(v.value().col(0));
    const bool needs = g.needs_grad(a) || g.needs_grad(v);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id, vid = v.id;
        bp = [gp, aid, vid, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            gp->accumulate(aid, go);
            gp->accumulate(vid, go.rowwise().sum());
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var mul_col_broadcast(Var a, Var v) {
    check_same_graph(a, v);
    if (v.cols() != 1 || v.rows() != a.rows())
        throw ArgumentError("mul_col_broadcast: scale must be rows x 1");
    Graph& g = *a.graph;
    Matrix out = a.value().array().colwise() * v.value().col(0).array();
    const bool needs = g.needs_grad(a) || g.needs_grad(v);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id, vid = v.id;
        bp = [gp, aid, vid, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            const Matrix& av = gp->value_ref(aid);
            const Matrix& vv = gp->value_ref(vid);
            gp->accumulate(aid, (go.array().colwise() * vv.col(0).array()).matrix());
            gp->accumulate(vid, go.cwiseProduct(av).rowwise().sum());
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw ArgumentError("concat_rows: no parts");
    Graph& g = *parts.front().graph;
    long rows = 0;
    const long cols = parts.front().cols();
    bool needs = false;
    for (const auto& p : parts) {
        check_same_graph(parts.front(), p);
        if (p.cols() != cols) throw ArgumentError("concat_rows: column mismatch");
        rows += p.rows();
        needs = needs || g.needs_grad(p);
    }
    Matrix out(rows, cols);
    long r = 0;
    std::vector<std::pair<int, long>> layout;  // (id, r0)
    for (const auto& p : parts) {
        out.middleRows(r, p.rows()) = p.value();
        layout.emplace_back(p.id, r);
        r += p.rows();
    }
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        bp = [gp, layout, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            for (const auto& [id, r0] : layout) {
                const long n = gp->value_ref(id).rows();
                gp->accumulate(id, go.middleRows(r0, n));
            }
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ArgumentError("concat_cols: no parts");
    Graph& g = *parts.front().graph;
    long cols = 0;
    const long rows = parts.front().rows();
    bool needs = false;
    for (const auto& p : parts) {
        check_same_graph(parts.front(), p);
        if (p.rows() != rows) throw ArgumentError("concat_cols: row mismatch");
        cols += p.cols();
        needs = needs || g.needs_grad(p);
    }
    Matrix out(rows, cols);
    long c = 0;
    std::vector<std::pair<int, long>> layout;
    for (const auto& p : parts) {
        out.middleCols(c, p.cols()) = p.value();
        layout.emplace_back(p.id, c);
        c += p.cols();
    }
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        bp = [gp, layout, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            for (const auto& [id, c0] : layout) {
                const long n = gp->value_ref(id).cols();
                gp->accumulate(id, go.middleCols(c0, n));
            }
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var slice_rows(Var a, long r0, long n) {
    if (r0 < 0 || n < 1 || r0 + n > a.rows())
        throw ArgumentError("slice_rows: range out of bounds");
    Graph& g = *a.graph;
    Matrix out = a.value().middleRows(r0, n);
    const bool needs = g.needs_grad(a);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id;
        bp = [gp, aid, r0, n, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            const Matrix& av = gp->value_ref(aid);
            Matrix ga = Matrix::Zero(av.rows(), av.cols());
            ga.middleRows(r0, n) = go;
            gp->accumulate(aid, ga);
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var select_cols(Var a, std::vector<long> idx) {
    Graph& g = *a.graph;
    for (long i : idx)
        if (i < 0 || i >= a.cols()) throw ArgumentError("select_cols: index out of range");
    Matrix out(a.rows(), static_cast<long>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = a.value().col(idx[j]);
    const bool needs = g.needs_grad(a);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id;
        bp = [gp, aid, idx, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            const Matrix& av = gp->value_ref(aid);
            Matrix ga = Matrix::Zero(av.rows(), av.cols());
            for (std::size_t j = 0; j < idx.size(); ++j) ga.col(idx[j]) += go.col(j);
            gp->accumulate(aid, ga);
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var transpose(Var a) {
    Graph& g = *a.graph;
    Matrix out = a.value().transpose();
    const bool needs = g.needs_grad(a);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id;
        bp = [gp, aid, out_id]() {
            gp->accumulate(aid, gp->grad_ref(out_id).transpose());
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

// ---- reductions ----

Var sum(Var a) {
    Graph& g = *a.graph;
    Matrix out(1, 1);
    out(0, 0) = a.value().sum();
    const bool needs = g.needs_grad(a);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id;
        bp = [gp, aid, out_id]() {
            const double go = gp->grad_ref(out_id)(0, 0);
            const Matrix& av = gp->value_ref(aid);
            gp->accumulate(aid, Matrix::Constant(av.rows(), av.cols(), go));
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var mean(Var a) {
    const double n = static_cast<double>(a.rows() * a.cols());
    return scale(sum(a), 1.0 / n);
}

Var logsumexp_colwise(Var a) {
    Graph& g = *a.graph;
    Matrix out(1, a.cols());
    for (long j = 0; j < a.cols(); ++j) {
        const double m = a.value().col(j).maxCoeff();
        out(0, j) = m + std::log((a.value().col(j).array() - m).exp().sum());
    }
    const bool needs = g.needs_grad(a);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int aid = a.id;
        bp = [gp, aid, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            const Matrix& av = gp->value_ref(aid);
            const Matrix& lse = gp->value_ref(out_id);
            Matrix ga(av.rows(), av.cols());
            for (long j = 0; j < av.cols(); ++j)
                ga.col(j) = go(0, j) * (av.col(j).array() - lse(0, j)).exp().matrix();
            gp->accumulate(aid, ga);
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

// ---- structured ops ----

Var im2col(Var x, int kernel) {
    if (kernel < 1 || kernel % 2 == 0) throw ArgumentError("im2col: kernel must be odd");
    Graph& g = *x.graph;
    const long C = x.rows(), T = x.cols();
    const int half = kernel / 2;
    Matrix out = Matrix::Zero(C * kernel, T);
    for (int o = 0; o < kernel; ++o) {
        const long shift = o - half;
        const long src0 = std::max<long>(0, -shift);
        const long src1 = std::min<long>(T, T - shift);
        if (src1 <= src0) continue;
        // out block rows [o*C, o*C+C), col j holds x col (j + shift)
        out.block(o * C, src0, C, src1 - src0) =
            x.value().middleCols(src0 + shift, src1 - src0);
    }
    const bool needs = g.needs_grad(x);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int xid = x.id;
        bp = [gp, xid, kernel, C, T, half, out_id]() {
            const Matrix& go = gp->grad_ref(out_id);
            Matrix gx = Matrix::Zero(C, T);
            for (int o = 0; o < kernel; ++o) {
                const long shift = o - half;
                const long src0 = std::max<long>(0, -shift);
                const long src1 = std::min<long>(T, T - shift);
                if (src1 <= src0) continue;
                gx.middleCols(src0 + shift, src1 - src0) +=
                    go.block(o * C, src0, C, src1 - src0);
            }
            gp->accumulate(xid, gx);
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

Var detach(Var a) { return a.graph->leaf(a.value(), false); }

BatchNormResult batchnorm_train(Var x, Var gamma, Var beta, double eps) {
    check_same_graph(x, gamma);
    check_same_graph(x, beta);
    if (gamma.cols() != 1 || beta.cols() != 1 || gamma.rows() != x.rows() ||
        beta.rows() != x.rows())
        throw ArgumentError("batchnorm: gamma/beta must be rows x 1");
    Graph& g = *x.graph;
    const long C = x.rows(), N = x.cols();
    if (N < 2) throw ArgumentError("batchnorm: need at least 2 columns in train mode");

    Eigen::VectorXd mu = x.value().rowwise().mean();
    Eigen::VectorXd var(C);
    for (long i = 0; i < C; ++i)
        var(i) = (x.value().row(i).array() - mu(i)).square().mean();
    Eigen::VectorXd inv_std = (var.array() + eps).rsqrt();

    Matrix xhat = ((x.value().colwise() - mu).array().colwise() * inv_std.array());
    Matrix out =
        (xhat.array().colwise() * gamma.value().col(0).array()).colwise() +
        beta.value().col(0).array();

    const bool needs = g.needs_grad(x) || g.needs_grad(gamma) || g.needs_grad(beta);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int xid = x.id, gid = gamma.id, bid = beta.id;
        // xhat and inv_std are captured by value for the backward pass.
        bp = [gp, xid, gid, bid, out_id, xhat, inv_std, N]() {
            const Matrix& go = gp->grad_ref(out_id);
            const Matrix& gv = gp->value_ref(gid);
            gp->accumulate(bid, go.rowwise().sum());
            gp->accumulate(gid, go.cwiseProduct(xhat).rowwise().sum());
            // d/dx of row-wise standardization.
            Matrix gxhat = go.array().colwise() * gv.col(0).array();
            Eigen::VectorXd sum_g = gxhat.rowwise().sum();
            Eigen::VectorXd sum_gx = gxhat.cwiseProduct(xhat).rowwise().sum();
            Matrix gx(xhat.rows(), xhat.cols());
            const double n = static_cast<double>(N);
            for (long i = 0; i < xhat.rows(); ++i)
                gx.row(i) = (inv_std(i) / n) *
                            (n * gxhat.row(i).array() - sum_g(i) -
                             xhat.row(i).array() * sum_gx(i));
            gp->accumulate(xid, gx);
        };
    }
    Var y = g.make_node(std::move(out), needs, std::move(bp));
    return BatchNormResult{y, mu, var};
}

Var batchnorm_eval(Var x, Var gamma, Var beta, const Eigen::VectorXd& mean,
                   const Eigen::VectorXd& var, double eps) {
    check_same_graph(x, gamma);
    check_same_graph(x, beta);
    Graph& g = *x.graph;
    if (mean.size() != x.rows() || var.size() != x.rows())
        throw ArgumentError("batchnorm_eval: statistics size mismatch");
    Eigen::VectorXd inv_std = (var.array() + eps).rsqrt();
    Matrix xhat = ((x.value().colwise() - mean).array().colwise() * inv_std.array());
    Matrix out =
        (xhat.array().colwise() * gamma.value().col(0).array()).colwise() +
        beta.value().col(0).array();
    const bool needs = g.needs_grad(x) || g.needs_grad(gamma) || g.needs_grad(beta);
    const int out_id = g.next_id();
    std::function<void()> bp;
    if (needs) {
        Graph* gp = &g;
        int xid = x.id, gid = gamma.id, bid = beta.id;
        bp = [gp, xid, gid, bid, out_id, xhat, inv_std]() {
            const Matrix& go = gp->grad_ref(out_id);
            const Matrix& gv = gp->value_ref(gid);
            gp->accumulate(bid, go.rowwise().sum());
            gp->accumulate(gid, go.cwiseProduct(xhat).rowwise().sum());
            Matrix gx = (go.array().colwise() * (gv.col(0).array() * inv_std.array()));
            gp->accumulate(xid, gx);
        };
    }
    return g.make_node(std::move(out), needs, std::move(bp));
}

}  // namespace autovc::ag
