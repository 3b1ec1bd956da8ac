#include "ssar/numerics/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ssar/numerics/kernels.hpp"

namespace ssar {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string("tape ") + op + ": shape mismatch");
    }
}

}  // namespace

Var Tape::push(Node node) {
    if (backward_done_) throw std::logic_error("tape: cannot record after backward()");
    nodes_.push_back(std::move(node));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::constant(Matrix value) {
    Node n;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::parameter(Matrix value) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = true;
    return push(std::move(n));
}

Var Tape::scalar_constant(double value) {
    return constant(Matrix::Constant(1, 1, value));
}

Var Tape::matmul(Var a, Var b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (va.cols() != vb.rows()) throw std::invalid_argument("tape matmul: inner dimension mismatch");
    Node n;
    n.op = Op::MatMul;
    n.a = a.id;
    n.b = b.id;
    n.value = va * vb;
    n.requires_grad = requires_grad(a) || requires_grad(b);
    return push(std::move(n));
}

Var Tape::add_row(Var m, Var row) {
    const Matrix& vm = value(m);
    const Matrix& vr = value(row);
    if (vr.rows() != 1 || vr.cols() != vm.cols()) {
        throw std::invalid_argument("tape add_row: row must be 1 x cols");
    }
    Node n;
    n.op = Op::AddRow;
    n.a = m.id;
    n.b = row.id;
    n.value = vm.rowwise() + vr.row(0);
    n.requires_grad = requires_grad(m) || requires_grad(row);
    return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
    require_same_shape(value(a), value(b), "add");
    Node n;
    n.op = Op::Add;
    n.a = a.id;
    n.b = b.id;
    n.value = value(a) + value(b);
    n.requires_grad = requires_grad(a) || requires_grad(b);
    return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
    require_same_shape(value(a), value(b), "sub");
    Node n;
    n.op = Op::Sub;
    n.a = a.id;
    n.b = b.id;
    n.value = value(a) - value(b);
    n.requires_grad = requires_grad(a) || requires_grad(b);
    return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
    Node n;
    n.op = Op::Scale;
    n.a = a.id;
    n.scalar = factor;
    n.value = value(a) * factor;
    n.requires_grad = requires_grad(a);
    return push(std::move(n));
}

Var Tape::relu(Var a) {
    Node n;
    n.op = Op::Relu;
    n.a = a.id;
    n.value = value(a).cwiseMax(0.0);
    n.requires_grad = requires_grad(a);
    return push(std::move(n));
}

Var Tape::exp(Var a) {
    Node n;
    n.op = Op::Exp;
    n.a = a.id;
    n.value = value(a).array().exp().matrix();
    n.requires_grad = requires_grad(a);
    return push(std::move(n));
}

Var Tape::square(Var a) {
    Node n;
    n.op = Op::Square;
    n.a = a.id;
    n.value = value(a).array().square().matrix();
    n.requires_grad = requires_grad(a);
    return push(std::move(n));
}

Var Tape::sum(Var a) {
    Node n;
    n.op = Op::Sum;
    n.a = a.id;
    n.value = Matrix::Constant(1, 1, value(a).sum());
    n.requires_grad = requires_grad(a);
    return push(std::move(n));
}

Var Tape::mean(Var a) {
    const Matrix& va = value(a);
    if (va.size() == 0) throw std::invalid_argument("tape mean: empty input");
    Node n;
    n.op = Op::Mean;
    n.a = a.id;
    n.value = Matrix::Constant(1, 1, va.mean());
    n.requires_grad = requires_grad(a);
    return push(std::move(n));
}

Var Tape::rbf_gram(Var a, Var b, double bandwidth) {
    Node n;
    n.op = Op::RbfGram;
    n.a = a.id;
    n.b = b.id;
    n.scalar = bandwidth;
    n.value = ssar::rbf_gram(value(a), value(b), bandwidth);
    n.requires_grad = requires_grad(a) || requires_grad(b);
    return push(std::move(n));
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> rows) {
    Node n;
    n.op = Op::GatherRows;
    n.a = a.id;
    n.value = ssar::gather_rows(value(a), rows);
    n.rows = std::move(rows);
    n.requires_grad = requires_grad(a);
    return push(std::move(n));
}

double Tape::scalar(Var v) const {
    const Matrix& m = value(v);
    if (m.rows() != 1 || m.cols() != 1) throw std::invalid_argument("tape scalar: value is not 1x1");
    return m(0, 0);
}

Matrix& Tape::grad_slot(std::uint32_t id) {
    Node& n = nodes_[id];
    if (!n.has_grad) {
        n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
        n.has_grad = true;
    }
    return n.grad;
}

void Tape::accumulate(std::uint32_t id, const Matrix& delta) {
    if (!nodes_[id].requires_grad) return;
    grad_slot(id) += delta;
}

void Tape::backward(Var output) {
    if (backward_done_) throw std::logic_error("tape: backward() already called");
    if (value(output).size() != 1) throw std::invalid_argument("tape backward: output must be 1x1");
    backward_done_ = true;
    if (!requires_grad(output)) return;
    grad_slot(output.id)(0, 0) = 1.0;
    for (std::size_t i = output.id + 1; i-- > 0;) {
        const Node& node = nodes_[i];
        if (!node.requires_grad || !node.has_grad || node.op == Op::Leaf) continue;
        backprop_node(node);
    }
}

void Tape::backprop_node(const Node& node) {
    const Matrix& g = node.grad;
    switch (node.op) {
        case Op::Leaf:
            break;
        case Op::MatMul:
            if (nodes_[node.a].requires_grad) grad_slot(node.a).noalias() += g * nodes_[node.b].value.transpose();
            if (nodes_[node.b].requires_grad) grad_slot(node.b).noalias() += nodes_[node.a].value.transpose() * g;
            break;
        case Op::AddRow:
            accumulate(node.a, g);
            if (nodes_[node.b].requires_grad) grad_slot(node.b) += g.colwise().sum();
            break;
        case Op::Add:
            accumulate(node.a, g);
            accumulate(node.b, g);
            break;
        case Op::Sub:
            accumulate(node.a, g);
            if (nodes_[node.b].requires_grad) grad_slot(node.b) -= g;
            break;
        case Op::Scale:
            if (nodes_[node.a].requires_grad) grad_slot(node.a) += node.scalar * g;
            break;
        case Op::Relu:
            if (nodes_[node.a].requires_grad) {
                const Matrix& x = nodes_[node.a].value;
                grad_slot(node.a) += (x.array() > 0.0).select(g, 0.0).matrix();
            }
            break;
        case Op::Exp:
            if (nodes_[node.a].requires_grad) grad_slot(node.a) += g.cwiseProduct(node.value);
            break;
        case Op::Square:
            if (nodes_[node.a].requires_grad) grad_slot(node.a) += 2.0 * g.cwiseProduct(nodes_[node.a].value);
            break;
        case Op::Sum:
            if (nodes_[node.a].requires_grad) grad_slot(node.a).array() += g(0, 0);
            break;
        case Op::Mean:
            if (nodes_[node.a].requires_grad) {
                Matrix& ga = grad_slot(node.a);
                ga.array() += g(0, 0) / static_cast<double>(ga.size());
            }
            break;
        case Op::RbfGram: {
            // dK_ij/da_i = -K_ij (a_i - b_j) / s^2, dK_ij/db_j = +K_ij (a_i - b_j) / s^2.
            const Matrix w = g.cwiseProduct(node.value);
            const double inv = 1.0 / (node.scalar * node.scalar);
            const Matrix& a = nodes_[node.a].value;
            const Matrix& b = nodes_[node.b].value;
            if (nodes_[node.a].requires_grad) {
                Matrix da = w * b;
                da -= w.rowwise().sum().asDiagonal() * a;
                grad_slot(node.a) += inv * da;
            }
            if (nodes_[node.b].requires_grad) {
                Matrix db = w.transpose() * a;
                db -= w.colwise().sum().transpose().asDiagonal() * b;
                grad_slot(node.b) += inv * db;
            }
            break;
        }
        case Op::GatherRows:
            if (nodes_[node.a].requires_grad) {
                Matrix& ga = grad_slot(node.a);
                for (std::size_t r = 0; r < node.rows.size(); ++r) {
                    ga.row(static_cast<Eigen::Index>(node.rows[r])) += g.row(static_cast<Eigen::Index>(r));
                }
            }
            break;
    }
}

Matrix Tape::grad(Var v) const {
    const Node& n = nodes_[v.id];
    if (n.has_grad) return n.grad;
    return Matrix::Zero(n.value.rows(), n.value.cols());
}

}  // namespace ssar
