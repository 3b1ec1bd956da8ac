#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "ssar/numerics/matrix.hpp"

namespace ssar {

// Handle to a value recorded on a Tape. Only meaningful for the tape that made it.
struct Var {
    std::uint32_t id = 0;
};

// ---------------------------------------------------------------------------
// Tape: reverse-mode differentiation over a fixed set of matrix primitives.
//
// Every call records one node holding its forward value. backward() sweeps the
// nodes in reverse creation order and accumulates exact adjoints into every
// node that depends on a parameter. Scalars are 1x1 matrices.
//
// Nodes that do not depend on any parameter are never visited by the reverse
// sweep, so forward-only diagnostics can share the tape at no backward cost.
// ---------------------------------------------------------------------------
class Tape {
public:
    Tape() = default;

    Var constant(Matrix value);
    Var parameter(Matrix value);
    Var scalar_constant(double value);

    Var matmul(Var a, Var b);
    Var add_row(Var m, Var row);  // m + 1 * row, row is 1 x cols
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double factor);
    Var relu(Var a);
    Var exp(Var a);
    Var square(Var a);
    Var sum(Var a);
    Var mean(Var a);
    // K(i, j) = exp(-|a_i - b_j|^2 / (2 bandwidth^2)); `a` and `b` may be the same Var.
    Var rbf_gram(Var a, Var b, double bandwidth);
    Var gather_rows(Var a, std::vector<std::size_t> rows);

    const Matrix& value(Var v) const { return nodes_[v.id].value; }
    double scalar(Var v) const;
    bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

    // Seeds d(output)/d(output) = 1 and propagates. `output` must be 1x1.
    // May be called once per tape.
    void backward(Var output);

    // Adjoint of `v` after backward(); zeros if nothing flowed into it.
    Matrix grad(Var v) const;

    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        Leaf, MatMul, AddRow, Add, Sub, Scale, Relu, Exp, Square, Sum, Mean, RbfGram, GatherRows
    };

    struct Node {
        Op op = Op::Leaf;
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        double scalar = 0.0;
        std::vector<std::size_t> rows;
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        bool has_grad = false;
    };

    Var push(Node node);
    void accumulate(std::uint32_t id, const Matrix& delta);
    Matrix& grad_slot(std::uint32_t id);
    void backprop_node(const Node& node);

    std::deque<Node> nodes_;
    bool backward_done_ = false;
};

}  // namespace ssar
