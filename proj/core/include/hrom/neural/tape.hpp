#pragma once

#include <cstddef>
#include <vector>

#include "hrom/neural/param_store.hpp"
#include "hrom/numerics/dense_matrix.hpp"

namespace hrom {

/// Reverse-mode differentiation over whole-matrix operations.
///
/// Every op appends one node holding its output; backward() walks the nodes in
/// reverse and accumulates gradients into the ParamStore tensors that were
/// recorded with parameter(). Batches are rows.
///
/// References recorded with parameter() and constant_ref() must stay alive and
/// unmodified until the tape is cleared.
class Tape {
 public:
  struct Var {
    std::size_t id = static_cast<std::size_t>(-1);
  };

  Var input(DenseMatrix value);
  Var constant_ref(const DenseMatrix& value);
  Var parameter(const ParamStore& store, std::size_t slot);

  const DenseMatrix& value(Var v) const;
  /// Gradient of the last backward() loss with respect to v (zeros if unused).
  DenseMatrix gradient(Var v) const;

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  /// a (B x n) + row (1 x n) broadcast over rows.
  Var add_row(Var a, Var row);
  /// a (B x n) elementwise-times row (1 x n) broadcast over rows.
  Var mul_row(Var a, Var row);
  Var one_minus(Var a);
  Var scale(Var a, double s);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var silu(Var a);
  Var cos(Var a);
  Var sin(Var a);
  /// Tiles the columns of a `times` times: [a, a, ..., a].
  Var repeat_cols(Var a, std::size_t times);
  Var concat_cols(Var a, Var b);
  Var slice_cols(Var a, std::size_t begin, std::size_t count);
  /// (1/B) * sum_i ||p_i - t_i||^2 as a 1x1 node, B = number of rows.
  Var mse(Var prediction, Var target);
  Var sum(Var a);

  /// Accumulates d(loss)/d(param) into the grad buffers of `store` for every
  /// parameter leaf recorded from that store. The loss must be 1x1.
  /// Throws StateError when nothing has been recorded or `loss` is foreign.
  void backward(Var loss, ParamStore& store);

  void clear() noexcept;
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  enum class Op {
    Input,
    ConstantRef,
    Param,
    MatMul,
    Add,
    Sub,
    Mul,
    AddRow,
    MulRow,
    OneMinus,
    Scale,
    Tanh,
    Sigmoid,
    Silu,
    Cos,
    Sin,
    RepeatCols,
    ConcatCols,
    SliceCols,
    Mse,
    Sum,
  };

  struct Node {
    Op op = Op::Input;
    std::size_t a = static_cast<std::size_t>(-1);
    std::size_t b = static_cast<std::size_t>(-1);
    DenseMatrix value;
    DenseMatrix grad;
    const DenseMatrix* ref = nullptr;
    const ParamStore* store = nullptr;
    std::size_t slot = 0;
    double scalar = 0.0;
    std::size_t extra0 = 0;
    std::size_t extra1 = 0;
    bool needs_grad = false;
  };

  const DenseMatrix& val(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.ref ? *n.ref : n.value;
  }
  const Node& checked(Var v) const;
  Var push(Node node);
  Var unary(Op op, Var a, DenseMatrix value, double scalar = 0.0);
  DenseMatrix& grad_of(std::size_t id);
  void backward_node(std::size_t id);

  std::vector<Node> nodes_;
};

}  // namespace hrom
