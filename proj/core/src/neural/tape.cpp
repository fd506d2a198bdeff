#include "hrom/neural/tape.hpp"

#include <cmath>
#include <string>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

double sigmoid_scalar(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <class F>
DenseMatrix map(const DenseMatrix& a, F f) {
  DenseMatrix out(a.rows(), a.cols());
  const double* src = a.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < a.size(); ++i) dst[i] = f(src[i]);
  return out;
}

void require_row(const DenseMatrix& a, const DenseMatrix& row, const char* what) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ValidationError(std::string(what) + ": row operand must be 1x" + std::to_string(a.cols()));
}

}  // namespace

const Tape::Node& Tape::checked(Var v) const {
  if (v.id >= nodes_.size()) throw StateError("Tape: variable is not recorded on this tape");
  return nodes_[v.id];
}

Tape::Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Tape::Var Tape::unary(Op op, Var a, DenseMatrix value, double scalar) {
  Node n;
  n.op = op;
  n.a = a.id;
  n.value = std::move(value);
  n.scalar = scalar;
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::input(DenseMatrix value) {
  Node n;
  n.op = Op::Input;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Var Tape::constant_ref(const DenseMatrix& value) {
  Node n;
  n.op = Op::ConstantRef;
  n.ref = &value;
  return push(std::move(n));
}

Tape::Var Tape::parameter(const ParamStore& store, std::size_t slot) {
  Node n;
  n.op = Op::Param;
  n.ref = &store[slot].value;
  n.store = &store;
  n.slot = slot;
  n.needs_grad = true;
  return push(std::move(n));
}

const DenseMatrix& Tape::value(Var v) const {
  checked(v);
  return val(v.id);
}

DenseMatrix Tape::gradient(Var v) const {
  const Node& n = checked(v);
  if (n.grad.empty()) return DenseMatrix(val(v.id).rows(), val(v.id).cols());
  return n.grad;
}

Tape::Var Tape::matmul(Var a, Var b) {
  checked(a);
  checked(b);
  Node n;
  n.op = Op::MatMul;
  n.a = a.id;
  n.b = b.id;
  n.value = hrom::matmul(val(a.id), val(b.id));
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::add(Var a, Var b) {
  checked(a);
  checked(b);
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  n.value = val(a.id) + val(b.id);
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::sub(Var a, Var b) {
  checked(a);
  checked(b);
  Node n;
  n.op = Op::Sub;
  n.a = a.id;
  n.b = b.id;
  n.value = val(a.id) - val(b.id);
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::mul(Var a, Var b) {
  checked(a);
  checked(b);
  Node n;
  n.op = Op::Mul;
  n.a = a.id;
  n.b = b.id;
  n.value = hadamard(val(a.id), val(b.id));
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::add_row(Var a, Var row) {
  checked(a);
  checked(row);
  const DenseMatrix& x = val(a.id);
  const DenseMatrix& r = val(row.id);
  require_row(x, r, "add_row");
  DenseMatrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* dst = out.row(i).data();
    for (std::size_t j = 0; j < out.cols(); ++j) dst[j] += r.data()[j];
  }
  Node n;
  n.op = Op::AddRow;
  n.a = a.id;
  n.b = row.id;
  n.value = std::move(out);
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[row.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::mul_row(Var a, Var row) {
  checked(a);
  checked(row);
  const DenseMatrix& x = val(a.id);
  const DenseMatrix& r = val(row.id);
  require_row(x, r, "mul_row");
  DenseMatrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* dst = out.row(i).data();
    for (std::size_t j = 0; j < out.cols(); ++j) dst[j] *= r.data()[j];
  }
  Node n;
  n.op = Op::MulRow;
  n.a = a.id;
  n.b = row.id;
  n.value = std::move(out);
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[row.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::one_minus(Var a) {
  checked(a);
  return unary(Op::OneMinus, a, map(val(a.id), [](double x) { return 1.0 - x; }));
}

Tape::Var Tape::scale(Var a, double s) {
  checked(a);
  return unary(Op::Scale, a, map(val(a.id), [s](double x) { return s * x; }), s);
}

Tape::Var Tape::tanh(Var a) {
  checked(a);
  return unary(Op::Tanh, a, map(val(a.id), [](double x) { return std::tanh(x); }));
}

Tape::Var Tape::sigmoid(Var a) {
  checked(a);
  return unary(Op::Sigmoid, a, map(val(a.id), sigmoid_scalar));
}

Tape::Var Tape::silu(Var a) {
  checked(a);
  return unary(Op::Silu, a, map(val(a.id), [](double x) { return x * sigmoid_scalar(x); }));
}

Tape::Var Tape::cos(Var a) {
  checked(a);
  return unary(Op::Cos, a, map(val(a.id), [](double x) { return std::cos(x); }));
}

Tape::Var Tape::sin(Var a) {
  checked(a);
  return unary(Op::Sin, a, map(val(a.id), [](double x) { return std::sin(x); }));
}

Tape::Var Tape::repeat_cols(Var a, std::size_t times) {
  checked(a);
  if (times == 0) throw ValidationError("repeat_cols: times must be positive");
  const DenseMatrix& x = val(a.id);
  DenseMatrix out(x.rows(), x.cols() * times);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t t = 0; t < times; ++t)
      for (std::size_t j = 0; j < x.cols(); ++j) out(i, t * x.cols() + j) = x(i, j);
  Node n;
  n.op = Op::RepeatCols;
  n.a = a.id;
  n.extra0 = times;
  n.value = std::move(out);
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::concat_cols(Var a, Var b) {
  checked(a);
  checked(b);
  const DenseMatrix& x = val(a.id);
  const DenseMatrix& y = val(b.id);
  if (x.rows() != y.rows()) throw ValidationError("concat_cols: row counts differ");
  DenseMatrix out(x.rows(), x.cols() + y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::copy(x.row(i).begin(), x.row(i).end(), out.row(i).begin());
    std::copy(y.row(i).begin(), y.row(i).end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(x.cols()));
  }
  Node n;
  n.op = Op::ConcatCols;
  n.a = a.id;
  n.b = b.id;
  n.value = std::move(out);
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::slice_cols(Var a, std::size_t begin, std::size_t count) {
  checked(a);
  Node n;
  n.op = Op::SliceCols;
  n.a = a.id;
  n.extra0 = begin;
  n.extra1 = count;
  n.value = val(a.id).block_cols(begin, count);
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::mse(Var prediction, Var target) {
  checked(prediction);
  checked(target);
  const DenseMatrix& p = val(prediction.id);
  const DenseMatrix& t = val(target.id);
  require_same_shape(p, t, "mse");
  if (p.rows() == 0) throw ValidationError("mse: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p.data()[i] - t.data()[i];
    total += d * d;
  }
  Node n;
  n.op = Op::Mse;
  n.a = prediction.id;
  n.b = target.id;
  n.value = DenseMatrix(1, 1, total / static_cast<double>(p.rows()));
  n.needs_grad = nodes_[prediction.id].needs_grad || nodes_[target.id].needs_grad;
  return push(std::move(n));
}

Tape::Var Tape::sum(Var a) {
  checked(a);
  double total = 0.0;
  for (double v : val(a.id).values()) total += v;
  return unary(Op::Sum, a, DenseMatrix(1, 1, total));
}

DenseMatrix& Tape::grad_of(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    const DenseMatrix& v = val(id);
    n.grad = DenseMatrix(v.rows(), v.cols());
  }
  return n.grad;
}

void Tape::backward(Var loss, ParamStore& store) {
  if (nodes_.empty()) throw StateError("backward: nothing recorded on the tape");
  checked(loss);
  const DenseMatrix& l = val(loss.id);
  if (l.rows() != 1 || l.cols() != 1) throw ValidationError("backward: loss must be a 1x1 node");
  if (!std::isfinite(l(0, 0))) throw OptimizationError("backward: loss is not finite");
  for (auto& n : nodes_) n.grad = DenseMatrix();
  grad_of(loss.id)(0, 0) = 1.0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.empty()) continue;
    if (n.op == Op::Param) {
      if (n.store == &store) store[n.slot].grad += n.grad;
      continue;
    }
    backward_node(id);
  }
}

void Tape::backward_node(std::size_t id) {
  // No nodes are appended here, so references into nodes_ stay valid.
  const Node& n = nodes_[id];
  const DenseMatrix& g = n.grad;
  auto wants = [this](std::size_t i) { return nodes_[i].needs_grad; };

  switch (n.op) {
    case Op::Input:
    case Op::ConstantRef:
    case Op::Param:
      break;
    case Op::MatMul:
      if (wants(n.a)) grad_of(n.a) += matmul_nt(g, val(n.b));
      if (wants(n.b)) grad_of(n.b) += matmul_tn(val(n.a), g);
      break;
    case Op::Add:
      if (wants(n.a)) grad_of(n.a) += g;
      if (wants(n.b)) grad_of(n.b) += g;
      break;
    case Op::Sub:
      if (wants(n.a)) grad_of(n.a) += g;
      if (wants(n.b)) grad_of(n.b) -= g;
      break;
    case Op::Mul:
      if (wants(n.a)) grad_of(n.a) += hadamard(g, val(n.b));
      if (wants(n.b)) grad_of(n.b) += hadamard(g, val(n.a));
      break;
    case Op::AddRow: {
      if (wants(n.a)) grad_of(n.a) += g;
      if (wants(n.b)) {
        DenseMatrix& gr = grad_of(n.b);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) gr.data()[j] += g(i, j);
      }
      break;
    }
    case Op::MulRow: {
      const DenseMatrix& x = val(n.a);
      const DenseMatrix& r = val(n.b);
      if (wants(n.a)) {
        DenseMatrix& ga = grad_of(n.a);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) ga(i, j) += g(i, j) * r.data()[j];
      }
      if (wants(n.b)) {
        DenseMatrix& gr = grad_of(n.b);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) gr.data()[j] += g(i, j) * x(i, j);
      }
      break;
    }
    case Op::OneMinus:
      grad_of(n.a) -= g;
      break;
    case Op::Scale: {
      DenseMatrix& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += n.scalar * g.data()[i];
      break;
    }
    case Op::Tanh: {
      DenseMatrix& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = n.value.data()[i];
        ga.data()[i] += g.data()[i] * (1.0 - y * y);
      }
      break;
    }
    case Op::Sigmoid: {
      DenseMatrix& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = n.value.data()[i];
        ga.data()[i] += g.data()[i] * y * (1.0 - y);
      }
      break;
    }
    case Op::Silu: {
      const DenseMatrix& x = val(n.a);
      DenseMatrix& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = sigmoid_scalar(x.data()[i]);
        ga.data()[i] += g.data()[i] * (s + x.data()[i] * s * (1.0 - s));
      }
      break;
    }
    case Op::Cos: {
      const DenseMatrix& x = val(n.a);
      DenseMatrix& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] -= g.data()[i] * std::sin(x.data()[i]);
      break;
    }
    case Op::Sin: {
      const DenseMatrix& x = val(n.a);
      DenseMatrix& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += g.data()[i] * std::cos(x.data()[i]);
      break;
    }
    case Op::RepeatCols: {
      DenseMatrix& ga = grad_of(n.a);
      const std::size_t w = ga.cols();
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t t = 0; t < n.extra0; ++t)
          for (std::size_t j = 0; j < w; ++j) ga(i, j) += g(i, t * w + j);
      break;
    }
    case Op::ConcatCols: {
      const std::size_t wa = val(n.a).cols();
      const std::size_t wb = val(n.b).cols();
      if (wants(n.a)) {
        DenseMatrix& ga = grad_of(n.a);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < wa; ++j) ga(i, j) += g(i, j);
      }
      if (wants(n.b)) {
        DenseMatrix& gb = grad_of(n.b);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < wb; ++j) gb(i, j) += g(i, wa + j);
      }
      break;
    }
    case Op::SliceCols: {
      DenseMatrix& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < n.extra1; ++j) ga(i, n.extra0 + j) += g(i, j);
      break;
    }
    case Op::Mse: {
      const DenseMatrix& p = val(n.a);
      const DenseMatrix& t = val(n.b);
      const double f = 2.0 * g(0, 0) / static_cast<double>(p.rows());
      if (wants(n.a)) {
        DenseMatrix& gp = grad_of(n.a);
        for (std::size_t i = 0; i < p.size(); ++i) gp.data()[i] += f * (p.data()[i] - t.data()[i]);
      }
      if (wants(n.b)) {
        DenseMatrix& gt = grad_of(n.b);
        for (std::size_t i = 0; i < p.size(); ++i) gt.data()[i] -= f * (p.data()[i] - t.data()[i]);
      }
      break;
    }
    case Op::Sum: {
      DenseMatrix& ga = grad_of(n.a);
      for (double& v : ga.flat()) v += g(0, 0);
      break;
    }
  }
}

void Tape::clear() noexcept { nodes_.clear(); }

}  // namespace hrom
