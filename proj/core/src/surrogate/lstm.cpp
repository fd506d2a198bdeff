#include "hrom/surrogate/lstm.hpp"

#include <cmath>
#include <sstream>

#include "hrom/errors.hpp"
#include "hrom/evaluation/metrics.hpp"

namespace hrom {

namespace {

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

DenseMatrix concat(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

}  // namespace

LstmNet::LstmNet(std::size_t input_size, const std::vector<std::size_t>& hidden, std::size_t output_size)
    : output_size_(output_size) {
  if (input_size == 0 || output_size == 0 || hidden.empty()) throw ConfigError("lstm: sizes must be positive");
  std::size_t in = input_size;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const std::size_t h = hidden[l];
    if (h == 0) throw ConfigError("lstm: hidden sizes must be positive");
    Cell cell;
    cell.input_size = in;
    cell.hidden_size = h;
    cell.weight_slot = params_.add("lstm" + std::to_string(l) + ".W", DenseMatrix(in + h, 4 * h), ParamGroup::Network);
    cell.bias_slot = params_.add("lstm" + std::to_string(l) + ".b", DenseMatrix(1, 4 * h), ParamGroup::Network);
    cells_.push_back(cell);
    in = h;
  }
  head_weight_ = params_.add("head.W", DenseMatrix(in, output_size), ParamGroup::Network);
  head_bias_ = params_.add("head.b", DenseMatrix(1, output_size), ParamGroup::Network);
}

void LstmNet::initialize(RandomStream& stream) {
  auto fill = [&](std::size_t slot, double bound) {
    for (double& v : params_[slot].value.flat()) v = stream.uniform(-bound, bound);
  };
  for (const Cell& c : cells_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(c.hidden_size));
    fill(c.weight_slot, bound);
    fill(c.bias_slot, bound);
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(cells_.back().hidden_size));
  fill(head_weight_, bound);
  fill(head_bias_, bound);
}

std::pair<DenseMatrix, DenseMatrix> LstmNet::step(std::size_t layer, const DenseMatrix& x, const DenseMatrix& h,
                                                  const DenseMatrix& c) const {
  const Cell& cell = cells_.at(layer);
  const std::size_t H = cell.hidden_size;
  DenseMatrix z = matmul(concat(x, h), params_[cell.weight_slot].value);
  const DenseMatrix& b = params_[cell.bias_slot].value;
  DenseMatrix h2(x.rows(), H), c2(x.rows(), H);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < H; ++j) {
      const double i = sigmoid(z(r, j) + b(0, j));
      const double f = sigmoid(z(r, H + j) + b(0, H + j));
      const double g = std::tanh(z(r, 2 * H + j) + b(0, 2 * H + j));
      const double o = sigmoid(z(r, 3 * H + j) + b(0, 3 * H + j));
      c2(r, j) = f * c(r, j) + i * g;
      h2(r, j) = o * std::tanh(c2(r, j));
    }
  return {std::move(h2), std::move(c2)};
}

std::pair<Tape::Var, Tape::Var> LstmNet::step(Tape& tape, std::size_t layer, Tape::Var x, Tape::Var h,
                                              Tape::Var c) const {
  const Cell& cell = cells_.at(layer);
  const std::size_t H = cell.hidden_size;
  Tape::Var z = tape.add_row(tape.matmul(tape.concat_cols(x, h), tape.parameter(params_, cell.weight_slot)),
                             tape.parameter(params_, cell.bias_slot));
  Tape::Var i = tape.sigmoid(tape.slice_cols(z, 0, H));
  Tape::Var f = tape.sigmoid(tape.slice_cols(z, H, H));
  Tape::Var g = tape.tanh(tape.slice_cols(z, 2 * H, H));
  Tape::Var o = tape.sigmoid(tape.slice_cols(z, 3 * H, H));
  Tape::Var c2 = tape.add(tape.mul(f, c), tape.mul(i, g));
  Tape::Var h2 = tape.mul(o, tape.tanh(c2));
  return {h2, c2};
}

DenseMatrix LstmNet::forward(const std::vector<DenseMatrix>& steps) const {
  if (steps.empty()) throw DomainError("lstm: empty sequence");
  const std::size_t batch = steps.front().rows();
  std::vector<DenseMatrix> h, c;
  for (const Cell& cell : cells_) {
    h.emplace_back(batch, cell.hidden_size);
    c.emplace_back(batch, cell.hidden_size);
  }
  for (const DenseMatrix& x : steps) {
    if (x.cols() != input_size()) throw ValidationError("lstm: step width does not match the input size");
    const DenseMatrix* in = &x;
    for (std::size_t l = 0; l < cells_.size(); ++l) {
      std::tie(h[l], c[l]) = step(l, *in, h[l], c[l]);
      in = &h[l];
    }
  }
  DenseMatrix y = matmul(h.back(), params_[head_weight_].value);
  const DenseMatrix& b = params_[head_bias_].value;
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t j = 0; j < y.cols(); ++j) y(r, j) += b(0, j);
  return y;
}

Tape::Var LstmNet::forward(Tape& tape, const std::vector<Tape::Var>& steps) const {
  if (steps.empty()) throw DomainError("lstm: empty sequence");
  const std::size_t batch = tape.value(steps.front()).rows();
  std::vector<Tape::Var> h, c;
  for (const Cell& cell : cells_) {
    h.push_back(tape.input(DenseMatrix(batch, cell.hidden_size)));
    c.push_back(tape.input(DenseMatrix(batch, cell.hidden_size)));
  }
  for (Tape::Var x : steps) {
    if (tape.value(x).cols() != input_size()) throw ValidationError("lstm: step width does not match the input size");
    Tape::Var in = x;
    for (std::size_t l = 0; l < cells_.size(); ++l) {
      std::tie(h[l], c[l]) = step(tape, l, in, h[l], c[l]);
      in = h[l];
    }
  }
  return tape.add_row(tape.matmul(h.back(), tape.parameter(params_, head_weight_)),
                      tape.parameter(params_, head_bias_));
}

Container LstmNet::to_container() const {
  Container c("lstm");
  c.set_meta("input_size", std::to_string(input_size()));
  c.set_meta("output_size", std::to_string(output_size_));
  std::string hidden;
  for (const Cell& cell : cells_) hidden += (hidden.empty() ? "" : ",") + std::to_string(cell.hidden_size);
  c.set_meta("hidden", hidden);
  for (const Tensor& t : params_) c.add_tensor(t.name, t.value, std::string(to_string(t.group)));
  return c;
}

LstmNet LstmNet::from_container(const Container& c) {
  if (c.kind() != "lstm") throw IoError("expected an lstm container, found kind '" + c.kind() + "'");
  std::vector<std::size_t> hidden;
  std::stringstream ss(c.meta("hidden"));
  std::string item;
  while (std::getline(ss, item, ',')) hidden.push_back(std::stoull(item));
  LstmNet net(std::stoull(c.meta("input_size")), hidden, std::stoull(c.meta("output_size")));
  for (Tensor& t : net.params_) {
    const DenseMatrix& v = c.tensor(t.name);
    if (v.rows() != t.value.rows() || v.cols() != t.value.cols())
      throw IoError("checkpoint tensor '" + t.name + "' has the wrong shape");
    t.value = v;
  }
  return net;
}

DenseMatrix augment_latent(const DenseMatrix& z, std::span<const double> params) {
  DenseMatrix out(z.rows(), z.cols() + params.size());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) out(i, j) = z(i, j);
    for (std::size_t j = 0; j < params.size(); ++j) out(i, z.cols() + j) = params[j];
  }
  return out;
}

DenseMatrix Windows::step(const std::vector<std::size_t>& rows, std::size_t t) const {
  DenseMatrix out(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) out(i, j) = inputs(rows[i], t * width + j);
  return out;
}

Windows build_windows(const std::vector<DenseMatrix>& series, std::size_t k, std::size_t n_latent) {
  if (k == 0) throw DomainError("build_windows: k must be positive");
  if (series.empty()) throw DomainError("build_windows: no trajectories");
  Windows w;
  w.k = k;
  w.width = series.front().cols();
  if (n_latent == 0 || n_latent > w.width) throw DomainError("build_windows: latent size out of range");
  std::size_t total = 0;
  for (const DenseMatrix& s : series) {
    if (s.cols() != w.width) throw ValidationError("build_windows: trajectories differ in width");
    if (s.rows() <= k)
      throw DomainError("build_windows: trajectory of " + std::to_string(s.rows()) + " steps is too short for k=" +
                        std::to_string(k));
    total += s.rows() - k;
  }
  w.inputs = DenseMatrix(total, k * w.width);
  w.targets = DenseMatrix(total, n_latent);
  std::size_t row = 0;
  for (std::size_t traj = 0; traj < series.size(); ++traj) {
    const DenseMatrix& s = series[traj];
    for (std::size_t end = k; end < s.rows(); ++end, ++row) {
      for (std::size_t t = 0; t < k; ++t)
        for (std::size_t j = 0; j < w.width; ++j) w.inputs(row, t * w.width + j) = s(end - k + t, j);
      for (std::size_t j = 0; j < n_latent; ++j) w.targets(row, j) = s(end, j);
      w.trajectory.push_back(traj);
      w.target_step.push_back(end);
    }
  }
  return w;
}

namespace {

DenseMatrix predict_windows(const LstmNet& net, const Windows& w) {
  std::vector<std::size_t> all(w.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<DenseMatrix> steps;
  for (std::size_t t = 0; t < w.k; ++t) steps.push_back(w.step(all, t));
  return net.forward(steps);
}

}  // namespace

TrainReport train_lstm(LstmNet& net, const Windows& train, const Windows& test, const TrainConfig& config) {
  if (train.size() == 0) throw DomainError("train_lstm: no training windows");
  if (train.width != net.input_size() || train.targets.cols() != net.output_size())
    throw ValidationError("train_lstm: window shape does not match the network");
  auto evaluate = [&] {
    EvalPoint p;
    p.train_error = l2_error(train.targets, predict_windows(net, train));
    p.test_error = test.size() > 0 ? l2_error(test.targets, predict_windows(net, test)) : std::nan("");
    return p;
  };
  auto batch_loss = [&](Tape& tape, const std::vector<std::size_t>& rows) {
    std::vector<Tape::Var> steps;
    for (std::size_t t = 0; t < train.k; ++t) steps.push_back(tape.input(train.step(rows, t)));
    return tape.mse(net.forward(tape, steps), tape.input(train.targets.gather_rows(rows)));
  };
  return run_training(net.params(), train.size(), batch_loss, evaluate, config,
                      1.0 / static_cast<double>(net.output_size()));
}

DenseMatrix rollout(const LstmNet& net, const DenseMatrix& seed_window, std::size_t n_steps,
                    std::span<const double> params) {
  const std::size_t r = net.output_size();
  if (seed_window.cols() != net.input_size() || r + params.size() != net.input_size())
    throw ValidationError("rollout: seed window width does not match the network");
  std::vector<DenseMatrix> window;
  for (std::size_t t = 0; t < seed_window.rows(); ++t)
    window.push_back(DenseMatrix::row_vector(seed_window.row(t)));
  DenseMatrix out(n_steps, r);
  for (std::size_t s = 0; s < n_steps; ++s) {
    DenseMatrix z = net.forward(window);
    for (std::size_t j = 0; j < r; ++j) out(s, j) = z(0, j);
    window.erase(window.begin());
    window.push_back(augment_latent(z, params));
  }
  return out;
}

}  // namespace hrom
