#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hrom/errors.hpp"
#include "hrom/neural/adam.hpp"
#include "hrom/neural/container.hpp"
#include "hrom/neural/gradient_check.hpp"
#include "hrom/neural/mlp.hpp"
#include "hrom/neural/param_store.hpp"
#include "hrom/neural/tape.hpp"

using namespace hrom;

namespace {

DenseMatrix random_matrix(std::size_t m, std::size_t n, RandomStream& rs, double scale = 1.0) {
  DenseMatrix a(m, n);
  for (double& v : a.flat()) v = scale * rs.normal();
  return a;
}

// Straight-line evaluation of a 2-layer tanh net, written independently of Mlp.
DenseMatrix reference_forward(const DenseMatrix& x, const DenseMatrix& w0, const DenseMatrix& b0,
                              const DenseMatrix& w1, const DenseMatrix& b1) {
  DenseMatrix out(x.rows(), w1.cols());
  for (std::size_t s = 0; s < x.rows(); ++s) {
    std::vector<double> h(w0.cols());
    for (std::size_t j = 0; j < w0.cols(); ++j) {
      double acc = b0(0, j);
      for (std::size_t i = 0; i < x.cols(); ++i) acc += x(s, i) * w0(i, j);
      h[j] = std::tanh(acc);
    }
    for (std::size_t j = 0; j < w1.cols(); ++j) {
      double acc = b1(0, j);
      for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * w1(i, j);
      out(s, j) = acc;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("mlp forward examples") {
  SUBCASE("zero weights give zero output") {
    ParamStore store;
    Mlp net = Mlp::create(store, "net", {3, 5, 2}, Activation::Tanh);
    RandomStream rs(1);
    DenseMatrix y = net.forward(store, random_matrix(4, 3, rs));
    CHECK(max_abs(y) == 0.0);
  }
  SUBCASE("single affine layer") {
    ParamStore store;
    Mlp net = Mlp::create(store, "net", {1, 1}, Activation::Tanh);
    store[net.layers()[0].weight_slot].value(0, 0) = 2.0;
    store[net.layers()[0].bias_slot].value(0, 0) = 1.0;
    CHECK(net.forward(store, DenseMatrix(1, 1, 3.0))(0, 0) == 7.0);
    CHECK(net.layers()[0].activation == Activation::Linear);
  }
  SUBCASE("random tanh net matches the straight-line oracle") {
    ParamStore store;
    Mlp net = Mlp::create(store, "net", {3, 6, 2}, Activation::Tanh);
    RandomStream rs(11);
    net.kaiming_init(store, rs);
    for (double& v : store[net.layers()[0].bias_slot].value.flat()) v = rs.normal();
    for (double& v : store[net.layers()[1].bias_slot].value.flat()) v = rs.normal();
    DenseMatrix x = random_matrix(4, 3, rs);
    DenseMatrix expected = reference_forward(x, store[0].value, store[1].value, store[2].value, store[3].value);
    DenseMatrix plain = net.forward(store, x);
    Tape tape;
    DenseMatrix taped = tape.value(net.forward(tape, store, tape.input(x)));
    CHECK(frobenius_norm(plain - expected) < 1e-12);
    CHECK(plain == taped);
    CHECK(net.forward(store, x) == plain);
  }
  SUBCASE("dimension mismatch") {
    ParamStore store;
    Mlp net = Mlp::create(store, "net", {3, 2}, Activation::Tanh);
    CHECK_THROWS_AS(net.forward(store, DenseMatrix(2, 4)), ValidationError);
  }
}

TEST_CASE("backward examples") {
  SUBCASE("constant loss has zero gradients") {
    ParamStore store;
    store.add("w", DenseMatrix(2, 2, 1.0), ParamGroup::Network);
    Tape tape;
    auto w = tape.parameter(store, 0);
    (void)w;
    auto c = tape.sum(tape.input(DenseMatrix(1, 3, 2.0)));
    tape.backward(c, store);
    CHECK(max_abs(store[0].grad) == 0.0);
  }
  SUBCASE("half squared norm of Wx") {
    ParamStore store;
    store.add("W", DenseMatrix::identity(2), ParamGroup::Network);
    Tape tape;
    // row-batch layout: y = x W^T is written as x * W with W symmetric here
    auto x = tape.input(DenseMatrix(1, 2, std::vector<double>{1.0, 2.0}));
    auto y = tape.matmul(x, tape.parameter(store, 0));
    auto loss = tape.scale(tape.sum(tape.mul(y, y)), 0.5);
    tape.backward(loss, store);
    CHECK(store[0].grad == DenseMatrix(2, 2, std::vector<double>{1.0, 2.0, 2.0, 4.0}));
  }
  SUBCASE("backward on an empty tape") {
    ParamStore store;
    Tape tape;
    CHECK_THROWS_AS(tape.backward(Tape::Var{0}, store), StateError);
  }
}

TEST_CASE("every tape op passes a finite-difference check") {
  RandomStream rs(5);
  ParamStore store;
  const auto A = store.add("A", random_matrix(3, 4, rs, 0.5), ParamGroup::Network);
  const auto B = store.add("B", random_matrix(4, 4, rs, 0.5), ParamGroup::Network);
  const auto r = store.add("r", random_matrix(1, 4, rs, 0.5), ParamGroup::Blend);
  const auto s = store.add("s", random_matrix(1, 2, rs, 0.5), ParamGroup::Blend);
  const DenseMatrix target = random_matrix(3, 8, rs);

  auto build = [&](Tape& t) {
    auto a = t.parameter(store, A);
    auto b = t.parameter(store, B);
    auto row = t.parameter(store, r);
    auto small = t.parameter(store, s);
    auto h = t.matmul(a, b);
    h = t.add_row(h, row);
    h = t.mul_row(t.tanh(h), t.one_minus(row));
    auto g = t.add(t.sigmoid(h), t.silu(t.sub(h, a)));
    g = t.mul(g, t.cos(t.scale(a, 0.7)));
    g = t.add_row(g, t.sin(t.repeat_cols(small, 2)));
    auto wide = t.concat_cols(g, t.slice_cols(h, 1, 3));
    wide = t.concat_cols(wide, t.slice_cols(h, 0, 1));
    return t.mse(wide, t.input(target));
  };

  store.zero_grads();
  Tape tape;
  tape.backward(build(tape), store);
  auto loss = [&] {
    Tape t;
    return t.value(build(t))(0, 0);
  };
  GradientCheckReport report = gradient_check(loss, store);
  for (const auto& t : report.tensors) {
    INFO(t.name);
    CHECK(t.max_rel_error < 1e-6);
  }
}

TEST_CASE("backprop is linear in the loss") {
  RandomStream rs(8);
  ParamStore store;
  Mlp net = Mlp::create(store, "net", {4, 6, 3}, Activation::Silu);
  net.kaiming_init(store, rs);
  DenseMatrix x = random_matrix(5, 4, rs);
  DenseMatrix y = random_matrix(5, 3, rs);
  auto grads_for = [&](double alpha) {
    store.zero_grads();
    Tape t;
    auto l = t.scale(t.mse(net.forward(t, store, t.input(x)), t.input(y)), alpha);
    t.backward(l, store);
    return store.flat_grads();
  };
  const auto g1 = grads_for(1.0);
  for (double alpha : {2.0, -1.0}) {
    const auto ga = grads_for(alpha);
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(ga[i] == doctest::Approx(alpha * g1[i]).epsilon(1e-14));
  }
}

TEST_CASE("adam examples") {
  SUBCASE("first step moves by lr") {
    ParamStore store;
    store.add("w", DenseMatrix(1, 1, 0.0), ParamGroup::Network);
    AdamConfig cfg;
    cfg.set_group_lr(ParamGroup::Network, 1e-3);
    Adam adam(store, cfg);
    store[0].grad(0, 0) = 1.0;
    adam.step(store);
    CHECK(store[0].value(0, 0) == doctest::Approx(-1e-3).epsilon(1e-7));
    CHECK(adam.steps() == 1);
  }
  SUBCASE("zero gradients leave parameters unchanged") {
    ParamStore store;
    store.add("w", DenseMatrix(2, 2, 0.3), ParamGroup::Network);
    Adam adam(store, AdamConfig{});
    for (int i = 0; i < 5; ++i) adam.step(store);
    CHECK(store[0].value == DenseMatrix(2, 2, 0.3));
  }
  SUBCASE("group learning rates") {
    ParamStore store;
    store.add("net", DenseMatrix(1, 1), ParamGroup::Network);
    store.add("blend", DenseMatrix(1, 1), ParamGroup::Blend);
    AdamConfig cfg;
    cfg.set_group_lr(ParamGroup::Network, 1e-4);
    cfg.set_group_lr(ParamGroup::Blend, 1e-5);
    Adam adam(store, cfg);
    store[0].grad(0, 0) = 0.7;
    store[1].grad(0, 0) = 0.7;
    adam.step(store);
    CHECK(store[0].value(0, 0) / store[1].value(0, 0) == doctest::Approx(10.0).epsilon(1e-12));
  }
  SUBCASE("scale invariance with tiny epsilon") {
    auto first_update = [](double g) {
      ParamStore store;
      store.add("w", DenseMatrix(1, 3), ParamGroup::Network);
      AdamConfig cfg;
      cfg.epsilon = 1e-16;
      Adam adam(store, cfg);
      store[0].grad = DenseMatrix(1, 3, std::vector<double>{g, -2.0 * g, 0.5 * g});
      adam.step(store);
      return store[0].value;
    };
    DenseMatrix u1 = first_update(0.01), u2 = first_update(1.0);
    CHECK(frobenius_norm(u1 - u2) < 1e-10 * frobenius_norm(u1));
  }
  SUBCASE("non-finite gradient names the tensor") {
    ParamStore store;
    store.add("decoder.W0", DenseMatrix(1, 1), ParamGroup::Network);
    Adam adam(store, AdamConfig{});
    store[0].grad(0, 0) = std::nan("");
    try {
      adam.step(store);
      FAIL("expected OptimizationError");
    } catch (const OptimizationError& e) {
      CHECK(std::string(e.what()).find("decoder.W0") != std::string::npos);
    }
  }
  SUBCASE("zero learning rate leaves a group bit-identical") {
    ParamStore store;
    store.add("omega", DenseMatrix(1, 1, 0.0123), ParamGroup::Frequency);
    AdamConfig cfg;
    cfg.set_group_lr(ParamGroup::Frequency, 0.0);
    Adam adam(store, cfg);
    store[0].grad(0, 0) = 3.0;
    adam.step(store);
    CHECK(store[0].value(0, 0) == 0.0123);
  }
}

TEST_CASE("cyclic schedule") {
  LrSchedule s;
  CHECK(s.multiplier(17) == 1.0);
  s.kind = LrSchedule::Kind::Cyclic;
  s.period = 100;
  s.low_fraction = 0.1;
  CHECK(s.multiplier(0) == doctest::Approx(0.1));
  CHECK(s.multiplier(50) == doctest::Approx(1.0));
  CHECK(s.multiplier(25) == doctest::Approx(0.55));
  CHECK(s.multiplier(100) == doctest::Approx(0.1));
}

TEST_CASE("kaiming init") {
  ParamStore store;
  Mlp net = Mlp::create(store, "net", {2, 50000, 1}, Activation::Tanh);
  RandomStream rs(3);
  store[1].value.fill(5.0);
  net.kaiming_init(store, rs);
  const DenseMatrix& w = store[0].value;
  double sum = 0.0, sq = 0.0;
  for (double v : w.values()) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(w.size());
  const double var = sq / n - (sum / n) * (sum / n);
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK(max_abs(store[1].value) == 0.0);
  ParamStore again;
  Mlp net2 = Mlp::create(again, "net", {2, 50000, 1}, Activation::Tanh);
  RandomStream rs2(3);
  net2.kaiming_init(again, rs2);
  CHECK(again.flat_values() == store.flat_values());
}

TEST_CASE("gradient check examples") {
  RandomStream rs(2);
  ParamStore store;
  const auto w = store.add("w", random_matrix(3, 2, rs), ParamGroup::Network);
  const DenseMatrix x = random_matrix(6, 3, rs);
  const DenseMatrix y = random_matrix(6, 2, rs);
  auto build = [&](Tape& t) { return t.mse(t.matmul(t.input(x), t.parameter(store, w)), t.input(y)); };
  auto loss = [&] {
    Tape t;
    return t.value(build(t))(0, 0);
  };
  store.zero_grads();
  {
    Tape t;
    t.backward(build(t), store);
  }
  SUBCASE("least squares is exact") {
    GradientCheckReport r = gradient_check(loss, store);
    CHECK(r.max_rel_error < 1e-8);
    CHECK(r.passed);
  }
  SUBCASE("corrupted gradient is flagged") {
    store[w].grad(1, 1) += 0.1;
    GradientCheckReport r = gradient_check(loss, store);
    CHECK(r.at("w").flagged);
    CHECK_FALSE(r.passed);
  }
  SUBCASE("tanh mlp") {
    ParamStore ps;
    Mlp net = Mlp::create(ps, "net", {3, 5, 2}, Activation::Tanh);
    net.kaiming_init(ps, rs);
    auto f = [&](Tape& t) { return t.mse(net.forward(t, ps, t.input(x)), t.input(y)); };
    ps.zero_grads();
    Tape t;
    t.backward(f(t), ps);
    auto l = [&] {
      Tape tt;
      return tt.value(f(tt))(0, 0);
    };
    CHECK(gradient_check(l, ps).max_rel_error < 1e-4);
  }
  SUBCASE("step outside the admissible range") {
    GradientCheckOptions o;
    o.h = 1e-3;
    CHECK_THROWS_AS(gradient_check(loss, store, o), DomainError);
  }
}

TEST_CASE("container round trip is byte exact") {
  RandomStream rs(12);
  Container c("model");
  c.set_meta("variant", "lwh");
  c.set_meta("rank", "40");
  c.add_tensor("encoder.W0", random_matrix(3, 4, rs), "network");
  c.add_tensor("a", DenseMatrix(1, 4, std::vector<double>{0.0, -0.0, 1e-310, 3.5}), "blend");
  c.add_tensor("empty", DenseMatrix(0, 3), "stats");
  const std::string bytes = c.to_bytes();
  Container back = Container::from_bytes(bytes);
  CHECK(back.kind() == "model");
  CHECK(back.meta("rank") == "40");
  CHECK(back.tensor("encoder.W0") == c.tensor("encoder.W0"));
  CHECK(std::signbit(back.tensor("a")(0, 1)));
  CHECK(back.to_bytes() == bytes);
  CHECK_THROWS_AS(back.meta("missing"), IoError);
  CHECK_THROWS_AS(Container::from_bytes("garbage\n"), IoError);
  CHECK_THROWS_AS(Container::from_bytes(bytes.substr(0, bytes.size() - 3)), IoError);

  std::istringstream header_only(bytes);
  Container h = Container::read(header_only, false);
  CHECK(h.tensors().size() == 3);
  CHECK(h.tensors()[0].rows == 3);
  CHECK(h.tensors()[0].value.empty());
}
