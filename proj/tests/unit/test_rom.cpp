#include <cmath>

#include "doctest.h"
#include "hrom/errors.hpp"
#include "hrom/neural/gradient_check.hpp"
#include "hrom/rom/hybrid_autoencoder.hpp"
#include "hrom/rom/pod.hpp"

using namespace hrom;

namespace {

DenseMatrix random_matrix(std::size_t m, std::size_t n, RandomStream& rs, double scale = 1.0) {
  DenseMatrix a(m, n);
  for (double& v : a.flat()) v = scale * rs.normal();
  return a;
}

// Low-rank plus noise, standardized with the identity map.
SnapshotMatrix synthetic_snapshots(std::size_t m, std::size_t f, std::uint64_t seed) {
  RandomStream rs(seed);
  DenseMatrix x = matmul(random_matrix(m, 4, rs), random_matrix(4, f, rs));
  x += random_matrix(m, f, rs, 0.05);
  SnapshotMatrix s;
  s.data = x;
  s.stats = Standardization::identity(f);
  for (std::size_t i = 0; i < m; ++i) (i % 4 == 3 ? s.split.test : s.split.train).push_back(i);
  s.n_cells = f;
  return s;
}

ModelSpec spec_for(Variant v, std::size_t n_cells, std::size_t rank) {
  ModelSpec spec;
  spec.variant = v;
  spec.rank = rank;
  spec.n_cells = n_cells;
  spec.architecture = Architecture::ks_default(rank);
  return spec;
}

PodBasis zero_basis(std::size_t f, std::size_t r) {
  PodBasis p;
  p.ur = DenseMatrix(f, r);
  p.stats = Standardization::identity(f);
  return p;
}

}  // namespace

TEST_CASE("variant names round trip") {
  for (Variant v : {Variant::Pod, Variant::Ae, Variant::SimpleHybrid, Variant::LearnableWeightedHybrid})
    CHECK(parse_variant(to_string(v)) == v);
  CHECK(parse_variant("learnable_weighted_hybrid") == Variant::LearnableWeightedHybrid);
  CHECK_THROWS_AS(parse_variant("hybrid"), ConfigError);
}

TEST_CASE("parameter counts for a 512 cell grid at rank 60") {
  const Standardization id = Standardization::identity(512);
  auto count = [&](Variant v) {
    HybridAutoencoder m(spec_for(v, 512, 60), zero_basis(512, 60), id);
    return m.parameter_count();
  };
  CHECK(count(Variant::Pod) == 30720);
  CHECK(count(Variant::Ae) == 138092);
  CHECK(count(Variant::SimpleHybrid) == 168812);
  CHECK(count(Variant::LearnableWeightedHybrid) == 168873);
  CHECK(count(Variant::LearnableWeightedHybrid) - count(Variant::SimpleHybrid) == 60 + 1);
}

TEST_CASE("blend arithmetic on hand-set weights") {
  // One cell, one component, rank 1: POD path is the identity, the network
  // path is an affine map with a tanh layer in between.
  ModelSpec spec = spec_for(Variant::LearnableWeightedHybrid, 1, 1);
  spec.architecture.encoder_hidden = {};
  spec.architecture.decoder_hidden = {};
  PodBasis pod = zero_basis(1, 1);
  pod.ur(0, 0) = 1.0;
  HybridAutoencoder m(spec, pod, Standardization::identity(1));
  ParamStore& p = m.params();
  // encoder: x -> 3x ; decoder: z -> 3
  p[p.slot("encoder.W0")].value(0, 0) = 3.0;
  p[p.slot("decoder.b0")].value(0, 0) = 3.0;

  SUBCASE("a = 0.5 averages the two latents") {
    p[*m.a_slot()].value(0, 0) = 0.5;
    CHECK(m.encode(DenseMatrix(1, 1, 1.0))(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("b = 0.25 weights the network reconstruction by a quarter") {
    p[*m.b_slot()].value(0, 0) = 0.25;
    // 0.75 * 1 + 0.25 * 3
    CHECK(m.decode(DenseMatrix(1, 1, 1.0))(0, 0) == doctest::Approx(1.5).epsilon(1e-15));
  }
  SUBCASE("a = 1 and b = 1 recover the plain autoencoder") {
    p[*m.a_slot()].value(0, 0) = 1.0;
    p[*m.b_slot()].value(0, 0) = 1.0;
    CHECK(m.reconstruct(DenseMatrix(1, 1, 2.0))(0, 0) == 3.0);
  }
  SUBCASE("simple hybrid sums") {
    ModelSpec s2 = spec;
    s2.variant = Variant::SimpleHybrid;
    HybridAutoencoder h(s2, pod, Standardization::identity(1));
    h.params()[h.params().slot("encoder.W0")].value(0, 0) = 3.0;
    CHECK(h.encode(DenseMatrix(1, 1, 1.0))(0, 0) == 4.0);
  }
}

TEST_CASE("weighted hybrid at initialization equals POD") {
  SnapshotMatrix s = synthetic_snapshots(40, 24, 3);
  RandomStream rs(7);
  HybridAutoencoder lwh = build_model(Variant::LearnableWeightedHybrid, s, 5, Architecture::ks_default(5), rs);
  const PodBasis& pod = *lwh.pod();
  DenseMatrix x = s.test();
  DenseMatrix diff = lwh.reconstruct(x) - pod.reconstruct(x);
  CHECK(max_abs(diff) <= 1e-12);
  CHECK(max_abs(lwh.encode(x) - pod.encode(x)) <= 1e-12);
}

TEST_CASE("tape and plain evaluation agree") {
  SnapshotMatrix s = synthetic_snapshots(30, 12, 5);
  for (Variant v : {Variant::Pod, Variant::Ae, Variant::SimpleHybrid, Variant::LearnableWeightedHybrid}) {
    RandomStream rs(11);
    HybridAutoencoder m = build_model(v, s, 3, Architecture::ks_default(3), rs);
    if (m.a_slot()) m.params()[*m.a_slot()].value.fill(0.3);
    if (m.b_slot()) m.params()[*m.b_slot()].value.fill(0.6);
    DenseMatrix x = s.train();
    Tape tape;
    auto y = m.reconstruct(tape, tape.input(x));
    CHECK(max_abs(tape.value(y) - m.reconstruct(x)) <= 1e-12);
  }
}

TEST_CASE("hybrid gradients match finite differences") {
  SnapshotMatrix s = synthetic_snapshots(16, 8, 9);
  RandomStream rs(13);
  HybridAutoencoder m = build_model(Variant::LearnableWeightedHybrid, s, 3, Architecture::ks_default(3), rs);
  m.params()[*m.a_slot()].value.fill(0.4);
  m.params()[*m.b_slot()].value.fill(-0.2);
  const DenseMatrix x = s.train();
  auto loss = [&]() {
    Tape tape;
    auto in = tape.input(x);
    return tape.value(tape.mse(m.reconstruct(tape, in), in))(0, 0);
  };
  Tape tape;
  auto in = tape.input(x);
  tape.backward(tape.mse(m.reconstruct(tape, in), in), m.params());
  GradientCheckReport report = gradient_check(loss, m.params(), {});
  CHECK(report.passed);
  CHECK(report.at("a").entries_checked == 3);
  CHECK(report.at("b").entries_checked == 1);
}

TEST_CASE("model container round trip is bitwise") {
  SnapshotMatrix s = synthetic_snapshots(20, 10, 17);
  RandomStream rs(19);
  HybridAutoencoder m = build_model(Variant::LearnableWeightedHybrid, s, 4, Architecture::ks_default(4), rs);
  m.params()[*m.a_slot()].value.fill(0.125);
  HybridAutoencoder back = HybridAutoencoder::from_container(Container::from_bytes(m.to_container().to_bytes()));
  CHECK(back.variant() == m.variant());
  CHECK(back.parameter_count() == m.parameter_count());
  CHECK(back.reconstruct(s.test()) == m.reconstruct(s.test()));
  HybridAutoencoder copy = m.clone();
  CHECK(copy.params().flat_values() == m.params().flat_values());
}

TEST_CASE("model construction errors") {
  const Standardization id = Standardization::identity(8);
  CHECK_THROWS_AS(HybridAutoencoder(spec_for(Variant::Pod, 8, 2), std::nullopt, id), ConfigError);
  CHECK_THROWS_AS(HybridAutoencoder(spec_for(Variant::Pod, 8, 3), zero_basis(8, 2), id), ConfigError);
  HybridAutoencoder ae(spec_for(Variant::Ae, 8, 2), std::nullopt, id);
  CHECK(!ae.pod());
  CHECK_THROWS_AS(ae.encode(DenseMatrix(1, 7)), ValidationError);
  CHECK_THROWS_AS(ae.decode(DenseMatrix(1, 3)), ValidationError);
  ModelSpec dec = spec_for(Variant::LearnableWeightedHybrid, 8, 2);
  dec.decoder_only = true;
  HybridAutoencoder d(dec, zero_basis(8, 2), id);
  CHECK(!d.a_slot());
  CHECK(d.b_slot());
  CHECK_THROWS_AS(d.encode(DenseMatrix(1, 8)), StateError);
}

TEST_CASE("pod projection properties") {
  SnapshotMatrix s = synthetic_snapshots(50, 20, 23);
  const DenseMatrix train = s.train();
  PodSpectrum spec = pod_spectrum(train);
  for (std::size_t r : {1u, 3u, 6u}) {
    PodBasis pod = pod_from_spectrum(spec, r, s.stats);
    CHECK(max_abs(matmul_tn(pod.ur, pod.ur) - DenseMatrix::identity(r)) <= 1e-12);
    DenseMatrix once = pod.reconstruct(train);
    CHECK(max_abs(pod.reconstruct(once) - once) <= 1e-10);
    // Optimal rank-r error equals the discarded singular energy.
    const double err = squared_norm(train - once);
    CHECK(err == doctest::Approx(pod.tail_energy()).epsilon(1e-9));
  }
  CHECK_THROWS_AS(compute_pod(train, 0, s.stats), DomainError);
  CHECK_THROWS_AS(compute_pod(train, 21, s.stats), DomainError);
}
