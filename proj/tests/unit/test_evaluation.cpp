#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "hrom/errors.hpp"
#include "hrom/evaluation/metrics.hpp"
#include "hrom/rom/pod.hpp"
#include "hrom/util/csv.hpp"

using namespace hrom;

namespace {

// Loss sum_i c_i w_i^2 over the flat parameters.
LossWithGradient quadratic(ParamStore& p, std::vector<double> c) {
  return [&p, c](bool with_grad) {
    double l = 0.0;
    std::size_t k = 0;
    for (Tensor& t : p)
      for (std::size_t i = 0; i < t.value.size(); ++i, ++k) {
        const double w = t.value.data()[i];
        l += c[k] * w * w;
        if (with_grad) t.grad.data()[i] = 2.0 * c[k] * w;
      }
    return l;
  };
}

ModelSpec tiny_spec() {
  ModelSpec spec;
  spec.variant = Variant::LearnableWeightedHybrid;
  spec.rank = 1;
  spec.n_cells = 1;
  return spec;
}

// Rank 1, one cell: POD path identity, encoder x -> 3x, decoder z -> 3.
HybridAutoencoder tiny_hybrid() {
  PodBasis pod;
  pod.ur = DenseMatrix(1, 1, 1.0);
  pod.stats = Standardization::identity(1);
  HybridAutoencoder m(tiny_spec(), pod, Standardization::identity(1));
  ParamStore& p = m.params();
  p[p.slot("encoder.W0")].value(0, 0) = 3.0;
  p[p.slot("decoder.b0")].value(0, 0) = 3.0;
  return m;
}

}  // namespace

TEST_CASE("l2 error is the mean over entries") {
  DenseMatrix x(1, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 2.0;
  CHECK(l2_error(x, DenseMatrix(1, 2)) == 2.5);
  CHECK(l2_error(x, x) == 0.0);
  CHECK_THROWS_AS(l2_error(DenseMatrix(0, 2), DenseMatrix(0, 2)), DomainError);
  CHECK_THROWS_AS(l2_error(x, DenseMatrix(2, 1)), ValidationError);
}

TEST_CASE("sharpness of a one dimensional quadratic") {
  ParamStore p;
  p.add("w", DenseMatrix(1, 1), ParamGroup::Network);
  SharpnessConfig cfg;
  cfg.rho = 0.1;
  cfg.n_directions = 4;
  SharpnessResult r = estimate_sharpness(p, quadratic(p, {1.0}), cfg);
  CHECK(r.value == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(r.base_loss == 0.0);
  CHECK(r.dispersion == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p[0].value(0, 0) == 0.0);

  cfg.rho = 0.0;
  CHECK(estimate_sharpness(p, quadratic(p, {1.0}), cfg).value == 0.0);
  cfg.rho = -1.0;
  CHECK_THROWS_AS(estimate_sharpness(p, quadratic(p, {1.0}), cfg), ConfigError);
}

TEST_CASE("sharpness grows with the number of directions and ascent finds the top curvature") {
  ParamStore p;
  p.add("w", DenseMatrix(1, 3), ParamGroup::Network);
  const std::vector<double> c{10.0, 1.0, 0.1};
  SharpnessConfig cfg;
  cfg.rho = 0.2;
  cfg.n_ascent_steps = 0;
  cfg.seed = 5;
  double prev = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    cfg.n_directions = n;
    const double v = estimate_sharpness(p, quadratic(p, c), cfg).value;
    CHECK(v >= prev);
    CHECK(v <= 10.0 * 0.04 + 1e-15);
    prev = v;
  }
  // Away from the minimum the ascent follows the gradient to the boundary.
  p[0].value(0, 0) = 0.3;
  cfg.n_directions = 3;
  cfg.n_ascent_steps = 30;
  SharpnessResult r = estimate_sharpness(p, quadratic(p, c), cfg);
  // Maximum of 10 (0.3 + d)^2 - 0.9 over |d| <= 0.2 is at d = 0.2 along w0.
  CHECK(r.value == doctest::Approx(10.0 * 0.25 - 0.9).epsilon(1e-3));
  CHECK(p[0].value(0, 0) == 0.3);
}

TEST_CASE("sharpness marks non-finite perturbations") {
  ParamStore p;
  p.add("w", DenseMatrix(1, 1), ParamGroup::Network);
  auto loss = [&](bool) {
    const double w = p[0].value(0, 0);
    return w == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  };
  SharpnessConfig cfg;
  cfg.n_directions = 2;
  SharpnessResult r = estimate_sharpness(p, loss, cfg);
  CHECK(std::isinf(r.value));
  CHECK(r.n_nonfinite == 2);
  CHECK(p[0].value(0, 0) == 0.0);
}

TEST_CASE("model sharpness restores parameters bit for bit") {
  RandomStream rs(3);
  DenseMatrix x(30, 6);
  for (double& v : x.flat()) v = rs.normal();
  ModelSpec spec;
  spec.variant = Variant::LearnableWeightedHybrid;
  spec.rank = 2;
  spec.n_cells = 6;
  spec.architecture = Architecture::ks_default(2);
  HybridAutoencoder m = build_model(spec, compute_pod(x, 2, Standardization::identity(6)),
                                    Standardization::identity(6), rs);
  const std::vector<double> before = m.params().flat_values();
  SharpnessConfig cfg;
  cfg.rho = 0.05;
  cfg.n_directions = 3;
  cfg.n_ascent_steps = 2;
  SharpnessResult r = estimate_sharpness(m, x, cfg);
  CHECK(m.params().flat_values() == before);
  CHECK(r.value > 0.0);
  CHECK(r.base_loss == l2_error(m, x));
  CHECK(r.per_direction.size() == 3);
}

TEST_CASE("noise sweep on an identity model recovers the noise variance") {
  RandomStream rs(9);
  const std::size_t f = 6;
  DenseMatrix x(2000, f);
  for (double& v : x.flat()) v = rs.uniform(-1.0, 1.0);
  ModelSpec spec;
  spec.variant = Variant::Pod;
  spec.rank = f;
  spec.n_cells = f;
  HybridAutoencoder id(spec, compute_pod(x, f, Standardization::identity(f)), Standardization::identity(f));
  CHECK(l2_error(id, x) <= 1e-24);
  auto sweep = noise_robustness_sweep(id, x, {0.0, 0.05, 0.1, 0.2}, 1.0, RandomStream(4));
  REQUIRE(sweep.size() == 4);
  CHECK(sweep[0].error == l2_error(id, x));
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const double s2 = sweep[i].level * sweep[i].level;
    CHECK(std::abs(sweep[i].error - s2) <= 0.05 * s2);
    CHECK(sweep[i].error > sweep[i - 1].error);
  }
  // Amplitude scales the noise std.
  auto scaled = noise_robustness_sweep(id, x, {0.0, 0.0, 0.1}, 2.0, RandomStream(4));
  CHECK(scaled[2].error == doctest::Approx(4.0 * sweep[2].error).epsilon(1e-9));
  CHECK_THROWS_AS(noise_robustness_sweep(id, x, {-0.1}, 1.0, RandomStream(4)), ConfigError);
}

TEST_CASE("convergence rate of a power law") {
  std::vector<double> r{10, 20, 40, 80}, e;
  for (double v : r) e.push_back(3.0 * std::pow(v, -2.0));
  ConvergenceFit fit = fit_convergence_rate(r, e);
  CHECK(fit.q == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  // Flat errors give rate zero.
  CHECK(std::abs(fit_convergence_rate(r, {1, 1, 1, 1}).q) <= 1e-15);
  CHECK_THROWS_AS(fit_convergence_rate({10, 20}, {1, 2}), DomainError);
  CHECK_THROWS_AS(fit_convergence_rate({10, 20, 40}, {1, 0, 2}), DomainError);
  CHECK_THROWS_AS(fit_convergence_rate({10, 10, 10}, {1, 2, 3}), DomainError);
}

TEST_CASE("contribution split on hand-set weights") {
  HybridAutoencoder m = tiny_hybrid();
  ParamStore& p = m.params();
  const DenseMatrix one(1, 1, 1.0);

  SUBCASE("at initialization everything is POD") {
    ContributionSplit s = contribution_split(m, one);
    CHECK(s.latent_pod == 1.0);
    CHECK(s.reconstruction_pod == 1.0);
    CHECK(s.latent_nn == 0.0);
  }
  SUBCASE("a = 0.5 and b = 0.25") {
    p[*m.a_slot()].value(0, 0) = 0.5;
    p[*m.b_slot()].value(0, 0) = 0.25;
    ContributionSplit s = contribution_split(m, one);
    // latent: 0.5 * 1 against 0.5 * 3
    CHECK(s.latent_pod == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.latent_nn == doctest::Approx(0.75).epsilon(1e-15));
    // z = 2; reconstruction: 0.75 * 2 against 0.25 * 3
    CHECK(s.reconstruction_pod == doctest::Approx(1.5 / 2.25).epsilon(1e-15));
    CHECK(s.zero_denominator == 0);
  }
  SUBCASE("zero sample counts as POD and is flagged") {
    p[*m.a_slot()].value(0, 0) = 0.5;
    ContributionSplit s = contribution_split(m, DenseMatrix(1, 1));
    CHECK(s.latent_pod == 1.0);
    // b = 0 so the reconstruction of z = 0 is zero on both paths too
    CHECK(s.zero_denominator == 2);
  }
  SUBCASE("other variants are rejected") {
    ModelSpec spec = tiny_spec();
    spec.variant = Variant::SimpleHybrid;
    PodBasis pod;
    pod.ur = DenseMatrix(1, 1, 1.0);
    pod.stats = Standardization::identity(1);
    HybridAutoencoder h(spec, pod, Standardization::identity(1));
    CHECK_THROWS_AS(contribution_split(h, one), ValidationError);
  }
}

TEST_CASE("latent cosine similarity") {
  DenseMatrix z1(3, 2), z2(3, 2), z3(3, 2);
  z1(0, 0) = 1.0;
  z1(1, 1) = 2.0;
  z1(2, 0) = 1.0;
  z2(0, 0) = -4.0;  // anti-parallel counts as 1
  z2(1, 0) = 1.0;   // orthogonal to z1 row 1
  z2(2, 0) = 1.0;
  z2(2, 1) = 1.0;   // 45 degrees
  z3 = z1;
  z3(2, 0) = 0.0;   // zero row is skipped

  SimilaritySummary s = latent_cosine_similarity({z1, z2, z3});
  REQUIRE(s.pairs.size() == 3);
  CHECK(s.pairs[0].score == doctest::Approx((1.0 + 0.0 + std::sqrt(0.5)) / 3.0).epsilon(1e-14));
  CHECK(s.pairs[1].score == 1.0);
  CHECK(s.pairs[1].skipped == 1);
  CHECK(s.pairs[2].skipped == 1);
  CHECK(s.max == 1.0);
  CHECK(latent_cosine_similarity({z1, z1}).mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(latent_cosine_similarity({z1}), DomainError);
  CHECK_THROWS_AS(latent_cosine_similarity({z1, DenseMatrix(3, 3)}), ValidationError);
}

TEST_CASE("metric csv keeps 17 significant digits and the config hash") {
  std::ostringstream out;
  write_metric_csv(out, {{"l2_error", "lwh", 512, 40, 7, 0.0, 0.1, 1.0 / 3.0}}, "abc123");
  CHECK(out.str() ==
        "metric,variant,grid,rank,seed,noise_level,value,dispersion,config_hash\n"
        "l2_error,lwh,512,40,7,0,0.10000000000000001,0.33333333333333331,abc123\n");
  std::istringstream in(out.str());
  CsvTable t = read_csv(in);
  REQUIRE(t.rows.size() == 1);
  CHECK(std::stod(t.rows[0][t.column("dispersion")]) == 1.0 / 3.0);
  CHECK(t.column("missing") == -1);
  CHECK(csv_field(std::numeric_limits<double>::infinity()) == "inf");

  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), IoError);
  std::ostringstream quoted;
  CsvWriter w(quoted, {"x"});
  w.row({"a,\"b\""});
  std::istringstream back(quoted.str());
  CHECK(read_csv(back).rows[0][0] == "a,\"b\"");
}

TEST_CASE("convergence rate of a POD tail with singular values i^-3") {
  // tail(r) = sum_{i>r} i^-6 ~ r^-5 / 5
  std::vector<double> ranks{20, 40, 80, 160}, tails;
  for (double r : ranks) {
    double t = 0.0;
    for (int i = 200000; i > static_cast<int>(r); --i) t += std::pow(static_cast<double>(i), -6.0);
    tails.push_back(t);
  }
  const ConvergenceFit fit = fit_convergence_rate(ranks, tails);
  CHECK(fit.q == doctest::Approx(5.0).epsilon(0.02));
  std::vector<double> scaled;
  for (double t : tails) scaled.push_back(123.0 * t);
  CHECK(std::abs(fit_convergence_rate(ranks, scaled).q - fit.q) <= 1e-12);
}

TEST_CASE("contribution split extremes and symmetry") {
  HybridAutoencoder m = tiny_hybrid();
  ParamStore& p = m.params();
  p[*m.a_slot()].value(0, 0) = 1.0;
  p[*m.b_slot()].value(0, 0) = 1.0;
  ContributionSplit full = contribution_split(m, DenseMatrix(1, 1, 1.0));
  CHECK(full.latent_nn == 1.0);
  CHECK(full.reconstruction_nn == 1.0);

  // encoder x -> x matches the POD path, so a = 0.5 splits evenly
  p[p.slot("encoder.W0")].value(0, 0) = 1.0;
  p[*m.a_slot()].value(0, 0) = 0.5;
  ContributionSplit half = contribution_split(m, DenseMatrix(1, 1, 2.0));
  CHECK(half.latent_pod == 0.5);
  CHECK(half.latent_nn == 0.5);
  CHECK(half.convention == "norm_ratio");
}
