// Criteria 1, 2, 3, 9, 10: POD exactness, init equivalence, gradients,
// determinism, KS solver convergence.

#include <Eigen/SVD>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "acceptance.hpp"
#include "hrom/data/dataset.hpp"
#include "hrom/data/ks.hpp"
#include "hrom/data/wave.hpp"
#include "hrom/evaluation/metrics.hpp"
#include "hrom/experiment/config.hpp"
#include "hrom/experiment/runner.hpp"
#include "hrom/koopman/koopman.hpp"
#include "hrom/neural/gradient_check.hpp"
#include "hrom/rom/pod.hpp"
#include "hrom/surrogate/lstm.hpp"

using namespace hrom;
namespace fs = std::filesystem;

namespace {

std::vector<double> singular_values_oracle(const DenseMatrix& x) {
  Eigen::MatrixXd m(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> run_ks(std::size_t n, double length, double dt, std::size_t steps, const std::vector<double>& u0) {
  KsSolver s(n, length, dt);
  s.set_state(u0);
  for (std::size_t i = 0; i < steps; ++i) s.step();
  return s.state();
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::string grad_detail(const std::string& what, const GradientCheckReport& r) {
  std::size_t n = 0;
  for (const auto& t : r.tensors) n += t.entries_checked;
  return what + " max rel " + sci(r.max_rel_error) + " over " + std::to_string(n) + " entries";
}

}  // namespace

int main() {
  Criteria c;
  const KsConfig ks;
  const Dataset data = make_ks_dataset(ks);
  const SnapshotMatrix snaps = standardize(data, split_shuffled(data.rows(), 0.7, 0));
  const DenseMatrix train = snaps.train(), test = snaps.test();

  c.check(1, "POD train MSE equals SVD tail energy / (M N Q)", [&](std::string& d) {
    const std::vector<double> sv = singular_values_oracle(train);
    const PodSpectrum spectrum = pod_spectrum(train);
    bool ok = train.rows() >= 1300 && snaps.n_cells == 512;
    d = "M=" + std::to_string(train.rows());
    for (std::size_t r : {10u, 20u, 40u, 60u}) {
      double tail = 0.0;
      for (std::size_t i = r; i < sv.size(); ++i) tail += sv[i] * sv[i];
      const double oracle = tail / static_cast<double>(train.size());
      const PodBasis pod = pod_from_spectrum(spectrum, r, snaps.stats);
      const double mse = l2_error(train, pod.reconstruct(train));
      const double rel = std::abs(mse - oracle) / oracle;
      ok = ok && rel < 1e-8;
      d += "; r=" + std::to_string(r) + " mse " + sci(mse) + " rel " + sci(rel);
    }
    return ok;
  });

  c.check(2, "fresh learnable weighted hybrid reproduces POD", [&](std::string& d) {
    bool ok = true;
    for (std::size_t r : {10u, 40u}) {
      RandomStream rs(r);
      HybridAutoencoder lwh = build_model(Variant::LearnableWeightedHybrid, snaps, r, Architecture::ks_default(r), rs);
      const PodBasis& pod = *lwh.pod();
      const DenseMatrix zp = pod.encode(test);
      const double enc = max_abs(lwh.encode(test) - zp);
      const double dec = max_abs(lwh.decode(zp) - pod.decode(zp));
      const double mse = std::abs(l2_error(lwh, test) - l2_error(test, pod.reconstruct(test)));
      ok = ok && enc <= 1e-12 && dec <= 1e-12 && mse <= 1e-12;
      d += (d.empty() ? "" : "; ") + std::string("r=") + std::to_string(r) + " encode " + sci(enc) + " decode " +
           sci(dec) + " test mse " + sci(mse);
    }
    return ok;
  });

  c.check(3, "analytic gradients match central differences (h=1e-6, 1e-4 rel)", [&](std::string& d) {
    GradientCheckOptions opt;
    opt.h = 1e-6;
    opt.tolerance = 1e-4;
    opt.max_entries_per_tensor = 40;
    std::vector<std::size_t> rows{0, 7, 19, 33, 101, 240, 377, 512};
    const DenseMatrix x = train.gather_rows(rows);

    // (i) autoencoder network parameters
    RandomStream rs1(11);
    HybridAutoencoder ae = build_model(Variant::Ae, snaps, 10, Architecture::ks_default(10), rs1);
    auto ae_loss = [&]() {
      Tape t;
      auto in = t.input(x);
      return t.value(t.mse(ae.reconstruct(t, in), in))(0, 0);
    };
    {
      Tape t;
      auto in = t.input(x);
      ae.params().zero_grads();
      t.backward(t.mse(ae.reconstruct(t, in), in), ae.params());
    }
    const GradientCheckReport g1 = gradient_check(ae_loss, ae.params(), opt);

    // (ii) blend vectors at a = b = 0
    RandomStream rs2(12);
    HybridAutoencoder lwh = build_model(Variant::LearnableWeightedHybrid, snaps, 10, Architecture::ks_default(10), rs2);
    auto lwh_loss = [&]() {
      Tape t;
      auto in = t.input(x);
      return t.value(t.mse(lwh.reconstruct(t, in), in))(0, 0);
    };
    {
      Tape t;
      auto in = t.input(x);
      lwh.params().zero_grads();
      t.backward(t.mse(lwh.reconstruct(t, in), in), lwh.params());
    }
    GradientCheckOptions blend = opt;
    blend.max_entries_per_tensor = 0;
    blend.only = {"a", "b"};
    const GradientCheckReport g2 = gradient_check(lwh_loss, lwh.params(), blend);
    const bool at_zero = max_abs(lwh.params()[*lwh.a_slot()].value) == 0.0 && max_abs(lwh.params()[*lwh.b_slot()].value) == 0.0;

    // (iii) Koopman frequency on the traveling wave
    WaveConfig wc;
    wc.n_steps = 2000;
    const Dataset wave = make_wave_dataset(wc);
    const SnapshotMatrix ws = standardize(wave, split_by_time(wave.rows(), 0.5));
    RandomStream rs3(13);
    Architecture karch;
    karch.decoder_hidden = {16};
    KoopmanModel km = build_koopman(Variant::LearnableWeightedHybrid, ws, 1, karch, 1.0, rs3);
    km.params()[*km.decoder().b_slot()].value.fill(0.3);
    std::vector<double> times;
    std::vector<std::size_t> krows;
    for (std::size_t i = 0; i < 1000; i += 97) {
      times.push_back(wave.time[i]);
      krows.push_back(i);
    }
    const DenseMatrix kx = ws.data.gather_rows(krows);
    DenseMatrix tcol(times.size(), 1);
    for (std::size_t i = 0; i < times.size(); ++i) tcol(i, 0) = times[i];
    auto k_loss = [&]() {
      Tape t;
      return t.value(t.mse(km.decode(t, t.input(tcol)), t.input(kx)))(0, 0);
    };
    {
      Tape t;
      km.params().zero_grads();
      t.backward(t.mse(km.decode(t, t.input(tcol)), t.input(kx)), km.params());
    }
    GradientCheckOptions kopt = opt;
    kopt.only = {"omega"};
    const GradientCheckReport g3 = gradient_check(k_loss, km.params(), kopt);

    // (iv) LSTM through 5 steps of BPTT
    LstmNet net(3, {40, 40}, 2);
    RandomStream rs4(14);
    net.initialize(rs4);
    std::vector<DenseMatrix> seq;
    for (std::size_t s = 0; s < 5; ++s) {
      DenseMatrix m(4, 3);
      for (double& v : m.flat()) v = rs4.normal();
      seq.push_back(m);
    }
    DenseMatrix target(4, 2);
    for (double& v : target.flat()) v = rs4.normal();
    auto lstm_loss = [&]() {
      Tape t;
      std::vector<Tape::Var> in;
      for (const auto& m : seq) in.push_back(t.input(m));
      return t.value(t.mse(net.forward(t, in), t.input(target)))(0, 0);
    };
    {
      Tape t;
      std::vector<Tape::Var> in;
      for (const auto& m : seq) in.push_back(t.input(m));
      net.params().zero_grads();
      t.backward(t.mse(net.forward(t, in), t.input(target)), net.params());
    }
    const GradientCheckReport g4 = gradient_check(lstm_loss, net.params(), opt);

    d = grad_detail("(i) AE", g1) + "; " + grad_detail("(ii) a,b", g2) + "; " + grad_detail("(iii) omega", g3) +
        "; " + grad_detail("(iv) LSTM", g4);
    return g1.passed && g2.passed && g3.passed && g4.passed && at_zero && g3.at("omega").entries_checked == 1;
  });

  c.check(9, "experiment configs produce byte-identical CSVs on rerun", [&](std::string& d) {
    const std::vector<std::string> configs{
        R"({"kind":"reconstruction","dataset":{"generator":"ks","ks":{"n":64,"length":22,"n_steps":200,"transient_skip":1000,"save_every":10}},
            "variants":["pod","ae","simple","lwh"],"ranks":[2,4,8],"seeds":[0,1],"train":{"epochs":4,"batch_size":32},
            "metrics":["sharpness","noise","contribution","similarity"],"sharpness":{"n_directions":3,"n_ascent_steps":2}})",
        R"({"kind":"koopman","dataset":{"generator":"wave","wave":{"nx":64,"n_steps":2000}},"variants":["pod","lwh"],
            "seeds":[0,1],"train":{"epochs":3,"batch_size":64,"max_batches_per_epoch":5}})",
        R"({"kind":"surrogate","dataset":{"generator":"burgers","burgers":{"train_re":[100,300,500],"test_re":[200,400]}},
            "variants":["pod","lwh"],"ranks":[2],"seeds":[3],"architecture":{"encoder_hidden":[4],"decoder_hidden":[4]},
            "train":{"epochs":5,"batch_size":32},"surrogate":{"lstm_hidden":[8,8],"lstm_train":{"epochs":3,"batch_size":32}}})"};
    bool ok = true;
    std::size_t compared = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const ExperimentConfig cfg = ExperimentConfig::parse(configs[i]);
      const fs::path a = fs::temp_directory_path() / ("hrom_acc_det_a" + std::to_string(i));
      const fs::path b = fs::temp_directory_path() / ("hrom_acc_det_b" + std::to_string(i));
      fs::remove_all(a);
      fs::remove_all(b);
      const RunSummary sa = run_experiment(cfg, a, {1, nullptr});
      run_experiment(cfg, b, {2, nullptr});
      for (const fs::path& f : sa.files) {
        const bool same = slurp(f) == slurp(b / f.filename()) && !slurp(f).empty();
        ok = ok && same;
        ++compared;
        if (!same) d += "differs: " + f.string() + "; ";
      }
      fs::remove_all(a);
      fs::remove_all(b);
    }
    d += std::to_string(compared) + " CSV files over 3 kinds compared";
    return ok && compared >= 5;
  });

  c.check(10, "KS solver: Richardson ratio at T=1 and mean conservation", [&](std::string& d) {
    RandomStream rs(ks.seed);
    const std::vector<double> u0 = ks_initial_condition(ks, rs);
    const double L = ks.domain_length();
    auto run = [&](double dt) { return run_ks(ks.n, L, dt, static_cast<std::size_t>(std::llround(1.0 / dt)), u0); };
    const std::vector<double> a = run(0.01), b = run(0.005), e = run(0.0025);
    const double ratio = max_diff(a, b) / max_diff(b, e);
    double m0 = 0.0;
    for (double v : u0) m0 += v;
    m0 /= static_cast<double>(u0.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      double m = 0.0;
      for (double v : data.data.row(i)) m += v;
      worst = std::max(worst, std::abs(m / static_cast<double>(data.n_cells) - m0));
    }
    d = "ratio " + fmt("%.4f", ratio) + ", max mean drift " + sci(worst) + " over " + std::to_string(data.rows()) +
        " snapshots";
    return ratio >= 3.5 && ratio <= 4.5 && worst < 1e-10;
  });

  return c.exit_code();
}
