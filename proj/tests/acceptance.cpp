// Acceptance suite: one criterion per invocation (argv[1] in 1..10), each
// printing a single PASS/FAIL line with the measured quantities.
//
// All tolerances are fixed here; reference constants were computed with an
// independent high-precision oracle before implementation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "irlv/experiment.hpp"

using namespace irlv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double std_error(const std::vector<double>& v) {
  double m = mean(v);
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  return std::sqrt(s2 / (v.size() - 1) / v.size());
}

// ---------------------------------------------------------------------------
// Shared experiment helper: one shadowing-map repetition that reports the
// interpolated P_MD at the FA target and the AUC on the test scores.

struct Trial {
  double md_at_fa = 1.0;
  double auc_value = 0.5;
};

Trial run_trial(const ExperimentConfig& cfg, std::uint64_t map_seed,
                double fa) {
  std::mt19937_64 rng(map_seed);
  std::optional<ShadowingMap> map;
  const ShadowingMap* map_ptr = nullptr;
  if (cfg.shadowing == ShadowingMode::Map && cfg.channel.sigma_s_db > 0) {
    map = detail::make_area_grid_map(cfg, rng);
    map_ptr = &*map;
  }
  ExperimentConfig local = cfg;
  if (cfg.shadowing == ShadowingMode::None) local.channel.sigma_s_db = 0.0;

  std::vector<RegionLabel> train_regions =
      is_one_class(cfg.model) ? std::vector<RegionLabel>{RegionLabel::H0}
                              : std::vector<RegionLabel>{RegionLabel::H0,
                                                         RegionLabel::H1};
  Dataset train =
      detail::make_data(local, map_ptr, cfg.n_train, train_regions, rng);
  Dataset test = detail::make_data(local, map_ptr, cfg.n_test,
                                   {RegionLabel::H0, RegionLabel::H1}, rng);
  TrainedScorer scorer = train_scorer(local, train, map_ptr, rng);
  std::vector<double> s0, s1;
  for (const auto& fv : test)
    (fv.label == -1 ? s0 : s1).push_back(scorer.score(fv));
  Trial t;
  t.md_at_fa = md_at_fa(roc_sweep(s0, s1, 2048), fa);
  t.auc_value = auc(s0, s1);
  return t;
}

std::vector<double> md_over_maps(const ExperimentConfig& cfg, double fa) {
  std::vector<double> mds;
  for (int i = 0; i < cfg.n_maps; ++i)
    mds.push_back(run_trial(cfg, mix_seed(cfg.seed, i), fa).md_at_fa);
  return mds;
}

// Direct MD estimate with independent calibration data: threshold at the FA
// target from a large H0 sample, miss count on a large H1 sample.
struct MdEstimate {
  double md = 1.0;
  double se = 0.0;
};

MdEstimate md_with_se(const ScoreFn& score, const Dataset& h0_cal,
                      const Dataset& h1, double fa) {
  std::vector<double> cal;
  cal.reserve(h0_cal.size());
  for (const auto& fv : h0_cal) cal.push_back(score(fv));
  double thr = calibrate_threshold(cal, fa).threshold;
  double miss = 0;
  for (const auto& fv : h1)
    if (score(fv) <= thr) miss += 1;
  MdEstimate e;
  double n = static_cast<double>(h1.size());
  e.md = miss / n;
  e.se = std::sqrt(e.md * (1.0 - e.md) / n);
  return e;
}

ExperimentConfig ring_fading(double nu, std::uint64_t seed) {
  ExperimentConfig c;
  c.scenario = RingScenario{0.1, 2.0, 10.0};
  c.channel.nu = nu;
  c.fading = true;
  c.shadowing = ShadowingMode::None;
  c.seed = seed;
  return c;
}

ScoreFn np_scorer(LlrVariant variant, const ChannelParams& ch) {
  auto m = std::make_shared<LlrModel>(
      LlrModel{variant, RingScenario{0.1, 2.0, 10.0}, ch});
  return [m](const FeatureVector& fv) { return -llr(*m, fv.a.at(0)); };
}

// ---------------------------------------------------------------------------
// 1. Closed-form vs quadrature-oracle LLR agreement on 200-point grids.

Outcome criterion1() {
  struct Case {
    LlrVariant variant;
    double nu, sigma, lo_db, hi_db;
    const char* name;
  };
  // Grids span the band where both regional densities are representable in
  // double precision (the true LLR is finite everywhere, but the quadrature
  // oracle underflows outside roughly +-15 sigma around the path-loss range).
  std::vector<Case> cases = {
      {LlrVariant::FadingNu2, 2.0, 0.0, 40.0, 90.0, "fading nu=2"},
      {LlrVariant::FadingNu3, 3.0, 0.0, 55.0, 120.0, "fading nu=3"},
      {LlrVariant::ShadowingUncorr, 2.0, 0.1, 43.5, 46.5, "shadowing 0.1 dB"},
      {LlrVariant::ShadowingUncorr, 2.0, 1.8, 20.0, 70.0, "shadowing 1.8 dB"},
      {LlrVariant::ShadowingUncorr, 2.0, 6.0, 15.0, 90.0, "shadowing 6 dB"},
  };
  double worst = 0.0;
  std::string worst_case;
  for (const auto& cs : cases) {
    ChannelParams ch;
    ch.nu = cs.nu;
    ch.sigma_s_db = cs.sigma;
    LlrModel closed{cs.variant, RingScenario{0.1, 2.0, 10.0}, ch};
    LlrModel oracle{LlrVariant::NumericOracle, RingScenario{0.1, 2.0, 10.0}, ch};
    for (int i = 0; i < 200; ++i) {
      double db = cs.lo_db + (cs.hi_db - cs.lo_db) * i / 199.0;
      double a = db_to_linear(db);
      double cf = llr(closed, a);
      double orc = llr(oracle, a);
      double rel = std::abs(cf - orc) / std::max(1.0, std::abs(orc));
      if (rel > worst) {
        worst = rel;
        worst_case = std::string(cs.name) + " at " + std::to_string(db) + " dB";
      }
    }
  }
  std::ostringstream d;
  d << "worst relative error " << worst << " (" << worst_case
    << "), tolerance 1e-6 over 5x200 grid points";
  return {worst <= 1e-6, d.str()};
}

// ---------------------------------------------------------------------------
// 2. Learned verifiers match the exact NP P_MD within +-0.03 at three FA
//    targets (ring scenario, 1e5 training points, 2e5 test points).

Outcome criterion2() {
  ExperimentConfig cfg = ring_fading(2.0, 202);
  std::mt19937_64 rng(cfg.seed);
  Dataset train = build_dataset(cfg.scenario, cfg.channel, nullptr, 100000, 1,
                                {RegionLabel::H0, RegionLabel::H1}, true, rng);
  Dataset test = build_dataset(cfg.scenario, cfg.channel, nullptr, 200000, 1,
                               {RegionLabel::H0, RegionLabel::H1}, true, rng);

  ScoreFn np = np_scorer(LlrVariant::FadingNu2, cfg.channel);
  MlpModel mlp = train_ce(MlpConfig::classifier(1, {5, 5}, 0.05, 60, 32, 7), train);
  // LS-SVM training is subsampled to 4000 points (documented cap below the
  // spec's 2e4 ceiling): the O(S^3) dense solve at 2e4 exceeds the single-core
  // desk budget while 4000 already saturates the ROC on this 1-d problem.
  KernelConfig kc;
  kc.max_train = 4000;
  kc.seed = 9;
  SvmModel svm = train_twoclass(train, kc);

  auto curve_for = [&](const ScoreFn& s) {
    std::vector<double> s0, s1;
    for (const auto& fv : test) (fv.label == -1 ? s0 : s1).push_back(s(fv));
    return roc_sweep(s0, s1, 4096);
  };
  RocCurve c_np = curve_for(np);
  RocCurve c_mlp = curve_for([&](const FeatureVector& fv) { return score(mlp, fv); });
  RocCurve c_svm = curve_for([&](const FeatureVector& fv) { return score(svm, fv); });

  bool pass = true;
  std::ostringstream d;
  for (double fa : {0.05, 0.1, 0.2}) {
    double m_np = md_at_fa(c_np, fa);
    double m_mlp = md_at_fa(c_mlp, fa);
    double m_svm = md_at_fa(c_svm, fa);
    d << "FA=" << fa << ": NP " << m_np << " MLP " << m_mlp << " LS-SVM "
      << m_svm << "; ";
    if (std::abs(m_mlp - m_np) > 0.03 || std::abs(m_svm - m_np) > 0.03)
      pass = false;
  }
  d << "tolerance +-0.03";
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 3. Exact-NP curve orderings, each gap 3-sigma separated.

Outcome criterion3() {
  const double fa = 0.1;
  std::mt19937_64 rng(303);
  auto md_for = [&](double nu, double sigma, bool fading, LlrVariant v) {
    ChannelParams ch;
    ch.nu = nu;
    ch.sigma_s_db = sigma;
    Scenario scn = RingScenario{0.1, 2.0, 10.0};
    Dataset h0 = build_dataset(scn, ch, nullptr, 50000, 1, {RegionLabel::H0},
                               fading, rng);
    Dataset h1 = build_dataset(scn, ch, nullptr, 100000, 1, {RegionLabel::H1},
                               fading, rng);
    return md_with_se(np_scorer(v, ch), h0, h1, fa);
  };
  MdEstimate nu2 = md_for(2.0, 0.0, true, LlrVariant::FadingNu2);
  MdEstimate nu3 = md_for(3.0, 0.0, true, LlrVariant::FadingNu3);
  MdEstimate s01 = md_for(2.0, 0.1, false, LlrVariant::ShadowingUncorr);
  MdEstimate s18 = md_for(2.0, 1.8, false, LlrVariant::ShadowingUncorr);
  MdEstimate s60 = md_for(2.0, 6.0, false, LlrVariant::ShadowingUncorr);

  auto separated = [](const MdEstimate& lo, const MdEstimate& hi) {
    return hi.md - lo.md > 3.0 * std::sqrt(lo.se * lo.se + hi.se * hi.se);
  };
  bool pass = separated(nu3, nu2) && separated(s01, s18) && separated(s18, s60) &&
              separated(s18, nu2) && separated(s18, nu3);
  std::ostringstream d;
  d << "P_MD@0.1: fading nu3 " << nu3.md << " < nu2 " << nu2.md
    << "; shadowing 0.1 " << s01.md << " < 1.8 " << s18.md << " < 6 " << s60.md
    << "; both fading curves above sigma=1.8 (all gaps > 3 sigma)";
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Quantized-histogram NP (1e6 samples, 300 levels) does not beat a
//    learned model trained on only 1e3 points (urban, correlated sigma=8).

Outcome criterion4() {
  // The estimated NP test quantizes densities drawn from the channel-model
  // ensemble; a point's marginal shadowing law is N(0, sigma^2) regardless of
  // spatial correlation, so independent draws sample that ensemble exactly.
  // The learned model instead trains on data from the deployed map and can
  // adapt to its realized shadowing, which is the effect under test.
  ExperimentConfig cfg;
  cfg.scenario = make_crossroads_urban(80.0, 80.0, 100.0, 100.0, 1);
  cfg.channel.sigma_s_db = 8.0;
  cfg.shadowing = ShadowingMode::Map;
  cfg.grid_cell = 15.0;
  cfg.n_train = 1000;
  cfg.n_test = 20000;
  cfg.seed = 404;

  std::mt19937_64 qrng(mix_seed(cfg.seed, 999));
  Dataset qtrain = build_dataset(cfg.scenario, cfg.channel, nullptr, 1000000, 1,
                                 {RegionLabel::H0, RegionLabel::H1}, false, qrng);
  std::vector<double> h0_db, h1_db;
  for (const auto& fv : qtrain)
    (fv.label == -1 ? h0_db : h1_db).push_back(linear_to_db(fv.a.at(0)));
  QuantizedPdfPair q = fit_quantized_pdfs(h0_db, h1_db, 300, 1.0);
  ScoreFn np_est = [&q](const FeatureVector& fv) {
    return -q.llr(linear_to_db(fv.a.at(0)));
  };

  const int n_maps = 20;
  std::vector<double> md_npq, md_ml;
  for (int i = 0; i < n_maps; ++i) {
    std::mt19937_64 rng(mix_seed(cfg.seed, i));
    ShadowingMap map = detail::make_area_grid_map(cfg, rng);
    Dataset train = build_dataset(cfg.scenario, cfg.channel, &map, cfg.n_train,
                                  1, {RegionLabel::H0, RegionLabel::H1}, false, rng);
    Dataset test = build_dataset(cfg.scenario, cfg.channel, &map, cfg.n_test,
                                 1, {RegionLabel::H0, RegionLabel::H1}, false, rng);
    MlpModel mlp =
        train_ce(MlpConfig::classifier(1, {5, 5}, 0.05, 200, 32, 41), train);
    auto md_of = [&](const ScoreFn& s) {
      std::vector<double> s0, s1;
      for (const auto& fv : test) (fv.label == -1 ? s0 : s1).push_back(s(fv));
      return md_at_fa(roc_sweep(s0, s1, 2048), 0.1);
    };
    md_npq.push_back(md_of(np_est));
    md_ml.push_back(md_of([&](const FeatureVector& fv) { return score(mlp, fv); }));
  }
  double a = mean(md_ml), b = mean(md_npq);
  std::ostringstream d;
  d << "avg P_MD@0.1 over " << n_maps << " maps: map-trained ML(1e3 samples) "
    << a << " <= ensemble-quantized NP(1e6 samples, 300 levels) " << b;
  return {a <= b, d.str()};
}

// ---------------------------------------------------------------------------
// 5. Averaged P_MD at FA=0.1 strictly decreases over a one-decade training
//    size sweep, with non-overlapping mean +- 2 s.e. intervals.

Outcome criterion5() {
  std::vector<int> sizes = {300, 1000, 3000};
  std::vector<double> means, ses;
  for (int s : sizes) {
    ExperimentConfig cfg;
    cfg.scenario = make_crossroads_urban(80.0, 80.0, 100.0, 100.0, 10);
    cfg.channel.sigma_s_db = 8.0;
    cfg.shadowing = ShadowingMode::Map;
    cfg.grid_cell = 15.0;
    cfg.model = ModelKind::MlpCe;
    cfg.mlp = MlpConfig::classifier(10, {10, 10}, 0.05, 100, 32, 17);
    cfg.n_train = s;
    cfg.n_test = 20000;
    cfg.n_maps = 10;
    cfg.seed = 505;
    std::vector<double> mds = md_over_maps(cfg, 0.1);
    means.push_back(mean(mds));
    ses.push_back(std_error(mds));
  }
  bool pass = true;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    if (!(means[i] - 2.0 * ses[i] > means[i + 1] + 2.0 * ses[i + 1]))
      pass = false;
  std::ostringstream d;
  d << "avg P_MD@0.1 (10 maps): ";
  for (std::size_t i = 0; i < sizes.size(); ++i)
    d << "S=" << sizes[i] << " -> " << means[i] << "+-" << ses[i] << " ";
  d << "(strict decrease outside 2 s.e. intervals)";
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 6. Fading-average effect: k_f=10 cuts average P_MD at FA=0.2 by >= 5x,
//    with magnitudes within 3x of 1e-1 -> 1e-2.

Outcome criterion6() {
  // Known honest failure. Averaging the linear attenuation a = 1/g with
  // g ~ Exp cannot reduce P_MD by 5x: a is in the alpha=1 stable domain of
  // attraction, so the bulk spread of the k_f-fold mean does not contract
  // with k_f (only the lower tail is suppressed). A near-optimal reference
  // (50-NN posterior on 1e5 training points) attains a reduction factor of
  // only ~2 on this scenario and ~2-3.5 across a wide range of AP layouts,
  // so the gap below is a property of the pinned channel/averaging model,
  // not of the trained network.
  auto run_kf = [&](int kf) {
    ExperimentConfig cfg;
    cfg.scenario = make_crossroads_urban(50.0, 50.0, 150.0, 150.0, 5);
    cfg.channel.sigma_s_db = 8.0;
    cfg.shadowing = ShadowingMode::Map;
    cfg.grid_cell = 15.0;
    cfg.fading = true;
    cfg.model = ModelKind::MlpCe;
    cfg.mlp = MlpConfig::classifier(5, {16, 16}, 0.05, 150, 32, 23);
    cfg.n_train = 20000;
    cfg.k_f = kf;
    cfg.n_test = 5000;
    cfg.n_maps = 20;  // 20 x 5000 = 1e5 test points per configuration
    cfg.seed = 606;
    return mean(md_over_maps(cfg, 0.2));
  };
  double md1 = run_kf(1);
  double md10 = run_kf(10);
  bool ratio_ok = md1 >= 5.0 * md10;
  bool mag1 = md1 >= 0.1 / 3.0 && md1 <= 0.1 * 3.0;
  bool mag10 = md10 >= 0.01 / 3.0 && md10 <= 0.01 * 3.0;
  std::ostringstream d;
  d << "avg P_MD@0.2: k_f=1 -> " << md1 << ", k_f=10 -> " << md10
    << "; ratio " << md1 / std::max(md10, 1e-12)
    << " (required >= 5, magnitudes within 3x of 1e-1 and 1e-2);"
    << " a 5x reduction is unattainable when averaging heavy-tailed linear"
    << " attenuations (near-optimal k-NN reference reaches ~2x)";
  return {ratio_ok && mag1 && mag10, d.str()};
}

// ---------------------------------------------------------------------------
// 7. Learned verifiers dominate the distance-estimation baseline by >= 0.05
//    AUC on fading-free urban data.

Outcome criterion7() {
  auto auc_for = [&](ModelKind kind) {
    ExperimentConfig cfg;
    cfg.scenario = make_crossroads_urban(80.0, 80.0, 100.0, 100.0, 5);
    cfg.channel.sigma_s_db = 8.0;
    cfg.shadowing = ShadowingMode::Map;
    cfg.grid_cell = 15.0;
    cfg.model = kind;
    if (kind == ModelKind::Autoencoder)
      cfg.mlp = MlpConfig::autoencoder(5, {4, 2, 4}, 0.05, 300, 32, 29);
    cfg.n_train = 2000;
    cfg.n_test = 4000;
    cfg.seed = 707;
    std::vector<double> aucs;
    for (int i = 0; i < 3; ++i)
      aucs.push_back(run_trial(cfg, mix_seed(cfg.seed, i), 0.1).auc_value);
    return mean(aucs);
  };
  double a_eda = auc_for(ModelKind::Eda);
  double a_svm = auc_for(ModelKind::Lssvm);
  double a_oc = auc_for(ModelKind::OcLssvm);
  double a_ae = auc_for(ModelKind::Autoencoder);
  bool pass = a_svm >= a_eda + 0.05 && a_oc >= a_eda + 0.05 && a_ae >= a_eda + 0.05;
  std::ostringstream d;
  d << "avg AUC over 3 maps: EDA " << a_eda << ", LS-SVM " << a_svm
    << ", OC-LS-SVM " << a_oc << ", AE " << a_ae << " (each learned >= EDA + 0.05)";
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 8. Two-class LS-SVM P_MD <= one-class OC-LS-SVM P_MD at FA=0.1.

Outcome criterion8() {
  // Fading-free comparison on a 10-AP layout. The two-class trainer samples
  // the whole area, so only the ROI fraction of its S points are inside;
  // S is sized so those still suffice to model the authorized class.
  auto md_for = [&](ModelKind kind) {
    ExperimentConfig cfg;
    cfg.scenario = make_crossroads_urban(50.0, 50.0, 150.0, 150.0, 10);
    cfg.channel.sigma_s_db = 8.0;
    cfg.shadowing = ShadowingMode::Map;
    cfg.grid_cell = 15.0;
    cfg.fading = false;
    cfg.model = kind;
    cfg.n_train = 6000;
    cfg.n_test = 20000;
    cfg.n_maps = 5;
    cfg.seed = 808;
    return mean(md_over_maps(cfg, 0.1));
  };
  double two = md_for(ModelKind::Lssvm);
  double one = md_for(ModelKind::OcLssvm);
  std::ostringstream d;
  d << "avg P_MD@0.1 over 5 maps: two-class " << two << " <= one-class " << one;
  return {two <= one, d.str()};
}

// ---------------------------------------------------------------------------
// 9. Gradient and solver verification.

Outcome criterion9() {
  // (a) Backprop vs central finite differences, 20 random architectures.
  std::mt19937_64 rng(909);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst_grad = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    MlpConfig cfg = rep % 2 == 0
                        ? MlpConfig::classifier(3, {5, 5}, 0.05, 1, 1, 900 + rep)
                        : MlpConfig::autoencoder(4, {3, 2, 3}, 0.05, 1, 1, 900 + rep);
    LossKind kind = rep % 4 == 0 ? LossKind::CrossEntropy : LossKind::Mse;
    MlpModel m = detail::init_model(cfg);
    std::vector<double> x(cfg.layers.front()), t(cfg.layers.back());
    for (auto& v : x) v = g(rng);
    if (kind == LossKind::CrossEntropy)
      t = {rep % 8 == 0 ? 1.0 : 0.0};
    else
      for (auto& v : t) v = g(rng) * 0.25 + 0.5;
    detail::Gradients an = detail::Gradients::zeros_like(m);
    detail::backprop(m, x, t, kind, an);
    const double h = 1e-5;
    for (std::size_t l = 0; l < m.weights.size(); ++l)
      for (std::size_t k = 0; k < m.weights[l].size(); ++k) {
        double saved = m.weights[l][k];
        m.weights[l][k] = saved + h;
        double fp = detail::sample_loss(kind, detail::forward_layers(m, x).back(), t);
        m.weights[l][k] = saved - h;
        double fm = detail::sample_loss(kind, detail::forward_layers(m, x).back(), t);
        m.weights[l][k] = saved;
        double num = (fp - fm) / (2.0 * h);
        double rel = std::abs(num - an.weights[l][k]) /
                     std::max({std::abs(num), std::abs(an.weights[l][k]), 1e-6});
        worst_grad = std::max(worst_grad, rel);
      }
  }

  // (b) LS-SVM KKT residual and stationarity identity.
  Dataset data;
  for (int i = 0; i < 200; ++i) {
    FeatureVector fv;
    fv.a = {db_to_linear(50.0 + g(rng) * 4.0), db_to_linear(60.0 + g(rng) * 4.0)};
    fv.label = i % 2 == 0 ? -1 : +1;
    if (fv.label == 1)
      for (auto& v : fv.a) v *= db_to_linear(6.0);
    data.push_back(fv);
  }
  SvmModel svm = train_twoclass(data, KernelConfig{});
  double kkt = svm.solver_residual;
  double worst_row = 0.0;
  double sum_c = std::accumulate(svm.coef.begin(), svm.coef.end(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double s = score(svm, data[i]);
    double resid = std::abs(s + svm.coef[i] / svm.kcfg.C - data[i].label);
    worst_row = std::max(worst_row, resid);
  }

  // (c) Local-optimality probes on the one-class primal objective.
  Dataset h0(data.begin(), data.begin() + 100);
  for (auto& fv : h0) fv.label = -1;
  SvmModel oc = train_oneclass(h0, KernelConfig{});
  double base_obj = primal_objective(oc, h0, oc.coef, oc.bias);
  std::mt19937_64 prng(911);
  std::normal_distribution<double> pg(0.0, 1.0);
  int improvements = 0;
  for (int probe = 0; probe < 50; ++probe) {
    double eps = probe % 2 == 0 ? 1e-4 : 1e-2;
    std::vector<double> coef = oc.coef;
    for (auto& c : coef) c += eps * pg(prng);
    double bias = oc.bias + eps * pg(prng);
    if (primal_objective(oc, h0, coef, bias) <
        base_obj - 1e-9 * std::max(1.0, std::abs(base_obj)))
      ++improvements;
  }

  bool pass = worst_grad <= 1e-5 && kkt <= 1e-8 && worst_row <= 1e-6 &&
              std::abs(sum_c) <= 1e-8 && improvements == 0;
  std::ostringstream d;
  d << "gradient rel err " << worst_grad << " (<=1e-5); KKT residual " << kkt
    << " (<=1e-8); stationarity row residual " << worst_row << "; sum(c) "
    << sum_c << "; optimality probes improving: " << improvements << "/50";
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 10. Channel statistics: shadowing correlation at d_c and fading gain mean.

Outcome criterion10() {
  ChannelParams ch;
  ch.sigma_s_db = 8.0;
  std::mt19937_64 rng(1010);
  std::vector<Position> pts = {{0.0, 0.0}, {ch.d_c, 0.0}};
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  const int n_draws = 40000;
  for (int i = 0; i < n_draws; ++i) {
    ShadowingMap m = generate_shadowing_map(ch, pts, 1, rng);
    double x = m.values()[0][0], y = m.values()[0][1];
    sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
  }
  double n = n_draws;
  double corr = (sxy / n - sx / n * sy / n) /
                std::sqrt((sxx / n - sx / n * sx / n) * (syy / n - sy / n * sy / n));
  double target = std::exp(-1.0);
  bool corr_ok = std::abs(corr - target) <= 0.05 * target;

  // Fading: power gain is exponential with mean 10^(-A_dB/10), i.e. the mean
  // of 1/a over draws matches the deterministic path-gain.
  Scenario scn = RingScenario{0.1, 2.0, 10.0};
  ChannelParams fch;  // no shadowing
  Position ue{5.0, 0.0};
  double a_det_db = path_loss_db(scn, fch, ue, 0);
  double target_gain = db_to_linear(-a_det_db);
  double acc = 0.0;
  const int n_fading = 100000;
  for (int i = 0; i < n_fading; ++i) {
    FeatureVector fv = sample_attenuation(scn, fch, nullptr, ue, true, rng);
    acc += 1.0 / fv.a[0];
  }
  double mean_gain = acc / n_fading;
  bool fading_ok = std::abs(mean_gain - target_gain) <= 0.01 * target_gain;

  std::ostringstream d;
  d << "corr(d_c) " << corr << " vs e^-1 " << target << " (+-5%); mean gain "
    << mean_gain << " vs " << target_gain << " (+-1%)";
  return {corr_ok && fading_ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
    return 2;
  }
  int n = std::atoi(argv[1]);
  Outcome (*fns[])() = {criterion1, criterion2, criterion3, criterion4,
                        criterion5, criterion6, criterion7, criterion8,
                        criterion9, criterion10};
  if (n < 1 || n > 10) {
    std::fprintf(stderr, "criterion out of range\n");
    return 2;
  }
  Outcome o = fns[n - 1]();
  std::printf("criterion %d: %s — %s\n", n, o.pass ? "PASS" : "FAIL",
              o.detail.c_str());
  return o.pass ? 0 : 1;
}
