#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "irlv/channel.hpp"
#include "irlv/common.hpp"
#include "irlv/dataset.hpp"
#include "irlv/eda.hpp"
#include "irlv/eval.hpp"
#include "irlv/geometry.hpp"
#include "irlv/lssvm.hpp"
#include "irlv/mlp.hpp"
#include "irlv/nptest.hpp"

namespace irlv {

enum class ModelKind {
  Np,            // closed-form LLR (ring scenario only)
  NpQuantized,   // histogram-estimated LLR, single AP
  Glrt,          // numeric p(a|H0), single-AP ring
  MlpCe,
  MlpMse,
  Lssvm,
  OcLssvm,
  Autoencoder,
  Eda,
};

inline bool is_one_class(ModelKind k) {
  return k == ModelKind::OcLssvm || k == ModelKind::Autoencoder ||
         k == ModelKind::Glrt;
}

enum class ShadowingMode { None, Iid, Map };

struct ExperimentConfig {
  Scenario scenario = RingScenario{0.1, 2.0, 10.0};
  ChannelParams channel;
  ShadowingMode shadowing = ShadowingMode::None;
  bool fading = false;
  double grid_cell = 10.0;  // m; resolution of the correlated-map grid

  ModelKind model = ModelKind::Np;
  std::optional<LlrVariant> llr_variant;  // default derived from channel
  MlpConfig mlp;                          // used by the NN kinds
  KernelConfig svm;                       // used by the SVM kinds
  int n_levels = 300;                     // quantizer resolution
  double pseudo_count = 1.0;
  int n_quantizer_train = 0;              // raw samples for NpQuantized (0: n_train)
  int eda_multistart = 10;

  int n_train = 1000;   // n_x positions (features after k_f averaging)
  int k_f = 1;
  int n_test = 10000;
  int n_maps = 1;
  double val_frac = 0.2;
  double target_fa = 0.1;
  int roc_thresholds = 512;
  std::uint64_t seed = 1;
};

// Score convention everywhere: larger score favors H1; decision +1 iff
// score > threshold.
using ScoreFn = std::function<double(const FeatureVector&)>;

// Derives the ring LLR variant from the channel configuration.
inline LlrVariant default_llr_variant(const ExperimentConfig& cfg) {
  if (cfg.llr_variant) return *cfg.llr_variant;
  if (cfg.fading)
    return cfg.channel.nu == 3.0 ? LlrVariant::FadingNu3 : LlrVariant::FadingNu2;
  return LlrVariant::ShadowingUncorr;
}

namespace detail {

inline ShadowingMap make_area_grid_map(const ExperimentConfig& cfg,
                                       std::mt19937_64& rng) {
  const int n_aps = static_cast<int>(access_points(cfg.scenario).size());
  double x0, y0, side;
  if (const auto* u = std::get_if<UrbanScenario>(&cfg.scenario)) {
    x0 = y0 = 0.0;
    side = u->side;
  } else {
    const auto& r = std::get<RingScenario>(cfg.scenario);
    x0 = r.ap.x - r.r_out;
    y0 = r.ap.y - r.r_out;
    side = 2.0 * r.r_out;
  }
  double cell = std::min(cfg.grid_cell, side / 32.0);
  int n = static_cast<int>(std::ceil(side / cell)) + 1;
  return generate_shadowing_grid(cfg.channel, x0, y0, side / (n - 1),
                                 side / (n - 1), n, n, n_aps, rng);
}

inline Dataset make_data(const ExperimentConfig& cfg, const ShadowingMap* map,
                         int n, std::vector<RegionLabel> regions,
                         std::mt19937_64& rng) {
  return build_dataset(cfg.scenario, cfg.channel, map, n, cfg.k_f, regions,
                       cfg.fading, rng);
}

inline std::vector<double> feature_db(const Dataset& d, int ap = 0) {
  std::vector<double> v;
  v.reserve(d.size());
  for (const auto& fv : d) v.push_back(linear_to_db(fv.a[ap]));
  return v;
}

}  // namespace detail

// A trained scorer plus whatever state has to stay alive behind the closure.
struct TrainedScorer {
  ScoreFn score;
  std::shared_ptr<void> state;
};

inline TrainedScorer train_scorer(const ExperimentConfig& cfg,
                                  const Dataset& train, const ShadowingMap* map,
                                  std::mt19937_64& rng) {
  switch (cfg.model) {
    case ModelKind::Np: {
      const auto* ring = std::get_if<RingScenario>(&cfg.scenario);
      if (!ring) throw Error("bad-config", "NP closed form needs the ring scenario");
      auto m = std::make_shared<LlrModel>(
          LlrModel{default_llr_variant(cfg), *ring, cfg.channel});
      return {[m](const FeatureVector& fv) { return -llr(*m, fv.a.at(0)); }, m};
    }
    case ModelKind::Glrt: {
      const auto* ring = std::get_if<RingScenario>(&cfg.scenario);
      if (!ring) throw Error("bad-config", "GLRT density needs the ring scenario");
      auto m = std::make_shared<LlrModel>(
          LlrModel{default_llr_variant(cfg), *ring, cfg.channel});
      return {[m](const FeatureVector& fv) {
                return -glrt_log_density_h0(*m, fv.a.at(0));
              },
              m};
    }
    case ModelKind::NpQuantized: {
      int n_q = cfg.n_quantizer_train > 0 ? cfg.n_quantizer_train : cfg.n_train;
      Dataset qtrain = detail::make_data(
          cfg, map, n_q, {RegionLabel::H0, RegionLabel::H1}, rng);
      std::vector<double> h0, h1;
      for (const auto& fv : qtrain)
        (fv.label == -1 ? h0 : h1).push_back(linear_to_db(fv.a.at(0)));
      auto q = std::make_shared<QuantizedPdfPair>(
          fit_quantized_pdfs(h0, h1, cfg.n_levels, cfg.pseudo_count));
      return {[q](const FeatureVector& fv) {
                return -q->llr(linear_to_db(fv.a.at(0)));
              },
              q};
    }
    case ModelKind::MlpCe:
    case ModelKind::MlpMse: {
      auto m = std::make_shared<MlpModel>(cfg.model == ModelKind::MlpCe
                                              ? train_ce(cfg.mlp, train)
                                              : train_mse(cfg.mlp, train));
      return {[m](const FeatureVector& fv) { return score(*m, fv); }, m};
    }
    case ModelKind::Lssvm: {
      auto m = std::make_shared<SvmModel>(train_twoclass(train, cfg.svm));
      return {[m](const FeatureVector& fv) { return score(*m, fv); }, m};
    }
    case ModelKind::OcLssvm: {
      auto m = std::make_shared<SvmModel>(train_oneclass(train, cfg.svm));
      return {[m](const FeatureVector& fv) { return oc_score(*m, fv); }, m};
    }
    case ModelKind::Autoencoder: {
      auto m = std::make_shared<MlpModel>(train_autoencoder(cfg.mlp, train));
      return {[m](const FeatureVector& fv) { return ae_score(*m, fv); }, m};
    }
    case ModelKind::Eda: {
      auto m = std::make_shared<EdaModel>(
          EdaModel{cfg.scenario, cfg.channel, cfg.eda_multistart});
      return {[m](const FeatureVector& fv) { return eda_score(*m, fv); }, m};
    }
  }
  throw Error("bad-config", "unknown model kind");
}

struct MapResult {
  RocCurve curve;
  Rates operating_point;  // at the calibrated threshold for target_fa
  double threshold = 0.0;
};

struct ExperimentResult {
  RocCurve averaged;
  std::vector<MapResult> per_map;
  int maps_failed = 0;
};

// One shadowing-map repetition: generate data, train, calibrate on a
// validation split, sweep the ROC on fresh test data.
inline MapResult run_single_map(const ExperimentConfig& cfg, std::uint64_t map_seed) {
  std::mt19937_64 rng(map_seed);
  std::optional<ShadowingMap> map;
  const ShadowingMap* map_ptr = nullptr;
  if (cfg.shadowing == ShadowingMode::Map && cfg.channel.sigma_s_db > 0) {
    map = detail::make_area_grid_map(cfg, rng);
    map_ptr = &*map;
  }
  ChannelParams ch = cfg.channel;
  if (cfg.shadowing == ShadowingMode::None) ch.sigma_s_db = 0.0;
  ExperimentConfig local = cfg;
  local.channel = ch;

  const bool one_class = is_one_class(cfg.model);
  std::vector<RegionLabel> train_regions =
      one_class ? std::vector<RegionLabel>{RegionLabel::H0}
                : std::vector<RegionLabel>{RegionLabel::H0, RegionLabel::H1};

  int n_val = std::max(1, static_cast<int>(cfg.val_frac * cfg.n_train));
  Dataset train = detail::make_data(local, map_ptr, cfg.n_train, train_regions, rng);
  Dataset val_h0 =
      detail::make_data(local, map_ptr, n_val, {RegionLabel::H0}, rng);
  Dataset test = detail::make_data(local, map_ptr, cfg.n_test,
                                   {RegionLabel::H0, RegionLabel::H1}, rng);

  TrainedScorer scorer = train_scorer(local, train, map_ptr, rng);

  std::vector<double> val_scores;
  for (const auto& fv : val_h0) val_scores.push_back(scorer.score(fv));
  MapResult res;
  res.threshold = calibrate_threshold(val_scores, cfg.target_fa).threshold;

  std::vector<double> s0, s1;
  std::vector<int> decisions, truth;
  for (const auto& fv : test) {
    double s = scorer.score(fv);
    (fv.label == -1 ? s0 : s1).push_back(s);
    decisions.push_back(s > res.threshold ? +1 : -1);
    truth.push_back(fv.label);
  }
  res.operating_point = estimate_rates(decisions, truth);
  res.curve = roc_sweep(s0, s1, cfg.roc_thresholds);
  return res;
}

// Full experiment: independent shadowing maps, averaged MD at matched FA.
// A map whose training fails is skipped and counted.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.n_maps < 1 || cfg.n_train < 1 || cfg.n_test < 1)
    throw Error("bad-config", "positive sizes required");
  ExperimentResult out;
  std::vector<RocCurve> curves;
  for (int i = 0; i < cfg.n_maps; ++i) {
    try {
      MapResult r = run_single_map(cfg, mix_seed(cfg.seed, i));
      curves.push_back(r.curve);
      out.per_map.push_back(std::move(r));
    } catch (const Error&) {
      ++out.maps_failed;
    }
  }
  if (curves.empty()) throw Error("all-maps-failed", "no successful repetitions");
  out.averaged = average_curves(curves);
  return out;
}

}  // namespace irlv
