// Config-driven experiment runner: simulation, training, evaluation, ROC
// sweeps, external grid ingestion, and canned figure bundles.
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "irlv/experiment.hpp"
#include "irlv/serialize.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace irlv;

namespace {

// ---------------------------------------------------------------------------
// Small utilities

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exit_code_for(const std::string& code) {
  static const std::set<std::string> config = {
      "bad-config",   "unknown-key", "bad-schema",  "bad-ring",
      "bad-roi",      "bad-street",  "bad-ap",      "bad-argument",
      "bad-variant",  "bad-kf",      "bad-size",    "bad-regions"};
  static const std::set<std::string> numeric = {
      "singular-system",     "no-convergence",      "covariance-not-psd",
      "all-maps-failed",     "divergence",          "degenerate-shadowing",
      "non-positive-distance", "non-positive-height"};
  if (config.count(code)) return 2;
  if (numeric.count(code)) return 4;
  return 3;
}

// ---------------------------------------------------------------------------
// Config parsing (schema version 1, unknown keys rejected)

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw Error("bad-config", where + " must be an object");
  for (const auto& kv : obj.items())
    if (!allowed.count(kv.key()))
      throw Error("unknown-key", "unknown key '" + kv.key() + "' in " + where);
}

double num(const json& obj, const char* key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number()) throw Error("bad-config", std::string(key) + " must be a number");
  return obj[key].get<double>();
}

int integer(const json& obj, const char* key, int dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_integer())
    throw Error("bad-config", std::string(key) + " must be an integer");
  return obj[key].get<int>();
}

bool boolean(const json& obj, const char* key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_boolean()) throw Error("bad-config", std::string(key) + " must be a boolean");
  return obj[key].get<bool>();
}

std::string str(const json& obj, const char* key, const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_string()) throw Error("bad-config", std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "np") return ModelKind::Np;
  if (s == "np-quantized") return ModelKind::NpQuantized;
  if (s == "glrt") return ModelKind::Glrt;
  if (s == "mlp-ce") return ModelKind::MlpCe;
  if (s == "mlp-mse") return ModelKind::MlpMse;
  if (s == "lssvm") return ModelKind::Lssvm;
  if (s == "oclssvm") return ModelKind::OcLssvm;
  if (s == "autoencoder") return ModelKind::Autoencoder;
  if (s == "eda") return ModelKind::Eda;
  throw Error("bad-config", "unknown model kind '" + s + "'");
}

struct LoadedConfig {
  ExperimentConfig cfg;
  std::string model_kind_name;
  std::vector<int> hidden{5, 5};
  std::string out_dir = "out";
  std::string config_text;  // raw bytes, hashed into the manifest
};

LoadedConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("bad-config", std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"schema_version", "seed", "scenario", "channel", "model",
                 "training", "eval", "output"},
             "top level");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != 1)
    throw Error("bad-schema", "schema_version must be the integer 1");
  if (!j.contains("scenario")) throw Error("bad-config", "scenario section required");
  if (!j.contains("model")) throw Error("bad-config", "model section required");

  LoadedConfig out;
  out.config_text = text;
  ExperimentConfig& cfg = out.cfg;
  cfg.seed = static_cast<std::uint64_t>(integer(j, "seed", 1));

  // scenario
  const json& sc = j["scenario"];
  std::string kind = str(sc, "kind", "");
  if (kind == "ring") {
    check_keys(sc, {"kind", "r_min", "r_in", "r_out"}, "scenario");
    cfg.scenario = RingScenario{num(sc, "r_min", 0.1), num(sc, "r_in", 2.0),
                                num(sc, "r_out", 10.0)};
  } else if (kind == "urban") {
    check_keys(sc,
               {"kind", "d1", "d2", "beta1", "beta2", "n_aps", "block",
                "street_width", "ap_height"},
               "scenario");
    cfg.scenario = make_crossroads_urban(
        num(sc, "d1", 80.0), num(sc, "d2", 80.0), num(sc, "beta1", 100.0),
        num(sc, "beta2", 100.0), integer(sc, "n_aps", 11),
        num(sc, "block", 255.0), num(sc, "street_width", 10.0),
        num(sc, "ap_height", 15.0));
  } else {
    throw Error("bad-config", "scenario.kind must be 'ring' or 'urban'");
  }

  // channel
  const json ch = j.value("channel", json::object());
  check_keys(ch, {"f_hz", "nu", "sigma_s_db", "d_c", "shadowing", "fading",
                  "grid_cell"},
             "channel");
  cfg.channel.f = num(ch, "f_hz", 2.12e9);
  cfg.channel.nu = num(ch, "nu", 2.0);
  cfg.channel.sigma_s_db = num(ch, "sigma_s_db", 0.0);
  cfg.channel.d_c = num(ch, "d_c", 75.0);
  cfg.fading = boolean(ch, "fading", false);
  cfg.grid_cell = num(ch, "grid_cell", 10.0);
  std::string sh = str(ch, "shadowing", "none");
  if (sh == "none") cfg.shadowing = ShadowingMode::None;
  else if (sh == "iid") cfg.shadowing = ShadowingMode::Iid;
  else if (sh == "map") cfg.shadowing = ShadowingMode::Map;
  else throw Error("bad-config", "channel.shadowing must be none|iid|map");

  // model
  const json& mo = j["model"];
  check_keys(mo,
             {"kind", "hidden", "learning_rate", "epochs", "batch", "gamma_k",
              "regularization", "max_train", "n_levels", "pseudo_count",
              "n_quantizer_train", "eda_multistart", "llr_variant"},
             "model");
  out.model_kind_name = str(mo, "kind", "");
  cfg.model = parse_model_kind(out.model_kind_name);
  if (mo.contains("hidden")) {
    if (!mo["hidden"].is_array()) throw Error("bad-config", "model.hidden must be an array");
    out.hidden.clear();
    for (const auto& v : mo["hidden"]) {
      if (!v.is_number_integer()) throw Error("bad-config", "model.hidden entries must be integers");
      out.hidden.push_back(v.get<int>());
    }
  }
  double lr = num(mo, "learning_rate", 0.05);
  int epochs = integer(mo, "epochs", 50);
  int batch = integer(mo, "batch", 32);
  cfg.svm.gamma_k = num(mo, "gamma_k", 0.0);
  cfg.svm.C = num(mo, "regularization", 10.0);
  cfg.svm.max_train = integer(mo, "max_train", 20000);
  cfg.svm.seed = mix_seed(cfg.seed, 102);
  cfg.n_levels = integer(mo, "n_levels", 300);
  cfg.pseudo_count = num(mo, "pseudo_count", 1.0);
  cfg.n_quantizer_train = integer(mo, "n_quantizer_train", 0);
  cfg.eda_multistart = integer(mo, "eda_multistart", 10);
  if (mo.contains("llr_variant")) {
    std::string v = str(mo, "llr_variant", "");
    if (v == "fading-nu2") cfg.llr_variant = LlrVariant::FadingNu2;
    else if (v == "fading-nu3") cfg.llr_variant = LlrVariant::FadingNu3;
    else if (v == "shadowing") cfg.llr_variant = LlrVariant::ShadowingUncorr;
    else throw Error("bad-config", "model.llr_variant must be fading-nu2|fading-nu3|shadowing");
  }

  // training / eval / output
  const json tr = j.value("training", json::object());
  check_keys(tr, {"n_train", "k_f", "val_frac"}, "training");
  cfg.n_train = integer(tr, "n_train", 1000);
  cfg.k_f = integer(tr, "k_f", 1);
  cfg.val_frac = num(tr, "val_frac", 0.2);
  const json ev = j.value("eval", json::object());
  check_keys(ev, {"n_test", "n_maps", "target_fa", "roc_thresholds"}, "eval");
  cfg.n_test = integer(ev, "n_test", 10000);
  cfg.n_maps = integer(ev, "n_maps", 1);
  cfg.target_fa = num(ev, "target_fa", 0.1);
  cfg.roc_thresholds = integer(ev, "roc_thresholds", 512);
  const json op = j.value("output", json::object());
  check_keys(op, {"dir"}, "output");
  out.out_dir = str(op, "dir", "out");

  if (cfg.n_train < 1 || cfg.n_test < 1 || cfg.n_maps < 1 || cfg.k_f < 1)
    throw Error("bad-config", "training/eval sizes must be positive");
  if (!(cfg.val_frac > 0.0 && cfg.val_frac < 1.0))
    throw Error("bad-config", "training.val_frac must lie in (0, 1)");
  if (!(cfg.target_fa > 0.0 && cfg.target_fa <= 1.0))
    throw Error("bad-config", "eval.target_fa must lie in (0, 1]");

  // MLP layer plan: input width equals the number of APs.
  int n_in = static_cast<int>(access_points(cfg.scenario).size());
  if (cfg.model == ModelKind::Autoencoder)
    cfg.mlp = MlpConfig::autoencoder(n_in, out.hidden, lr, epochs, batch,
                                     mix_seed(cfg.seed, 101));
  else
    cfg.mlp = MlpConfig::classifier(n_in, out.hidden, lr, epochs, batch,
                                    mix_seed(cfg.seed, 101));
  return out;
}

LoadedConfig parse_config(const std::string& path) {
  return parse_config_text(read_file(path));
}

// ---------------------------------------------------------------------------
// Output plan: refuses to overwrite without --force, writes a deterministic
// manifest (config echo hash + seed + content hash per output file).

struct OutputPlan {
  fs::path dir;
  bool force = false;
  std::string manifest_name = "manifest.txt";
  std::vector<std::string> names;  // outputs, relative to dir (manifest added)

  fs::path path(const std::string& name) const { return dir / name; }

  void reserve(const std::string& name) { names.push_back(name); }

  void check_and_prepare() const {
    std::vector<std::string> all = names;
    all.push_back(manifest_name);
    for (const auto& n : all)
      if (!force && fs::exists(dir / n))
        throw Error("output-exists",
                    (dir / n).string() + " exists; pass --force to overwrite");
    fs::create_directories(dir);
  }

  void write_manifest(const std::string& command, std::uint64_t seed,
                      const std::string& config_text) const {
    std::ofstream out(dir / manifest_name);
    if (!out) throw Error("io-error", "cannot write manifest");
    out << "irlv-manifest 1\n";
    out << "command " << command << '\n';
    out << "seed " << seed << '\n';
    out << "config-hash " << hex64(fnv1a64(config_text)) << '\n';
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& n : sorted)
      out << "output " << n << ' ' << hex64(fnv1a64(read_file((dir / n).string())))
          << '\n';
    if (!out) throw Error("io-error", "manifest write failed");
  }
};

// ---------------------------------------------------------------------------
// Scorer construction shared by evaluate

ScoreFn scorer_from_model_file(const std::string& path, std::size_t n_feat) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open model file " + path);
  std::string kind = model_kind_of(in);
  if (kind == "mlp") {
    auto m = std::make_shared<MlpModel>(load_mlp(in));
    if (static_cast<std::size_t>(m->config.layers.front()) != n_feat)
      throw Error("dimension-mismatch", "model input width does not match data");
    if (m->is_autoencoder)
      return [m](const FeatureVector& fv) { return ae_score(*m, fv); };
    return [m](const FeatureVector& fv) { return score(*m, fv); };
  }
  if (kind == "lssvm") {
    auto m = std::make_shared<SvmModel>(load_svm(in));
    if (!m->sv.empty() && m->sv.front().size() != n_feat)
      throw Error("dimension-mismatch", "model input width does not match data");
    if (m->variant == SvmVariant::OneClass)
      return [m](const FeatureVector& fv) { return oc_score(*m, fv); };
    return [m](const FeatureVector& fv) { return score(*m, fv); };
  }
  if (kind == "np-quantized") {
    auto q = std::make_shared<QuantizedPdfPair>(load_quantized(in));
    return [q](const FeatureVector& fv) { return -q->llr(linear_to_db(fv.a.at(0))); };
  }
  throw Error("parse-error", "unsupported model kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Subcommand bodies

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // overrides config output.dir when non-empty
  bool force = false;
  int jobs = 1;  // accepted for interface stability; runs are single-threaded
};

OutputPlan make_plan(const CommonArgs& a, const LoadedConfig& lc,
                     const std::string& command) {
  OutputPlan p;
  p.dir = a.out_dir.empty() ? lc.out_dir : a.out_dir;
  p.force = a.force;
  p.manifest_name = "manifest_" + command + ".txt";
  return p;
}

int cmd_simulate(const CommonArgs& args) {
  LoadedConfig lc = parse_config(args.config_path);
  ExperimentConfig cfg = lc.cfg;
  OutputPlan plan = make_plan(args, lc, "simulate");
  plan.reserve("train.csv");
  plan.reserve("val.csv");
  plan.reserve("test.csv");
  plan.check_and_prepare();

  std::mt19937_64 rng(mix_seed(cfg.seed, 0));
  std::optional<ShadowingMap> map;
  const ShadowingMap* map_ptr = nullptr;
  if (cfg.shadowing == ShadowingMode::Map && cfg.channel.sigma_s_db > 0) {
    map = detail::make_area_grid_map(cfg, rng);
    map_ptr = &*map;
  }
  ChannelParams ch = cfg.channel;
  if (cfg.shadowing == ShadowingMode::None) ch.sigma_s_db = 0.0;

  std::vector<RegionLabel> train_regions =
      is_one_class(cfg.model) ? std::vector<RegionLabel>{RegionLabel::H0}
                              : std::vector<RegionLabel>{RegionLabel::H0,
                                                         RegionLabel::H1};
  int n_val = std::max(1, static_cast<int>(cfg.val_frac * cfg.n_train));
  Dataset train = build_dataset(cfg.scenario, ch, map_ptr, cfg.n_train, cfg.k_f,
                                train_regions, cfg.fading, rng);
  Dataset val = build_dataset(cfg.scenario, ch, map_ptr, n_val, cfg.k_f,
                              {RegionLabel::H0}, cfg.fading, rng);
  Dataset test = build_dataset(cfg.scenario, ch, map_ptr, cfg.n_test, cfg.k_f,
                               {RegionLabel::H0, RegionLabel::H1}, cfg.fading, rng);
  write_dataset_csv(plan.path("train.csv").string(), train);
  write_dataset_csv(plan.path("val.csv").string(), val);
  write_dataset_csv(plan.path("test.csv").string(), test);
  plan.write_manifest("simulate", cfg.seed, lc.config_text);
  return 0;
}

int cmd_train(const CommonArgs& args, const std::string& data_path,
              bool drop_h1) {
  LoadedConfig lc = parse_config(args.config_path);
  ExperimentConfig cfg = lc.cfg;
  if (cfg.model == ModelKind::Np || cfg.model == ModelKind::Glrt ||
      cfg.model == ModelKind::Eda)
    throw Error("bad-config",
                "model kind '" + lc.model_kind_name + "' requires no training");
  OutputPlan plan = make_plan(args, lc, "train");
  plan.reserve("model.txt");
  plan.reserve("training_report.txt");
  plan.check_and_prepare();

  std::string source = data_path.empty() ? plan.path("train.csv").string() : data_path;
  Dataset data = read_dataset_csv(source);

  if (is_one_class(cfg.model) || cfg.model == ModelKind::Autoencoder) {
    bool has_h1 = std::any_of(data.begin(), data.end(),
                              [](const FeatureVector& fv) { return fv.label == +1; });
    if (has_h1 && !drop_h1)
      throw Error("h1-rows-present",
                  "one-class training data contains H1 rows; pass --drop-h1 to drop them");
    if (has_h1) {
      Dataset filtered;
      for (auto& fv : data)
        if (fv.label == -1) filtered.push_back(std::move(fv));
      data = std::move(filtered);
    }
  }

  std::ofstream report(plan.path("training_report.txt"));
  if (!report) throw Error("io-error", "cannot write training report");
  report << "model " << lc.model_kind_name << '\n';
  report << "n_rows " << data.size() << '\n';

  switch (cfg.model) {
    case ModelKind::MlpCe:
    case ModelKind::MlpMse:
    case ModelKind::Autoencoder: {
      MlpModel m = cfg.model == ModelKind::MlpCe    ? train_ce(cfg.mlp, data)
                   : cfg.model == ModelKind::MlpMse ? train_mse(cfg.mlp, data)
                                                    : train_autoencoder(cfg.mlp, data);
      save_model_file(plan.path("model.txt").string(), m);
      report << "loss_trace";
      for (double l : m.loss_trace) report << ' ' << fmt17(l);
      report << '\n';
      break;
    }
    case ModelKind::Lssvm:
    case ModelKind::OcLssvm: {
      SvmModel m = cfg.model == ModelKind::Lssvm ? train_twoclass(data, cfg.svm)
                                                 : train_oneclass(data, cfg.svm);
      save_model_file(plan.path("model.txt").string(), m);
      report << "solver_residual " << fmt17(m.solver_residual) << '\n';
      report << "gamma_k " << fmt17(m.kcfg.gamma_k) << '\n';
      break;
    }
    case ModelKind::NpQuantized: {
      std::vector<double> h0, h1;
      for (const auto& fv : data)
        (fv.label == -1 ? h0 : h1).push_back(linear_to_db(fv.a.at(0)));
      QuantizedPdfPair q =
          fit_quantized_pdfs(h0, h1, cfg.n_levels, cfg.pseudo_count);
      save_model_file(plan.path("model.txt").string(), q);
      report << "n_levels " << q.n_levels << '\n';
      report << "support " << fmt17(q.lo) << ' ' << fmt17(q.hi) << '\n';
      break;
    }
    default:
      throw Error("bad-config",
                  "model kind '" + lc.model_kind_name + "' requires no training");
  }
  if (!report) throw Error("io-error", "training report write failed");
  report.close();
  plan.write_manifest("train", cfg.seed, lc.config_text);
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& data_path,
                 const std::string& model_path, const std::string& calib_path) {
  LoadedConfig lc = parse_config(args.config_path);
  ExperimentConfig cfg = lc.cfg;
  OutputPlan plan = make_plan(args, lc, "evaluate");
  plan.reserve("roc.csv");
  plan.reserve("evaluation.txt");
  plan.check_and_prepare();

  std::string source = data_path.empty() ? plan.path("test.csv").string() : data_path;
  Dataset data = read_dataset_csv(source);
  if (data.empty()) throw Error("empty-data", "no rows in " + source);
  std::size_t n_feat = data.front().a.size();

  ScoreFn scorer;
  if (!model_path.empty()) {
    scorer = scorer_from_model_file(model_path, n_feat);
  } else if (cfg.model == ModelKind::Np || cfg.model == ModelKind::Glrt ||
             cfg.model == ModelKind::Eda) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 1));
    scorer = train_scorer(cfg, Dataset{}, nullptr, rng).score;
  } else {
    throw Error("bad-config",
                "model kind '" + lc.model_kind_name + "' needs --model FILE");
  }

  std::vector<double> calib_scores;
  if (!calib_path.empty()) {
    Dataset calib = read_dataset_csv(calib_path);
    for (const auto& fv : calib)
      if (fv.label == -1) calib_scores.push_back(scorer(fv));
  } else {
    for (const auto& fv : data)
      if (fv.label == -1) calib_scores.push_back(scorer(fv));
  }
  if (calib_scores.empty())
    throw Error("empty-class", "no H0 rows available for calibration");
  double threshold = calibrate_threshold(calib_scores, cfg.target_fa).threshold;

  std::vector<double> s0, s1;
  std::vector<int> decisions, truth;
  for (const auto& fv : data) {
    double s = scorer(fv);
    (fv.label == -1 ? s0 : s1).push_back(s);
    decisions.push_back(s > threshold ? +1 : -1);
    truth.push_back(fv.label);
  }
  Rates rates = estimate_rates(decisions, truth);
  RocCurve curve = roc_sweep(s0, s1, cfg.roc_thresholds);
  write_roc_csv(plan.path("roc.csv").string(), curve);

  std::ofstream ev(plan.path("evaluation.txt"));
  if (!ev) throw Error("io-error", "cannot write evaluation report");
  ev << "model " << lc.model_kind_name << '\n';
  ev << "target_fa " << fmt17(cfg.target_fa) << '\n';
  ev << "threshold " << fmt17(threshold) << '\n';
  ev << "p_fa " << fmt17(rates.p_fa) << ' ' << fmt17(rates.fa_ci.lo) << ' '
     << fmt17(rates.fa_ci.hi) << '\n';
  ev << "p_md " << fmt17(rates.p_md) << ' ' << fmt17(rates.md_ci.lo) << ' '
     << fmt17(rates.md_ci.hi) << '\n';
  ev << "n0 " << rates.n0 << '\n';
  ev << "n1 " << rates.n1 << '\n';
  ev << "auc " << fmt17(auc(s0, s1)) << '\n';
  if (!ev) throw Error("io-error", "evaluation report write failed");
  ev.close();
  plan.write_manifest("evaluate", cfg.seed, lc.config_text);
  return 0;
}

void write_experiment_outputs(OutputPlan& plan, const ExperimentResult& res,
                              const std::string& prefix) {
  write_roc_csv(plan.path(prefix + "roc_averaged.csv").string(), res.averaged);
  for (std::size_t i = 0; i < res.per_map.size(); ++i)
    write_roc_csv(plan.path(prefix + "roc_map_" + std::to_string(i) + ".csv").string(),
                  res.per_map[i].curve);
  std::ofstream rep(plan.path(prefix + "report.txt"));
  if (!rep) throw Error("io-error", "cannot write experiment report");
  rep << "maps_ok " << res.per_map.size() << '\n';
  rep << "maps_failed " << res.maps_failed << '\n';
  for (std::size_t i = 0; i < res.per_map.size(); ++i) {
    const auto& m = res.per_map[i];
    rep << "map " << i << " threshold " << fmt17(m.threshold) << " p_fa "
        << fmt17(m.operating_point.p_fa) << " p_md "
        << fmt17(m.operating_point.p_md) << '\n';
  }
  if (!rep) throw Error("io-error", "experiment report write failed");
}

int cmd_roc(const CommonArgs& args) {
  LoadedConfig lc = parse_config(args.config_path);
  OutputPlan plan = make_plan(args, lc, "roc");
  plan.reserve("roc_averaged.csv");
  plan.reserve("report.txt");
  // Per-map files are reserved after the run (their count depends on
  // failures), so pre-check the fixed names plus the worst case.
  for (int i = 0; i < lc.cfg.n_maps; ++i)
    if (!plan.force && fs::exists(plan.path("roc_map_" + std::to_string(i) + ".csv")))
      throw Error("output-exists", "per-map ROC files exist; pass --force");
  plan.check_and_prepare();

  ExperimentResult res = run_experiment(lc.cfg);
  for (std::size_t i = 0; i < res.per_map.size(); ++i)
    plan.reserve("roc_map_" + std::to_string(i) + ".csv");
  write_experiment_outputs(plan, res, "");
  plan.write_manifest("roc", lc.cfg.seed, lc.config_text);
  return 0;
}

// Grid CSV: header x,y,ap_1..ap_N (attenuations in dB). The dataset CSV
// header x,y,a_1..a_N,label is also accepted so exported simulations
// round-trip; any label column is ignored and labels are recomputed.
Dataset read_grid_csv(const std::string& path, const Scenario& scenario) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("bad-format", "empty grid file");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 3 || cols[0] != "x" || cols[1] != "y")
    throw Error("bad-format", "expected header x,y,ap_1..ap_N");
  bool has_label = cols.back() == "label";
  std::size_t n_feat = cols.size() - 2 - (has_label ? 1 : 0);
  if (n_feat < 1) throw Error("bad-format", "no attenuation columns");

  auto in_roi = [&](const Position& p) {
    return std::visit(
        [&](const auto& sc) -> bool {
          using T = std::decay_t<decltype(sc)>;
          if constexpr (std::is_same_v<T, RingScenario>) {
            double d = distance(p, sc.ap);
            return d >= sc.r_min && d <= sc.r_in;
          } else {
            return sc.roi.contains(p);
          }
        },
        scenario);
  };

  Dataset data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw Error("bad-value", path + ":" + std::to_string(lineno) +
                                     ": not a number: '" + tok + "'");
      }
    }
    if (vals.size() != cols.size())
      throw Error("ragged-data", path + ":" + std::to_string(lineno) +
                                     ": wrong column count");
    FeatureVector fv;
    Position p{vals[0], vals[1]};
    fv.position = p;
    fv.a.resize(n_feat);
    for (std::size_t k = 0; k < n_feat; ++k) {
      double db = vals[2 + k];
      if (!std::isfinite(db))
        throw Error("bad-value", path + ":" + std::to_string(lineno) +
                                     ": non-finite attenuation");
      fv.a[k] = db_to_linear(db);
    }
    fv.label = in_roi(p) ? -1 : +1;
    data.push_back(std::move(fv));
  }
  if (data.empty()) throw Error("empty-data", "no rows in " + path);
  return data;
}

int cmd_ingest(const CommonArgs& args, const std::string& input_path) {
  LoadedConfig lc = parse_config(args.config_path);
  ExperimentConfig cfg = lc.cfg;
  OutputPlan plan = make_plan(args, lc, "ingest");
  plan.reserve("train.csv");
  plan.reserve("test.csv");
  plan.check_and_prepare();

  // The configured AP list may legitimately contain duplicates; warn only.
  auto aps = access_points(cfg.scenario);
  for (std::size_t i = 0; i < aps.size(); ++i)
    for (std::size_t j = i + 1; j < aps.size(); ++j)
      if (aps[i].pos.x == aps[j].pos.x && aps[i].pos.y == aps[j].pos.y)
        std::cerr << "warning: duplicate AP coordinates (ap_" << i + 1
                  << " and ap_" << j + 1 << ")\n";

  Dataset data = read_grid_csv(input_path, cfg.scenario);
  std::size_t n0 = 0, n1 = 0;
  for (const auto& fv : data) (fv.label == -1 ? n0 : n1)++;
  if (n0 == 0 || n1 == 0)
    throw Error("empty-class", "ROI split left a class empty (inside=" +
                                   std::to_string(n0) + ", outside=" +
                                   std::to_string(n1) + ")");

  std::size_t n_train = std::min<std::size_t>(
      static_cast<std::size_t>(cfg.n_train), data.size() - 1);
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(mix_seed(cfg.seed, 7));
  std::shuffle(idx.begin(), idx.end(), rng);
  Dataset train, test;
  for (std::size_t i = 0; i < idx.size(); ++i)
    (i < n_train ? train : test).push_back(data[idx[i]]);
  write_dataset_csv(plan.path("train.csv").string(), train);
  write_dataset_csv(plan.path("test.csv").string(), test);
  plan.write_manifest("ingest", cfg.seed, lc.config_text);
  return 0;
}

// ---------------------------------------------------------------------------
// Canned figure bundles (desk scale)

struct Curve {
  std::string name;
  ExperimentConfig cfg;
};

ExperimentConfig base_ring_fading(double nu) {
  ExperimentConfig c;
  c.scenario = RingScenario{0.1, 2.0, 10.0};
  c.channel.nu = nu;
  c.fading = true;
  c.shadowing = ShadowingMode::None;
  c.n_train = 2000;
  c.n_test = 20000;
  c.seed = 20;
  return c;
}

ExperimentConfig base_urban(int n_aps) {
  ExperimentConfig c;
  c.scenario = make_crossroads_urban(80.0, 80.0, 100.0, 100.0, n_aps);
  c.channel.sigma_s_db = 8.0;
  c.shadowing = ShadowingMode::Map;
  c.grid_cell = 10.0;
  c.n_train = 2000;
  c.n_test = 20000;
  c.n_maps = 3;
  c.seed = 20;
  return c;
}

std::vector<Curve> figure_bundle(const std::string& fig) {
  std::vector<Curve> out;
  auto add = [&](std::string name, ExperimentConfig c) {
    out.push_back({std::move(name), std::move(c)});
  };
  if (fig == "fig2") {
    // Ring scenario: exact NP under fading (nu=2, nu=3) and uncorrelated
    // shadowing (several sigmas), plus learned verifiers under nu=2 fading.
    ExperimentConfig nu2 = base_ring_fading(2.0);
    add("np_fading_nu2", nu2);
    add("np_fading_nu3", base_ring_fading(3.0));
    for (double s : {0.1, 1.8, 6.0}) {
      ExperimentConfig c = base_ring_fading(2.0);
      c.fading = false;
      c.shadowing = ShadowingMode::Iid;
      c.channel.sigma_s_db = s;
      std::ostringstream name;
      name << "np_shadowing_sigma_" << s;
      add(name.str(), c);
    }
    ExperimentConfig mlp = nu2;
    mlp.model = ModelKind::MlpCe;
    mlp.mlp = MlpConfig::classifier(1, {5, 5}, 0.05, 100, 32, mix_seed(mlp.seed, 101));
    add("mlp_ce", mlp);
    ExperimentConfig svm = nu2;
    svm.model = ModelKind::Lssvm;
    add("lssvm", svm);
  } else if (fig == "fig5") {
    // Single-AP urban scenario with correlated shadowing: estimated
    // (quantized) NP against a learned classifier.
    ExperimentConfig npq = base_urban(1);
    npq.model = ModelKind::NpQuantized;
    npq.n_quantizer_train = 50000;
    add("np_quantized", npq);
    ExperimentConfig mlp = base_urban(1);
    mlp.model = ModelKind::MlpCe;
    mlp.mlp = MlpConfig::classifier(1, {5, 5}, 0.05, 100, 32, mix_seed(mlp.seed, 101));
    add("mlp_ce", mlp);
  } else if (fig == "fig6") {
    // Training-set-size sweep for the learned classifier.
    for (int s : {200, 630, 2000}) {
      ExperimentConfig c = base_urban(5);
      c.model = ModelKind::MlpCe;
      c.mlp = MlpConfig::classifier(5, {8, 8}, 0.05, 100, 32, mix_seed(c.seed, 101));
      c.n_train = s;
      add("mlp_ce_S" + std::to_string(s), c);
    }
  } else if (fig == "fig8") {
    // Fading-average effect (k_f) plus the distance-estimation baseline.
    for (int kf : {1, 10}) {
      ExperimentConfig c = base_urban(5);
      c.fading = true;
      c.k_f = kf;
      c.model = ModelKind::MlpCe;
      c.mlp = MlpConfig::classifier(5, {8, 8}, 0.05, 100, 32, mix_seed(c.seed, 101));
      add("mlp_ce_kf" + std::to_string(kf), c);
    }
    ExperimentConfig eda = base_urban(5);
    eda.model = ModelKind::Eda;
    eda.n_test = 2000;
    eda.n_maps = 1;
    add("eda", eda);
  } else if (fig == "fig10") {
    // Two-class against one-class verifiers on the same urban scenario.
    for (auto [name, kind] :
         std::initializer_list<std::pair<const char*, ModelKind>>{
             {"mlp_ce", ModelKind::MlpCe},
             {"lssvm", ModelKind::Lssvm},
             {"oclssvm", ModelKind::OcLssvm},
             {"autoencoder", ModelKind::Autoencoder}}) {
      ExperimentConfig c = base_urban(5);
      c.model = kind;
      if (kind == ModelKind::Autoencoder)
        c.mlp = MlpConfig::autoencoder(5, {4, 2, 4}, 0.05, 200, 32, mix_seed(c.seed, 101));
      else
        c.mlp = MlpConfig::classifier(5, {8, 8}, 0.05, 100, 32, mix_seed(c.seed, 101));
      add(name, c);
    }
  } else if (fig == "fig11") {
    // Measurement-grid-style qualitative run: many APs, correlated maps.
    ExperimentConfig c = base_urban(11);
    c.model = ModelKind::MlpCe;
    c.mlp = MlpConfig::classifier(11, {10, 10}, 0.05, 100, 32, mix_seed(c.seed, 101));
    add("mlp_ce_grid", c);
  } else {
    throw Error("bad-argument", "unknown figure id '" + fig + "'");
  }
  return out;
}

int cmd_reproduce_figure(const std::string& fig, std::string out_dir, bool force) {
  std::vector<Curve> curves = figure_bundle(fig);
  OutputPlan plan;
  plan.dir = out_dir.empty() ? fs::path("figures") / fig : fs::path(out_dir);
  plan.force = force;
  for (const auto& c : curves) plan.reserve(c.name + ".csv");
  plan.reserve("report.txt");
  plan.check_and_prepare();

  std::ofstream rep(plan.path("report.txt"));
  if (!rep) throw Error("io-error", "cannot write figure report");
  rep << "figure " << fig << '\n';
  for (const auto& c : curves) {
    ExperimentResult res = run_experiment(c.cfg);
    write_roc_csv(plan.path(c.name + ".csv").string(), res.averaged);
    double md = md_at_fa(res.averaged, c.cfg.target_fa);
    rep << "curve " << c.name << " maps_ok " << res.per_map.size()
        << " maps_failed " << res.maps_failed << " p_md_at_fa_"
        << fmt17(c.cfg.target_fa) << ' ' << fmt17(md) << '\n';
  }
  if (!rep) throw Error("io-error", "figure report write failed");
  rep.close();
  plan.write_manifest("reproduce-figure " + fig, curves.front().cfg.seed, fig);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-region location verification toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string data_path, model_path, calib_path, input_path, figure;
  bool drop_h1 = false;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* opt = sub->add_option("--config", common.config_path, "run configuration (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", common.out_dir, "output directory (overrides config)");
    sub->add_flag("--force", common.force, "overwrite existing outputs");
    sub->add_option("--jobs", common.jobs,
                    "worker cap (reserved; runs are single-threaded)");
  };

  auto* sim = app.add_subcommand("simulate", "generate train/val/test datasets");
  add_common(sim);
  auto* trn = app.add_subcommand("train", "fit a model on a dataset CSV");
  add_common(trn);
  trn->add_option("--data", data_path, "training CSV (default <out>/train.csv)");
  trn->add_flag("--drop-h1", drop_h1, "drop H1 rows for one-class training");
  auto* ev = app.add_subcommand("evaluate", "score a dataset and write a ROC CSV");
  add_common(ev);
  ev->add_option("--data", data_path, "test CSV (default <out>/test.csv)");
  ev->add_option("--model", model_path, "trained model file");
  ev->add_option("--calib", calib_path, "H0 calibration CSV (default: H0 rows of --data)");
  auto* roc = app.add_subcommand("roc", "full simulate+train+sweep experiment");
  add_common(roc);
  auto* ing = app.add_subcommand("ingest", "split an external attenuation grid CSV");
  add_common(ing);
  ing->add_option("--input", input_path, "grid CSV (header x,y,ap_1..ap_N, dB)")->required();
  auto* fig = app.add_subcommand("reproduce-figure", "run a canned experiment bundle");
  fig->add_option("figure", figure, "one of fig2 fig5 fig6 fig8 fig10 fig11")->required();
  fig->add_option("--out", common.out_dir, "output directory (default figures/<id>)");
  fig->add_flag("--force", common.force, "overwrite existing outputs");
  fig->add_option("--jobs", common.jobs,
                  "worker cap (reserved; runs are single-threaded)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common);
    if (trn->parsed()) return cmd_train(common, data_path, drop_h1);
    if (ev->parsed()) return cmd_evaluate(common, data_path, model_path, calib_path);
    if (roc->parsed()) return cmd_roc(common);
    if (ing->parsed()) return cmd_ingest(common, input_path);
    if (fig->parsed()) return cmd_reproduce_figure(figure, common.out_dir, common.force);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
