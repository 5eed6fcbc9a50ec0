#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "irlv/common.hpp"
#include "irlv/dataset.hpp"

namespace irlv {

enum class Activation { Linear, Sigmoid };
enum class LossKind { Mse, CrossEntropy };

struct MlpConfig {
  std::vector<int> layers;          // [N_in, N^(1).., N_out]
  std::vector<Activation> acts;     // one per non-input layer
  double lr = 0.05;
  int epochs = 50;
  int batch = 32;
  std::uint64_t seed = 1;

  void validate() const {
    if (layers.size() < 2) throw Error("bad-config", "need at least two layers");
    for (int n : layers)
      if (n < 1) throw Error("bad-config", "layer sizes must be >= 1");
    if (acts.size() != layers.size() - 1)
      throw Error("bad-config", "one activation per non-input layer");
    if (!(lr > 0) || epochs < 1 || batch < 1)
      throw Error("bad-config", "lr > 0, epochs >= 1, batch >= 1");
  }

  // Two-class classifier: sigmoid hidden and output layers.
  static MlpConfig classifier(int n_in, std::vector<int> hidden, double lr = 0.05,
                              int epochs = 50, int batch = 32,
                              std::uint64_t seed = 1) {
    MlpConfig c;
    c.layers.push_back(n_in);
    for (int h : hidden) c.layers.push_back(h);
    c.layers.push_back(1);
    c.acts.assign(c.layers.size() - 1, Activation::Sigmoid);
    c.lr = lr, c.epochs = epochs, c.batch = batch, c.seed = seed;
    return c;
  }

  // Autoencoder: sigmoid everywhere except the linear central (bottleneck)
  // layer; output layer linear so reconstructions are unconstrained.
  static MlpConfig autoencoder(int n_in, std::vector<int> hidden, double lr = 0.05,
                               int epochs = 200, int batch = 32,
                               std::uint64_t seed = 1) {
    if (hidden.empty()) throw Error("bad-config", "autoencoder needs hidden layers");
    int code = *std::min_element(hidden.begin(), hidden.end());
    if (code >= n_in)
      throw Error("bad-config", "bottleneck must be narrower than the input");
    MlpConfig c;
    c.layers.push_back(n_in);
    for (int h : hidden) c.layers.push_back(h);
    c.layers.push_back(n_in);
    c.acts.assign(c.layers.size() - 1, Activation::Sigmoid);
    std::size_t central = hidden.size() / 2;  // index into hidden
    c.acts[central] = Activation::Linear;
    c.acts.back() = Activation::Linear;
    c.lr = lr, c.epochs = epochs, c.batch = batch, c.seed = seed;
    return c;
  }
};

struct MlpModel {
  MlpConfig config;
  std::vector<std::vector<double>> weights;  // layer l: layers[l+1] x layers[l], row-major
  std::vector<std::vector<double>> biases;
  Standardizer stdz;
  std::vector<double> loss_trace;  // per-epoch mean loss
  bool is_autoencoder = false;
};

namespace detail {

inline double activate(Activation a, double z) {
  return a == Activation::Sigmoid ? 1.0 / (1.0 + std::exp(-z)) : z;
}
inline double activate_deriv_from_y(Activation a, double y) {
  return a == Activation::Sigmoid ? y * (1.0 - y) : 1.0;
}

inline MlpModel init_model(const MlpConfig& cfg) {
  cfg.validate();
  MlpModel m;
  m.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t l = 0; l + 1 < cfg.layers.size(); ++l) {
    int fan_in = cfg.layers[l], fan_out = cfg.layers[l + 1];
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
    for (auto& x : w) x = u(rng);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(fan_out, 0.0);
  }
  return m;
}

// Forward pass on an already-standardized input, returning all layer outputs.
inline std::vector<std::vector<double>> forward_layers(const MlpModel& m,
                                                       const std::vector<double>& z0) {
  const auto& L = m.config.layers;
  if (z0.size() != static_cast<std::size_t>(L[0]))
    throw Error("dimension-mismatch", "input size does not match N_in");
  std::vector<std::vector<double>> ys;
  ys.push_back(z0);
  for (std::size_t l = 0; l + 1 < L.size(); ++l) {
    const int n_in = L[l], n_out = L[l + 1];
    std::vector<double> y(n_out);
    for (int o = 0; o < n_out; ++o) {
      double z = m.biases[l][o];
      const double* wrow = &m.weights[l][static_cast<std::size_t>(o) * n_in];
      for (int i = 0; i < n_in; ++i) z += wrow[i] * ys.back()[i];
      y[o] = activate(m.config.acts[l], z);
    }
    ys.push_back(std::move(y));
  }
  return ys;
}

constexpr double kProbEps = 1e-12;

inline double sample_loss(LossKind kind, const std::vector<double>& y,
                          const std::vector<double>& t) {
  double L = 0.0;
  for (std::size_t o = 0; o < y.size(); ++o) {
    if (kind == LossKind::Mse) {
      double d = y[o] - t[o];
      L += d * d;
    } else {
      double p = std::clamp(y[o], kProbEps, 1.0 - kProbEps);
      L += -t[o] * std::log(p) - (1.0 - t[o]) * std::log(1.0 - p);
    }
  }
  return L;
}

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const MlpModel& m) {
    Gradients g;
    for (const auto& w : m.weights) g.weights.emplace_back(w.size(), 0.0);
    for (const auto& b : m.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
  }
};

// Accumulates dLoss/dparams for one sample into g.
inline void backprop(const MlpModel& m, const std::vector<double>& x,
                     const std::vector<double>& t, LossKind kind, Gradients& g) {
  const auto ys = forward_layers(m, x);
  const auto& L = m.config.layers;
  const std::size_t n_layers = L.size() - 1;
  std::vector<double> delta(ys.back().size());
  for (std::size_t o = 0; o < delta.size(); ++o) {
    double y = ys.back()[o];
    double dLdy;
    if (kind == LossKind::Mse) {
      dLdy = 2.0 * (y - t[o]);
    } else {
      double p = std::clamp(y, kProbEps, 1.0 - kProbEps);
      dLdy = -t[o] / p + (1.0 - t[o]) / (1.0 - p);
    }
    delta[o] = dLdy * activate_deriv_from_y(m.config.acts[n_layers - 1], y);
  }
  for (std::size_t l = n_layers; l-- > 0;) {
    const int n_in = L[l], n_out = L[l + 1];
    const auto& y_in = ys[l];
    for (int o = 0; o < n_out; ++o) {
      g.biases[l][o] += delta[o];
      double* grow = &g.weights[l][static_cast<std::size_t>(o) * n_in];
      for (int i = 0; i < n_in; ++i) grow[i] += delta[o] * y_in[i];
    }
    if (l == 0) break;
    std::vector<double> prev(n_in, 0.0);
    for (int i = 0; i < n_in; ++i) {
      double s = 0.0;
      for (int o = 0; o < n_out; ++o)
        s += m.weights[l][static_cast<std::size_t>(o) * n_in + i] * delta[o];
      prev[i] = s * activate_deriv_from_y(m.config.acts[l - 1], y_in[i]);
    }
    delta = std::move(prev);
  }
}

inline double mean_loss(const MlpModel& m, const std::vector<std::vector<double>>& X,
                        const std::vector<std::vector<double>>& T, LossKind kind) {
  double s = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    s += sample_loss(kind, forward_layers(m, X[i]).back(), T[i]);
  return s / static_cast<double>(X.size());
}

// Shuffled mini-batch SGD; aborts with diagnostics if the loss diverges.
inline void sgd(MlpModel& m, const std::vector<std::vector<double>>& X,
                const std::vector<std::vector<double>>& T, LossKind kind) {
  std::mt19937_64 rng(mix_seed(m.config.seed, 0x5d9d));
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), 0);
  m.loss_trace.push_back(mean_loss(m, X, T, kind));
  for (int epoch = 0; epoch < m.config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += m.config.batch) {
      std::size_t end = std::min(order.size(), start + m.config.batch);
      Gradients g = Gradients::zeros_like(m);
      for (std::size_t k = start; k < end; ++k)
        backprop(m, X[order[k]], T[order[k]], kind, g);
      double step = m.config.lr / static_cast<double>(end - start);
      for (std::size_t l = 0; l < m.weights.size(); ++l) {
        for (std::size_t i = 0; i < m.weights[l].size(); ++i)
          m.weights[l][i] -= step * g.weights[l][i];
        for (std::size_t i = 0; i < m.biases[l].size(); ++i)
          m.biases[l][i] -= step * g.biases[l][i];
      }
    }
    double loss = mean_loss(m, X, T, kind);
    m.loss_trace.push_back(loss);
    if (!std::isfinite(loss))
      throw Error("divergence", "training loss became non-finite at epoch " +
                                    std::to_string(epoch));
  }
}

inline std::vector<std::vector<double>> standardized_rows(const MlpModel& m,
                                                          const Dataset& data) {
  std::vector<std::vector<double>> X;
  X.reserve(data.size());
  for (const auto& fv : data) X.push_back(m.stdz.apply(to_db(fv.a)));
  return X;
}

}  // namespace detail

// Deterministic layer-by-layer evaluation; attenuations are fed in dB and
// standardized with training-set statistics stored in the model.
inline std::vector<double> forward(const MlpModel& m, const FeatureVector& fv) {
  return detail::forward_layers(m, m.stdz.apply(to_db(fv.a))).back();
}

// Classifier soft score t~(a) in (0,1).
inline double score(const MlpModel& m, const FeatureVector& fv) {
  return forward(m, fv)[0];
}

// +1 iff t~(a) > lambda.
inline int classify(const MlpModel& m, const FeatureVector& fv, double lambda) {
  return score(m, fv) > lambda ? +1 : -1;
}

namespace detail {

inline MlpModel train_classifier(const MlpConfig& cfg, const Dataset& data,
                                 LossKind kind) {
  if (data.empty()) throw Error("empty-data", "no training data");
  for (const auto& fv : data)
    if (fv.label != -1 && fv.label != 1)
      throw Error("unlabeled-data", "classifier training needs labels in {-1,+1}");
  MlpModel m = init_model(cfg);
  m.stdz = Standardizer::fit_zscore(db_rows(data));
  auto X = standardized_rows(m, data);
  std::vector<std::vector<double>> T;
  T.reserve(data.size());
  for (const auto& fv : data) T.push_back({fv.label == 1 ? 1.0 : 0.0});
  sgd(m, X, T, kind);
  return m;
}

}  // namespace detail

inline MlpModel train_mse(const MlpConfig& cfg, const Dataset& data) {
  return detail::train_classifier(cfg, data, LossKind::Mse);
}

inline MlpModel train_ce(const MlpConfig& cfg, const Dataset& data) {
  return detail::train_classifier(cfg, data, LossKind::CrossEntropy);
}

// Reconstruction autoencoder on H0-only data. Inputs are min-max scaled into
// the sigmoid's comfortable range; targets equal the scaled inputs.
inline MlpModel train_autoencoder(const MlpConfig& cfg, const Dataset& data_h0) {
  if (data_h0.empty()) throw Error("empty-data", "no training data");
  for (const auto& fv : data_h0)
    if (fv.label == 1)
      throw Error("h1-rows-present", "autoencoder training expects H0-only data");
  MlpModel m = detail::init_model(cfg);
  m.is_autoencoder = true;
  m.stdz = Standardizer::fit_minmax(db_rows(data_h0));
  auto X = detail::standardized_rows(m, data_h0);
  detail::sgd(m, X, X, LossKind::Mse);
  return m;
}

// Reconstruction error (1/N) sum |z_n - y_n|^2 in the scaled feature space.
inline double ae_score(const MlpModel& m, const FeatureVector& fv) {
  if (!m.is_autoencoder) throw Error("bad-model", "ae_score requires an autoencoder");
  auto z = m.stdz.apply(to_db(fv.a));
  auto y = detail::forward_layers(m, z).back();
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double d = z[i] - y[i];
    s += d * d;
  }
  return s / static_cast<double>(z.size());
}

inline int ae_decide(double gamma_ae, double lambda) {
  return gamma_ae >= lambda ? +1 : -1;
}

}  // namespace irlv
