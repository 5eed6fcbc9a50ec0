#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "irlv/mlp.hpp"

using namespace irlv;

namespace {

// Central-difference gradient of the mean loss wrt every parameter.
double max_grad_rel_err(MlpModel m, const std::vector<std::vector<double>>& X,
                        const std::vector<std::vector<double>>& T, LossKind kind) {
  detail::Gradients g = detail::Gradients::zeros_like(m);
  for (std::size_t i = 0; i < X.size(); ++i) detail::backprop(m, X[i], T[i], kind, g);
  const double h = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& param, double analytic) {
    double keep = param;
    param = keep + h;
    double lp = detail::mean_loss(m, X, T, kind) * X.size();
    param = keep - h;
    double lm = detail::mean_loss(m, X, T, kind) * X.size();
    param = keep;
    double numeric = (lp - lm) / (2.0 * h);
    double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    for (std::size_t i = 0; i < m.weights[l].size(); ++i)
      probe(m.weights[l][i], g.weights[l][i]);
    for (std::size_t i = 0; i < m.biases[l].size(); ++i)
      probe(m.biases[l][i], g.biases[l][i]);
  }
  return worst;
}

Dataset two_blob_data(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  Dataset d;
  for (int i = 0; i < n; ++i) {
    FeatureVector fv;
    int label = i % 2 == 0 ? -1 : +1;
    double c = label == -1 ? 40.0 : 60.0;  // class centers, dB domain
    fv.a = {db_to_linear(c + g(rng)), db_to_linear(c + 5.0 + g(rng))};
    fv.label = label;
    d.push_back(fv);
  }
  return d;
}

}  // namespace

TEST_CASE("backprop matches central finite differences") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    MlpConfig cfg = rep % 2 == 0
                        ? MlpConfig::classifier(3, {5, 5}, 0.05, 1, 32, 100 + rep)
                        : MlpConfig::autoencoder(4, {3, 2, 3}, 0.05, 1, 32, 100 + rep);
    MlpModel m = detail::init_model(cfg);
    std::vector<std::vector<double>> X, T;
    for (int i = 0; i < 4; ++i) {
      std::vector<double> x(cfg.layers.front());
      for (auto& v : x) v = g(rng);
      X.push_back(x);
      std::vector<double> t(cfg.layers.back());
      for (auto& v : t) v = rep % 2 == 0 ? (i % 2 ? 1.0 : 0.0) : g(rng);
      T.push_back(t);
    }
    LossKind kind = rep % 4 == 0 ? LossKind::CrossEntropy : LossKind::Mse;
    if (rep % 2 == 1) kind = LossKind::Mse;
    CHECK(max_grad_rel_err(m, X, T, kind) <= 1e-5);
  }
}

TEST_CASE("training separates well-separated classes") {
  Dataset train = two_blob_data(400, 1);
  MlpConfig cfg = MlpConfig::classifier(2, {5, 5}, 0.5, 80, 32, 7);
  for (MlpModel m : {train_ce(cfg, train), train_mse(cfg, train)}) {
    Dataset test = two_blob_data(200, 2);
    int correct = 0;
    for (const auto& fv : test) correct += classify(m, fv, 0.5) == fv.label;
    CHECK(correct >= 195);
    // loss decreased from initialization
    CHECK(m.loss_trace.back() < m.loss_trace.front());
  }
}

TEST_CASE("classifier input validation") {
  MlpConfig cfg = MlpConfig::classifier(2, {3});
  CHECK_THROWS_WITH_AS(train_ce(cfg, {}), doctest::Contains("empty-data"), Error);
  FeatureVector fv;
  fv.a = {1.0, 2.0};
  fv.label = 0;
  CHECK_THROWS_WITH_AS(train_ce(cfg, {fv}), doctest::Contains("unlabeled-data"), Error);
  CHECK_THROWS_AS(MlpConfig::classifier(2, {0}).validate(), Error);
  CHECK_THROWS_AS(MlpConfig::autoencoder(2, {5}), Error);  // no bottleneck
}

TEST_CASE("autoencoder reconstructs its training manifold") {
  // 3-d inputs confined to a line: a 1-d bottleneck suffices.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(40.0, 60.0);
  Dataset train, h1like;
  for (int i = 0; i < 400; ++i) {
    double t = u(rng);
    FeatureVector fv;
    fv.a = {db_to_linear(t), db_to_linear(t + 3.0), db_to_linear(t - 2.0)};
    fv.label = -1;
    train.push_back(fv);
    FeatureVector off = fv;  // points off the manifold
    off.a[1] = db_to_linear(t - 14.0);
    off.label = 1;
    h1like.push_back(off);
  }
  MlpConfig cfg = MlpConfig::autoencoder(3, {2, 1, 2}, 0.3, 300, 32, 5);
  MlpModel m = train_autoencoder(cfg, train);
  double on = 0.0, off = 0.0;
  for (int i = 0; i < 400; ++i) {
    on += ae_score(m, train[i]);
    off += ae_score(m, h1like[i]);
  }
  CHECK(off / 400 > 4.0 * (on / 400));
  CHECK(ae_decide(off / 400, 2.0 * (on / 400)) == +1);

  FeatureVector h1 = h1like[0];
  CHECK_THROWS_WITH_AS(train_autoencoder(cfg, {h1}),
                       doctest::Contains("h1-rows-present"), Error);
}

TEST_CASE("score convention and persistence of the standardizer") {
  Dataset train = two_blob_data(200, 4);
  MlpModel m = train_ce(MlpConfig::classifier(2, {4}, 0.5, 60, 32, 11), train);
  // H1 blob scores near 1, H0 blob near 0
  double s0 = 0, s1 = 0;
  for (const auto& fv : train) (fv.label == -1 ? s0 : s1) += score(m, fv);
  CHECK(s1 / 100 > 0.8);
  CHECK(s0 / 100 < 0.2);
}
