#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "irlv/common.hpp"
#include "irlv/dataset.hpp"

namespace irlv {

enum class SvmVariant { TwoClass, OneClass };

struct KernelConfig {
  double gamma_k = 0.0;   // Gaussian bandwidth; <= 0 selects the median heuristic
  double C = 10.0;        // regularization
  int max_train = 20000;  // training is subsampled above this (O(S^3) solve)
  std::uint64_t seed = 1;
};

// Gaussian kernel k(x,y) = exp(-||x-y||^2 / (2 gamma_k^2)).
inline double kernel(const std::vector<double>& x, const std::vector<double>& y,
                     const KernelConfig& cfg) {
  if (x.size() != y.size()) throw Error("dimension-mismatch", "kernel input sizes");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * cfg.gamma_k * cfg.gamma_k));
}

struct SvmModel {
  SvmVariant variant = SvmVariant::TwoClass;
  KernelConfig kcfg;
  std::vector<std::vector<double>> sv;  // standardized training rows
  std::vector<double> coef;             // dual coefficients
  double bias = 0.0;
  double orientation = 1.0;  // one-class score sign, calibrated on H0 data
  Standardizer stdz;
  double solver_residual = 0.0;
};

namespace detail {

// Median pairwise distance over (a subsample of) the rows.
inline double median_pairwise_distance(const std::vector<std::vector<double>>& rows,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0xba4d));
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() > 512) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(512);
  }
  std::vector<double> d;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < rows[idx[i]].size(); ++k) {
        double c = rows[idx[i]][k] - rows[idx[j]][k];
        d2 += c * c;
      }
      d.push_back(std::sqrt(d2));
    }
  if (d.empty()) return 1.0;
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  double med = d[d.size() / 2];
  return med > 0 ? med : 1.0;
}

inline Eigen::MatrixXd kernel_matrix(const std::vector<std::vector<double>>& rows,
                                     const KernelConfig& cfg) {
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      double v = kernel(rows[i], rows[j], cfg);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

// Solves the (n+1)x(n+1) saddle system [K + I/C, 1; 1^T, 0] [c; b] = rhs.
// Retries once with a ridge on the kernel block before giving up.
inline void solve_kkt(Eigen::MatrixXd& A, const Eigen::VectorXd& rhs,
                      Eigen::VectorXd& sol, double& residual) {
  const double rhs_norm = std::max(rhs.norm(), 1e-30);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  sol = lu.solve(rhs);
  residual = (A * sol - rhs).norm() / rhs_norm;
  if (residual > 1e-8) {
    const int n = static_cast<int>(A.rows()) - 1;
    double ridge = 1e-10 * A.topLeftCorner(n, n).trace() / n;
    for (int i = 0; i < n; ++i) A(i, i) += ridge;
    lu.compute(A);
    sol = lu.solve(rhs);
    residual = (A * sol - rhs).norm() / rhs_norm;
    if (!(residual <= 1e-8))
      throw Error("singular-system", "KKT solve residual " + std::to_string(residual));
  }
}

inline Dataset subsample(const Dataset& data, int cap, std::uint64_t seed) {
  if (static_cast<int>(data.size()) <= cap) return data;
  Dataset out(data);
  std::mt19937_64 rng(mix_seed(seed, 0x5ab0));
  std::shuffle(out.begin(), out.end(), rng);
  out.resize(cap);
  return out;
}

}  // namespace detail

// Two-class LS-SVM: stationarity of the squared-error primal gives the linear
// system [K + I/C, 1; 1^T, 0] [c; b] = [t; 0] with score
// t~(a) = sum_i c_i k(a_i, a) + b and e_i = -c_i t_i / C.
inline SvmModel train_twoclass(const Dataset& data, KernelConfig cfg) {
  if (data.size() < 2) throw Error("bad-size", "need S >= 2");
  bool has0 = false, has1 = false;
  for (const auto& fv : data) {
    if (fv.label == -1) has0 = true;
    else if (fv.label == 1) has1 = true;
    else throw Error("unlabeled-data", "labels in {-1,+1} required");
  }
  if (!has0 || !has1) throw Error("class-absent", "both labels required");
  Dataset train = detail::subsample(data, cfg.max_train, cfg.seed);

  SvmModel m;
  m.variant = SvmVariant::TwoClass;
  m.stdz = Standardizer::fit_zscore(db_rows(train));
  for (const auto& fv : train) m.sv.push_back(m.stdz.apply(to_db(fv.a)));
  if (cfg.gamma_k <= 0)
    cfg.gamma_k = detail::median_pairwise_distance(m.sv, cfg.seed);
  m.kcfg = cfg;

  const int n = static_cast<int>(train.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  A.topLeftCorner(n, n) = detail::kernel_matrix(m.sv, cfg);
  A.topLeftCorner(n, n).diagonal().array() += 1.0 / cfg.C;
  A.block(0, n, n, 1).setOnes();
  A.block(n, 0, 1, n).setOnes();
  Eigen::VectorXd rhs(n + 1);
  for (int i = 0; i < n; ++i) rhs(i) = train[i].label;
  rhs(n) = 0.0;
  Eigen::VectorXd sol;
  detail::solve_kkt(A, rhs, sol, m.solver_residual);
  m.coef.assign(sol.data(), sol.data() + n);
  m.bias = sol(n);
  return m;
}

// One-class LS-SVM (bias in the objective): stationarity gives
// [K + I/C, 1; 1^T, 0] [c; b] = [0; 1]; score orientation is calibrated so
// outliers (kernel mass -> 0, score -> b) land on the positive side.
inline SvmModel train_oneclass(const Dataset& data_h0, KernelConfig cfg) {
  if (data_h0.empty()) throw Error("empty-data", "no training data");
  for (const auto& fv : data_h0)
    if (fv.label == 1)
      throw Error("h1-rows-present", "one-class training expects H0-only data");
  Dataset train = detail::subsample(data_h0, cfg.max_train, cfg.seed);

  SvmModel m;
  m.variant = SvmVariant::OneClass;
  m.stdz = Standardizer::fit_zscore(db_rows(train));
  for (const auto& fv : train) m.sv.push_back(m.stdz.apply(to_db(fv.a)));
  if (cfg.gamma_k <= 0)
    cfg.gamma_k = detail::median_pairwise_distance(m.sv, cfg.seed);
  m.kcfg = cfg;

  const int n = static_cast<int>(train.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  A.topLeftCorner(n, n) = detail::kernel_matrix(m.sv, cfg);
  A.topLeftCorner(n, n).diagonal().array() += 1.0 / cfg.C;
  A.block(0, n, n, 1).setOnes();
  A.block(n, 0, 1, n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd sol;
  detail::solve_kkt(A, rhs, sol, m.solver_residual);
  m.coef.assign(sol.data(), sol.data() + n);
  m.bias = sol(n);

  // Orientation: raw training scores sit near 0 (e_i = -c_i/C) while far-away
  // points drift toward b; flip so larger oriented score means more anomalous.
  std::vector<double> raw(n);
  for (int i = 0; i < n; ++i) raw[i] = -m.coef[i] / cfg.C;
  std::nth_element(raw.begin(), raw.begin() + n / 2, raw.end());
  m.orientation = (m.bias >= raw[n / 2]) ? +1.0 : -1.0;
  return m;
}

// Raw kernel-expansion score t~(a) = sum_i c_i k(a_i, a) + b.
inline double score(const SvmModel& m, const FeatureVector& fv) {
  auto z = m.stdz.apply(to_db(fv.a));
  double s = m.bias;
  for (std::size_t i = 0; i < m.sv.size(); ++i)
    s += m.coef[i] * kernel(m.sv[i], z, m.kcfg);
  return s;
}

// One-class score with calibrated orientation: higher means more anomalous,
// decision -1 (inside ROI) iff oriented score is below the threshold.
inline double oc_score(const SvmModel& m, const FeatureVector& fv) {
  if (m.variant != SvmVariant::OneClass)
    throw Error("bad-model", "oc_score requires a one-class model");
  return m.orientation * score(m, fv);
}

inline int svm_classify(const SvmModel& m, const FeatureVector& fv, double lambda) {
  double s = m.variant == SvmVariant::OneClass ? oc_score(m, fv) : score(m, fv);
  return s > lambda ? +1 : -1;
}

// Primal objective omega(w,b) = 1/2 w^T w + (C/2) sum e_i^2 for a candidate
// (coef, bias), with w represented in the kernel expansion. Used by the
// local-optimality probes.
inline double primal_objective(const SvmModel& m, const Dataset& data,
                               const std::vector<double>& coef, double bias) {
  const std::size_t n = m.sv.size();
  if (coef.size() != n) throw Error("dimension-mismatch", "coefficient count");
  double wTw = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      wTw += coef[i] * coef[j] * kernel(m.sv[i], m.sv[j], m.kcfg);
  double se = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto z = m.stdz.apply(to_db(data[i].a));
    double t = bias;
    for (std::size_t j = 0; j < n; ++j) t += coef[j] * kernel(m.sv[j], z, m.kcfg);
    double e = m.variant == SvmVariant::TwoClass ? data[i].label * t - 1.0 : -t;
    se += e * e;
  }
  double obj = 0.5 * wTw + 0.5 * m.kcfg.C * se;
  if (m.variant == SvmVariant::OneClass) obj += bias;
  return obj;
}

// ||w||^2 in the kernel expansion (Lemma-style norm diagnostics).
inline double weight_norm_sq(const SvmModel& m) {
  double wTw = 0.0;
  for (std::size_t i = 0; i < m.sv.size(); ++i)
    for (std::size_t j = 0; j < m.sv.size(); ++j)
      wTw += m.coef[i] * m.coef[j] * kernel(m.sv[i], m.sv[j], m.kcfg);
  return wTw;
}

}  // namespace irlv
