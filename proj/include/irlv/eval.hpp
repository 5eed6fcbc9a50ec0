#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "irlv/common.hpp"

namespace irlv {

// Wilson 95% score interval for k successes out of n.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

inline Interval wilson(double k, double n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  double p = k / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2 * n)) / denom;
  double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct Rates {
  double p_fa = 0.0;
  double p_md = 0.0;
  Interval fa_ci;
  Interval md_ci;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

// Empirical conditional error frequencies with Wilson intervals.
inline Rates estimate_rates(const std::vector<int>& decisions,
                            const std::vector<int>& truth) {
  if (decisions.size() != truth.size())
    throw Error("dimension-mismatch", "decisions vs truth length");
  std::size_t n0 = 0, n1 = 0, fa = 0, md = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == -1) {
      ++n0;
      if (decisions[i] == 1) ++fa;
    } else if (truth[i] == 1) {
      ++n1;
      if (decisions[i] == -1) ++md;
    } else {
      throw Error("bad-value", "truth labels must be -1 or +1");
    }
  }
  if (n0 == 0 || n1 == 0) throw Error("class-absent", "both classes required");
  Rates r;
  r.n0 = n0;
  r.n1 = n1;
  r.p_fa = static_cast<double>(fa) / n0;
  r.p_md = static_cast<double>(md) / n1;
  r.fa_ci = wilson(static_cast<double>(fa), static_cast<double>(n0));
  r.md_ci = wilson(static_cast<double>(md), static_cast<double>(n1));
  return r;
}

struct CalibrationResult {
  double threshold = 0.0;
  bool degenerate = false;  // target below resolution or constant scores
};

// Tightest threshold with empirical FA <= target_fa under the "+1 iff
// score > threshold" convention: the k-th largest H0 score, k = floor(n*fa).
inline CalibrationResult calibrate_threshold(std::vector<double> scores_h0,
                                             double target_fa) {
  if (scores_h0.empty()) throw Error("empty-data", "no H0 scores");
  if (!(target_fa > 0.0 && target_fa <= 1.0))
    throw Error("bad-argument", "target_fa in (0, 1]");
  const std::size_t n = scores_h0.size();
  std::sort(scores_h0.begin(), scores_h0.end(), std::greater<>());
  auto k = static_cast<std::size_t>(target_fa * static_cast<double>(n));
  CalibrationResult res;
  if (k >= n) {
    res.threshold = -INFINITY;  // everything flagged +1
    return res;
  }
  if (target_fa < 1.0 / static_cast<double>(n)) res.degenerate = true;
  res.threshold = scores_h0[k];
  if (scores_h0.front() == scores_h0.back()) res.degenerate = true;
  return res;
}

struct RocPoint {
  double threshold;
  double p_fa;
  double p_md;
  Interval fa_ci;
  Interval md_ci;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ordered by decreasing threshold
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

// Threshold sweep over distinct-score midpoints (quantile-subsampled to
// n_thresholds when larger), plus the two trivial endpoints.
inline RocCurve roc_sweep(std::vector<double> scores_h0,
                          std::vector<double> scores_h1, int n_thresholds = 512) {
  if (scores_h0.empty() || scores_h1.empty())
    throw Error("empty-data", "both score sets required");
  RocCurve curve;
  curve.n0 = scores_h0.size();
  curve.n1 = scores_h1.size();
  std::vector<double> all;
  all.reserve(scores_h0.size() + scores_h1.size());
  all.insert(all.end(), scores_h0.begin(), scores_h0.end());
  all.insert(all.end(), scores_h1.begin(), scores_h1.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> thresholds;
  thresholds.push_back(INFINITY);  // all -1: FA=0, MD=1
  if (all.size() > 1) {
    std::vector<double> mids;
    mids.reserve(all.size() - 1);
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
      mids.push_back(0.5 * (all[i] + all[i + 1]));
    if (static_cast<int>(mids.size()) > n_thresholds) {
      std::vector<double> sub;
      for (int i = 0; i < n_thresholds; ++i) {
        std::size_t idx = static_cast<std::size_t>(
            (static_cast<double>(i) + 0.5) / n_thresholds * mids.size());
        sub.push_back(mids[std::min(idx, mids.size() - 1)]);
      }
      mids = std::move(sub);
    }
    for (auto it = mids.rbegin(); it != mids.rend(); ++it) thresholds.push_back(*it);
  }
  thresholds.push_back(all.front() - 1.0);  // all +1: FA=1, MD=0

  std::sort(scores_h0.begin(), scores_h0.end());
  std::sort(scores_h1.begin(), scores_h1.end());
  auto frac_above = [](const std::vector<double>& v, double t) {
    auto it = std::upper_bound(v.begin(), v.end(), t);
    return static_cast<double>(v.end() - it) / static_cast<double>(v.size());
  };
  for (double t : thresholds) {
    RocPoint pt;
    pt.threshold = t;
    pt.p_fa = frac_above(scores_h0, t);
    pt.p_md = 1.0 - frac_above(scores_h1, t);
    pt.fa_ci = wilson(pt.p_fa * curve.n0, static_cast<double>(curve.n0));
    pt.md_ci = wilson(pt.p_md * curve.n1, static_cast<double>(curve.n1));
    curve.points.push_back(pt);
  }
  return curve;
}

// Mann-Whitney AUC: probability an H1 score ranks above an H0 score
// (ties count 1/2). 1.0 = perfect separation.
inline double auc(std::vector<double> scores_h0, std::vector<double> scores_h1) {
  std::sort(scores_h0.begin(), scores_h0.end());
  double s = 0.0;
  for (double x : scores_h1) {
    auto lo = std::lower_bound(scores_h0.begin(), scores_h0.end(), x);
    auto hi = std::upper_bound(scores_h0.begin(), scores_h0.end(), x);
    s += static_cast<double>(lo - scores_h0.begin()) +
         0.5 * static_cast<double>(hi - lo);
  }
  return s / (static_cast<double>(scores_h0.size()) *
              static_cast<double>(scores_h1.size()));
}

// P_MD at the given P_FA by linear interpolation along the curve.
inline double md_at_fa(const RocCurve& curve, double fa) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : curve.points) pts.emplace_back(p.p_fa, p.p_md);
  std::sort(pts.begin(), pts.end());
  if (fa <= pts.front().first) return pts.front().second;
  if (fa >= pts.back().first) return pts.back().second;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (fa >= pts[i].first && fa <= pts[i + 1].first) {
      double span = pts[i + 1].first - pts[i].first;
      if (span <= 0) return std::min(pts[i].second, pts[i + 1].second);
      double t = (fa - pts[i].first) / span;
      return pts[i].second + t * (pts[i + 1].second - pts[i].second);
    }
  }
  return pts.back().second;
}

// Achievable staircase: at FA budget f, the best MD among operating points
// with p_fa <= f, so the envelope is non-increasing as FA grows.
inline RocCurve lower_envelope(const RocCurve& raw) {
  RocCurve out = raw;
  std::sort(out.points.begin(), out.points.end(),
            [](const RocPoint& a, const RocPoint& b) { return a.p_fa < b.p_fa; });
  double best = INFINITY;
  for (auto& p : out.points) {
    best = std::min(best, p.p_md);
    p.p_md = best;
  }
  return out;
}

// Average of several curves at a matched P_FA grid (linear interpolation).
inline RocCurve average_curves(const std::vector<RocCurve>& curves,
                               int n_grid = 201) {
  if (curves.empty()) throw Error("empty-data", "no curves to average");
  RocCurve out;
  for (const auto& c : curves) {
    out.n0 += c.n0;
    out.n1 += c.n1;
  }
  for (int i = 0; i < n_grid; ++i) {
    double fa = static_cast<double>(i) / (n_grid - 1);
    double md = 0.0;
    for (const auto& c : curves) md += md_at_fa(c, fa);
    md /= static_cast<double>(curves.size());
    RocPoint pt;
    pt.threshold = NAN;  // averaged point has no single threshold
    pt.p_fa = fa;
    pt.p_md = md;
    pt.fa_ci = {fa, fa};
    pt.md_ci = wilson(md * static_cast<double>(out.n1), static_cast<double>(out.n1));
    out.points.push_back(pt);
  }
  return out;
}

inline void write_roc_csv(const std::string& path, const RocCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot open " + path + " for writing");
  out.precision(17);
  out << "threshold,p_fa,p_md,p_fa_lo,p_fa_hi,p_md_lo,p_md_hi\n";
  for (const auto& p : curve.points)
    out << p.threshold << "," << p.p_fa << "," << p.p_md << "," << p.fa_ci.lo << ","
        << p.fa_ci.hi << "," << p.md_ci.lo << "," << p.md_ci.hi << "\n";
  if (!out) throw Error("io-error", "write failed: " + path);
}

}  // namespace irlv
