#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <cstring>
#include <random>
#include <unordered_map>
#include <vector>

#include "irlv/common.hpp"
#include "irlv/dataset.hpp"
#include "irlv/geometry.hpp"

namespace irlv {

struct ChannelParams {
  double f = 2.12e9;        // carrier, Hz
  double nu = 2.0;          // path-loss exponent (LOS)
  double sigma_s_db = 0.0;  // shadowing std, dB
  double d_c = 75.0;        // shadowing decorrelation distance, m
  double c = kSpeedOfLight;

  void validate() const {
    if (!(f > 0 && nu >= 1.0 && sigma_s_db >= 0.0 && d_c > 0))
      throw Error("bad-channel-params", "require f>0, nu>=1, sigma>=0, d_c>0");
  }
};

inline double path_loss_los_db(const ChannelParams& p, double d) {
  if (!(d > 0)) throw Error("non-positive-distance", "distance must be > 0");
  return 10.0 * p.nu * std::log10(p.f * 4.0 * M_PI * d / p.c);
}

inline double path_loss_nlos_db(const ChannelParams& p, double d, double h_ap) {
  if (!(d > 0)) throw Error("non-positive-distance", "distance must be > 0");
  if (!(h_ap > 0)) throw Error("non-positive-height", "AP height must be > 0");
  return 40.0 * (1.0 - 4e-3 * h_ap) * std::log10(d / 1e3) -
         18.0 * std::log10(h_ap) + 21.0 * std::log10(p.f / 1e6) + 80.0;
}

// Path-loss for one scenario link, LOS/NLOS by the scenario's street rule.
inline double path_loss_db(const Scenario& scn, const ChannelParams& p,
                           const Position& ue, int ap_index) {
  const auto aps = access_points(scn);
  double d = std::max(distance(ue, aps[ap_index].pos), 1e-3);
  return los_state(scn, ue, ap_index) == LosState::LOS
             ? path_loss_los_db(p, d)
             : path_loss_nlos_db(p, d, aps[ap_index].height);
}

// One frozen realization of the correlated log-normal shadowing field,
// independent per AP. Two layouts: values at exact scattered positions
// (looked up bit-exactly) or on a regular grid with bilinear interpolation.
class ShadowingMap {
 public:
  // values[ap][point], jointly Gaussian over points with covariance
  // sigma^2 exp(-||xi-xj||/d_c).
  static ShadowingMap scattered(std::vector<Position> pts,
                                std::vector<std::vector<double>> values) {
    ShadowingMap m;
    m.grid_ = false;
    m.pts_ = std::move(pts);
    m.values_ = std::move(values);
    for (std::size_t i = 0; i < m.pts_.size(); ++i)
      m.index_[key(m.pts_[i])] = i;
    return m;
  }

  static ShadowingMap grid(double x0, double y0, double dx, double dy, int nx,
                           int ny, std::vector<std::vector<double>> values) {
    ShadowingMap m;
    m.grid_ = true;
    m.x0_ = x0;
    m.y0_ = y0;
    m.dx_ = dx;
    m.dy_ = dy;
    m.nx_ = nx;
    m.ny_ = ny;
    m.values_ = std::move(values);
    return m;
  }

  int n_aps() const { return static_cast<int>(values_.size()); }

  double value_at(int ap, const Position& p) const {
    const auto& v = values_.at(ap);
    if (!grid_) {
      auto it = index_.find(key(p));
      if (it == index_.end())
        throw Error("map-miss", "position not covered by scattered map");
      return v[it->second];
    }
    double gx = (p.x - x0_) / dx_;
    double gy = (p.y - y0_) / dy_;
    int ix = std::clamp(static_cast<int>(std::floor(gx)), 0, nx_ - 2);
    int iy = std::clamp(static_cast<int>(std::floor(gy)), 0, ny_ - 2);
    double tx = std::clamp(gx - ix, 0.0, 1.0);
    double ty = std::clamp(gy - iy, 0.0, 1.0);
    auto at = [&](int i, int j) { return v[static_cast<std::size_t>(j) * nx_ + i]; };
    return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
           (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
  }

  const std::vector<std::vector<double>>& values() const { return values_; }

 private:
  static std::uint64_t key(const Position& p) {
    std::uint64_t bx, by;
    std::memcpy(&bx, &p.x, 8);
    std::memcpy(&by, &p.y, 8);
    return bx ^ (by * 0x9e3779b97f4a7c15ULL);
  }

  bool grid_ = false;
  std::vector<Position> pts_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<double>> values_;
};

namespace detail {

// Lower Cholesky factor of sigma^2 exp(-d/d_c) over the points, with a
// 1e-9*sigma^2 diagonal regularizer.
inline Eigen::MatrixXd shadowing_chol(const ChannelParams& p,
                                      const std::vector<Position>& pts) {
  const int n = static_cast<int>(pts.size());
  double s2 = p.sigma_s_db * p.sigma_s_db;
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v = s2 * std::exp(-distance(pts[i], pts[j]) / p.d_c);
      K(i, j) = v;
      K(j, i) = v;
    }
    K(i, i) += 1e-9 * s2;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    K.diagonal().array() += 1e-6 * s2;
    llt.compute(K);
    if (llt.info() != Eigen::Success)
      throw Error("covariance-not-psd", "shadowing covariance factorization failed");
  }
  return llt.matrixL();
}

inline std::vector<std::vector<double>> correlated_draws(
    const Eigen::MatrixXd& L, int n_aps, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = static_cast<int>(L.rows());
  std::vector<std::vector<double>> values(n_aps);
  for (int a = 0; a < n_aps; ++a) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = g(rng);
    Eigen::VectorXd s = L * z;
    values[a].assign(s.data(), s.data() + n);
  }
  return values;
}

}  // namespace detail

inline ShadowingMap generate_shadowing_map(const ChannelParams& p,
                                           const std::vector<Position>& positions,
                                           int n_aps, std::mt19937_64& rng) {
  p.validate();
  if (positions.empty()) throw Error("empty-data", "no positions for shadowing map");
  if (p.sigma_s_db == 0.0) {
    std::vector<std::vector<double>> zeros(
        n_aps, std::vector<double>(positions.size(), 0.0));
    return ShadowingMap::scattered(positions, std::move(zeros));
  }
  Eigen::MatrixXd L = detail::shadowing_chol(p, positions);
  return ShadowingMap::scattered(positions, detail::correlated_draws(L, n_aps, rng));
}

inline ShadowingMap generate_shadowing_grid(const ChannelParams& p, double x0,
                                            double y0, double dx, double dy,
                                            int nx, int ny, int n_aps,
                                            std::mt19937_64& rng) {
  p.validate();
  std::vector<Position> pts;
  pts.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) pts.push_back({x0 + i * dx, y0 + j * dy});
  if (p.sigma_s_db == 0.0) {
    std::vector<std::vector<double>> zeros(n_aps,
                                           std::vector<double>(pts.size(), 0.0));
    return ShadowingMap::grid(x0, y0, dx, dy, nx, ny, std::move(zeros));
  }
  Eigen::MatrixXd L = detail::shadowing_chol(p, pts);
  return ShadowingMap::grid(x0, y0, dx, dy, nx, ny,
                            detail::correlated_draws(L, n_aps, rng));
}

// Per-AP shadowing values (dB) at a position: from the frozen map when given,
// otherwise i.i.d. N(0, sigma^2) per call (spatially uncorrelated mode), or
// zeros when sigma is 0.
inline std::vector<double> shadowing_at(const ChannelParams& p,
                                        const ShadowingMap* map,
                                        const Position& ue, int n_aps,
                                        std::mt19937_64& rng) {
  std::vector<double> s(n_aps, 0.0);
  if (map != nullptr) {
    for (int n = 0; n < n_aps; ++n) s[n] = map->value_at(n, ue);
  } else if (p.sigma_s_db > 0.0) {
    std::normal_distribution<double> g(0.0, p.sigma_s_db);
    for (int n = 0; n < n_aps; ++n) s[n] = g(rng);
  }
  return s;
}

// One attenuation observation given per-AP shadowing values. Without fading
// a^(n) = 10^(A_dB/10); with fading the power gain 1/a^(n) is exponential
// with mean 10^(-A_dB/10) (Rayleigh amplitude).
inline FeatureVector sample_attenuation(const Scenario& scn,
                                        const ChannelParams& p,
                                        const std::vector<double>& shadow_db,
                                        const Position& ue, bool fading,
                                        std::mt19937_64& rng) {
  const int n_aps = static_cast<int>(shadow_db.size());
  FeatureVector fv;
  fv.position = ue;
  fv.a.resize(n_aps);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < n_aps; ++n) {
    double a_db = path_loss_db(scn, p, ue, n) + shadow_db[n];
    if (!fading) {
      fv.a[n] = db_to_linear(a_db);
    } else {
      double mean_gain = db_to_linear(-a_db);
      double gain;
      do {
        gain = -mean_gain * std::log(u(rng));
      } while (!(gain > 0));
      fv.a[n] = 1.0 / gain;
    }
  }
  return fv;
}

inline FeatureVector sample_attenuation(const Scenario& scn,
                                        const ChannelParams& p,
                                        const ShadowingMap* map,
                                        const Position& ue, bool fading,
                                        std::mt19937_64& rng) {
  const int n_aps = static_cast<int>(access_points(scn).size());
  return sample_attenuation(scn, p, shadowing_at(p, map, ue, n_aps, rng), ue,
                            fading, rng);
}

// Componentwise mean of k_f observations taken at the same position.
inline FeatureVector average_fading(const std::vector<FeatureVector>& samples,
                                    int k_f) {
  if (static_cast<int>(samples.size()) != k_f || k_f < 1)
    throw Error("bad-kf", "expected exactly k_f samples");
  FeatureVector out = samples[0];
  for (int j = 1; j < k_f; ++j) {
    if (samples[j].a.size() != out.a.size())
      throw Error("dimension-mismatch", "mismatched feature lengths");
    for (std::size_t n = 0; n < out.a.size(); ++n) out.a[n] += samples[j].a[n];
  }
  for (auto& v : out.a) v /= k_f;
  return out;
}

// n_points positions uniform over the requested region(s); one k_f-averaged
// feature vector per position with its true label. regions = {H0}, {H1}, or
// both (then positions are uniform over A and labeled by ROI membership).
inline Dataset build_dataset(const Scenario& scn, const ChannelParams& p,
                             const ShadowingMap* map, int n_points, int k_f,
                             std::vector<RegionLabel> regions, bool fading,
                             std::mt19937_64& rng) {
  if (n_points < 1) throw Error("bad-size", "n_points must be >= 1");
  if (k_f < 1) throw Error("bad-kf", "k_f must be >= 1");
  if (regions.empty()) throw Error("bad-regions", "need at least one region");
  const bool both = regions.size() >= 2;
  const int n_aps = static_cast<int>(access_points(scn).size());
  Dataset data;
  data.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    Position pos = both ? sample_area(scn, rng) : sample_uniform(scn, regions[0], rng);
    int label = contains_roi(scn, pos) ? -1 : +1;
    auto shadow = shadowing_at(p, map, pos, n_aps, rng);
    FeatureVector fv;
    if (k_f == 1) {
      fv = sample_attenuation(scn, p, shadow, pos, fading, rng);
    } else {
      std::vector<FeatureVector> draws;
      draws.reserve(k_f);
      for (int j = 0; j < k_f; ++j)
        draws.push_back(sample_attenuation(scn, p, shadow, pos, fading, rng));
      fv = average_fading(draws, k_f);
    }
    fv.label = label;
    data.push_back(std::move(fv));
  }
  return data;
}

}  // namespace irlv
