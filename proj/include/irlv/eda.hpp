#pragma once

#include <cmath>
#include <vector>

#include "irlv/channel.hpp"
#include "irlv/common.hpp"
#include "irlv/geometry.hpp"

namespace irlv {

// Estimated Distance Approach: invert the (oracle-known) path-loss per link,
// least-squares position fit, then threshold the signed distance of the
// estimate to the ROI border.
struct EdaModel {
  Scenario scenario = RingScenario{0.1, 2.0, 10.0};
  ChannelParams params;
  int multistart = 10;
  double grad_tol = 1e-8;
  double d_delta = 0.0;  // decision threshold on the signed border distance
  double d_min = 1e-3;
  double d_max = 0.0;  // <= 0: area diagonal
};

struct DistanceEstimate {
  double d = 0.0;
  bool clamped = false;
};

struct PositionEstimate {
  Position pos;
  double residual = 0.0;
  bool ambiguous = false;  // fewer than 3 usable APs
  bool clamped = false;    // some inverted distance hit its bound
};

// d such that path_loss(d) = a_db, closed form for LOS, monotone bisection
// for NLOS; out-of-range attenuations clamp to [d_min, d_max].
inline DistanceEstimate invert_path_loss(const ChannelParams& p, double a_db,
                                         LosState los, double h_ap,
                                         double d_min, double d_max) {
  DistanceEstimate est;
  if (los == LosState::LOS) {
    est.d = p.c / (4.0 * M_PI * p.f) * std::pow(10.0, a_db / (10.0 * p.nu));
  } else {
    double lo = d_min, hi = d_max;
    double f_lo = path_loss_nlos_db(p, lo, h_ap);
    double f_hi = path_loss_nlos_db(p, hi, h_ap);
    bool increasing = f_hi >= f_lo;  // holds for h_ap < 250 m
    if ((increasing && a_db <= f_lo) || (!increasing && a_db >= f_lo)) {
      est.d = d_min;
      est.clamped = true;
      return est;
    }
    if ((increasing && a_db >= f_hi) || (!increasing && a_db <= f_hi)) {
      est.d = d_max;
      est.clamped = true;
      return est;
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      double f_mid = path_loss_nlos_db(p, mid, h_ap);
      if ((f_mid < a_db) == increasing) lo = mid;
      else hi = mid;
    }
    est.d = 0.5 * (lo + hi);
    return est;
  }
  if (est.d < d_min) {
    est.d = d_min;
    est.clamped = true;
  } else if (est.d > d_max) {
    est.d = d_max;
    est.clamped = true;
  }
  return est;
}

namespace detail {

inline Position area_centroid(const Scenario& s) {
  if (const auto* u = std::get_if<UrbanScenario>(&s))
    return {u->side / 2.0, u->side / 2.0};
  return std::get<RingScenario>(s).ap;
}

inline double area_diagonal(const Scenario& s) {
  if (const auto* u = std::get_if<UrbanScenario>(&s)) return u->side * std::sqrt(2.0);
  return 2.0 * std::get<RingScenario>(s).r_out;
}

inline double range_residual(const std::vector<Position>& aps,
                             const std::vector<double>& dhat, const Position& x) {
  double r = 0.0;
  for (std::size_t n = 0; n < aps.size(); ++n) {
    double e = distance(x, aps[n]) - dhat[n];
    r += e * e;
  }
  return r;
}

// Gauss-Newton with step halving on sum_n (||x - ap_n|| - dhat_n)^2.
inline Position gauss_newton(const std::vector<Position>& aps,
                             const std::vector<double>& dhat, Position x0,
                             double grad_tol) {
  Position x = x0;
  double cost = range_residual(aps, dhat, x);
  for (int it = 0; it < 100; ++it) {
    // J^T J (2x2) and J^T r
    double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
    for (std::size_t n = 0; n < aps.size(); ++n) {
      double dx = x.x - aps[n].x, dy = x.y - aps[n].y;
      double d = std::max(std::hypot(dx, dy), 1e-9);
      double r = d - dhat[n];
      double jx = dx / d, jy = dy / d;
      jtj00 += jx * jx;
      jtj01 += jx * jy;
      jtj11 += jy * jy;
      jtr0 += jx * r;
      jtr1 += jy * r;
    }
    if (std::hypot(jtr0, jtr1) < grad_tol) break;
    double det = jtj00 * jtj11 - jtj01 * jtj01;
    double sx, sy;
    if (std::abs(det) < 1e-14) {
      sx = jtr0;  // gradient step fallback
      sy = jtr1;
    } else {
      sx = (jtj11 * jtr0 - jtj01 * jtr1) / det;
      sy = (jtj00 * jtr1 - jtj01 * jtr0) / det;
    }
    double step = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      Position cand{x.x - step * sx, x.y - step * sy};
      double c = range_residual(aps, dhat, cand);
      if (c < cost) {
        x = cand;
        cost = c;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return x;
}

// Deterministic quasi-uniform starts over the area (Halton in 2D).
inline std::vector<Position> multistart_points(const Scenario& s, int count) {
  auto halton = [](int idx, int base) {
    double f = 1.0, r = 0.0;
    while (idx > 0) {
      f /= base;
      r += f * (idx % base);
      idx /= base;
    }
    return r;
  };
  std::vector<Position> pts;
  if (const auto* u = std::get_if<UrbanScenario>(&s)) {
    for (int i = 1; i <= count; ++i)
      pts.push_back({halton(i, 2) * u->side, halton(i, 3) * u->side});
  } else {
    const auto& r = std::get<RingScenario>(s);
    for (int i = 1; i <= count; ++i) {
      double d = std::sqrt(r.r_min * r.r_min +
                           halton(i, 2) * (r.r_out * r.r_out - r.r_min * r.r_min));
      double ang = 2.0 * M_PI * halton(i, 3);
      pts.push_back({r.ap.x + d * std::cos(ang), r.ap.y + d * std::sin(ang)});
    }
  }
  return pts;
}

}  // namespace detail

// Least-squares position fit from the observed attenuations. LOS/NLOS state
// per link is oracle knowledge taken from the sample's true position.
inline PositionEstimate estimate_position(const EdaModel& m, const FeatureVector& fv) {
  const auto aps = access_points(m.scenario);
  if (fv.a.size() != aps.size())
    throw Error("dimension-mismatch", "feature count vs AP count");
  double d_max = m.d_max > 0 ? m.d_max : detail::area_diagonal(m.scenario);

  PositionEstimate out;
  std::vector<Position> ap_pos;
  std::vector<double> dhat;
  for (std::size_t n = 0; n < aps.size(); ++n) {
    LosState los = LosState::LOS;
    if (fv.position)
      los = los_state(m.scenario, *fv.position, static_cast<int>(n));
    auto est = invert_path_loss(m.params, linear_to_db(fv.a[n]), los,
                                aps[n].height, m.d_min, d_max);
    out.clamped = out.clamped || est.clamped;
    ap_pos.push_back(aps[n].pos);
    dhat.push_back(est.d);
  }

  if (ap_pos.size() == 1) {
    // Single range: any point on the circle fits; return the one nearest the
    // area centroid and flag the ambiguity.
    out.ambiguous = true;
    Position c = detail::area_centroid(m.scenario);
    double dx = c.x - ap_pos[0].x, dy = c.y - ap_pos[0].y;
    double norm = std::hypot(dx, dy);
    if (norm < 1e-9) {
      // Centroid coincides with the AP (ring scenario); the direction is
      // immaterial for radially symmetric regions, so fix +x.
      dx = 1.0, dy = 0.0, norm = 1.0;
    }
    out.pos = {ap_pos[0].x + dhat[0] * dx / norm, ap_pos[0].y + dhat[0] * dy / norm};
    out.residual = detail::range_residual(ap_pos, dhat, out.pos);
    return out;
  }
  out.ambiguous = ap_pos.size() < 3;

  double best = INFINITY;
  for (const auto& x0 : detail::multistart_points(m.scenario, m.multistart)) {
    Position x = detail::gauss_newton(ap_pos, dhat, x0, m.grad_tol);
    double c = detail::range_residual(ap_pos, dhat, x);
    if (c < best) {
      best = c;
      out.pos = x;
    }
  }
  if (!std::isfinite(best))
    throw Error("no-convergence", "all Gauss-Newton starts failed");
  out.residual = best;
  return out;
}

// Decision score: signed distance of the position estimate to the ROI border.
inline double eda_score(const EdaModel& m, const FeatureVector& fv) {
  return signed_border_distance(m.scenario, estimate_position(m, fv).pos);
}

// -1 (H0) iff the estimated border distance is below d_delta.
inline int eda_decide(const EdaModel& m, const FeatureVector& fv) {
  return eda_score(m, fv) < m.d_delta ? -1 : +1;
}

}  // namespace irlv
