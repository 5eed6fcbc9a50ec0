#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include "irlv/common.hpp"

namespace irlv {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// H0 <-> -1 (inside the ROI), H1 <-> +1 (outside).
enum class RegionLabel : int { H0 = -1, H1 = +1 };

inline int label_value(RegionLabel r) { return static_cast<int>(r); }

enum class LosState { LOS, NLOS };

struct AccessPoint {
  Position pos;
  double height = 15.0;  // m
};

// Annular area A = {r_min <= d <= r_out}, ROI A0 = {r_min <= d <= r_in},
// single AP at the center.
struct RingScenario {
  double r_min;
  double r_in;
  double r_out;
  Position ap{0.0, 0.0};

  RingScenario(double rmin, double rin, double rout, Position center = {})
      : r_min(rmin), r_in(rin), r_out(rout), ap(center) {
    if (!(0.0 < r_min && r_min < r_in && r_in < r_out))
      throw Error("bad-ring", "require 0 < r_min < r_in < r_out");
  }
};

struct Rect {
  double x0, y0, x1, y1;  // x0 < x1, y0 < y1
  bool contains(const Position& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

// Axis-aligned street strip spanning the whole area.
struct Street {
  bool vertical;    // true: strip in x, spans all y
  double center;    // centerline coordinate (x if vertical, y otherwise)
  double width;

  bool contains(const Position& p) const {
    double c = vertical ? p.x : p.y;
    return std::abs(c - center) <= width / 2.0;
  }
};

// Square area of given side with street strips and a rectangular ROI.
struct UrbanScenario {
  double side;
  std::vector<Street> streets;
  Rect roi;
  std::vector<AccessPoint> aps;

  UrbanScenario(double side_, std::vector<Street> streets_, Rect roi_,
                std::vector<AccessPoint> aps_)
      : side(side_), streets(std::move(streets_)), roi(roi_), aps(std::move(aps_)) {
    if (!(roi.x0 >= 0 && roi.y0 >= 0 && roi.x1 <= side && roi.y1 <= side &&
          roi.x0 < roi.x1 && roi.y0 < roi.y1))
      throw Error("bad-roi", "ROI rectangle must lie inside the area");
    for (const auto& s : streets)
      if (!(s.width > 0)) throw Error("bad-street", "street width must be positive");
    for (const auto& ap : aps)
      if (!(ap.pos.x >= 0 && ap.pos.x <= side && ap.pos.y >= 0 && ap.pos.y <= side))
        throw Error("bad-ap", "AP outside area");
  }

  bool on_street(const Position& p) const {
    for (const auto& s : streets)
      if (s.contains(p)) return true;
    return false;
  }
};

using Scenario = std::variant<RingScenario, UrbanScenario>;

// Crossroads layout: two orthogonal streets between four square building
// blocks of the given size; ROI anchored at (d1, d2) from the south-west
// corner with extent beta1 x beta2. Default APs (11): one at the crossroads,
// one at each of the four street ends, then mid and quarter points of the
// arms. Coordinates are a documented default with qualitative fidelity only;
// experiments may pass an explicit list.
inline UrbanScenario make_crossroads_urban(double d1, double d2, double beta1,
                                           double beta2, int n_aps = 11,
                                           double block = 255.0,
                                           double street_width = 10.0,
                                           double h_ap = 15.0) {
  double side = 2.0 * block + street_width;
  double c = block + street_width / 2.0;  // street centerlines
  std::vector<Street> streets{{true, c, street_width}, {false, c, street_width}};
  Rect roi{d1, d2, d1 + beta1, d2 + beta2};
  std::vector<AccessPoint> aps;
  auto add = [&](double x, double y) { aps.push_back({{x, y}, h_ap}); };
  add(c, c);                       // AP1: crossroads
  add(c, 0.0), add(c, side);       // AP2-3: vertical street ends
  add(0.0, c), add(side, c);       // AP4-5: horizontal street ends
  add(c, c / 2.0), add(c, side - c / 2.0);  // AP6-7: arm midpoints
  add(c / 2.0, c), add(side - c / 2.0, c);  // AP8-9
  add(c, c / 4.0), add(c / 4.0, c);         // AP10-11: quarter points
  if (n_aps < 1 || n_aps > static_cast<int>(aps.size()))
    throw Error("bad-ap-count", "default layout provides 1..11 APs");
  aps.resize(n_aps);
  return UrbanScenario(side, std::move(streets), roi, std::move(aps));
}

// --- area membership ---

inline bool contains_area(const RingScenario& s, const Position& p) {
  double d = distance(p, s.ap);
  return d >= s.r_min && d <= s.r_out;
}

inline bool contains_area(const UrbanScenario& s, const Position& p) {
  return p.x >= 0 && p.x <= s.side && p.y >= 0 && p.y <= s.side;
}

inline bool contains_area(const Scenario& s, const Position& p) {
  return std::visit([&](const auto& sc) { return contains_area(sc, p); }, s);
}

// --- ROI membership ---

inline bool contains_roi(const RingScenario& s, const Position& p) {
  if (!contains_area(s, p)) throw Error("outside-area", "point outside area A");
  double d = distance(p, s.ap);
  return d >= s.r_min && d <= s.r_in;
}

inline bool contains_roi(const UrbanScenario& s, const Position& p) {
  if (!contains_area(s, p)) throw Error("outside-area", "point outside area A");
  return s.roi.contains(p);
}

inline bool contains_roi(const Scenario& s, const Position& p) {
  return std::visit([&](const auto& sc) { return contains_roi(sc, p); }, s);
}

// --- uniform sampling ---

inline Position sample_annulus(const Position& center, double r0, double r1,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double d = std::sqrt(r0 * r0 + u(rng) * (r1 * r1 - r0 * r0));
  double ang = 2.0 * M_PI * u(rng);
  return {center.x + d * std::cos(ang), center.y + d * std::sin(ang)};
}

inline Position sample_uniform(const RingScenario& s, RegionLabel region,
                               std::mt19937_64& rng) {
  return region == RegionLabel::H0 ? sample_annulus(s.ap, s.r_min, s.r_in, rng)
                                   : sample_annulus(s.ap, s.r_in, s.r_out, rng);
}

inline Position sample_uniform(const UrbanScenario& s, RegionLabel region,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (region == RegionLabel::H0) {
    return {s.roi.x0 + u(rng) * s.roi.width(), s.roi.y0 + u(rng) * s.roi.height()};
  }
  // Rejection from the square; the ROI is a strict subset of the area.
  for (;;) {
    Position p{u(rng) * s.side, u(rng) * s.side};
    if (!s.roi.contains(p)) return p;
  }
}

inline Position sample_uniform(const Scenario& s, RegionLabel region,
                               std::mt19937_64& rng) {
  return std::visit([&](const auto& sc) { return sample_uniform(sc, region, rng); }, s);
}

// Uniform over the whole area A.
inline Position sample_area(const RingScenario& s, std::mt19937_64& rng) {
  return sample_annulus(s.ap, s.r_min, s.r_out, rng);
}

inline Position sample_area(const UrbanScenario& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, s.side);
  return {u(rng), u(rng)};
}

inline Position sample_area(const Scenario& s, std::mt19937_64& rng) {
  return std::visit([&](const auto& sc) { return sample_area(sc, rng); }, s);
}

inline double area_roi(const RingScenario& s) {
  return M_PI * (s.r_in * s.r_in - s.r_min * s.r_min);
}
inline double area_total(const RingScenario& s) {
  return M_PI * (s.r_out * s.r_out - s.r_min * s.r_min);
}
inline double area_roi(const UrbanScenario& s) { return s.roi.area(); }
inline double area_total(const UrbanScenario& s) { return s.side * s.side; }

// --- signed distance to the ROI border B0 (the A0/A1 separating set) ---

inline double signed_border_distance(const RingScenario& s, const Position& p) {
  // B0 is the circle r = r_in; the inner circle separates A0 from the
  // excluded hole, not from A1.
  return distance(p, s.ap) - s.r_in;
}

inline double signed_border_distance(const UrbanScenario& s, const Position& p) {
  const Rect& r = s.roi;
  if (r.contains(p)) {
    double m = std::min({p.x - r.x0, r.x1 - p.x, p.y - r.y0, r.y1 - p.y});
    return -m;
  }
  double dx = std::max({r.x0 - p.x, 0.0, p.x - r.x1});
  double dy = std::max({r.y0 - p.y, 0.0, p.y - r.y1});
  return std::hypot(dx, dy);
}

inline double signed_border_distance(const Scenario& s, const Position& p) {
  return std::visit([&](const auto& sc) { return signed_border_distance(sc, p); }, s);
}

// --- AP access ---

inline std::vector<AccessPoint> access_points(const RingScenario& s) {
  return {AccessPoint{s.ap, 15.0}};
}
inline std::vector<AccessPoint> access_points(const UrbanScenario& s) { return s.aps; }
inline std::vector<AccessPoint> access_points(const Scenario& s) {
  return std::visit([&](const auto& sc) { return access_points(sc); }, s);
}

// --- LOS classification ---

inline LosState los_state(const RingScenario&, const Position&, int ap_index) {
  if (ap_index != 0) throw Error("bad-ap-index", "ring scenario has one AP");
  return LosState::LOS;
}

// LOS iff both endpoints lie on streets and the segment between them stays
// within the street strips. If both endpoints share one (convex) strip the
// segment is inside it; otherwise the corner crossing is checked by sampling.
inline LosState los_state(const UrbanScenario& s, const Position& ue, int ap_index) {
  if (ap_index < 0 || ap_index >= static_cast<int>(s.aps.size()))
    throw Error("bad-ap-index", "AP index out of range");
  const Position& ap = s.aps[ap_index].pos;
  if (!s.on_street(ue) || !s.on_street(ap)) return LosState::NLOS;
  for (const auto& st : s.streets)
    if (st.contains(ue) && st.contains(ap)) return LosState::LOS;
  constexpr int kSamples = 128;
  for (int i = 1; i < kSamples; ++i) {
    double t = static_cast<double>(i) / kSamples;
    Position q{ue.x + t * (ap.x - ue.x), ue.y + t * (ap.y - ue.y)};
    if (!s.on_street(q)) return LosState::NLOS;
  }
  return LosState::LOS;
}

inline LosState los_state(const Scenario& s, const Position& ue, int ap_index) {
  return std::visit([&](const auto& sc) { return los_state(sc, ue, ap_index); }, s);
}

}  // namespace irlv
