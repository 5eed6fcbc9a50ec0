#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "irlv/common.hpp"

namespace irlv {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].
constexpr std::array<double, 8> kKronrodNodes = {
    0.0,
    0.2077849550078984676006894037732449,
    0.4058451513773971669066064120769615,
    0.5860872354676911302941448382587296,
    0.7415311855993944398638647732807884,
    0.8648644233597690727897127886409262,
    0.9491079123427585245261896840478513,
    0.9914553711208126392068546975263285};
constexpr std::array<double, 8> kKronrodWeights = {
    0.2094821410847278280129991748917143,
    0.2044329400752988924141619992346491,
    0.1903505780647854099132564024210137,
    0.1690047266392679028265834265985503,
    0.1406532597155259187451895905102379,
    0.1047900103222501838398763225415180,
    0.0630920926299785532907006631892042,
    0.0229353220105292249637320080589695};
constexpr std::array<double, 4> kGaussWeights = {
    0.4179591836734693877551020408163265,
    0.3818300505051189449503697754889751,
    0.2797053914892766679014677714237796,
    0.1294849661688696932706114326790820};

struct GkResult {
  double integral;
  double error;
};

template <typename F>
GkResult gk15(const F& f, double a, double b) {
  const double h = (b - a) / 2.0;
  const double mid = (a + b) / 2.0;
  const double f0 = f(mid);
  double kron = kKronrodWeights[0] * f0;
  double gauss = kGaussWeights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    double x = h * kKronrodNodes[i];
    double fs = f(mid - x) + f(mid + x);
    kron += kKronrodWeights[i] * fs;
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * fs;
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

template <typename F>
double gk_adaptive(const F& f, double a, double b, double abs_tol,
                   double abs_floor, int depth) {
  GkResult r = gk15(f, a, b);
  if (r.error <= std::max(abs_tol, abs_floor) || depth >= 48) return r.integral;
  double mid = (a + b) / 2.0;
  return gk_adaptive(f, a, mid, abs_tol / 2.0, abs_floor, depth + 1) +
         gk_adaptive(f, mid, b, abs_tol / 2.0, abs_floor, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration with interval subdivision; rel_tol is
// applied to a first whole-interval estimate to derive the absolute budget.
// abs_floor guards against budgets below attainable precision when the first
// estimate misses a narrow feature (e.g. a boundary spike): without it the
// subdivision can chase an impossible tolerance and blow up exponentially.
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-9,
                 double abs_floor = 0.0) {
  if (!(b > a)) throw Error("bad-interval", "integrate requires b > a");
  detail::GkResult first = detail::gk15(f, a, b);
  double scale = std::max(std::abs(first.integral), 1e-300);
  return detail::gk_adaptive(f, a, b, rel_tol * scale, abs_floor, 0);
}

// Integrates exp(log_f(x)) dx in a shifted log domain: returns
// log(int exp(log_f)) or -inf when the integrand underflows everywhere.
// The shift is the max of log_f on a scan grid, so densities spanning many
// decades stay inside double range.
template <typename F>
double log_integrate(const F& log_f, double a, double b, double rel_tol = 1e-9,
                     int scan_points = 256) {
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= scan_points; ++i) {
    double x = a + (b - a) * i / scan_points;
    shift = std::max<double>(shift, log_f(x));
  }
  if (!std::isfinite(shift)) return -INFINITY;
  auto g = [&](double x) {
    double lf = log_f(x);
    return std::isfinite(lf) ? std::exp(lf - shift) : 0.0;
  };
  // The shifted integrand has max ~1 at the scan peak, so absolute errors
  // below ~1e-14 * (b - a) are beyond double precision anyway.
  double val = integrate(g, a, b, rel_tol, 1e-14 * (b - a));
  if (!(val > 0)) return -INFINITY;
  return shift + std::log(val);
}

}  // namespace irlv
