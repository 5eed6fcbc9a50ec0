#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "irlv/channel.hpp"
#include "irlv/common.hpp"
#include "irlv/geometry.hpp"
#include "irlv/quadrature.hpp"
#include "irlv/special.hpp"

namespace irlv {

// Single-AP ring-scenario likelihood-ratio machinery. The printed closed
// forms contain typos (an R_in^2 - R_in^2 prefactor and an unnamed R); the
// implementation uses the area-ratio prefactor Delta_1/Delta_0 and R = R_out,
// which is the arrangement that agrees with direct quadrature of the
// total-probability densities (the quadrature oracle below is the ground
// truth and the tests pin the agreement).
enum class LlrVariant {
  FadingNu2,
  FadingNu3,
  ShadowingUncorr,
  NumericOracle,
  QuantizedHistogram,
};

struct LlrModel {
  LlrVariant variant;
  RingScenario ring;
  ChannelParams params;

  double delta0() const { return ring.r_in * ring.r_in - ring.r_min * ring.r_min; }
  double delta1() const { return ring.r_out * ring.r_out - ring.r_in * ring.r_in; }
};

namespace detail {

// log p(a | d), exponential power gain 1/a with mean 10^(-P_PL(d)/10).
inline double log_density_fading(const ChannelParams& p, double d, double a) {
  double lam = std::pow(p.f * 4.0 * M_PI * d / p.c, p.nu);  // 10^(P/10)
  return std::log(lam) - lam / a - 2.0 * std::log(a);
}

// log p(a | d), 10 log10(a) ~ N(P_PL(d), sigma^2).
inline double log_density_shadowing(const ChannelParams& p, double d, double a) {
  double a_db = linear_to_db(a);
  double mu = path_loss_los_db(p, d);
  double z = (a_db - mu) / p.sigma_s_db;
  return -0.5 * z * z -
         std::log(a * p.sigma_s_db * std::sqrt(2.0 * M_PI) * std::log(10.0) / 10.0);
}

// The oracle variant carries no channel law of its own: shadowing-dominated
// configs (sigma > 0) use the log-normal density, otherwise Rayleigh fading.
inline double log_cond_density(const LlrModel& m, double d, double a) {
  bool shadowing = m.variant == LlrVariant::ShadowingUncorr ||
                   (m.variant == LlrVariant::NumericOracle && m.params.sigma_s_db > 0);
  return shadowing ? log_density_shadowing(m.params, d, a)
                   : log_density_fading(m.params, d, a);
}

}  // namespace detail

// log p(a|Hi) by adaptive quadrature of the total-probability integral,
// i = 0 over [r_min, r_in], i = 1 over [r_in, r_out].
inline double log_density_region(const LlrModel& m, double a, RegionLabel region) {
  if (!(a > 0)) throw Error("bad-attenuation", "a must be > 0");
  double r0 = region == RegionLabel::H0 ? m.ring.r_min : m.ring.r_in;
  double r1 = region == RegionLabel::H0 ? m.ring.r_in : m.ring.r_out;
  double delta = region == RegionLabel::H0 ? m.delta0() : m.delta1();
  auto log_f = [&](double d) {
    return std::log(2.0 * d / delta) + detail::log_cond_density(m, d, a);
  };
  return log_integrate(log_f, r0, r1, 1e-9);
}

// ln p(a|H0)/p(a|H1) by direct quadrature; the independent route the closed
// forms are validated against.
inline double llr_numeric_oracle(const LlrModel& m, double a) {
  double l0 = log_density_region(m, a, RegionLabel::H0);
  double l1 = log_density_region(m, a, RegionLabel::H1);
  if (!std::isfinite(l0) && !std::isfinite(l1))
    throw Error("both-densities-zero", "attenuation outside representable support");
  return l0 - l1;
}

// Closed form, LOS path-loss exponent nu = 2 with Rayleigh fading.
// M(a) = ln( (D1/D0) * (V(Rmin)-V(Rin)) / (V(Rin)-V(Rout)) ) with
// V(d) = e^-x (1+x), x = (4 pi f d / c)^2 / a; differences are computed as
// W(x_hi) - W(x_lo), W = 1 - V, to keep precision when both x are small.
inline double llr_fading_nu2(const LlrModel& m, double a) {
  if (!(a > 0)) throw Error("bad-attenuation", "a must be > 0");
  double q = std::pow(4.0 * M_PI * m.params.f / m.params.c, 2.0);
  auto x = [&](double d) { return q * d * d / a; };
  double num = exp_weighted_tail(x(m.ring.r_in)) - exp_weighted_tail(x(m.ring.r_min));
  double den = exp_weighted_tail(x(m.ring.r_out)) - exp_weighted_tail(x(m.ring.r_in));
  return std::log(m.delta1() / m.delta0()) + std::log(num) - std::log(den);
}

// Closed form, nu = 3: incomplete-gamma differences with arguments
// b(d) = (4 pi f / c)^3 d^3 / a. Lower or upper tails are chosen per
// difference so that neither side cancels.
inline double llr_fading_nu3(const LlrModel& m, double a) {
  if (!(a > 0)) throw Error("bad-attenuation", "a must be > 0");
  const double g = 5.0 / 3.0;
  double q = std::pow(4.0 * M_PI * m.params.f / m.params.c, 3.0);
  auto b = [&](double d) { return q * d * d * d / a; };
  auto diff = [&](double b_lo, double b_hi) {
    // Gamma(g, b_lo) - Gamma(g, b_hi), b_lo < b_hi
    if (b_lo >= 1.0) return inc_gamma_upper(g, b_lo) - inc_gamma_upper(g, b_hi);
    return inc_gamma_lower(g, b_hi) - inc_gamma_lower(g, b_lo);
  };
  double num = diff(b(m.ring.r_min), b(m.ring.r_in));
  double den = diff(b(m.ring.r_in), b(m.ring.r_out));
  return std::log(m.delta1() / m.delta0()) + std::log(num) - std::log(den);
}

// Closed form, spatially uncorrelated shadowing on LOS path-loss:
// with K = 10 nu / ln 10, B = 10 nu log10(4 pi f / c), alpha = K^2/(2 sigma^2)
// and mu = (a_dB - B)/K, the region integrals reduce to
// T(d) = erf( sqrt(alpha) (ln d - mu - 1/alpha) ). erfc is used when both
// arguments share a sign to avoid cancellation in the tails.
inline double llr_shadowing(const LlrModel& m, double a) {
  if (!(a > 0)) throw Error("bad-attenuation", "a must be > 0");
  if (!(m.params.sigma_s_db > 0))
    throw Error("degenerate-shadowing", "sigma_s_db must be > 0");
  const double K = 10.0 * m.params.nu / std::log(10.0);
  const double B = 10.0 * m.params.nu * std::log10(4.0 * M_PI * m.params.f / m.params.c);
  const double alpha = K * K / (2.0 * m.params.sigma_s_db * m.params.sigma_s_db);
  const double mu = (linear_to_db(a) - B) / K;
  auto arg = [&](double d) { return std::sqrt(alpha) * (std::log(d) - mu - 1.0 / alpha); };
  auto diff = [&](double d_lo, double d_hi) {
    // erf(arg(d_hi)) - erf(arg(d_lo)), arg increasing in d
    double lo = arg(d_lo), hi = arg(d_hi);
    if (lo >= 0.0) return std::erfc(lo) - std::erfc(hi);
    if (hi <= 0.0) return std::erfc(-hi) - std::erfc(-lo);
    return std::erf(hi) - std::erf(lo);
  };
  double num = diff(m.ring.r_min, m.ring.r_in);
  double den = diff(m.ring.r_in, m.ring.r_out);
  return std::log(m.delta1() / m.delta0()) + std::log(num) - std::log(den);
}

// Closed form or oracle by variant.
inline double llr(const LlrModel& m, double a) {
  switch (m.variant) {
    case LlrVariant::FadingNu2:
      return llr_fading_nu2(m, a);
    case LlrVariant::FadingNu3:
      return llr_fading_nu3(m, a);
    case LlrVariant::ShadowingUncorr:
      return llr_shadowing(m, a);
    case LlrVariant::NumericOracle:
      return llr_numeric_oracle(m, a);
    default:
      throw Error("bad-variant", "no closed form for this variant");
  }
}

// NP test: H0 (-1) iff M(a) >= Lambda.
inline int np_decide(double llr_value, double lambda) {
  if (!std::isfinite(lambda) && !std::isfinite(llr_value))
    throw Error("bad-argument", "np_decide with two non-finite inputs");
  return llr_value >= lambda ? -1 : +1;
}

// GLRT score p(a|H0); decision -1 iff p >= Lambda.
inline double glrt_log_density_h0(const LlrModel& m, double a) {
  return log_density_region(m, a, RegionLabel::H0);
}

inline int glrt_decide(double density_h0, double lambda) {
  return density_h0 >= lambda ? -1 : +1;
}

// Estimated per-bin pmfs of a scalar feature under H0/H1 on a shared uniform
// quantizer (300 levels by default), Laplace-smoothed.
struct QuantizedPdfPair {
  double lo = 0.0;
  double hi = 1.0;
  int n_levels = 300;
  double pseudo = 1.0;
  std::vector<double> p0;
  std::vector<double> p1;

  int bin(double x) const {
    double t = (x - lo) / (hi - lo);
    int b = static_cast<int>(t * n_levels);
    return std::clamp(b, 0, n_levels - 1);
  }

  double llr(double x) const { return std::log(p0[bin(x)]) - std::log(p1[bin(x)]); }
};

inline QuantizedPdfPair fit_quantized_pdfs(const std::vector<double>& h0,
                                           const std::vector<double>& h1,
                                           int n_levels = 300,
                                           double pseudo = 1.0) {
  if (h0.empty() || h1.empty()) throw Error("empty-class", "both classes required");
  if (n_levels < 1) throw Error("bad-argument", "n_levels must be >= 1");
  QuantizedPdfPair q;
  q.n_levels = n_levels;
  q.pseudo = pseudo;
  q.lo = std::min(*std::min_element(h0.begin(), h0.end()),
                  *std::min_element(h1.begin(), h1.end()));
  q.hi = std::max(*std::max_element(h0.begin(), h0.end()),
                  *std::max_element(h1.begin(), h1.end()));
  if (q.hi <= q.lo) q.hi = q.lo + 1.0;
  q.p0.assign(n_levels, 0.0);
  q.p1.assign(n_levels, 0.0);
  for (double x : h0) q.p0[q.bin(x)] += 1.0;
  for (double x : h1) q.p1[q.bin(x)] += 1.0;
  double z0 = static_cast<double>(h0.size()) + pseudo * n_levels;
  double z1 = static_cast<double>(h1.size()) + pseudo * n_levels;
  for (int i = 0; i < n_levels; ++i) {
    q.p0[i] = (q.p0[i] + pseudo) / z0;
    q.p1[i] = (q.p1[i] + pseudo) / z1;
  }
  return q;
}

}  // namespace irlv
