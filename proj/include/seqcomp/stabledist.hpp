// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Distribution numerics for Gaussian / Cauchy coefficient priors.
 *
 *  Widths: for the Gaussian law the width is the standard deviation, for
 *  the Cauchy law it is the usual scale. A sum of independent symmetric
 *  stable variables of index alpha with widths w_i is stable with width
 *  (sum w_i^alpha)^(1/alpha).
 *
 *  The split law of A given A + B = s, with A ~ stable(0, S1) and
 *  B ~ stable(0, S2), is Gaussian in closed form for alpha = 2. For the
 *  Cauchy law its density is proportional to
 *      1 / ((S1^2 + x^2) (S2^2 + (x - s)^2))
 *  and is sampled by inverting its closed-form CDF.
 */

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "seqcomp/core.hpp"
#include "seqcomp/random.hpp"

namespace seqcomp {

inline double stable_log_pdf(double x, double width, Law law) {
  if (!(width > 0.0)) throw std::invalid_argument("stable_log_pdf: width must be positive");
  if (law == Law::Gaussian) {
    const double z = x / width;
    return -0.5 * z * z - std::log(width) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double z = x / width;
  return -std::log(std::numbers::pi * width) - std::log1p(z * z);
}

inline double stable_sample(double width, Law law, Rng& rng) {
  return width * (law == Law::Gaussian ? rng.normal() : rng.cauchy());
}

/// Width of a sum of independent stable variables.
inline double sum_width(std::span<const double> widths, Law law) {
  double acc = 0.0;
  for (double w : widths) {
    if (w < 0.0) throw std::invalid_argument("sum_width: widths must be non-negative");
    acc += law == Law::Gaussian ? w * w : w;
  }
  return law == Law::Gaussian ? std::sqrt(acc) : acc;
}

// ---------------------------------------------------------------------------
// Inverse-Gamma(shape, rate): density x^(-shape-1) rate^shape exp(-rate/x) / Gamma(shape)

inline void check_inv_gamma_params(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("inverse gamma: shape and rate must be positive");
}

inline double inv_gamma_log_pdf(double x, double shape, double rate) {
  check_inv_gamma_params(shape, rate);
  if (!(x > 0.0)) throw std::invalid_argument("inv_gamma_log_pdf: x must be positive");
  return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - rate / x;
}

/// P(X <= x) = Q(shape, rate / x), the regularized upper incomplete gamma.
inline double inv_gamma_cdf(double x, double shape, double rate) {
  check_inv_gamma_params(shape, rate);
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_q(shape, rate / x);
}

/// Bisection on log x to 1e-10 relative accuracy.
inline double inv_gamma_quantile(double p, double shape, double rate) {
  check_inv_gamma_params(shape, rate);
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inv_gamma_quantile: p must be in (0,1)");
  double lo = rate / shape;
  double hi = lo;
  while (inv_gamma_cdf(lo, shape, rate) > p) lo *= 0.5;
  while (inv_gamma_cdf(hi, shape, rate) < p) hi *= 2.0;
  while (hi - lo > 1e-10 * lo) {
    const double mid = std::sqrt(lo * hi);
    if (inv_gamma_cdf(mid, shape, rate) < p)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

// ---------------------------------------------------------------------------
// Split distributions

/// Conditional split of a compressed parameter `s` into the part with width
/// `sigma1` and its complement with width `sigma2`.
struct SplitSpec {
  double s = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  Law law = Law::Cauchy;

  void validate() const {
    if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0) || !(sigma1 + sigma2 > 0.0))
      throw std::invalid_argument("SplitSpec: widths must be non-negative and not both zero");
  }
};

inline double gaussian_split_sample(const SplitSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.sigma1 == 0.0) return 0.0;
  if (spec.sigma2 == 0.0) return spec.s;
  const double v1 = spec.sigma1 * spec.sigma1;
  const double v2 = spec.sigma2 * spec.sigma2;
  const double frac = v1 / (v1 + v2);
  const double mean = spec.s * frac;
  const double sd = std::sqrt(v1 * v2 / (v1 + v2));
  return mean + sd * rng.normal();
}

/// Normalizing constant and partial-fraction coefficients of the Cauchy
/// split density; the density is 1/C * 1/((S1^2+x^2)(S2^2+(x-s)^2)).
struct CauchySplitTerms {
  double C;
  double r;
  double p0;
  double ps;
};

namespace detail {

inline void check_cauchy_split(const SplitSpec& spec) {
  if (!(spec.sigma1 > 0.0) || !(spec.sigma2 > 0.0))
    throw std::invalid_argument("cauchy split: widths must be positive");
}

/// The product denominator s^4 + 2(S1^2+S2^2)s^2 + (S1^2-S2^2)^2 factors as
/// (s^2 + (S1+S2)^2)(s^2 + (S1-S2)^2); the second factor vanishes at the
/// symmetric point s = 0, S1 = S2.
struct SplitFactors {
  double sum;    // S1 + S2
  double diff;   // S1 - S2
  double plus;   // s^2 + (S1+S2)^2
  double minus;  // s^2 + (S1-S2)^2
};

inline SplitFactors split_factors(const SplitSpec& spec) {
  const double sum = spec.sigma1 + spec.sigma2;
  const double diff = spec.sigma1 - spec.sigma2;
  const double s2 = spec.s * spec.s;
  return {sum, diff, s2 + sum * sum, s2 + diff * diff};
}

/// CDF of the Student t with 3 degrees of freedom at t.
inline double student_t3_cdf(double t) {
  const double z = t / std::sqrt(3.0);
  return 0.5 + (z / (1.0 + z * z) + std::atan(z)) / std::numbers::pi;
}

}  // namespace detail

/// True where the general coefficients are replaced by the t3 form:
/// |s| and |S1 - S2| both below 1e-8 (S1 + S2).
inline bool cauchy_split_is_symmetric(const SplitSpec& spec) {
  const double scale = 1e-8 * (spec.sigma1 + spec.sigma2);
  return std::abs(spec.s) < scale && std::abs(spec.sigma1 - spec.sigma2) < scale;
}

inline CauchySplitTerms cauchy_split_terms(const SplitSpec& spec) {
  detail::check_cauchy_split(spec);
  const auto fac = detail::split_factors(spec);
  const double s1 = spec.sigma1;
  const double s2 = spec.sigma2;
  const double delta = fac.diff * fac.sum;  // S1^2 - S2^2
  const double denom = fac.plus * fac.minus;
  const double ss = spec.s * spec.s;
  return {std::numbers::pi * fac.sum / (s1 * s2 * fac.plus), spec.s / denom,
          (ss - delta) / (s1 * denom), (ss + delta) / (s2 * denom)};
}

inline double cauchy_split_log_pdf(double x, const SplitSpec& spec) {
  detail::check_cauchy_split(spec);
  const auto fac = detail::split_factors(spec);
  const double s1 = spec.sigma1;
  const double s2 = spec.sigma2;
  const double log_c =
      std::log(std::numbers::pi * fac.sum) - std::log(s1) - std::log(s2) - std::log(fac.plus);
  const double d = x - spec.s;
  return -log_c - std::log(s1 * s1 + x * x) - std::log(s2 * s2 + d * d);
}

/// Closed-form CDF.
///
/// Evaluated as (1/C)[r L + p0 (A - B) + (p0 + ps) B] with
///   L = log((x^2+S1^2) / ((x-s)^2+S2^2)),
///   A = atan(x/S1) + pi/2,  B = atan((x-s)/S2) + pi/2,
/// where p0 + ps = (S1+S2) / (S1 S2 (s^2+(S1+S2)^2)) has no singularity, and
/// L and A - B are formed from their small differences directly. This keeps
/// every term O(1) as the symmetric point is approached.
inline double cauchy_split_cdf(double x, const SplitSpec& spec) {
  detail::check_cauchy_split(spec);
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double s1 = spec.sigma1;
  const double s2 = spec.sigma2;
  if (cauchy_split_is_symmetric(spec)) {
    const double width = 0.5 * (s1 + s2) / std::sqrt(3.0);
    return detail::student_t3_cdf(x / width);
  }
  const auto fac = detail::split_factors(spec);
  const double s = spec.s;
  const double d = x - s;
  const double delta = fac.diff * fac.sum;

  double rl = 0.0;
  if (s != 0.0) {
    const double den = d * d + s2 * s2;
    const double log_ratio = std::log1p((s * (2.0 * x - s) + delta) / den);
    rl = s / (fac.plus * fac.minus) * log_ratio;
  }

  // atan(u) - atan(v) = atan2(u - v, 1 + u v) for all real u, v.
  const double u = x / s1;
  const double v = d / s2;
  const double u_minus_v = (x * (s2 - s1) + s * s1) / (s1 * s2);
  const double a_minus_b = std::atan2(u_minus_v, 1.0 + u * v);
  const double p0 = (s * s - delta) / (s1 * fac.plus * fac.minus);
  const double b_term = std::atan(v) + 0.5 * std::numbers::pi;
  const double p_sum = fac.sum / (s1 * s2 * fac.plus);

  const double c = std::numbers::pi * fac.sum / (s1 * s2 * fac.plus);
  const double value = (rl + p0 * a_minus_b + p_sum * b_term) / c;
  return std::clamp(value, 0.0, 1.0);
}

/// Solves F(x) = u by the Illinois variant of regula falsi.
///
/// The initial bracket spans the two component medians (0 and s) padded by
/// S1 + S2 and grows geometrically until it brackets u. Stops when
/// |F(x) - u| < 1e-10 or the bracket is narrower than 1e-12 of the scale,
/// after at most 200 iterations.
inline double cauchy_split_quantile(double u, const SplitSpec& spec) {
  detail::check_cauchy_split(spec);
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("cauchy_split_quantile: u must be in (0,1)");
  constexpr double kTol = 1e-10;
  const double scale = spec.sigma1 + spec.sigma2 + std::abs(spec.s);
  auto g = [&](double x) { return cauchy_split_cdf(x, spec) - u; };

  double lo = std::min(0.0, spec.s) - (spec.sigma1 + spec.sigma2);
  double hi = std::max(0.0, spec.s) + (spec.sigma1 + spec.sigma2);
  double flo = g(lo);
  double fhi = g(hi);
  double step = scale;
  for (int i = 0; flo > 0.0; ++i) {
    if (i > 200) throw std::runtime_error("cauchy_split_quantile: failed to bracket the lower end");
    hi = lo;
    fhi = flo;
    lo -= step;
    step *= 2.0;
    flo = g(lo);
  }
  step = scale;
  for (int i = 0; fhi < 0.0; ++i) {
    if (i > 200) throw std::runtime_error("cauchy_split_quantile: failed to bracket the upper end");
    lo = hi;
    flo = fhi;
    hi += step;
    step *= 2.0;
    fhi = g(hi);
  }
  if (std::abs(flo) < kTol) return lo;
  if (std::abs(fhi) < kTol) return hi;

  double best = lo;
  double best_f = std::abs(flo);
  int side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = g(x);
    if (std::abs(fx) < best_f) {
      best = x;
      best_f = std::abs(fx);
    }
    if (std::abs(fx) < kTol || hi - lo < 1e-12 * scale) return x;
    if (fx > 0.0) {
      hi = x;
      fhi = fx;
      if (side == +1) flo *= 0.5;
      side = +1;
    } else {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    }
  }
  return best;
}

inline double cauchy_split_sample(const SplitSpec& spec, Rng& rng) {
  detail::check_cauchy_split(spec);
  if (cauchy_split_is_symmetric(spec)) {
    // Student t3 as Z / sqrt(V/3), V chi-square with 3 degrees of freedom.
    const double z = rng.normal();
    double v = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double n = rng.normal();
      v += n * n;
    }
    const double width = 0.5 * (spec.sigma1 + spec.sigma2) / std::sqrt(3.0);
    return width * z / std::sqrt(v / 3.0);
  }
  return cauchy_split_quantile(rng.uniform(), spec);
}

/// Dispatches on the law; a zero width on either side is a point mass.
inline double split_sample(const SplitSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.sigma1 == 0.0) return 0.0;
  if (spec.sigma2 == 0.0) return spec.s;
  return spec.law == Law::Gaussian ? gaussian_split_sample(spec, rng) : cauchy_split_sample(spec, rng);
}

}  // namespace seqcomp
