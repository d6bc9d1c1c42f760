#ifndef OKFRAC_BOUNDS_HPP
#define OKFRAC_BOUNDS_HPP

// Closed-form probability and profit bounds for the blended algorithm and the
// optimization of its phase parameters (c, d).
//
// The formula templates accept any real type with ADL-visible log/exp, so the
// same expressions run in double and in boost::multiprecision types.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "okfrac/errors.hpp"

namespace okfrac::bounds {

/// Largest utilization for which the all-rounds packing bound stays positive:
/// 2 + ln(d) / (1 - d).
template <class Real>
Real mu_bar(const Real& d) {
  using std::log;
  if (!(d > 0 && d < 1)) throw DomainError("mu_bar needs 0 < d < 1");
  return Real(2) + log(d) / (Real(1) - d);
}

/// 2 - 2d + ln d, the limit of q(mu) as mu -> 0. Zero at d = d_min and d = 1.
template <class Real>
Real q_zero(const Real& d) {
  using std::log;
  return Real(2) - Real(2) * d + log(d);
}

/// Lower bound q(mu) on the expected fraction, relative to x*_i, that the
/// knapsack phase packs of an item with utilization mu:
///   (1/mu) ((1-d) min(mu, mu_bar) - (1-d-ln(1/d)) ln(1 - min(mu, mu_bar)))
/// mu == 0 returns the continuous extension q_zero(d).
template <class Real>
Real q_lower(const Real& mu, const Real& d) {
  using std::log;
  using std::log1p;
  if (!(mu >= 0 && mu <= 1)) throw DomainError("q_lower needs 0 <= mu <= 1");
  const Real cap = mu_bar(d);
  if (!(cap > 0)) throw DomainError("q_lower needs d > d_min (mu_bar <= 0)");
  if (mu == 0) return q_zero(d);
  const Real m = mu < cap ? mu : cap;
  const Real slack = Real(1) - d + log(d);  // 1 - d - ln(1/d), negative
  return ((Real(1) - d) * m - slack * log1p(-m)) / mu;
}

/// Per-round bound (1/n)(1 - ln(l/(dn)) / (1 - delta)) on packing at least
/// min(delta W / s_i, x*_i) of an OPT item in round l > dn. May be negative.
template <class Real>
Real prob_pack_round(std::int64_t ell, std::int64_t n, const Real& d, const Real& delta) {
  using std::log;
  if (n < 1) throw DomainError("prob_pack_round needs n >= 1");
  if (!(d > 0 && d <= 1)) throw DomainError("prob_pack_round needs 0 < d <= 1");
  if (!(delta >= 0 && delta < 1)) throw DomainError("prob_pack_round needs 0 <= delta < 1");
  const Real dn = d * Real(n);
  if (!(Real(ell) > dn)) throw DomainError("prob_pack_round needs ell > d n");
  return (Real(1) - log(Real(ell) / dn) / (Real(1) - delta)) / Real(n);
}

/// All-rounds bound 1 - d + (1/(1-delta)) (1 - d - (1 + 1/n) ln(1/d)).
/// Without n the asymptotic form (1/n -> 0) is returned.
template <class Real>
Real prob_pack_total(const Real& d, const Real& delta, std::optional<std::int64_t> n = {}) {
  using std::log;
  if (!(d > 0 && d <= 1)) throw DomainError("prob_pack_total needs 0 < d <= 1");
  if (!(delta >= 0 && delta < 1)) throw DomainError("prob_pack_total needs 0 <= delta < 1");
  if (n && *n < 1) throw DomainError("prob_pack_total needs n >= 1");
  const Real factor = n ? Real(1) + Real(1) / Real(*n) : Real(1);
  const Real one_minus_d = Real(1) - d;
  return one_minus_d + (one_minus_d + factor * log(d)) / (Real(1) - delta);
}

/// Many-item constraint (c/d) q(0).
template <class Real>
Real z_many(const Real& c, const Real& d) {
  if (!(c > 0 && c <= d && d <= 1)) throw DomainError("z_many needs 0 < c <= d <= 1");
  return c / d * q_zero(d);
}

/// Single-item constraint p(1) + (c/d) q(1).
template <class Real>
Real z_single(const Real& c, const Real& d) {
  using std::log;
  if (!(c > 0 && c <= d && d <= 1)) throw DomainError("z_single needs 0 < c <= d <= 1");
  return c * log(d / c) + c / d * q_lower(Real(1), d);
}

/// The single-item constraint written out without mu_bar:
/// c ln(d/c) + (c/d)(2 - 2d + ln d - (1-d-ln(1/d)) ln(ln(1/d)/(1-d) - 1)).
template <class Real>
Real z_single_expanded(const Real& c, const Real& d) {
  using std::log;
  const Real slack = Real(1) - d + log(d);
  const Real inner = -log(d) / (Real(1) - d) - Real(1);
  return c * log(d / c) + c / d * (q_zero(d) - slack * log(inner));
}

enum class Summation {
  automatic,  // floating point while the alternating sum is well conditioned, exact otherwise
  floating,   // floating point only; throws AlternatingSumUnstable when ill conditioned
  exact,      // rational binomial sum, combined with the logarithm at 50 digits
};

/// Lower bound p(i) on the probability that the i-th most profitable item is
/// the first one accepted by the secretary phase:
///   c ln(d/c) + c sum_{k=1}^{i-1} C(i-1,k) (-1)^k (d^k - c^k)/k.
double p_lower(int i, double c, double d, Summation mode = Summation::automatic);

/// Smaller root of 2 - 2d + ln d in (0, 1).
double d_min();

struct ExcessConstants {
  double below_mu_bar;  // mu_1 <= mu_bar case
  double above_mu_bar;  // mu_1 > mu_bar case
};

/// Slack left over when the excess of the first OPT item is redistributed;
/// both must be non-negative for the many-item argument to go through.
ExcessConstants excess_constants(double c, double d);

enum class Constraint { free, c_equals_d };

struct OptimizationResult {
  double c_star = 0;
  double d_star = 0;
  double z_star = 0;
  double ratio = 0;
  double constraint_gap = 0;
  std::size_t grid_local_maxima = 0;
};

/// c(d) solving z_single(c, d) = z_many(c, d) by bisection over (0, d].
/// Empty when the constraints do not cross for this d.
std::optional<double> balanced_c(double d);

/// Maximizes z over (c, d). The free problem balances the two constraints for
/// each d; the c == d problem takes their minimum.
OptimizationResult optimize_params(double tolerance = 1e-10,
                                   Constraint constraint = Constraint::free);

struct SweepRow {
  double d;
  double c_of_d;
  double z;
  double ratio;
};

/// Evaluates c(d) and z(d) on `points` evenly spaced d in (d_min, 1).
std::vector<SweepRow> sweep(std::size_t points);

}  // namespace okfrac::bounds

#endif  // OKFRAC_BOUNDS_HPP
