#include "okfrac/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace okfrac::bounds {

namespace {

namespace mp = boost::multiprecision;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Relative error budget for the floating alternating sum before it is
// declared unstable.
constexpr double kAlternatingTolerance = 1e-9;

void check_cd(double c, double d) {
  if (!(c > 0 && c <= d && d <= 1)) throw DomainError("need 0 < c <= d <= 1");
}

double p_lower_floating(int i, double c, double d) {
  const int m = i - 1;
  const double head = c * std::log(d / c);
  double sum = 0.0;
  double magnitude = std::abs(head);
  double binom = 1.0;
  double dk = 1.0;
  double ck = 1.0;
  for (int k = 1; k <= m; ++k) {
    binom = binom * (m - k + 1) / k;
    dk *= d;
    ck *= c;
    const double term = binom * (dk - ck) / k;
    sum += (k % 2 == 0) ? term : -term;
    magnitude += c * std::abs(term);
  }
  const double result = head + c * sum;
  const double error = magnitude * kEps * 4.0 * (m + 1);
  if (m > 0 && error > kAlternatingTolerance * std::abs(result) && magnitude > 0) {
    throw AlternatingSumUnstable("p(" + std::to_string(i) + ") alternating sum loses " +
                                 "precision (estimated error " + std::to_string(error) + ")");
  }
  return result;
}

double p_lower_exact(int i, double c, double d) {
  using Real = mp::mpfr_float_50;
  const int m = i - 1;
  const mp::mpq_rational cq(c);
  const mp::mpq_rational dq(d);
  mp::mpq_rational sum(0);
  mp::mpz_int binom(1);
  mp::mpq_rational dk(1);
  mp::mpq_rational ck(1);
  for (int k = 1; k <= m; ++k) {
    binom = binom * (m - k + 1) / k;
    dk *= dq;
    ck *= cq;
    mp::mpq_rational term = mp::mpq_rational(binom) * (dk - ck) / k;
    if (k % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  const Real c50(cq);
  const Real d50(dq);
  const Real result = c50 * (mp::log(d50 / c50) + Real(sum));
  return result.convert_to<double>();
}

// Bisection on a sign change of f between lo and hi. Runs until the
// bracket stops shrinking in double precision.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tolerance) {
  double flo = f(lo);
  for (int iter = 0; iter < 2000 && hi - lo > tolerance; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double z_free(double d) {
  const auto c = balanced_c(d);
  if (!c) return -std::numeric_limits<double>::infinity();
  return z_many(*c, d);
}

double z_diagonal(double d) { return std::min(z_single(d, d), z_many(d, d)); }

}  // namespace

double p_lower(int i, double c, double d, Summation mode) {
  if (i < 1) throw DomainError("p_lower needs i >= 1");
  check_cd(c, d);
  if (i == 1) return c * std::log(d / c);
  switch (mode) {
    case Summation::floating:
      return p_lower_floating(i, c, d);
    case Summation::exact:
      return p_lower_exact(i, c, d);
    case Summation::automatic:
      try {
        return p_lower_floating(i, c, d);
      } catch (const AlternatingSumUnstable&) {
        return p_lower_exact(i, c, d);
      }
  }
  return p_lower_exact(i, c, d);
}

double d_min() {
  // 2 - 2d + ln d is negative at 0.05 and positive at 0.5.
  return bisect([](double d) { return q_zero(d); }, 0.05, 0.5, 0.0);
}

ExcessConstants excess_constants(double c, double d) {
  check_cd(c, d);
  if (!(d > d_min() && d < 1)) throw DomainError("excess constants need d_min < d < 1");
  const double mu = mu_bar(d);
  const double slack = 1.0 - d + std::log(d);
  const double p1 = c * std::log(d / c);
  const double ratio = c / d;
  ExcessConstants out{};
  out.below_mu_bar =
      p1 - ratio * slack * (2.0 + std::log1p(-mu) / mu + std::log(mu) / (1.0 - mu));
  out.above_mu_bar = p1 + ratio * ((1.0 - d) * mu - slack * std::log1p(-mu) - 2.0 + 2.0 * d -
                                   std::log(d));
  return out;
}

std::optional<double> balanced_c(double d) {
  if (!(d > 0 && d < 1) || !(mu_bar(d) > 0)) return std::nullopt;
  // z_single - z_many = c (ln(d/c) + (q(1) - q(0))/d): positive near c = 0,
  // monotone in sign, so a crossing exists iff the residual at c = d is <= 0.
  auto residual = [d](double c) { return z_single(c, d) - z_many(c, d); };
  if (residual(d) > 0) return std::nullopt;
  if (residual(d) == 0) return d;
  const double lo = d * 1e-12;
  if (residual(lo) <= 0) return std::nullopt;
  return bisect(residual, lo, d, 0.0);
}

OptimizationResult optimize_params(double tolerance, Constraint constraint) {
  if (!(tolerance > 0)) throw DomainError("tolerance must be positive");
  const std::function<double(double)> z =
      constraint == Constraint::free ? std::function<double(double)>(z_free)
                                     : std::function<double(double)>(z_diagonal);
  const double lo = d_min();
  const double hi = 1.0;

  // Coarse scan: locates the bracket and counts interior local maxima.
  constexpr int kGrid = 400;
  std::vector<double> grid(kGrid);
  std::vector<double> values(kGrid);
  for (int k = 0; k < kGrid; ++k) {
    grid[k] = lo + (hi - lo) * (k + 1) / (kGrid + 1);
    values[k] = z(grid[k]);
  }
  OptimizationResult result;
  for (int k = 1; k + 1 < kGrid; ++k)
    if (values[k] > values[k - 1] && values[k] >= values[k + 1]) ++result.grid_local_maxima;
  const int best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  if (!std::isfinite(values[best])) throw ConvergenceFailure("no feasible d on the grid");
  double a = best > 0 ? grid[best - 1] : lo;
  double b = best + 1 < kGrid ? grid[best + 1] : hi;

  // Golden-section down to where z differences drown in rounding.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = z(x1);
  double f2 = z(x2);
  while (b - a > 1e-7) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = z(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = z(x1);
    }
  }
  double d_star = 0.5 * (a + b);

  // z is flat to O(h^2) around the maximum, so values alone pin d only to
  // ~1e-8. Finish on the sign of a central difference instead.
  constexpr double kStep = 1e-6;
  auto slope = [&z](double d) { return (z(d + kStep) - z(d - kStep)) / (2.0 * kStep); };
  const double left = std::max(a - 1e-5, lo + 2 * kStep);
  const double right = std::min(b + 1e-5, hi - 2 * kStep);
  if (!(slope(left) > 0 && slope(right) < 0))
    throw ConvergenceFailure("slope does not change sign around the golden-section bracket");
  d_star = bisect(slope, left, right, tolerance * 1e-2);

  result.d_star = d_star;
  if (constraint == Constraint::free) {
    const auto c = balanced_c(d_star);
    if (!c) throw ConvergenceFailure("no balanced c at the optimum");
    result.c_star = *c;
  } else {
    result.c_star = d_star;
  }
  result.z_star = z(d_star);
  result.ratio = 1.0 / result.z_star;
  result.constraint_gap =
      std::abs(z_single(result.c_star, d_star) - z_many(result.c_star, d_star));
  return result;
}

std::vector<SweepRow> sweep(std::size_t points) {
  std::vector<SweepRow> rows;
  const double lo = d_min();
  for (std::size_t k = 1; k <= points; ++k) {
    const double d = lo + (1.0 - lo) * static_cast<double>(k) / static_cast<double>(points + 1);
    const auto c = balanced_c(d);
    if (!c) continue;
    const double zd = z_many(*c, d);
    rows.push_back({d, *c, zd, 1.0 / zd});
  }
  return rows;
}

}  // namespace okfrac::bounds
