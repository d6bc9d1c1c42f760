#ifndef OKFRAC_SCALAR_HPP
#define OKFRAC_SCALAR_HPP

#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace okfrac {

/// Exact rational scalar used for oracle checks and small instances.
using Rational = boost::multiprecision::mpq_rational;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

template <class S>
concept Scalar = std::is_same_v<S, double> || std::is_same_v<S, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Converts between the supported scalars. double -> Rational is exact.
template <Scalar To, Scalar From>
To scalar_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<To, double>) {
    return to_double(x);
  } else {
    return Rational(x);
  }
}

/// Parses "p/q", "p" or a decimal literal such as "0.25" into an exact rational.
Rational parse_rational(std::string_view text);

/// Formats as "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& x);

}  // namespace okfrac

#endif  // OKFRAC_SCALAR_HPP
