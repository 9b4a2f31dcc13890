#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace hpn {

/// Exact rational used for all CCPN/hybrid quantities (markings, speeds,
/// event times). Arbitrary precision so repeated proportional throttling
/// cannot overflow.
using Rat = boost::multiprecision::cpp_rational;

/// Extended rational: nullopt means +infinity (interval upper bounds,
/// phase durations, horizons).
using ExtRat = std::optional<Rat>;

inline bool is_finite(const ExtRat& x) { return x.has_value(); }

/// Comparison treating nullopt as +infinity.
inline bool ext_less(const ExtRat& a, const ExtRat& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

inline ExtRat ext_min(const ExtRat& a, const ExtRat& b) {
  return ext_less(b, a) ? b : a;
}

/// "p/q" (or just "p" when q = 1).
std::string to_frac_string(const Rat& r);

/// Shortest decimal string that round-trips through double; used in CSV
/// output. Exact values live in the "p/q" form only.
std::string to_decimal_string(const Rat& r);
std::string to_decimal_string(double x);

double to_double(const Rat& r);

/// Parses "p/q", "p", or a plain decimal like "17.5" / "-0.25".
/// Throws std::invalid_argument on malformed input.
Rat rat_from_string(const std::string& s);

}  // namespace hpn
