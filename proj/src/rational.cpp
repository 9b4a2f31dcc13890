#include "hpn/rational.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace hpn {

std::string to_frac_string(const Rat& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rat& r) { return static_cast<double>(r); }

std::string to_decimal_string(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  // %g may pick scientific notation for short strings ("1e+01" for 10);
  // prefer the plain form when it round-trips at the same value.
  if (std::strchr(buf, 'e')) {
    char plain[512];
    for (int prec = 0; prec <= 17; ++prec) {
      std::snprintf(plain, sizeof(plain), "%.*f", prec, x);
      if (std::strtod(plain, nullptr) == x && std::strlen(plain) < 24)
        return plain;
    }
  }
  return buf;
}

std::string to_decimal_string(const Rat& r) {
  return to_decimal_string(to_double(r));
}

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto bad = [&] { throw std::invalid_argument("malformed rational: " + s); };
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = (s[i] == '-'), ++i;
  if (i >= s.size()) bad();

  using Int = boost::multiprecision::cpp_int;
  Int ipart = 0;
  bool any_digit = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ipart = ipart * 10 + (s[i] - '0');
    any_digit = true;
    ++i;
  }
  Rat value(ipart);
  if (i < s.size() && s[i] == '.') {
    ++i;
    Int frac = 0, scale = 1;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      frac = frac * 10 + (s[i] - '0');
      scale *= 10;
      any_digit = true;
      ++i;
    }
    value += Rat(frac, scale);
  } else if (i < s.size() && s[i] == '/') {
    ++i;
    Int den = 0;
    bool den_digit = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      den = den * 10 + (s[i] - '0');
      den_digit = true;
      ++i;
    }
    if (!den_digit || den == 0) bad();
    value = Rat(ipart, den);
  }
  if (!any_digit || i != s.size()) bad();
  return neg ? Rat(-value) : value;
}

}  // namespace hpn
