#pragma once

#include <boost/rational.hpp>

#include <stdexcept>
#include <string>

namespace ffext {

using Rat = boost::rational<long long>;

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// A Lebesgue exponent: either a positive rational or infinity. Infinity is
// carried explicitly so conjugates and serialized values stay exact; the
// serialized convention for infinity is numerator 1, denominator 0.
struct Exponent {
  bool inf = false;
  Rat v{1};

  static Exponent infinity() { return Exponent{true, Rat{1}}; }
  static Exponent of(long long num, long long den = 1) {
    if (den == 0) return infinity();
    return Exponent{false, Rat{num, den}};
  }
  static Exponent of(const Rat& r) { return Exponent{false, r}; }

  // Accepts "2", "18/5", or "inf".
  static Exponent parse(const std::string& s) {
    if (s == "inf") return infinity();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return of(std::stoll(s));
    return of(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }

  bool is_infinity() const { return inf; }
  double value() const {
    if (inf) throw std::domain_error("exponent is infinite");
    return to_double(v);
  }
  long long num() const { return inf ? 1 : v.numerator(); }
  long long den() const { return inf ? 0 : v.denominator(); }

  // Holder conjugate: 1/p + 1/p' = 1. Conjugate of 1 is infinity and vice versa.
  Exponent conjugate() const {
    if (inf) return of(1);
    if (v == Rat{1}) return infinity();
    return of(v / (v - Rat{1}));
  }

  std::string str() const { return inf ? "inf" : to_string(v); }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    if (a.inf != b.inf) return false;
    return a.inf || a.v == b.v;
  }
};

}  // namespace ffext
