#pragma once

#include <numeric>
#include <string>
#include <string_view>

#include "primechain/errors.hpp"

namespace primechain {

/// A positive rational exponent p/q in lowest terms with p > q >= 1, i.e. a
/// growth exponent strictly greater than 1 (the identity 1/1 is allowed only
/// as a degenerate marker and never drives a chain step).
struct RationalExponent {
  unsigned long num = 1;
  unsigned long den = 1;

  RationalExponent() = default;

  RationalExponent(unsigned long p, unsigned long q) : num(p), den(q) {
    if (p == 0 || q == 0) throw domain_error("rational exponent must be positive");
    const unsigned long g = std::gcd(p, q);
    num = p / g;
    den = q / g;
    if (num < den)
      throw domain_error("rational exponent must be >= 1, got " + str());
  }

  /// Accepts "5/4", "3/2", "3", "3/1".
  static RationalExponent parse(std::string_view text) {
    const auto slash = text.find('/');
    const auto to_ulong = [&](std::string_view part) -> unsigned long {
      if (part.empty() || part.size() > 9) throw parse_error("bad exponent component '" + std::string(part) + "'");
      unsigned long v = 0;
      for (char c : part) {
        if (c < '0' || c > '9') throw parse_error("bad exponent component '" + std::string(part) + "'");
        v = v * 10 + static_cast<unsigned long>(c - '0');
      }
      return v;
    };
    if (slash == std::string_view::npos) return RationalExponent(to_ulong(text), 1);
    return RationalExponent(to_ulong(text.substr(0, slash)), to_ulong(text.substr(slash + 1)));
  }

  bool is_identity() const { return num == 1 && den == 1; }

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

  friend bool operator==(const RationalExponent& a, const RationalExponent& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const RationalExponent& a, const RationalExponent& b) { return !(a == b); }
};

}  // namespace primechain
