#pragma once

#include <cstdint>
#include <compare>
#include <ostream>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace pm {

using Rational = boost::rational<std::int64_t>;

/// Rational number extended by +inf. Used for deaths of bars and for
/// (Lawvere) distances, where an infinite value is meaningful.
class ExtRational {
 public:
  ExtRational() = default;
  ExtRational(Rational v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  ExtRational(std::int64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static ExtRational infinity() {
    ExtRational r;
    r.infinite_ = true;
    return r;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  /// Finite value. Throws std::logic_error when infinite.
  const Rational& value() const;

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

  friend ExtRational operator+(const ExtRational& a, const ExtRational& b);

 private:
  bool infinite_ = false;
  Rational value_{0};
};

std::strong_ordering compare(const Rational& a, const Rational& b);

/// |a - b| with inf - inf = 0 and |inf - finite| = inf.
ExtRational abs_difference(const ExtRational& a, const ExtRational& b);

Rational abs(const Rational& r);

/// Parses "a", "a/b" or "-a/b". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
/// Same as parse_rational, additionally accepting "inf".
ExtRational parse_ext_rational(std::string_view text);

std::string to_string(const Rational& r);
std::string to_string(const ExtRational& r);

std::ostream& operator<<(std::ostream& os, const ExtRational& r);

}  // namespace pm
