#include "pm/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace pm {

const Rational& ExtRational::value() const {
  if (infinite_) throw std::logic_error("value() of an infinite ExtRational");
  return value_;
}

std::strong_ordering compare(const Rational& a, const Rational& b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
  return compare(a.value_, b.value_);
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
  if (a.infinite_ || b.infinite_) return ExtRational::infinity();
  return ExtRational(a.value_ + b.value_);
}

Rational abs(const Rational& r) { return r < 0 ? -r : r; }

ExtRational abs_difference(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() && b.is_infinite()) return ExtRational(0);
  if (a.is_infinite() || b.is_infinite()) return ExtRational::infinity();
  return ExtRational(abs(a.value() - b.value()));
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  std::int64_t num = parse_int(text.substr(0, slash), text);
  std::int64_t den = parse_int(text.substr(slash + 1), text);
  if (den <= 0) throw std::invalid_argument("rational with non-positive denominator '" + std::string(text) + "'");
  return Rational(num, den);
}

ExtRational parse_ext_rational(std::string_view text) {
  if (text == "inf") return ExtRational::infinity();
  return ExtRational(parse_rational(text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string to_string(const ExtRational& r) {
  return r.is_infinite() ? std::string("inf") : to_string(r.value());
}

std::ostream& operator<<(std::ostream& os, const ExtRational& r) { return os << to_string(r); }

}  // namespace pm
