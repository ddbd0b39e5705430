#include "driftlab/rational.hpp"

#include <charconv>
#include <cctype>
#include <string>
#include <system_error>

namespace driftlab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Integer parse_integer(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (!all_digits(body)) throw InputError("not an integer: '" + std::string(text) + "'");
  std::string owned(text);
  if (owned.front() == '+') owned.erase(0, 1);
  return Integer(owned, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational literal");

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Integer num = parse_integer(text.substr(0, slash));
    const Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  // Decimal literal: sign, integer part, optional fraction, optional exponent.
  std::string_view rest = text;
  bool negative = false;
  if (rest.front() == '-' || rest.front() == '+') {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (const auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    const std::string_view exp_text = rest.substr(e + 1);
    const char* first = exp_text.data();
    const char* last = first + exp_text.size();
    if (!exp_text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr != last) throw InputError("bad exponent in '" + std::string(text) + "'");
    rest = rest.substr(0, e);
  }
  std::string digits;
  long scale = 0;
  if (const auto dot = rest.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = rest.substr(0, dot);
    const std::string_view frac = rest.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw InputError("bad decimal literal '" + std::string(text) + "'");
    }
    digits = std::string(whole) + std::string(frac);
    scale = static_cast<long>(frac.size());
  } else {
    if (!all_digits(rest)) throw InputError("bad rational literal '" + std::string(text) + "'");
    digits = std::string(rest);
  }
  Integer num(digits, 10);
  if (negative) num = -num;
  const long power = exponent - scale;
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(power < 0 ? -power : power));
  Rational r = power >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
  r.canonicalize();
  return r;
}

std::string format_rational(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string_view to_string(NumericMode mode) {
  return mode == NumericMode::rational ? "rational" : "float";
}

NumericMode parse_mode(std::string_view text) {
  if (text == "rational") return NumericMode::rational;
  if (text == "float") return NumericMode::floating;
  throw InputError("unknown numeric mode '" + std::string(text) + "' (expected rational|float)");
}

}  // namespace driftlab
