#pragma once

// Exact rational scalar plus the small set of traits the templated analysis
// code needs to treat mpq_class and double uniformly.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace driftlab {

using Rational = mpq_class;
using Integer = mpz_class;

/// Numeric mode of a chain and everything computed from it.
enum class NumericMode { rational, floating };

/// Thrown for malformed input (parse failures, bad instance parameters, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an analysis precondition fails (invalid chain, missing path, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "p/q", "p" or a decimal literal such as "0.25" into an exact rational.
Rational parse_rational(std::string_view text);

/// Lowest-terms "p/q" (always with a denominator, e.g. "4/1").
std::string format_rational(const Rational& value);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr NumericMode mode = NumericMode::rational;
  static Rational from_rational(const Rational& r) { return r; }
  static double to_double(const Rational& r) { return r.get_d(); }
  static std::string format(const Rational& r) { return format_rational(r); }
  static bool is_zero(const Rational& r) { return sgn(r) == 0; }
  static bool is_one(const Rational& r) { return r == 1; }
  // Rows sum to one exactly.
  static bool near(const Rational& a, const Rational& b) { return a == b; }
};

template <>
struct ScalarTraits<double> {
  static constexpr NumericMode mode = NumericMode::floating;
  static double from_rational(const Rational& r) { return r.get_d(); }
  static double to_double(double r) { return r; }
  static std::string format(double r) { return format_double(r); }
  static bool is_zero(double r) { return r == 0.0; }
  static bool is_one(double r) { return r == 1.0; }
  static bool near(double a, double b) {
    const double diff = a > b ? a - b : b - a;
    return diff <= 1e-12;
  }
};

template <typename T>
std::string format_scalar(const T& value) {
  return ScalarTraits<T>::format(value);
}

template <typename T>
constexpr NumericMode mode_of() {
  return ScalarTraits<T>::mode;
}

std::string_view to_string(NumericMode mode);
NumericMode parse_mode(std::string_view text);

}  // namespace driftlab
