#pragma once

// Linear hitting-time bounds assembled from coefficient tables and the
// level-wise climb extrema, plus drift verification and ratio intervals.

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftlab/chain_model.hpp"
#include "driftlab/drift_coeffs.hpp"

namespace driftlab {

/// A finite value or the "unbounded" sentinel, which compares greater than
/// every finite value.
template <typename T>
class Extended {
 public:
  Extended() = default;
  Extended(T value) : value_(std::move(value)) {}  // NOLINT: implicit by design
  static Extended unbounded() {
    Extended e;
    e.finite_ = false;
    return e;
  }

  bool finite() const { return finite_; }
  const T& value() const { return value_; }
  std::string format() const { return finite_ ? format_scalar(value_) : "unbounded"; }

  friend bool operator==(const Extended& a, const Extended& b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  friend bool operator<(const Extended& a, const Extended& b) {
    if (!b.finite()) return a.finite();
    return a.finite() && a.value() < b.value();
  }
  friend bool operator<=(const Extended& a, const Extended& b) { return !(b < a); }
  friend bool operator>(const Extended& a, const Extended& b) { return b < a; }
  friend bool operator>=(const Extended& a, const Extended& b) { return !(a < b); }

 private:
  bool finite_ = true;
  T value_{0};
};

/// One summand coefficient / climb of a linear bound.
template <typename T>
struct BoundTerm {
  LevelIndex level;
  T coefficient;  // weighted by the start distribution when one is given
  T climb;        // p_max (lower) or p_min (upper) of leaving the level upward
  Extended<T> contribution;
};

template <typename T>
struct BoundReport {
  Direction direction = Direction::lower;
  std::string method;
  NumericMode mode = mode_of<T>();
  /// Set for a deterministic start level.
  std::optional<LevelIndex> start_level;
  /// Start distribution over levels 0..K; empty for a deterministic start.
  std::vector<T> start_distribution;
  Extended<T> value;
  std::vector<BoundTerm<T>> terms;
  /// d(X_j) = sum_l c_{j,l} / climb(l) for every level j; d(X_0) = 0.
  std::vector<Extended<T>> level_values;
};

/// sum_{l=1}^{k} coefficients[l] / climb[l]. Lower: a zero climb throws
/// "level unreachable upward, violates default assumption". Upper: a zero
/// climb with a positive coefficient makes the bound unbounded.
template <typename T>
Extended<T> linear_time_bound(std::span<const T> coefficients, std::span<const T> climb, Direction direction,
                              std::vector<BoundTerm<T>>* terms = nullptr);

template <typename T>
BoundReport<T> lower_time_bound(const LevelStats<T>& stats, const CoefficientTable<T>& table, LevelIndex k);

template <typename T>
BoundReport<T> upper_time_bound(const LevelStats<T>& stats, const CoefficientTable<T>& table, LevelIndex k);

/// Point mass on level k as a start distribution over 0..K.
template <typename T>
std::vector<T> point_distribution(LevelIndex top, LevelIndex k);

/// sum_k Pr(S_k) [1/climb(k) + sum_{l<k} c_{k,l}/climb(l)] for a constant or
/// per-target table (the Sudholt form); any sound table is accepted.
template <typename T>
BoundReport<T> expected_time_bound(const LevelStats<T>& stats, const CoefficientTable<T>& table,
                                   std::span<const T> start_distribution);

/// sum_{l=1}^{K} c_l / p_max(X_l, S_[0,l-1]) with c_l from random_init_coeffs.
template <typename T>
BoundReport<T> doerr_kotzing_bound(const LevelStats<T>& stats, std::span<const T> per_target);

struct DriftCheck {
  StateIndex state;
  LevelIndex level;
  double drift;  // +inf when d(X) is unbounded
  bool ok;
};

struct DriftReport {
  Direction direction = Direction::lower;
  std::vector<DriftCheck> checks;
  std::size_t violations = 0;
  bool ok() const { return violations == 0; }
};

/// Drift of the level function d from `report` at every non-optimal state:
/// sum_i p(X, S_i) (d(X) - d(S_i)). Lower needs <= 1, upper needs >= 1.
template <typename T>
DriftReport verify_drift_inequality(const Chain<T>& chain, const LevelPartition& partition,
                                    const BoundReport<T>& report);

template <typename T>
struct RatioInterval {
  Extended<T> lower;
  Extended<T> upper;
  std::optional<T> exact;
  bool contains(const T& x) const { return lower <= Extended<T>(x) && Extended<T>(x) <= upper; }
};

/// [A_lower / B_upper, A_upper / B_lower], plus exact_a / exact_b if given.
template <typename T>
RatioInterval<T> compare_algorithms(const BoundReport<T>& a_lower, const BoundReport<T>& a_upper,
                                    const BoundReport<T>& b_lower, const BoundReport<T>& b_upper,
                                    std::optional<T> exact_a = std::nullopt, std::optional<T> exact_b = std::nullopt);

}  // namespace driftlab
