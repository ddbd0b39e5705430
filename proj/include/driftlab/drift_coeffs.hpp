#pragma once

// Coefficient families c_{k,l} that bound the hitting probability h(X_k, S_l)
// from below (lower direction) or above (upper direction).
//
// Every builder assigns the extremal value its drift condition permits, so
// each table is the tightest one of its family. Lower tables never exceed
// h_min(X_k, S_l); upper tables never fall below h_max(X_k, S_l).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "driftlab/chain_model.hpp"

namespace driftlab {

enum class Direction { lower, upper };

enum class CoeffMethod {
  forward,          // state-wise recursion from l+1 upward
  level_recursion,  // same recursion on level extrema r_min / r_max
  reverse,          // recursion from k-1 down to l
  allpath,          // explicit sum over every descending level sequence
  path,             // restricted to one path per target level
  type_c,           // one constant for every pair
  type_cl,          // one constant per target level
  random_init,      // type_cl capped by the start distribution
};

std::string_view to_string(Direction d);
std::string_view to_string(CoeffMethod m);
Direction parse_direction(std::string_view text);
CoeffMethod parse_method(std::string_view text);

/// c_{k,l} for 0 <= l <= k <= K.
///
/// Fixed entries: c_{k,k} = 1, c_{k,0} = 1, c_{k,l} = 0 for l > k. Entries
/// with 1 <= l < k start at the trivially sound value (0 lower, 1 upper).
template <typename T>
class CoefficientTable {
 public:
  CoefficientTable() = default;
  CoefficientTable(LevelIndex top, Direction direction, CoeffMethod method);

  LevelIndex top() const { return top_; }
  Direction direction() const { return direction_; }
  CoeffMethod method() const { return method_; }

  const T& operator()(LevelIndex k, LevelIndex l) const { return values_[k * (top_ + 1) + l]; }
  /// Only 1 <= l < k is writable; values must lie in [0, 1].
  void set(LevelIndex k, LevelIndex l, T value);

  /// Free-form provenance, e.g. the paths used.
  const std::string& note() const { return note_; }
  void set_note(std::string note) { note_ = std::move(note); }

 private:
  LevelIndex top_ = 0;
  Direction direction_ = Direction::lower;
  CoeffMethod method_ = CoeffMethod::forward;
  std::vector<T> values_;
  std::string note_;
};

// Columns are returned indexed by source level j over [0, k]: entry l is 1,
// entries below l are 0. Rows are indexed by target level over [0, k].

/// State-wise forward recursion toward S_l up to level k (lower: min, upper:
/// max, clamped at 1).
template <typename T>
std::vector<T> lower_coeffs_forward(const LevelStats<T>& stats, LevelIndex l, LevelIndex k);
template <typename T>
std::vector<T> upper_coeffs_forward(const LevelStats<T>& stats, LevelIndex l, LevelIndex k);

/// c_{j,l} = sum_{i=l}^{j-1} r_ext(X_j, S_i) c_{i,l}; unclamped.
template <typename T>
std::vector<T> level_recursion_coeffs(const LevelStats<T>& stats, LevelIndex l, LevelIndex k, Direction direction);

/// Row c_{k,k-1}, ..., c_{k,l} computed from k downward; unclamped.
template <typename T>
std::vector<T> coeffs_reverse(const LevelStats<T>& stats, LevelIndex k, LevelIndex l, Direction direction);

/// Largest K accepted by allpath_coeffs.
inline constexpr LevelIndex kAllPathMaxLevels = 14;

/// Sum over all strictly descending sequences j > ... > l of the product of
/// r extrema along the sequence; unclamped. Throws for K > kAllPathMaxLevels.
template <typename T>
std::vector<T> allpath_coeffs(const LevelStats<T>& stats, LevelIndex l, LevelIndex k, Direction direction);

enum class PathFormula { explicit_product, recursive };

/// Column for target path.target() indexed over [0, K]. Off-path levels in
/// (l, K] get 0; on-path levels get the path product (explicit) or the
/// path-restricted state-wise recursion.
template <typename T>
std::vector<T> path_lower_coeffs(const LevelStats<T>& stats, const Path& path,
                                 PathFormula formula = PathFormula::explicit_product);

/// Column for target path.target() indexed over [0, K]. Off-path levels in
/// (l, K] get 1; on-path levels get the sum of r_max toward levels skipped by
/// the path (explicit) or the path-restricted recursion. Clamped at 1.
template <typename T>
std::vector<T> path_upper_coeffs(const LevelStats<T>& stats, const Path& path,
                                 PathFormula formula = PathFormula::explicit_product);

/// Scalar viscosity c: extremum over 1 <= l < k and X_k with p(X_k, S_[0,l]) > 0
/// of p(X_k, S_l) / p(X_k, S_[0,l]). Throws if no such pair exists.
template <typename T>
T type_c_coeff(const LevelStats<T>& stats, Direction direction);

/// Per-target visit probabilities c_l (index 0..K, c_0 = 1). Levels with no
/// qualifying source (always l = K) get 1. Throws if no pair exists at all.
template <typename T>
std::vector<T> type_cl_coeffs(const LevelStats<T>& stats, Direction direction);

/// Lower c_l under a random start distribution over levels (index 0..K):
/// min(type_cl lower c_l, Pr(S_l) / Pr(S_[0,l])). When Pr(S_[0,l]) = 0 the
/// start condition holds for every c_l and only the transition bound applies.
template <typename T>
std::vector<T> random_init_coeffs(const LevelStats<T>& stats, std::span<const T> start_distribution);

// Full tables.

template <typename T>
CoefficientTable<T> forward_table(const LevelStats<T>& stats, Direction direction);
template <typename T>
CoefficientTable<T> level_recursion_table(const LevelStats<T>& stats, Direction direction);
template <typename T>
CoefficientTable<T> reverse_table(const LevelStats<T>& stats, Direction direction);
template <typename T>
CoefficientTable<T> allpath_table(const LevelStats<T>& stats, Direction direction);
template <typename T>
CoefficientTable<T> type_c_table(const LevelStats<T>& stats, Direction direction);
template <typename T>
CoefficientTable<T> type_cl_table(const LevelStats<T>& stats, Direction direction);
template <typename T>
CoefficientTable<T> constant_table(LevelIndex top, Direction direction, CoeffMethod method, const T& value);
template <typename T>
CoefficientTable<T> per_target_table(std::span<const T> per_target, Direction direction, CoeffMethod method);

/// One path per target level l < source, all starting at `source`. Targets
/// without a path keep the trivially sound value. Explicit paths whose
/// endpoints match (source, l) take precedence over `strategy`.
template <typename T>
CoefficientTable<T> path_table(const LevelStats<T>& stats, const LevelGraph& graph, LevelIndex source,
                               Direction direction, PathStrategy strategy = PathStrategy::shortest,
                               std::span<const Path> explicit_paths = {},
                               PathFormula formula = PathFormula::explicit_product);

/// c_{j,l} - sum_{i=l}^{j-1} r(X, S_i) c_{i,l} with j the level of X.
template <typename T>
T conditional_drift(const LevelStats<T>& stats, const CoefficientTable<T>& table, StateIndex state, LevelIndex l);

/// c_{j,l} - sum_{i=l}^{j} p(X, S_i) c_{i,l} with j the level of X.
template <typename T>
T standard_drift(const LevelStats<T>& stats, const CoefficientTable<T>& table, StateIndex state, LevelIndex l);

struct DriftViolation {
  StateIndex state;
  LevelIndex target;
  double drift;
};

/// States in levels above each target whose conditional drift has the wrong
/// sign for the table direction (> 0 for lower, < 0 for upper).
template <typename T>
std::vector<DriftViolation> check_drift_conditions(const LevelStats<T>& stats, const CoefficientTable<T>& table);

struct DominanceReport {
  /// (k, l) entries where the per-pair table fails to dominate c_l.
  std::vector<std::pair<LevelIndex, LevelIndex>> violations;
  /// (k, l) entries where it dominates strictly.
  std::vector<std::pair<LevelIndex, LevelIndex>> strict;
  bool ok() const { return violations.empty(); }
};

/// Lower: table(k, l) >= c_l for all 1 <= l < k; upper: table(k, l) <= c_l.
template <typename T>
DominanceReport dominance_check(std::span<const T> per_target, const CoefficientTable<T>& table);

}  // namespace driftlab
