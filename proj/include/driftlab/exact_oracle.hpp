#pragma once

// Exact hitting probabilities and hitting times of an elitist chain, obtained
// by solving the absorbing-chain linear systems level by level. Elitism makes
// the systems block triangular once unknowns are grouped by fitness level.

#include <vector>

#include "driftlab/chain_model.hpp"

namespace driftlab {

/// Hitting probabilities toward one target level.
template <typename T>
struct HittingProfile {
  LevelIndex target = 0;
  /// h(X, S_target) for every state.
  std::vector<T> probability;
  /// first_entry[X][i]: probability that the first state of S_target visited
  /// from X is partition.level(target)[i].
  std::vector<std::vector<T>> first_entry;

  T min_over(const LevelPartition& partition, LevelIndex k) const;
  T max_over(const LevelPartition& partition, LevelIndex k) const;
};

template <typename T>
HittingProfile<T> hitting_probabilities(const Chain<T>& chain, const LevelPartition& partition, LevelIndex target);

/// h_min(X_k, S_l) and h_max(X_k, S_l) for every pair l <= k.
template <typename T>
struct HittingExtrema {
  std::vector<std::vector<T>> min;  // [k][l]
  std::vector<std::vector<T>> max;
};

template <typename T>
HittingExtrema<T> hitting_extrema(const Chain<T>& chain, const LevelPartition& partition);

/// m(X, complement of S_k) for the states of S_k, aligned with partition.level(k).
template <typename T>
std::vector<T> mean_exit_time(const Chain<T>& chain, const LevelPartition& partition, LevelIndex k);

/// m(X) = mean hitting time of the optimal set, per state.
template <typename T>
std::vector<T> mean_hitting_time(const Chain<T>& chain, const LevelPartition& partition);

template <typename T>
std::vector<T> mean_hitting_time(const Chain<T>& chain) {
  return mean_hitting_time(chain, build_level_partition(chain));
}

/// Per-state exit times and total hitting times in one place.
template <typename T>
struct TimeProfile {
  std::vector<T> exit_time;     // m(X, complement of own level); 0 on S_0
  std::vector<T> hitting_time;  // m(X)
};

template <typename T>
TimeProfile<T> time_profile(const Chain<T>& chain, const LevelPartition& partition);

/// Expected staying time per level along a run from `start`:
/// staying[l] = sum over Y in S_l of h(start, Y) * m(Y, complement of S_l).
template <typename T>
struct Decomposition {
  StateIndex start = 0;
  std::vector<T> staying;  // indexed by level, staying[0] = 0
  T total{0};
};

template <typename T>
Decomposition<T> decompose_hitting_time(const Chain<T>& chain, const LevelPartition& partition, StateIndex start);

}  // namespace driftlab
