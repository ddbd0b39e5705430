#pragma once

// Elitist absorbing Markov chains, fitness-level partitions, level-wise
// transition extrema and the level digraph with path selection.
//
// Level indices follow the usual fitness-level convention: level 0 holds the
// optimal states and higher indices mean lower fitness. An elitist chain can
// only move from level k to levels <= k.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "driftlab/rational.hpp"

namespace driftlab {

using StateIndex = std::size_t;
using LevelIndex = std::size_t;

template <typename T>
struct Transition {
  StateIndex to;
  T probability;
};

struct StateInfo {
  std::string id;
  Rational fitness;
  bool optimal = false;
};

/// Finite homogeneous Markov chain with exact fitness values. Immutable.
///
/// Rows are stored sparsely, sorted by target, with duplicate targets merged
/// and zero entries dropped. The scalar type fixes the numeric mode.
template <typename T>
class Chain {
 public:
  using Scalar = T;
  static constexpr NumericMode mode = mode_of<T>();

  Chain() = default;
  Chain(std::vector<StateInfo> states, std::vector<std::vector<Transition<T>>> rows);

  std::size_t size() const { return states_.size(); }
  const StateInfo& state(StateIndex i) const { return states_[i]; }
  std::span<const StateInfo> states() const { return states_; }
  std::span<const Transition<T>> row(StateIndex i) const { return rows_[i]; }
  std::optional<StateIndex> find(std::string_view id) const;

  /// Probability of the single step i -> j (zero if absent).
  T probability(StateIndex from, StateIndex to) const;

 private:
  std::vector<StateInfo> states_;
  std::vector<std::vector<Transition<T>>> rows_;
  std::unordered_map<std::string, StateIndex> by_id_;
};

using RationalChain = Chain<Rational>;
using FloatChain = Chain<double>;

/// Same chain with every probability rounded to double.
FloatChain to_float_chain(const RationalChain& chain);

/// Incremental construction; optimal flags default to "has maximum fitness".
template <typename T>
class ChainBuilder {
 public:
  StateIndex add_state(std::string id, Rational fitness);
  void add_transition(StateIndex from, StateIndex to, T probability);
  Chain<T> build() const;

 private:
  std::vector<StateInfo> states_;
  std::vector<std::vector<Transition<T>>> rows_;
};

enum class DiagnosticKind {
  empty_chain,
  negative_probability,
  row_not_stochastic,
  elitism_violated,
  optimal_set_mismatch,
  not_convergent,
};

struct Diagnostic {
  DiagnosticKind kind;
  std::string message;
};

/// Checks every chain invariant; an empty result means the chain is valid.
template <typename T>
std::vector<Diagnostic> validate_chain(const Chain<T>& chain);

/// Ordered split S_0..S_K of the states by strictly decreasing fitness.
class LevelPartition {
 public:
  LevelPartition() = default;
  explicit LevelPartition(std::vector<std::vector<StateIndex>> levels, std::vector<Rational> level_fitness,
                          std::size_t state_count);

  std::size_t level_count() const { return levels_.size(); }
  /// K, the index of the lowest level.
  LevelIndex top() const { return levels_.size() - 1; }
  std::span<const StateIndex> level(LevelIndex k) const { return levels_[k]; }
  LevelIndex level_of(StateIndex s) const { return level_of_[s]; }
  const Rational& fitness(LevelIndex k) const { return level_fitness_[k]; }

  friend bool operator==(const LevelPartition&, const LevelPartition&) = default;

 private:
  std::vector<std::vector<StateIndex>> levels_;
  std::vector<Rational> level_fitness_;
  std::vector<LevelIndex> level_of_;
};

/// Throws AnalysisError listing the diagnostics if the chain is invalid.
template <typename T>
LevelPartition build_level_partition(const Chain<T>& chain);

/// Probability of moving to level `target` given that the chain leaves the
/// level of `state` in this step. Zero for the own level and for lower
/// fitness levels. Throws AnalysisError if a non-optimal state cannot leave
/// its level (violates convergence assumption).
template <typename T>
T conditional_transition(const Chain<T>& chain, const LevelPartition& partition, StateIndex state,
                         LevelIndex target);

/// Per-level extrema of the transition and conditional transition
/// probabilities, plus the per-state aggregates they were taken over.
template <typename T>
class LevelStats {
 public:
  LevelStats() = default;

  const LevelPartition& partition() const { return partition_; }
  LevelIndex top() const { return partition_.top(); }

  /// p(X, S_i) for i = 0..K (zero for i above the level of X).
  std::span<const T> level_probabilities(StateIndex s) const;
  /// r(X, S_i) for i = 0..K; all zero for optimal states.
  std::span<const T> conditional(StateIndex s) const;

  const T& p_min(LevelIndex k, LevelIndex l) const { return p_min_[k * width() + l]; }
  const T& p_max(LevelIndex k, LevelIndex l) const { return p_max_[k * width() + l]; }
  /// Extrema of p(X_k, S_[0,l]).
  const T& p_min_prefix(LevelIndex k, LevelIndex l) const { return p_min_prefix_[k * width() + l]; }
  const T& p_max_prefix(LevelIndex k, LevelIndex l) const { return p_max_prefix_[k * width() + l]; }
  const T& r_min(LevelIndex k, LevelIndex l) const { return r_min_[k * width() + l]; }
  const T& r_max(LevelIndex k, LevelIndex l) const { return r_max_[k * width() + l]; }

  /// p_min / p_max of leaving level k upward, i.e. toward S_[0,k-1].
  const T& climb_min(LevelIndex k) const { return p_min_prefix(k, k - 1); }
  const T& climb_max(LevelIndex k) const { return p_max_prefix(k, k - 1); }

  /// State-wise extrema over S_k of r(X, union of `levels`).
  T r_min_union(LevelIndex k, std::span<const LevelIndex> levels) const;
  T r_max_union(LevelIndex k, std::span<const LevelIndex> levels) const;

  template <typename U>
  friend LevelStats<U> level_stats(const Chain<U>& chain, const LevelPartition& partition);

 private:
  std::size_t width() const { return partition_.level_count(); }

  LevelPartition partition_;
  std::vector<T> level_prob_;   // states x levels
  std::vector<T> conditional_;  // states x levels
  std::vector<T> p_min_, p_max_, p_min_prefix_, p_max_prefix_, r_min_, r_max_;
};

template <typename T>
LevelStats<T> level_stats(const Chain<T>& chain, const LevelPartition& partition);

/// Digraph on levels with arc (k, l) iff p_min(X_k, S_l) > 0, k > l.
class LevelGraph {
 public:
  LevelGraph() = default;
  explicit LevelGraph(std::vector<std::vector<LevelIndex>> targets);

  std::size_t vertex_count() const { return targets_.size(); }
  bool has_arc(LevelIndex from, LevelIndex to) const;
  /// Arc heads out of `from`, ascending.
  std::span<const LevelIndex> targets(LevelIndex from) const { return targets_[from]; }
  /// All arcs ordered by tail then head, both ascending.
  std::vector<std::pair<LevelIndex, LevelIndex>> arcs() const;

 private:
  std::vector<std::vector<LevelIndex>> targets_;
};

template <typename T>
LevelGraph build_level_graph(const LevelStats<T>& stats);

/// Strictly descending vertex sequence k = v_0 > ... > v_m = l joined by arcs.
class Path {
 public:
  Path() = default;
  /// Validates against the graph; throws AnalysisError when not a path.
  Path(const LevelGraph& graph, std::vector<LevelIndex> vertices);

  LevelIndex source() const { return vertices_.front(); }
  LevelIndex target() const { return vertices_.back(); }
  std::span<const LevelIndex> vertices() const { return vertices_; }
  bool contains(LevelIndex v) const;

  /// P[l, v): path vertices after v (v itself excluded, target included).
  std::vector<LevelIndex> below(LevelIndex v) const;
  /// P(l, v): path vertices strictly between v and the target.
  std::vector<LevelIndex> between(LevelIndex v) const;
  /// P(l, k]: every vertex except the target, in path order.
  std::vector<LevelIndex> without_target() const;

  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<LevelIndex> vertices_;
};

enum class PathStrategy { consecutive, shortest, explicit_list };

/// consecutive: k -> k-1 -> ... -> l, all arcs required.
/// shortest: fewest vertices, ties broken by the lexicographically smallest
/// sequence. explicit_list: `vertices` validated as given.
Path select_path(const LevelGraph& graph, LevelIndex from, LevelIndex to, PathStrategy strategy,
                 std::span<const LevelIndex> vertices = {});

/// Every path from `from` to `to`, in lexicographic order. Throws if more than
/// `limit` exist.
std::vector<Path> enumerate_paths(const LevelGraph& graph, LevelIndex from, LevelIndex to,
                                  std::size_t limit = 1u << 16);

}  // namespace driftlab
