#pragma once

// Knapsack benchmark instances KP1..KP6, solution semantics, the two (1+1) EA
// selection rules, and exact chains over full solutions or lumped classes.
//
// Solutions are bit masks: bit i-1 holds b_i, so n <= 64.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftlab/chain_model.hpp"

namespace driftlab {

using Solution = std::uint64_t;

inline constexpr std::size_t kMaxItems = 64;
inline constexpr std::size_t kFullChainMaxItems = 12;

class KnapsackInstance {
 public:
  KnapsackInstance() = default;
  /// Custom instance; capacity nullopt means unbounded. Throws InputError on
  /// n < 4, n > 64, non-positive values or weights, or mismatched lengths.
  KnapsackInstance(std::string id, std::vector<Rational> values, std::vector<Rational> weights,
                   std::optional<Rational> capacity);

  const std::string& id() const { return id_; }
  std::size_t n() const { return values_.size(); }
  const std::vector<Rational>& values() const { return values_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const std::optional<Rational>& capacity() const { return capacity_; }
  /// Items 3..n share one value and one weight.
  bool exchangeable() const;

  // Integer images of the parameters (values and weights scaled separately
  // by their common denominators) for fast exact comparisons.
  std::int64_t scaled_value(std::size_t item) const { return scaled_values_[item]; }
  std::int64_t scaled_weight(std::size_t item) const { return scaled_weights_[item]; }
  std::int64_t fitness_scaled(Solution x) const;
  std::int64_t weight_scaled(Solution x) const;
  bool feasible(Solution x) const;
  /// Scaled weight in excess of the capacity, 0 when feasible.
  std::int64_t violation_scaled(Solution x) const;
  /// Items in greedy-repair removal order.
  const std::vector<std::size_t>& removal_order() const { return removal_order_; }

 private:
  std::string id_;
  std::vector<Rational> values_, weights_;
  std::optional<Rational> capacity_;
  std::vector<std::int64_t> scaled_values_, scaled_weights_;
  std::int64_t scaled_capacity_ = 0;
  std::vector<std::size_t> removal_order_;
};

/// Table parameters for KP1..KP6. Requires n >= 4 (n even for KP2 and KP5,
/// n divisible by 4 for KP4).
KnapsackInstance make_instance(std::string_view id, std::size_t n);

struct Evaluation {
  Rational fitness;
  Rational weight;
  bool feasible;
};

Evaluation evaluate(const KnapsackInstance& instance, Solution x);

/// Removes included items in removal order (lowest value, then larger weight,
/// then higher index) until the solution fits. Feasible input is unchanged.
Solution greedy_repair(const KnapsackInstance& instance, Solution x);

struct LevelClass {
  bool b1 = false;
  bool b2 = false;
  std::size_t k = 0;  // number of selected items among 3..n

  std::string id() const;  // "(b1,b2;k)"
  friend auto operator<=>(const LevelClass&, const LevelClass&) = default;
};

LevelClass classify(const KnapsackInstance& instance, Solution x);
/// Items 1, 2 per the class and items 3..k+2 selected.
Solution representative(const LevelClass& c);

enum class Variant { feasibility_rules, greedy_repair };
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);  // "feasibility" or "greedy"

/// Survivor of parent x and offspring y. Feasibility rules: feasible beats
/// infeasible, larger fitness among feasible, smaller violation among
/// infeasible. Greedy repair: y is repaired first and survives if f(y) >= f(x).
/// Ties keep the offspring in both variants.
Solution select_survivor(const KnapsackInstance& instance, Variant variant, Solution x, Solution y);

/// Bit string "b1b2...bn".
std::string solution_id(const KnapsackInstance& instance, Solution x);
Solution parse_solution(const KnapsackInstance& instance, std::string_view bits);

/// Largest fitness over feasible solutions.
Rational optimal_fitness(const KnapsackInstance& instance);

/// Chain over all feasible solutions with exact expectations over every
/// mutation mask. States are ordered by mask; ids are bit strings.
RationalChain build_full_chain(const KnapsackInstance& instance, Variant variant);

/// Chain over feasible level classes; ids are "(b1,b2;k)". Requires an
/// exchangeable instance.
RationalChain build_lumped_chain(const KnapsackInstance& instance, Variant variant);

/// Total one-step probability from `from` into the states of a full chain
/// that fall into class `target`.
Rational aggregate_transition(const RationalChain& full_chain, const KnapsackInstance& instance,
                              StateIndex from, const LevelClass& target);

}  // namespace driftlab
