#pragma once

// Monte Carlo runs of the (1+1) EA variants on knapsack instances, with one
// independently seeded generator per trial so results do not depend on the
// number of worker threads.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "driftlab/knapsack_bench.hpp"

namespace driftlab {

using Rng = std::mt19937_64;

/// Flips every bit independently with probability 1/n.
Solution mutate(const KnapsackInstance& instance, Solution x, Rng& rng);

Solution step_feasibility_rules(const KnapsackInstance& instance, Solution x, Rng& rng);
Solution step_greedy_repair(const KnapsackInstance& instance, Solution x, Rng& rng);
Solution step(const KnapsackInstance& instance, Variant variant, Solution x, Rng& rng);

/// Generator for trial `trial` under `master_seed`.
Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial);

struct TrialResult {
  std::uint64_t generations = 0;  // equals the cap when censored
  bool censored = false;
  Solution final_state = 0;
  std::uint64_t trial = 0;
};

/// One run from `start` until the fitness reaches `target_fitness` or `cap`
/// generations pass. Throws AnalysisError if a feasible run ever loses fitness.
TrialResult run_trial(const KnapsackInstance& instance, Variant variant, Solution start,
                      const Rational& target_fitness, std::uint64_t cap, Rng& rng, std::uint64_t trial = 0);

struct SimOptions {
  std::uint64_t trials = 10000;
  std::uint64_t cap = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  Solution start = 0;    // empty knapsack
};

struct SimEstimate {
  std::uint64_t trials = 0;
  double mean = 0.0;            // over uncensored trials
  double standard_error = 0.0;
  std::uint64_t censored = 0;
  std::uint64_t cap = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

SimEstimate estimate_hitting_time(const KnapsackInstance& instance, Variant variant, const SimOptions& options);

/// "instance,variant,n,trials,cap,mean,se,censored,seed" plus one row.
std::string sim_csv_header();
std::string sim_csv_row(const KnapsackInstance& instance, Variant variant, const SimEstimate& estimate);

}  // namespace driftlab
