#include <doctest.h>

#include <bit>
#include <cmath>

#include "driftlab/ea_sim.hpp"

using namespace driftlab;

TEST_SUITE("ea_sim") {

TEST_CASE("mutation flips each bit at rate 1/n") {
  const auto kp1 = make_instance("KP1", 8);
  Rng rng(42);
  const int calls = 100000;
  long flips = 0;
  for (int i = 0; i < calls; ++i) flips += std::popcount(mutate(kp1, 0, rng));
  const double bits = 8.0 * calls;
  const double rate = static_cast<double>(flips) / bits;
  const double se = std::sqrt((1.0 / 8) * (7.0 / 8) / bits);
  CHECK(std::abs(rate - 1.0 / 8) < 3 * se);
}

TEST_CASE("all-flip outcome is reachable") {
  const auto inst = make_instance("KP1", 4);
  Rng rng(7);
  bool seen = false;
  for (int i = 0; i < 200000 && !seen; ++i) seen = mutate(inst, 0, rng) == 0xF;
  CHECK(seen);
}

TEST_CASE("elitist steps never lose fitness") {
  const auto kp2 = make_instance("KP2", 8);
  for (auto v : {Variant::feasibility_rules, Variant::greedy_repair}) {
    Rng rng(3);
    Solution x = 0;
    for (int i = 0; i < 2000; ++i) {
      const Solution y = step(kp2, v, x, rng);
      CHECK(kp2.feasible(y));
      CHECK(kp2.fitness_scaled(y) >= kp2.fitness_scaled(x));
      x = y;
    }
  }
}

TEST_CASE("infeasible parents move toward feasibility") {
  const auto kp1 = make_instance("KP1", 8);
  Rng rng(5);
  Solution x = parse_solution(kp1, "11111111");
  for (int i = 0; i < 5000; ++i) {
    const Solution y = step_feasibility_rules(kp1, x, rng);
    if (!kp1.feasible(x) && !kp1.feasible(y)) CHECK(kp1.violation_scaled(y) <= kp1.violation_scaled(x));
    x = y;
  }
  CHECK(kp1.feasible(x));
}

TEST_CASE("estimates are reproducible and thread independent") {
  const auto kp1 = make_instance("KP1", 8);
  SimOptions o;
  o.trials = 300;
  o.seed = 99;
  o.threads = 1;
  const auto a = estimate_hitting_time(kp1, Variant::greedy_repair, o);
  o.threads = 3;
  const auto b = estimate_hitting_time(kp1, Variant::greedy_repair, o);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.censored == 0);
  CHECK(a.mean >= 1);
}

TEST_CASE("censoring") {
  const auto kp3 = make_instance("KP3", 8);
  SimOptions o;
  o.trials = 20;
  o.cap = 1;
  const auto e = estimate_hitting_time(kp3, Variant::feasibility_rules, o);
  CHECK(e.censored <= e.trials);
  CHECK((e.censored == e.trials) == std::isnan(e.mean));
  if (e.censored > 0) CHECK_FALSE(e.warnings.empty());
  o.trials = 0;
  CHECK_THROWS_AS(estimate_hitting_time(kp3, Variant::feasibility_rules, o), InputError);
}

TEST_CASE("trial results") {
  const auto kp1 = make_instance("KP1", 6);
  Rng rng = trial_rng(1, 0);
  const auto r = run_trial(kp1, Variant::greedy_repair, 0, optimal_fitness(kp1), 1000000, rng, 0);
  CHECK_FALSE(r.censored);
  CHECK(evaluate(kp1, r.final_state).fitness == optimal_fitness(kp1));
  Rng again = trial_rng(1, 0);
  CHECK(run_trial(kp1, Variant::greedy_repair, 0, optimal_fitness(kp1), 1000000, again, 0).generations ==
        r.generations);
}

TEST_CASE("csv row") {
  const auto kp1 = make_instance("KP1", 6);
  SimEstimate e;
  e.trials = 10;
  e.mean = 2.5;
  e.cap = 100;
  e.seed = 4;
  CHECK(sim_csv_header() == "instance,variant,n,trials,cap,mean,se,censored,seed");
  CHECK(sim_csv_row(kp1, Variant::greedy_repair, e) == "KP1,greedy,6,10,100,2.5,0,0,4");
}

}
