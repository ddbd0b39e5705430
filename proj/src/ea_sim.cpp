#include "driftlab/ea_sim.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace driftlab {

namespace {

std::int64_t scaled_target(const KnapsackInstance& instance, const Rational& target) {
  const Rational scale = Rational(instance.scaled_value(0)) / instance.values()[0];
  const Rational t = target * scale;
  if (t.get_den() != 1 || !t.get_num().fits_slong_p()) {
    throw InputError("target fitness is not reachable on this instance's value grid");
  }
  return t.get_num().get_si();
}

}  // namespace

Solution mutate(const KnapsackInstance& instance, Solution x, Rng& rng) {
  std::bernoulli_distribution flip(1.0 / static_cast<double>(instance.n()));
  for (std::size_t i = 0; i < instance.n(); ++i) {
    if (flip(rng)) x ^= Solution{1} << i;
  }
  return x;
}

Solution step_feasibility_rules(const KnapsackInstance& instance, Solution x, Rng& rng) {
  return select_survivor(instance, Variant::feasibility_rules, x, mutate(instance, x, rng));
}

Solution step_greedy_repair(const KnapsackInstance& instance, Solution x, Rng& rng) {
  return select_survivor(instance, Variant::greedy_repair, x, mutate(instance, x, rng));
}

Solution step(const KnapsackInstance& instance, Variant variant, Solution x, Rng& rng) {
  return variant == Variant::feasibility_rules ? step_feasibility_rules(instance, x, rng)
                                               : step_greedy_repair(instance, x, rng);
}

Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

TrialResult run_trial(const KnapsackInstance& instance, Variant variant, Solution start,
                      const Rational& target_fitness, std::uint64_t cap, Rng& rng, std::uint64_t trial) {
  const std::int64_t target = scaled_target(instance, target_fitness);
  const bool check_elitism = instance.feasible(start);
  TrialResult r;
  r.trial = trial;
  Solution x = start;
  std::int64_t f = instance.fitness_scaled(x);
  while (!(instance.feasible(x) && f >= target)) {
    if (r.generations == cap) {
      r.censored = true;
      break;
    }
    x = step(instance, variant, x, rng);
    ++r.generations;
    const std::int64_t next = instance.fitness_scaled(x);
    if (check_elitism && next < f) throw AnalysisError("internal error: elitism violated during simulation");
    f = next;
  }
  r.final_state = x;
  return r;
}

SimEstimate estimate_hitting_time(const KnapsackInstance& instance, Variant variant, const SimOptions& options) {
  if (options.trials == 0) throw InputError("simulate: trials must be >= 1");
  if (options.cap == 0) throw InputError("simulate: cap must be >= 1");
  const Rational target = optimal_fitness(instance);

  std::vector<TrialResult> results(options.trials);
  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, options.trials));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::uint64_t t; (t = next.fetch_add(1)) < options.trials;) {
        Rng rng = trial_rng(options.seed, t);
        results[t] = run_trial(instance, variant, options.start, target, options.cap, rng, t);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = options.trials;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  // Integer sums are exact, so the estimate does not depend on scheduling.
  unsigned __int128 sum = 0, sum_sq = 0;
  SimEstimate est;
  est.trials = options.trials;
  est.cap = options.cap;
  est.seed = options.seed;
  for (const auto& r : results) {
    if (r.censored) {
      ++est.censored;
      continue;
    }
    sum += r.generations;
    sum_sq += static_cast<unsigned __int128>(r.generations) * r.generations;
  }
  const std::uint64_t used = est.trials - est.censored;
  if (est.censored > 0) {
    std::ostringstream os;
    os << est.censored << " of " << est.trials << " trials censored at cap " << est.cap << "; excluded from the mean";
    est.warnings.push_back(os.str());
  }
  if (used == 0) {
    est.mean = std::nan("");
    est.standard_error = std::nan("");
    return est;
  }
  const long double u = static_cast<long double>(used);
  const long double mean = static_cast<long double>(sum) / u;
  est.mean = static_cast<double>(mean);
  if (used > 1) {
    const long double var = (static_cast<long double>(sum_sq) - static_cast<long double>(sum) * mean) / (u - 1);
    est.standard_error = static_cast<double>(std::sqrt(std::max(0.0L, var) / u));
  }
  return est;
}

std::string sim_csv_header() { return "instance,variant,n,trials,cap,mean,se,censored,seed"; }

std::string sim_csv_row(const KnapsackInstance& instance, Variant variant, const SimEstimate& e) {
  std::ostringstream os;
  os << instance.id() << ',' << to_string(variant) << ',' << instance.n() << ',' << e.trials << ',' << e.cap << ','
     << format_double(e.mean) << ',' << format_double(e.standard_error) << ',' << e.censored << ',' << e.seed;
  return os.str();
}

}  // namespace driftlab
