#include "chains.hpp"

#include <stdexcept>
#include <string>

namespace driftlab::testing {

RationalChain toy_chain() {
  ChainBuilder<Rational> b;
  const auto s2 = b.add_state("s2", 0);
  const auto s1 = b.add_state("s1", 1);
  const auto s0 = b.add_state("s0", 2);
  b.add_transition(s2, s2, Rational(3, 5));
  b.add_transition(s2, s1, Rational(3, 10));
  b.add_transition(s2, s0, Rational(1, 10));
  b.add_transition(s1, s1, Rational(1, 2));
  b.add_transition(s1, s0, Rational(1, 2));
  b.add_transition(s0, s0, Rational(1));
  return b.build();
}

RationalChain random_chain(std::mt19937_64& rng, const RandomChainOptions& options) {
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t top = uniform(1, options.max_top);
  std::vector<std::vector<StateIndex>> levels(top + 1);
  ChainBuilder<Rational> b;
  for (std::size_t k = 0; k <= top; ++k) {
    const std::size_t count = options.singleton_levels ? 1 : uniform(1, options.max_per_level);
    for (std::size_t i = 0; i < count; ++i) {
      levels[k].push_back(b.add_state("L" + std::to_string(k) + "_" + std::to_string(i),
                                      Rational(static_cast<long>(top - k))));
    }
  }
  for (StateIndex s : levels[0]) b.add_transition(s, s, Rational(1));

  for (std::size_t k = 1; k <= top; ++k) {
    for (StateIndex s : levels[k]) {
      std::vector<std::pair<StateIndex, long>> weights;
      long climb = 0;
      // Sparse upward moves keep shortcuts and missing arcs both common.
      for (std::size_t l = 0; l < k; ++l) {
        for (StateIndex t : levels[l]) {
          if (uniform(0, 2) == 0) continue;
          const long w = static_cast<long>(uniform(1, 4));
          weights.emplace_back(t, w);
          climb += w;
        }
      }
      if (climb == 0) {
        const auto& l = levels[uniform(0, k - 1)];
        weights.emplace_back(l[uniform(0, l.size() - 1)], static_cast<long>(uniform(1, 4)));
      }
      weights.emplace_back(s, static_cast<long>(uniform(0, 6)));
      if (options.same_level_moves) {
        for (StateIndex t : levels[k]) {
          if (t != s && uniform(0, 3) == 0) weights.emplace_back(t, static_cast<long>(uniform(1, 3)));
        }
      }
      long total = 0;
      for (const auto& [t, w] : weights) total += w;
      for (const auto& [t, w] : weights) {
        Rational q(w, total);
        q.canonicalize();
        b.add_transition(s, t, q);
      }
    }
  }
  return b.build();
}

std::vector<RationalChain> random_chain_corpus(std::size_t count, std::uint64_t seed,
                                               const RandomChainOptions& options) {
  std::mt19937_64 rng(seed);
  std::vector<RationalChain> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_chain(rng, options));
  return out;
}

std::vector<Rational> gauss_solve(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::runtime_error("gauss_solve: singular system");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

namespace {

// Solves x = b + Q x over `unknowns`, where b and Q come from `row_value`
// (per state) and transitions between unknowns.
template <typename Rhs>
std::vector<Rational> solve_over(const RationalChain& chain, const std::vector<StateIndex>& unknowns, Rhs rhs) {
  std::vector<long> slot(chain.size(), -1);
  for (std::size_t i = 0; i < unknowns.size(); ++i) slot[unknowns[i]] = static_cast<long>(i);
  std::vector<std::vector<Rational>> a(unknowns.size(), std::vector<Rational>(unknowns.size()));
  std::vector<Rational> b(unknowns.size());
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    a[i][i] = 1;
    b[i] = rhs(unknowns[i]);
    for (const auto& t : chain.row(unknowns[i])) {
      if (slot[t.to] >= 0) a[i][slot[t.to]] -= t.probability;
    }
  }
  auto x = gauss_solve(std::move(a), std::move(b));
  std::vector<Rational> out(chain.size());
  for (std::size_t i = 0; i < unknowns.size(); ++i) out[unknowns[i]] = x[i];
  return out;
}

}  // namespace

std::vector<Rational> brute_mean_hitting_time(const RationalChain& chain) {
  std::vector<StateIndex> unknowns;
  for (StateIndex s = 0; s < chain.size(); ++s) {
    if (!chain.state(s).optimal) unknowns.push_back(s);
  }
  return solve_over(chain, unknowns, [](StateIndex) { return Rational(1); });
}

std::vector<Rational> brute_hitting_probability(const RationalChain& chain, const LevelPartition& partition,
                                                LevelIndex target) {
  std::vector<StateIndex> unknowns;
  for (StateIndex s = 0; s < chain.size(); ++s) {
    if (partition.level_of(s) > target) unknowns.push_back(s);
  }
  auto h = solve_over(chain, unknowns, [&](StateIndex s) {
    Rational into(0);
    for (const auto& t : chain.row(s)) {
      if (partition.level_of(t.to) == target) into += t.probability;
    }
    return into;
  });
  for (StateIndex s : partition.level(target)) h[s] = 1;
  return h;
}

}  // namespace driftlab::testing
