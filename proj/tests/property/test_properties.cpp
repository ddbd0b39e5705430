// Randomized invariants over the generated elitist chains.

#include <doctest.h>

#include "driftlab/exact_oracle.hpp"
#include "driftlab/knapsack_bench.hpp"
#include "driftlab/time_bounds.hpp"
#include "support/chains.hpp"

using namespace driftlab;
using namespace driftlab::testing;

namespace {

const std::vector<RationalChain>& corpus() {
  static const auto chains = random_chain_corpus(60, 2024);
  return chains;
}

}  // namespace

TEST_CASE("conditional transitions sum to one") {
  for (const auto& c : corpus()) {
    const auto p = build_level_partition(c);
    const auto st = level_stats(c, p);
    for (StateIndex s = 0; s < c.size(); ++s) {
      const LevelIndex k = p.level_of(s);
      if (k == 0) continue;
      Rational sum(0);
      for (LevelIndex l = 0; l <= p.top(); ++l) {
        sum += conditional_transition(c, p, s, l);
        if (l > k) CHECK(st.level_probabilities(s)[l] == 0);
      }
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("analysis pipeline is deterministic") {
  for (const auto& c : corpus()) {
    const auto p1 = build_level_partition(c);
    const auto p2 = build_level_partition(c);
    CHECK(p1 == p2);
    const auto g1 = build_level_graph(level_stats(c, p1));
    const auto g2 = build_level_graph(level_stats(c, p2));
    CHECK(g1.arcs() == g2.arcs());
  }
}

TEST_CASE("shortest paths are never longer than consecutive ones") {
  for (const auto& c : corpus()) {
    const auto g = build_level_graph(level_stats(c, build_level_partition(c)));
    for (LevelIndex k = 1; k < g.vertex_count(); ++k) {
      for (LevelIndex l = 0; l < k; ++l) {
        std::optional<Path> consecutive;
        try {
          consecutive = select_path(g, k, l, PathStrategy::consecutive);
        } catch (const AnalysisError&) {
        }
        if (!consecutive) continue;
        CHECK(select_path(g, k, l, PathStrategy::shortest).vertices().size() <= consecutive->vertices().size());
      }
    }
  }
}

TEST_CASE("exit times") {
  for (const auto& c : corpus()) {
    const auto p = build_level_partition(c);
    const auto st = level_stats(c, p);
    for (LevelIndex k = 1; k <= p.top(); ++k) {
      for (const auto& m : mean_exit_time(c, p, k)) {
        CHECK(m >= 1);
        CHECK(m >= 1 / st.climb_max(k));
      }
    }
  }
}

TEST_CASE("path coefficients") {
  for (const auto& c : corpus()) {
    const auto p = build_level_partition(c);
    const auto st = level_stats(c, p);
    const auto g = build_level_graph(st);
    const auto ext = hitting_extrema(c, p);
    for (LevelIndex k = 2; k <= p.top(); ++k) {
      for (LevelIndex l = 1; l < k; ++l) {
        const auto fwd = lower_coeffs_forward(st, l, k);
        for (const auto& path : enumerate_paths(g, k, l)) {
          const auto ex = path_lower_coeffs(st, path);
          const auto rec = path_lower_coeffs(st, path, PathFormula::recursive);
          const auto up = path_upper_coeffs(st, path);
          for (LevelIndex j = l + 1; j <= k; ++j) {
            CHECK(ex[j] <= rec[j]);
            CHECK(rec[j] <= fwd[j]);
            CHECK(up[j] >= ext.max[j][l]);
          }
        }
      }
    }
  }
}

TEST_CASE("sandwich for every start level and method") {
  for (const auto& c : corpus()) {
    const auto p = build_level_partition(c);
    const auto st = level_stats(c, p);
    const auto m = mean_hitting_time(c, p);
    std::vector<CoefficientTable<Rational>> lower{forward_table(st, Direction::lower),
                                                  reverse_table(st, Direction::lower),
                                                  allpath_table(st, Direction::lower)};
    std::vector<CoefficientTable<Rational>> upper{forward_table(st, Direction::upper),
                                                  reverse_table(st, Direction::upper),
                                                  allpath_table(st, Direction::upper)};
    if (p.top() >= 2) {
      lower.push_back(type_c_table(st, Direction::lower));
      lower.push_back(type_cl_table(st, Direction::lower));
      upper.push_back(type_c_table(st, Direction::upper));
      upper.push_back(type_cl_table(st, Direction::upper));
    }
    for (LevelIndex k = 1; k <= p.top(); ++k) {
      Rational lo = m[p.level(k)[0]], hi = lo;
      for (auto s : p.level(k)) {
        lo = std::min(lo, m[s]);
        hi = std::max(hi, m[s]);
      }
      for (const auto& t : lower) CHECK(lower_time_bound(st, t, k).value <= Extended<Rational>(lo));
      for (const auto& t : upper) CHECK(Extended<Rational>(hi) <= upper_time_bound(st, t, k).value);
    }
  }
}

TEST_CASE("typed bound ordering") {
  for (const auto& c : corpus()) {
    const auto p = build_level_partition(c);
    if (p.top() < 2) continue;
    const auto st = level_stats(c, p);
    const LevelIndex k = p.top();
    const auto a = lower_time_bound(st, type_c_table(st, Direction::lower), k).value;
    const auto b = lower_time_bound(st, type_cl_table(st, Direction::lower), k).value;
    const auto f = lower_time_bound(st, forward_table(st, Direction::lower), k).value;
    CHECK(a <= b);
    CHECK(b <= f);
  }
}

TEST_CASE("float mode agrees with rational mode") {
  for (const auto& c : corpus()) {
    const auto f = to_float_chain(c);
    const auto p = build_level_partition(c);
    const auto pf = build_level_partition(f);
    const auto m = mean_hitting_time(c, p);
    for (StateIndex s = 0; s < c.size(); ++s) {
      if (pf.level_of(s) == 0) continue;
      const auto d = decompose_hitting_time(f, pf, s);
      CHECK(d.total == doctest::Approx(m[s].get_d()).epsilon(1e-10));
    }
    const auto st = level_stats(f, pf);
    const auto lo = lower_time_bound(st, forward_table(st, Direction::lower), pf.top());
    CHECK(verify_drift_inequality(f, pf, lo).ok());
  }
}

TEST_CASE("lumping on the remaining instances") {
  for (auto [id, n] : {std::pair{"KP4", 8}, std::pair{"KP5", 6}, std::pair{"KP6", 6}}) {
    const auto inst = make_instance(id, n);
    for (auto v : {Variant::feasibility_rules, Variant::greedy_repair}) {
      const auto full = build_full_chain(inst, v);
      const auto lumped = build_lumped_chain(inst, v);
      CHECK(mean_hitting_time(full)[*full.find(solution_id(inst, 0))] ==
            mean_hitting_time(lumped)[*lumped.find("(0,0;0)")]);
    }
  }
}
