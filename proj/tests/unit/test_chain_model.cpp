#include <doctest.h>

#include <algorithm>

#include "driftlab/chain_model.hpp"
#include "driftlab/knapsack_bench.hpp"
#include "support/chains.hpp"

using namespace driftlab;
using driftlab::testing::toy_chain;

namespace {

bool has_kind(const std::vector<Diagnostic>& d, DiagnosticKind kind) {
  return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.kind == kind; });
}

// T1 with one row replaced.
RationalChain toy_with(std::vector<std::tuple<const char*, const char*, Rational>> extra, bool rescale_s2) {
  ChainBuilder<Rational> b;
  b.add_state("s2", 0);
  b.add_state("s1", 1);
  b.add_state("s0", 2);
  const Rational f = rescale_s2 ? Rational(9, 10) : Rational(1);
  b.add_transition(0, 0, Rational(3, 5) * f);
  b.add_transition(0, 1, Rational(3, 10) * f);
  b.add_transition(0, 2, Rational(1, 10) * f);
  b.add_transition(1, 1, Rational(1, 2));
  b.add_transition(1, 2, Rational(1, 2));
  b.add_transition(2, 2, Rational(1));
  auto c = b.build();
  for (auto& [from, to, p] : extra) {
    std::vector<std::vector<Transition<Rational>>> rows(3);
    for (StateIndex i = 0; i < 3; ++i) {
      for (const auto& t : c.row(i)) rows[i].push_back(t);
    }
    const auto f_i = *c.find(from);
    rows[f_i].push_back({*c.find(to), p});
    rows[f_i][0].probability -= p;
    c = RationalChain({c.states().begin(), c.states().end()}, std::move(rows));
  }
  return c;
}

}  // namespace

TEST_SUITE("chain_model") {

TEST_CASE("validation") {
  CHECK(validate_chain(toy_chain()).empty());
  CHECK(has_kind(validate_chain(toy_with({}, true)), DiagnosticKind::row_not_stochastic));
  CHECK(has_kind(validate_chain(toy_with({{"s1", "s2", Rational(1, 10)}}, false)), DiagnosticKind::elitism_violated));
  CHECK(has_kind(validate_chain(RationalChain{}), DiagnosticKind::empty_chain));

  ChainBuilder<Rational> stuck;
  stuck.add_state("a", 0);
  stuck.add_state("b", 1);
  stuck.add_transition(0, 0, Rational(1));
  stuck.add_transition(1, 1, Rational(1));
  CHECK(has_kind(validate_chain(stuck.build()), DiagnosticKind::not_convergent));

  ChainBuilder<double> neg;
  neg.add_state("a", 0);
  neg.add_state("b", 1);
  neg.add_transition(0, 0, 1.5);
  neg.add_transition(0, 1, -0.5);
  neg.add_transition(1, 1, 1.0);
  CHECK(has_kind(validate_chain(neg.build()), DiagnosticKind::negative_probability));
}

TEST_CASE("rows are merged and sorted") {
  ChainBuilder<Rational> b;
  b.add_state("x", 0);
  b.add_state("y", 1);
  b.add_transition(0, 1, Rational(1, 4));
  b.add_transition(0, 0, Rational(1, 2));
  b.add_transition(0, 1, Rational(1, 4));
  b.add_transition(1, 1, Rational(1));
  b.add_transition(1, 0, Rational(0));
  const auto c = b.build();
  REQUIRE(c.row(0).size() == 2);
  CHECK(c.row(0)[0].to == 0);
  CHECK(c.probability(0, 1) == Rational(1, 2));
  CHECK(c.row(1).size() == 1);
  CHECK(c.probability(1, 0) == 0);
  CHECK(c.state(1).optimal);
  CHECK_FALSE(c.state(0).optimal);
}

TEST_CASE("partition") {
  const auto c = toy_chain();
  const auto p = build_level_partition(c);
  REQUIRE(p.level_count() == 3);
  CHECK(p.top() == 2);
  CHECK(c.state(p.level(0)[0]).id == "s0");
  CHECK(c.state(p.level(1)[0]).id == "s1");
  CHECK(c.state(p.level(2)[0]).id == "s2");
  CHECK(p.fitness(0) == 2);

  ChainBuilder<Rational> flat;
  flat.add_state("a", 5);
  flat.add_state("b", 5);
  flat.add_transition(0, 1, Rational(1));
  flat.add_transition(1, 1, Rational(1));
  CHECK(build_level_partition(flat.build()).top() == 0);

  CHECK_THROWS_AS(build_level_partition(toy_with({}, true)), AnalysisError);
}

TEST_CASE("equal fitness shares a level on KP1") {
  const auto inst = make_instance("KP1", 8);
  const auto chain = build_full_chain(inst, Variant::feasibility_rules);
  const auto p = build_level_partition(chain);
  std::vector<std::string> top;
  for (auto s : p.level(0)) top.push_back(chain.state(s).id);
  CHECK(std::find(top.begin(), top.end(), "10000000") != top.end());
  CHECK(std::find(top.begin(), top.end(), "00111111") != top.end());
  for (auto s : p.level(0)) {
    const auto cls = classify(inst, parse_solution(inst, chain.state(s).id));
    CHECK(((cls == LevelClass{true, false, 0}) || (cls == LevelClass{false, false, 6})));
  }
}

TEST_CASE("conditional transition") {
  const auto c = toy_chain();
  const auto p = build_level_partition(c);
  const auto s2 = *c.find("s2");
  CHECK(conditional_transition(c, p, s2, 1) == Rational(3, 4));
  CHECK(conditional_transition(c, p, s2, 0) == Rational(1, 4));
  CHECK(conditional_transition(c, p, s2, 2) == 0);
  CHECK(conditional_transition(c, p, *c.find("s1"), 2) == 0);
}

TEST_CASE("level stats on T1") {
  const auto c = toy_chain();
  const auto st = level_stats(c, build_level_partition(c));
  CHECK(st.r_min(2, 1) == Rational(3, 4));
  CHECK(st.r_max(2, 1) == Rational(3, 4));
  CHECK(st.p_min(2, 1) == st.p_max(2, 1));
  CHECK(st.climb_min(2) == Rational(2, 5));
  CHECK(st.climb_max(1) == Rational(1, 2));
  CHECK(st.p_max_prefix(2, 1) == Rational(2, 5));
  const LevelIndex both[] = {0, 1};
  CHECK(st.r_min_union(2, both) == 1);
}

TEST_CASE("level stats on the KP1 lumped chain") {
  const std::size_t n = 8;
  const auto inst = make_instance("KP1", n);
  const auto chain = build_lumped_chain(inst, Variant::feasibility_rules);
  const auto p = build_level_partition(chain);
  const auto st = level_stats(chain, p);
  const auto empty = *chain.find("(0,0;0)");
  const LevelIndex k = p.level_of(empty);
  REQUIRE(p.level(k).size() == 1);
  // From the empty knapsack only one-item offspring among items 3..n climb
  // directly, plus items 1 and 2.
  Rational q = Rational(n - 1, n);
  Rational stay(1);
  for (std::size_t i = 0; i < n - 1; ++i) stay *= q;
  CHECK(st.climb_min(k) >= Rational(n - 2) / n * stay);
}

TEST_CASE("level graph and paths") {
  const auto c = toy_chain();
  const auto g = build_level_graph(level_stats(c, build_level_partition(c)));
  using Arc = std::pair<LevelIndex, LevelIndex>;
  CHECK(g.arcs() == std::vector<Arc>{{1, 0}, {2, 0}, {2, 1}});
  CHECK(select_path(g, 2, 0, PathStrategy::consecutive).vertices().size() == 3);
  CHECK(select_path(g, 2, 0, PathStrategy::shortest).vertices().size() == 2);
  CHECK(select_path(g, 1, 1, PathStrategy::shortest).vertices().size() == 1);
  const LevelIndex bad[] = {2, 2, 0};
  CHECK_THROWS_AS(select_path(g, 2, 0, PathStrategy::explicit_list, bad), AnalysisError);
  CHECK(enumerate_paths(g, 2, 0).size() == 2);

  // S_2 -> S_0 only.
  ChainBuilder<Rational> b;
  b.add_state("a", 0);
  b.add_state("b", 1);
  b.add_state("c", 2);
  b.add_transition(0, 2, Rational(1));
  b.add_transition(1, 2, Rational(1));
  b.add_transition(2, 2, Rational(1));
  const auto g2 = build_level_graph(level_stats(b.build(), build_level_partition(b.build())));
  CHECK_FALSE(g2.has_arc(2, 1));
  CHECK_THROWS_AS(select_path(g2, 2, 0, PathStrategy::consecutive), AnalysisError);
  CHECK_THROWS_AS(select_path(g2, 2, 1, PathStrategy::shortest), AnalysisError);
}

TEST_CASE("path views") {
  const auto c = toy_chain();
  const auto g = build_level_graph(level_stats(c, build_level_partition(c)));
  const Path path(g, {2, 1, 0});
  CHECK(path.below(2) == std::vector<LevelIndex>{1, 0});
  CHECK(path.between(2) == std::vector<LevelIndex>{1});
  CHECK(path.without_target() == std::vector<LevelIndex>{2, 1});
  CHECK(path.contains(1));
  CHECK_THROWS_AS(path.below(5), AnalysisError);
}

TEST_CASE("absorbing non-optimal state is rejected by level_stats") {
  ChainBuilder<Rational> b;
  b.add_state("a", 0);
  b.add_state("b", 1);
  b.add_state("c", 1);
  b.add_transition(0, 0, Rational(1));
  b.add_transition(1, 1, Rational(1));
  b.add_transition(2, 2, Rational(1));
  const auto chain = b.build();
  CHECK_FALSE(validate_chain(chain).empty());
}

TEST_CASE("float conversion keeps structure") {
  const auto f = to_float_chain(toy_chain());
  CHECK(f.probability(0, 1) == doctest::Approx(0.3));
  CHECK(validate_chain(f).empty());
}

}
