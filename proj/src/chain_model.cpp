#include "driftlab/chain_model.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace driftlab {

// ---------------------------------------------------------------- Chain

template <typename T>
Chain<T>::Chain(std::vector<StateInfo> states, std::vector<std::vector<Transition<T>>> rows)
    : states_(std::move(states)) {
  if (rows.size() != states_.size()) throw InputError("chain: one row per state required");
  rows_.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::map<StateIndex, T> merged;
    for (auto& t : rows[i]) {
      if (t.to >= states_.size()) throw InputError("chain: transition target out of range");
      auto [it, inserted] = merged.try_emplace(t.to, t.probability);
      if (!inserted) it->second += t.probability;
    }
    rows_[i].reserve(merged.size());
    for (auto& [to, p] : merged) {
      if (!ScalarTraits<T>::is_zero(p)) rows_[i].push_back({to, p});
    }
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!by_id_.emplace(states_[i].id, i).second) throw InputError("chain: duplicate state id '" + states_[i].id + "'");
  }
}

template <typename T>
std::optional<StateIndex> Chain<T>::find(std::string_view id) const {
  if (auto it = by_id_.find(std::string(id)); it != by_id_.end()) return it->second;
  return std::nullopt;
}

template <typename T>
T Chain<T>::probability(StateIndex from, StateIndex to) const {
  const auto& r = rows_[from];
  auto it = std::lower_bound(r.begin(), r.end(), to, [](const Transition<T>& t, StateIndex v) { return t.to < v; });
  if (it != r.end() && it->to == to) return it->probability;
  return T(0);
}

template <typename T>
StateIndex ChainBuilder<T>::add_state(std::string id, Rational fitness) {
  states_.push_back({std::move(id), std::move(fitness), false});
  rows_.emplace_back();
  return states_.size() - 1;
}

template <typename T>
void ChainBuilder<T>::add_transition(StateIndex from, StateIndex to, T probability) {
  rows_.at(from).push_back({to, std::move(probability)});
}

template <typename T>
Chain<T> ChainBuilder<T>::build() const {
  std::vector<StateInfo> states = states_;
  if (!states.empty()) {
    Rational best = states.front().fitness;
    for (const auto& s : states) best = std::max(best, s.fitness);
    for (auto& s : states) s.optimal = s.fitness == best;
  }
  return Chain<T>(std::move(states), rows_);
}

FloatChain to_float_chain(const RationalChain& chain) {
  std::vector<StateInfo> states(chain.states().begin(), chain.states().end());
  std::vector<std::vector<Transition<double>>> rows(chain.size());
  for (StateIndex i = 0; i < chain.size(); ++i) {
    for (const auto& t : chain.row(i)) rows[i].push_back({t.to, t.probability.get_d()});
  }
  return FloatChain(std::move(states), std::move(rows));
}

// ---------------------------------------------------------------- validation

template <typename T>
std::vector<Diagnostic> validate_chain(const Chain<T>& chain) {
  std::vector<Diagnostic> out;
  const std::size_t n = chain.size();
  if (n == 0) {
    out.push_back({DiagnosticKind::empty_chain, "chain has no states"});
    return out;
  }

  for (StateIndex i = 0; i < n; ++i) {
    const auto& from = chain.state(i);
    T sum(0);
    for (const auto& t : chain.row(i)) {
      if (t.probability < 0) {
        out.push_back({DiagnosticKind::negative_probability,
                       "negative probability on " + from.id + " -> " + chain.state(t.to).id});
      }
      sum += t.probability;
      if (chain.state(t.to).fitness < from.fitness && t.probability > 0) {
        out.push_back({DiagnosticKind::elitism_violated,
                       "elitism violated: " + from.id + " -> " + chain.state(t.to).id + " decreases fitness"});
      }
    }
    if (!ScalarTraits<T>::near(sum, T(1))) {
      out.push_back({DiagnosticKind::row_not_stochastic,
                     "row not stochastic: " + from.id + " sums to " + format_scalar(sum)});
    }
  }

  Rational best = chain.state(0).fitness;
  for (const auto& s : chain.states()) best = std::max(best, s.fitness);
  for (const auto& s : chain.states()) {
    if (s.optimal != (s.fitness == best)) {
      out.push_back({DiagnosticKind::optimal_set_mismatch,
                     "optimal set mismatch at " + s.id + ": flagged " + (s.optimal ? "optimal" : "non-optimal") +
                         " but fitness " + (s.fitness == best ? "is" : "is not") + " maximal"});
    }
  }

  // Convergence: X reaches the optimal set w.p. 1 iff nothing reachable from X
  // is unable to reach it.
  std::vector<std::vector<StateIndex>> reverse(n);
  for (StateIndex i = 0; i < n; ++i)
    for (const auto& t : chain.row(i))
      if (t.probability > 0) reverse[t.to].push_back(i);

  auto reverse_closure = [&](std::vector<char> seed) {
    std::deque<StateIndex> queue;
    for (StateIndex i = 0; i < n; ++i)
      if (seed[i]) queue.push_back(i);
    while (!queue.empty()) {
      const StateIndex v = queue.front();
      queue.pop_front();
      for (StateIndex u : reverse[v]) {
        if (!seed[u]) {
          seed[u] = 1;
          queue.push_back(u);
        }
      }
    }
    return seed;
  };

  std::vector<char> optimal(n, 0);
  for (StateIndex i = 0; i < n; ++i) optimal[i] = chain.state(i).fitness == best ? 1 : 0;
  const std::vector<char> can_reach = reverse_closure(optimal);
  std::vector<char> stuck(n, 0);
  for (StateIndex i = 0; i < n; ++i) stuck[i] = can_reach[i] ? 0 : 1;
  const std::vector<char> doomed = reverse_closure(stuck);
  for (StateIndex i = 0; i < n; ++i) {
    if (doomed[i]) {
      out.push_back({DiagnosticKind::not_convergent,
                     "not convergent: " + chain.state(i).id + " does not reach the optimal set with probability 1"});
    }
  }
  return out;
}

// ---------------------------------------------------------------- partition

LevelPartition::LevelPartition(std::vector<std::vector<StateIndex>> levels, std::vector<Rational> level_fitness,
                               std::size_t state_count)
    : levels_(std::move(levels)), level_fitness_(std::move(level_fitness)), level_of_(state_count, 0) {
  for (LevelIndex k = 0; k < levels_.size(); ++k)
    for (StateIndex s : levels_[k]) level_of_[s] = k;
}

template <typename T>
LevelPartition build_level_partition(const Chain<T>& chain) {
  if (auto diags = validate_chain(chain); !diags.empty()) {
    std::ostringstream msg;
    msg << "invalid chain:";
    for (const auto& d : diags) msg << "\n  " << d.message;
    throw AnalysisError(msg.str());
  }
  std::map<Rational, std::vector<StateIndex>, std::greater<>> groups;
  for (StateIndex i = 0; i < chain.size(); ++i) groups[chain.state(i).fitness].push_back(i);
  std::vector<std::vector<StateIndex>> levels;
  std::vector<Rational> fitness;
  for (auto& [f, members] : groups) {
    levels.push_back(std::move(members));
    fitness.push_back(f);
  }
  return LevelPartition(std::move(levels), std::move(fitness), chain.size());
}

// ---------------------------------------------------------------- stats

namespace {

template <typename T>
std::vector<T> aggregate_row(const Chain<T>& chain, const LevelPartition& partition, StateIndex s) {
  std::vector<T> out(partition.level_count(), T(0));
  for (const auto& t : chain.row(s)) out[partition.level_of(t.to)] += t.probability;
  return out;
}

template <typename T>
bool cannot_leave(const T& stay) {
  return !(T(1) - stay > 0);
}

}  // namespace

template <typename T>
T conditional_transition(const Chain<T>& chain, const LevelPartition& partition, StateIndex state,
                         LevelIndex target) {
  const LevelIndex k = partition.level_of(state);
  const std::vector<T> agg = aggregate_row(chain, partition, state);
  if (k >= 1 && cannot_leave(agg[k])) {
    throw AnalysisError("state " + chain.state(state).id + " cannot leave level " + std::to_string(k) +
                        ": violates convergence assumption");
  }
  if (target == k || target > k) return T(0);
  return agg[target] / (T(1) - agg[k]);
}

template <typename T>
std::span<const T> LevelStats<T>::level_probabilities(StateIndex s) const {
  return std::span<const T>(level_prob_).subspan(s * width(), width());
}

template <typename T>
std::span<const T> LevelStats<T>::conditional(StateIndex s) const {
  return std::span<const T>(conditional_).subspan(s * width(), width());
}

template <typename T>
T LevelStats<T>::r_min_union(LevelIndex k, std::span<const LevelIndex> levels) const {
  std::optional<T> best;
  for (StateIndex s : partition_.level(k)) {
    const auto r = conditional(s);
    T sum(0);
    for (LevelIndex l : levels) sum += r[l];
    if (!best || sum < *best) best = sum;
  }
  return best.value_or(T(0));
}

template <typename T>
T LevelStats<T>::r_max_union(LevelIndex k, std::span<const LevelIndex> levels) const {
  std::optional<T> best;
  for (StateIndex s : partition_.level(k)) {
    const auto r = conditional(s);
    T sum(0);
    for (LevelIndex l : levels) sum += r[l];
    if (!best || sum > *best) best = sum;
  }
  return best.value_or(T(0));
}

template <typename U>
LevelStats<U> level_stats(const Chain<U>& chain, const LevelPartition& partition) {
  LevelStats<U> st;
  st.partition_ = partition;
  const std::size_t w = partition.level_count();
  const std::size_t n = chain.size();
  st.level_prob_.assign(n * w, U(0));
  st.conditional_.assign(n * w, U(0));

  for (StateIndex s = 0; s < n; ++s) {
    const LevelIndex k = partition.level_of(s);
    const std::vector<U> agg = aggregate_row(chain, partition, s);
    for (LevelIndex l = k + 1; l < w; ++l) {
      if (agg[l] > 0) {
        throw AnalysisError("elitism violated: state " + chain.state(s).id + " moves to lower fitness level " +
                            std::to_string(l));
      }
    }
    std::copy(agg.begin(), agg.end(), st.level_prob_.begin() + static_cast<std::ptrdiff_t>(s * w));
    if (k == 0) continue;
    if (cannot_leave(agg[k])) {
      throw AnalysisError("state " + chain.state(s).id + " cannot leave level " + std::to_string(k) +
                          ": violates convergence assumption");
    }
    const U leave = U(1) - agg[k];
    for (LevelIndex l = 0; l < k; ++l) st.conditional_[s * w + l] = agg[l] / leave;
  }

  auto init = [&](std::vector<U>& v) { v.assign(w * w, U(0)); };
  init(st.p_min_);
  init(st.p_max_);
  init(st.p_min_prefix_);
  init(st.p_max_prefix_);
  init(st.r_min_);
  init(st.r_max_);

  for (LevelIndex k = 0; k < w; ++k) {
    bool first = true;
    for (StateIndex s : partition.level(k)) {
      const auto p = st.level_probabilities(s);
      const auto r = st.conditional(s);
      U prefix(0);
      for (LevelIndex l = 0; l <= k; ++l) {
        prefix += p[l];
        const std::size_t at = k * w + l;
        if (first) {
          st.p_min_[at] = st.p_max_[at] = p[l];
          st.p_min_prefix_[at] = st.p_max_prefix_[at] = prefix;
          st.r_min_[at] = st.r_max_[at] = r[l];
        } else {
          st.p_min_[at] = std::min(st.p_min_[at], p[l]);
          st.p_max_[at] = std::max(st.p_max_[at], p[l]);
          st.p_min_prefix_[at] = std::min(st.p_min_prefix_[at], prefix);
          st.p_max_prefix_[at] = std::max(st.p_max_prefix_[at], prefix);
          st.r_min_[at] = std::min(st.r_min_[at], r[l]);
          st.r_max_[at] = std::max(st.r_max_[at], r[l]);
        }
      }
      first = false;
    }
  }
  return st;
}

// ---------------------------------------------------------------- graph

LevelGraph::LevelGraph(std::vector<std::vector<LevelIndex>> targets) : targets_(std::move(targets)) {
  for (auto& t : targets_) std::sort(t.begin(), t.end());
}

bool LevelGraph::has_arc(LevelIndex from, LevelIndex to) const {
  if (from >= targets_.size()) return false;
  return std::binary_search(targets_[from].begin(), targets_[from].end(), to);
}

std::vector<std::pair<LevelIndex, LevelIndex>> LevelGraph::arcs() const {
  std::vector<std::pair<LevelIndex, LevelIndex>> out;
  for (LevelIndex k = 0; k < targets_.size(); ++k)
    for (LevelIndex l : targets_[k]) out.emplace_back(k, l);
  return out;
}

template <typename T>
LevelGraph build_level_graph(const LevelStats<T>& stats) {
  const std::size_t w = stats.partition().level_count();
  std::vector<std::vector<LevelIndex>> targets(w);
  for (LevelIndex k = 1; k < w; ++k)
    for (LevelIndex l = 0; l < k; ++l)
      if (stats.p_min(k, l) > 0) targets[k].push_back(l);
  return LevelGraph(std::move(targets));
}

// ---------------------------------------------------------------- paths

Path::Path(const LevelGraph& graph, std::vector<LevelIndex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw AnalysisError("path: empty vertex list");
  for (LevelIndex v : vertices_) {
    if (v >= graph.vertex_count()) throw AnalysisError("path: vertex " + std::to_string(v) + " out of range");
  }
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    if (vertices_[i] <= vertices_[i + 1]) throw AnalysisError("path: vertices must strictly descend");
    if (!graph.has_arc(vertices_[i], vertices_[i + 1])) {
      throw AnalysisError("path: no arc " + std::to_string(vertices_[i]) + " -> " + std::to_string(vertices_[i + 1]));
    }
  }
}

bool Path::contains(LevelIndex v) const {
  return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
}

std::vector<LevelIndex> Path::below(LevelIndex v) const {
  auto it = std::find(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end()) throw AnalysisError("path: vertex not on path");
  return {it + 1, vertices_.end()};
}

std::vector<LevelIndex> Path::between(LevelIndex v) const {
  auto out = below(v);
  if (!out.empty()) out.pop_back();
  return out;
}

std::vector<LevelIndex> Path::without_target() const { return {vertices_.begin(), vertices_.end() - 1}; }

Path select_path(const LevelGraph& graph, LevelIndex from, LevelIndex to, PathStrategy strategy,
                 std::span<const LevelIndex> vertices) {
  const std::size_t w = graph.vertex_count();
  if (from >= w || to >= w) throw AnalysisError("select_path: level out of range");
  if (to > from) throw AnalysisError("select_path: paths descend; target above source");

  switch (strategy) {
    case PathStrategy::explicit_list: {
      std::vector<LevelIndex> v(vertices.begin(), vertices.end());
      if (v.empty() || v.front() != from || v.back() != to) {
        throw AnalysisError("select_path: explicit list must run from " + std::to_string(from) + " to " +
                            std::to_string(to));
      }
      return Path(graph, std::move(v));
    }
    case PathStrategy::consecutive: {
      std::vector<LevelIndex> v;
      for (LevelIndex x = from + 1; x-- > to;) v.push_back(x);
      for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (!graph.has_arc(v[i], v[i + 1])) {
          throw AnalysisError("select_path: consecutive path broken, missing arc " + std::to_string(v[i]) + " -> " +
                              std::to_string(v[i + 1]));
        }
      }
      return Path(graph, std::move(v));
    }
    case PathStrategy::shortest: {
      // Distance (in arcs) from each vertex to `to`, over descending arcs.
      constexpr std::size_t unreachable = static_cast<std::size_t>(-1);
      std::vector<std::size_t> dist(w, unreachable);
      dist[to] = 0;
      for (LevelIndex v = to + 1; v <= from; ++v) {
        for (LevelIndex u : graph.targets(v)) {
          if (u >= to && dist[u] != unreachable) dist[v] = std::min(dist[v], dist[u] + 1);
        }
      }
      if (dist[from] == unreachable) {
        throw AnalysisError("select_path: no path from " + std::to_string(from) + " to " + std::to_string(to));
      }
      std::vector<LevelIndex> v{from};
      while (v.back() != to) {
        const LevelIndex cur = v.back();
        for (LevelIndex u : graph.targets(cur)) {  // ascending: first hit is lexicographically smallest
          if (u >= to && dist[u] != unreachable && dist[u] + 1 == dist[cur]) {
            v.push_back(u);
            break;
          }
        }
      }
      return Path(graph, std::move(v));
    }
  }
  throw AnalysisError("select_path: unknown strategy");
}

std::vector<Path> enumerate_paths(const LevelGraph& graph, LevelIndex from, LevelIndex to, std::size_t limit) {
  std::vector<Path> out;
  if (from >= graph.vertex_count() || to > from) return out;
  std::vector<LevelIndex> stack{from};
  auto dfs = [&](auto&& self) -> void {
    const LevelIndex cur = stack.back();
    if (cur == to) {
      if (out.size() >= limit) throw AnalysisError("enumerate_paths: more than limit paths");
      out.emplace_back(graph, stack);
      return;
    }
    // Larger heads first keeps the sequences in lexicographic order.
    const auto heads = graph.targets(cur);
    for (auto it = heads.rbegin(); it != heads.rend(); ++it) {
      if (*it < to) continue;
      stack.push_back(*it);
      self(self);
      stack.pop_back();
    }
  };
  dfs(dfs);
  std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) {
    return std::lexicographical_compare(a.vertices().begin(), a.vertices().end(), b.vertices().begin(),
                                        b.vertices().end());
  });
  return out;
}

// ---------------------------------------------------------------- instantiations

#define DRIFTLAB_INSTANTIATE(T)                                                                         \
  template class Chain<T>;                                                                              \
  template class ChainBuilder<T>;                                                                       \
  template class LevelStats<T>;                                                                         \
  template std::vector<Diagnostic> validate_chain(const Chain<T>&);                                     \
  template LevelPartition build_level_partition(const Chain<T>&);                                       \
  template T conditional_transition(const Chain<T>&, const LevelPartition&, StateIndex, LevelIndex);    \
  template LevelStats<T> level_stats(const Chain<T>&, const LevelPartition&);                           \
  template LevelGraph build_level_graph(const LevelStats<T>&);

DRIFTLAB_INSTANTIATE(Rational)
DRIFTLAB_INSTANTIATE(double)

#undef DRIFTLAB_INSTANTIATE

}  // namespace driftlab
