#include "driftlab/drift_coeffs.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace driftlab {

namespace {

template <typename T>
bool better(Direction d, const T& candidate, const T& current) {
  return d == Direction::lower ? candidate < current : candidate > current;
}

template <typename T>
const T& r_ext(const LevelStats<T>& stats, Direction d, LevelIndex k, LevelIndex l) {
  return d == Direction::lower ? stats.r_min(k, l) : stats.r_max(k, l);
}

template <typename T>
T clamp_unit(T value) {
  if (value > T(1)) return T(1);
  if (value < T(0)) return T(0);
  return value;
}

// Strictly positive beyond rounding noise.
template <typename T>
bool positive(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x > 1e-12;
  } else {
    return sgn(x) > 0;
  }
}

template <typename T>
bool negative(const T& x) {
  return positive(T(-x));
}

void check_pair(const LevelPartition& partition, LevelIndex l, LevelIndex k) {
  if (l == 0 || l > k || k > partition.top()) throw AnalysisError("coefficients: need 1 <= l <= k <= K");
}

template <typename T>
std::vector<T> forward_column(const LevelStats<T>& stats, LevelIndex l, LevelIndex k, Direction d) {
  check_pair(stats.partition(), l, k);
  std::vector<T> c(k + 1, T(0));
  c[l] = T(1);
  for (LevelIndex j = l + 1; j <= k; ++j) {
    std::optional<T> best;
    for (StateIndex s : stats.partition().level(j)) {
      const auto r = stats.conditional(s);
      T v = r[l];
      for (LevelIndex i = l + 1; i < j; ++i) v += r[i] * c[i];
      if (!best || better(d, v, *best)) best = v;
    }
    c[j] = d == Direction::upper ? clamp_unit(*best) : *best;
  }
  return c;
}

// Levels in [l, v) that the path skips, i.e. [l, v) minus P(l, v).
std::vector<LevelIndex> skipped_levels(const Path& path, LevelIndex v) {
  const LevelIndex l = path.target();
  const auto mid = path.between(v);
  std::vector<LevelIndex> out;
  for (LevelIndex i = l; i < v; ++i) {
    if (std::find(mid.begin(), mid.end(), i) == mid.end()) out.push_back(i);
  }
  return out;
}

std::string describe(const Path& path) {
  std::ostringstream os;
  bool first = true;
  for (LevelIndex v : path.vertices()) {
    os << (first ? "" : ">") << v;
    first = false;
  }
  return os.str();
}

// Per-target extrema of p(X_k, S_l) / p(X_k, S_[0,l]) over qualifying X_k, k > l.
template <typename T>
std::vector<std::optional<T>> ratio_extrema(const LevelStats<T>& stats, Direction d) {
  const LevelIndex top = stats.top();
  std::vector<std::optional<T>> best(top + 1);
  for (LevelIndex k = 2; k <= top; ++k) {
    for (StateIndex s : stats.partition().level(k)) {
      const auto p = stats.level_probabilities(s);
      T prefix(0);
      for (LevelIndex l = 0; l < k; ++l) {
        prefix += p[l];
        if (l == 0 || !positive(prefix)) continue;
        T ratio = p[l] / prefix;
        if (!best[l] || better(d, ratio, *best[l])) best[l] = ratio;
      }
    }
  }
  return best;
}

template <typename T>
CoefficientTable<T> from_columns(const LevelStats<T>& stats, Direction d, CoeffMethod method,
                                 std::vector<T> (*column)(const LevelStats<T>&, LevelIndex, LevelIndex, Direction)) {
  const LevelIndex top = stats.top();
  CoefficientTable<T> table(top, d, method);
  for (LevelIndex l = 1; l < top; ++l) {
    const auto c = column(stats, l, top, d);
    for (LevelIndex j = l + 1; j <= top; ++j) table.set(j, l, clamp_unit(c[j]));
  }
  return table;
}

template <typename T>
std::vector<T> forward_any(const LevelStats<T>& stats, LevelIndex l, LevelIndex k, Direction d) {
  return forward_column(stats, l, k, d);
}

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::lower ? "lower" : "upper"; }

std::string_view to_string(CoeffMethod m) {
  switch (m) {
    case CoeffMethod::forward: return "forward";
    case CoeffMethod::level_recursion: return "level_recursion";
    case CoeffMethod::reverse: return "reverse";
    case CoeffMethod::allpath: return "allpath";
    case CoeffMethod::path: return "path";
    case CoeffMethod::type_c: return "type_c";
    case CoeffMethod::type_cl: return "type_cl";
    case CoeffMethod::random_init: return "random_init";
  }
  return "?";
}

Direction parse_direction(std::string_view text) {
  if (text == "lower") return Direction::lower;
  if (text == "upper") return Direction::upper;
  throw InputError("unknown direction: " + std::string(text));
}

CoeffMethod parse_method(std::string_view text) {
  for (CoeffMethod m : {CoeffMethod::forward, CoeffMethod::level_recursion, CoeffMethod::reverse,
                        CoeffMethod::allpath, CoeffMethod::path, CoeffMethod::type_c, CoeffMethod::type_cl,
                        CoeffMethod::random_init}) {
    if (to_string(m) == text) return m;
  }
  throw InputError("unknown coefficient method: " + std::string(text));
}

template <typename T>
CoefficientTable<T>::CoefficientTable(LevelIndex top, Direction direction, CoeffMethod method)
    : top_(top), direction_(direction), method_(method), values_((top + 1) * (top + 1), T(0)) {
  const T neutral = direction == Direction::lower ? T(0) : T(1);
  for (LevelIndex k = 0; k <= top; ++k) {
    values_[k * (top + 1)] = T(1);
    values_[k * (top + 1) + k] = T(1);
    for (LevelIndex l = 1; l < k; ++l) values_[k * (top + 1) + l] = neutral;
  }
}

template <typename T>
void CoefficientTable<T>::set(LevelIndex k, LevelIndex l, T value) {
  if (k > top_ || l == 0 || l >= k) throw AnalysisError("coefficient table: entry is fixed or out of range");
  if (negative(value) || positive(T(value - T(1)))) throw AnalysisError("coefficient table: value outside [0, 1]");
  values_[k * (top_ + 1) + l] = clamp_unit(std::move(value));
}

template <typename T>
std::vector<T> lower_coeffs_forward(const LevelStats<T>& stats, LevelIndex l, LevelIndex k) {
  return forward_column(stats, l, k, Direction::lower);
}

template <typename T>
std::vector<T> upper_coeffs_forward(const LevelStats<T>& stats, LevelIndex l, LevelIndex k) {
  return forward_column(stats, l, k, Direction::upper);
}

template <typename T>
std::vector<T> level_recursion_coeffs(const LevelStats<T>& stats, LevelIndex l, LevelIndex k, Direction direction) {
  check_pair(stats.partition(), l, k);
  std::vector<T> c(k + 1, T(0));
  c[l] = T(1);
  for (LevelIndex j = l + 1; j <= k; ++j) {
    T v(0);
    for (LevelIndex i = l; i < j; ++i) v += r_ext(stats, direction, j, i) * c[i];
    c[j] = v;
  }
  return c;
}

template <typename T>
std::vector<T> coeffs_reverse(const LevelStats<T>& stats, LevelIndex k, LevelIndex l, Direction direction) {
  check_pair(stats.partition(), l, k);
  std::vector<T> c(k + 1, T(0));
  c[k] = T(1);
  for (LevelIndex i = k; i-- > l;) {
    T v(0);
    for (LevelIndex t = i + 1; t <= k; ++t) v += c[t] * r_ext(stats, direction, t, i);
    c[i] = v;
  }
  return c;
}

template <typename T>
std::vector<T> allpath_coeffs(const LevelStats<T>& stats, LevelIndex l, LevelIndex k, Direction direction) {
  if (stats.top() > kAllPathMaxLevels) {
    throw AnalysisError("allpath coefficients: K = " + std::to_string(stats.top()) + " exceeds " +
                        std::to_string(kAllPathMaxLevels) + "; use recursive form");
  }
  check_pair(stats.partition(), l, k);
  std::vector<T> c(k + 1, T(0));
  c[l] = T(1);
  for (LevelIndex j = l + 1; j <= k; ++j) {
    const LevelIndex inner = j - l - 1;
    T total(0);
    for (std::size_t mask = 0; mask < (std::size_t{1} << inner); ++mask) {
      // Walk j -> selected intermediate levels (descending) -> l.
      T product(1);
      LevelIndex at = j;
      for (LevelIndex b = inner; b-- > 0;) {
        if (!(mask >> b & 1)) continue;
        const LevelIndex next = l + 1 + b;
        product *= r_ext(stats, direction, at, next);
        at = next;
      }
      product *= r_ext(stats, direction, at, l);
      total += product;
    }
    c[j] = total;
  }
  return c;
}

template <typename T>
std::vector<T> path_lower_coeffs(const LevelStats<T>& stats, const Path& path, PathFormula formula) {
  const LevelIndex l = path.target();
  check_pair(stats.partition(), l, path.source());
  std::vector<T> c(stats.top() + 1, T(0));
  c[l] = T(1);
  const auto v = path.vertices();
  for (std::size_t idx = v.size() - 1; idx-- > 0;) {
    const LevelIndex j = v[idx];
    if (formula == PathFormula::explicit_product) {
      c[j] = stats.r_min_union(j, path.below(j)) * c[v[idx + 1]];
    } else {
      const auto mid = path.between(j);
      std::optional<T> best;
      for (StateIndex s : stats.partition().level(j)) {
        const auto r = stats.conditional(s);
        T x = r[l];
        for (LevelIndex i : mid) x += r[i] * c[i];
        if (!best || x < *best) best = x;
      }
      c[j] = *best;
    }
  }
  return c;
}

template <typename T>
std::vector<T> path_upper_coeffs(const LevelStats<T>& stats, const Path& path, PathFormula formula) {
  const LevelIndex l = path.target();
  check_pair(stats.partition(), l, path.source());
  std::vector<T> c(stats.top() + 1, T(1));
  for (LevelIndex i = 0; i < l; ++i) c[i] = T(0);
  const auto v = path.vertices();
  T running(0);
  for (std::size_t idx = v.size() - 1; idx-- > 0;) {
    const LevelIndex j = v[idx];
    const auto skipped = skipped_levels(path, j);
    if (formula == PathFormula::explicit_product) {
      running += stats.r_max_union(j, skipped);
      c[j] = clamp_unit(running);
    } else {
      const auto mid = path.between(j);
      std::optional<T> best;
      for (StateIndex s : stats.partition().level(j)) {
        const auto r = stats.conditional(s);
        T x(0);
        for (LevelIndex i : skipped) x += r[i];
        for (LevelIndex i : mid) x += r[i] * c[i];
        if (!best || x > *best) best = x;
      }
      c[j] = clamp_unit(*best);
    }
  }
  return c;
}

template <typename T>
T type_c_coeff(const LevelStats<T>& stats, Direction direction) {
  std::optional<T> best;
  for (const auto& e : ratio_extrema(stats, direction)) {
    if (e && (!best || better(direction, *e, *best))) best = e;
  }
  if (!best) throw AnalysisError("type_c: no pair 1 <= l < k with p(X_k, S_[0,l]) > 0 (need K >= 2)");
  return *best;
}

template <typename T>
std::vector<T> type_cl_coeffs(const LevelStats<T>& stats, Direction direction) {
  const auto ext = ratio_extrema(stats, direction);
  std::vector<T> out(stats.top() + 1, T(1));
  bool any = false;
  for (LevelIndex l = 1; l <= stats.top(); ++l) {
    if (ext[l]) {
      out[l] = *ext[l];
      any = true;
    }
  }
  if (!any) throw AnalysisError("type_cl: no pair 1 <= l < k with p(X_k, S_[0,l]) > 0 (need K >= 2)");
  return out;
}

template <typename T>
std::vector<T> random_init_coeffs(const LevelStats<T>& stats, std::span<const T> start_distribution) {
  const LevelIndex top = stats.top();
  if (start_distribution.size() != top + 1) {
    throw InputError("start distribution: expected " + std::to_string(top + 1) + " entries, got " +
                     std::to_string(start_distribution.size()));
  }
  T total(0);
  for (const T& q : start_distribution) {
    if (negative(q)) throw InputError("start distribution: negative entry");
    total += q;
  }
  if (!ScalarTraits<T>::near(total, T(1))) throw InputError("start distribution: entries must sum to 1");

  const auto ext = ratio_extrema(stats, Direction::lower);
  std::vector<T> out(top + 1, T(1));
  T prefix(0);
  for (LevelIndex l = 0; l <= top; ++l) {
    prefix += start_distribution[l];
    if (l == 0) continue;
    T c = ext[l] ? *ext[l] : T(1);
    if (positive(prefix)) {
      T cap = start_distribution[l] / prefix;
      if (cap < c) c = cap;
    }
    out[l] = c;
  }
  return out;
}

template <typename T>
CoefficientTable<T> forward_table(const LevelStats<T>& stats, Direction direction) {
  return from_columns<T>(stats, direction, CoeffMethod::forward, &forward_any<T>);
}

template <typename T>
CoefficientTable<T> level_recursion_table(const LevelStats<T>& stats, Direction direction) {
  return from_columns<T>(stats, direction, CoeffMethod::level_recursion, &level_recursion_coeffs<T>);
}

template <typename T>
CoefficientTable<T> reverse_table(const LevelStats<T>& stats, Direction direction) {
  const LevelIndex top = stats.top();
  CoefficientTable<T> table(top, direction, CoeffMethod::reverse);
  for (LevelIndex k = 2; k <= top; ++k) {
    const auto row = coeffs_reverse(stats, k, 1, direction);
    for (LevelIndex l = 1; l < k; ++l) table.set(k, l, clamp_unit(row[l]));
  }
  return table;
}

template <typename T>
CoefficientTable<T> allpath_table(const LevelStats<T>& stats, Direction direction) {
  if (stats.top() > kAllPathMaxLevels) {
    throw AnalysisError("allpath coefficients: K = " + std::to_string(stats.top()) + " exceeds " +
                        std::to_string(kAllPathMaxLevels) + "; use recursive form");
  }
  return from_columns<T>(stats, direction, CoeffMethod::allpath, &allpath_coeffs<T>);
}

template <typename T>
CoefficientTable<T> constant_table(LevelIndex top, Direction direction, CoeffMethod method, const T& value) {
  CoefficientTable<T> table(top, direction, method);
  for (LevelIndex k = 2; k <= top; ++k) {
    for (LevelIndex l = 1; l < k; ++l) table.set(k, l, value);
  }
  return table;
}

template <typename T>
CoefficientTable<T> per_target_table(std::span<const T> per_target, Direction direction, CoeffMethod method) {
  if (per_target.empty()) throw AnalysisError("per-target coefficients: empty vector");
  const LevelIndex top = per_target.size() - 1;
  CoefficientTable<T> table(top, direction, method);
  for (LevelIndex k = 2; k <= top; ++k) {
    for (LevelIndex l = 1; l < k; ++l) table.set(k, l, per_target[l]);
  }
  return table;
}

template <typename T>
CoefficientTable<T> type_c_table(const LevelStats<T>& stats, Direction direction) {
  return constant_table(stats.top(), direction, CoeffMethod::type_c, type_c_coeff(stats, direction));
}

template <typename T>
CoefficientTable<T> type_cl_table(const LevelStats<T>& stats, Direction direction) {
  const auto c = type_cl_coeffs(stats, direction);
  return per_target_table(std::span<const T>(c), direction, CoeffMethod::type_cl);
}

template <typename T>
CoefficientTable<T> path_table(const LevelStats<T>& stats, const LevelGraph& graph, LevelIndex source,
                               Direction direction, PathStrategy strategy, std::span<const Path> explicit_paths,
                               PathFormula formula) {
  const LevelIndex top = stats.top();
  if (source == 0 || source > top) throw AnalysisError("path coefficients: source level must be in 1..K");
  CoefficientTable<T> table(top, direction, CoeffMethod::path);
  std::ostringstream note;
  for (LevelIndex l = 1; l < source; ++l) {
    std::optional<Path> path;
    for (const Path& p : explicit_paths) {
      if (p.source() == source && p.target() == l) path = p;
    }
    if (!path && strategy != PathStrategy::explicit_list) {
      try {
        path = select_path(graph, source, l, strategy);
      } catch (const AnalysisError&) {
        // No path: the column keeps the trivially sound values.
      }
    }
    if (!path) {
      note << (note.tellp() > 0 ? " " : "") << "l=" << l << ":none";
      continue;
    }
    note << (note.tellp() > 0 ? " " : "") << "l=" << l << ":" << describe(*path);
    const auto c = direction == Direction::lower ? path_lower_coeffs(stats, *path, formula)
                                                 : path_upper_coeffs(stats, *path, formula);
    for (LevelIndex j = l + 1; j <= top; ++j) table.set(j, l, c[j]);
  }
  table.set_note(note.str());
  return table;
}

template <typename T>
T conditional_drift(const LevelStats<T>& stats, const CoefficientTable<T>& table, StateIndex state, LevelIndex l) {
  const LevelIndex j = stats.partition().level_of(state);
  const auto r = stats.conditional(state);
  T d = table(j, l);
  for (LevelIndex i = l; i < j; ++i) d -= r[i] * table(i, l);
  return d;
}

template <typename T>
T standard_drift(const LevelStats<T>& stats, const CoefficientTable<T>& table, StateIndex state, LevelIndex l) {
  const LevelIndex j = stats.partition().level_of(state);
  const auto p = stats.level_probabilities(state);
  T d = table(j, l);
  for (LevelIndex i = l; i <= j; ++i) d -= p[i] * table(i, l);
  return d;
}

template <typename T>
std::vector<DriftViolation> check_drift_conditions(const LevelStats<T>& stats, const CoefficientTable<T>& table) {
  if (table.top() != stats.top()) throw AnalysisError("drift check: table and chain disagree on K");
  std::vector<DriftViolation> out;
  for (LevelIndex l = 1; l < stats.top(); ++l) {
    for (LevelIndex j = l + 1; j <= stats.top(); ++j) {
      for (StateIndex s : stats.partition().level(j)) {
        const T d = conditional_drift(stats, table, s, l);
        const bool bad = table.direction() == Direction::lower ? positive(d) : negative(d);
        if (bad) out.push_back({s, l, ScalarTraits<T>::to_double(d)});
      }
    }
  }
  return out;
}

template <typename T>
DominanceReport dominance_check(std::span<const T> per_target, const CoefficientTable<T>& table) {
  if (per_target.size() != table.top() + 1) {
    throw AnalysisError("dominance check: per-target vector has " + std::to_string(per_target.size()) +
                        " entries, table needs " + std::to_string(table.top() + 1));
  }
  DominanceReport report;
  const bool lower = table.direction() == Direction::lower;
  for (LevelIndex k = 2; k <= table.top(); ++k) {
    for (LevelIndex l = 1; l < k; ++l) {
      const T diff = lower ? T(table(k, l) - per_target[l]) : T(per_target[l] - table(k, l));
      if (negative(diff)) {
        report.violations.emplace_back(k, l);
      } else if (positive(diff)) {
        report.strict.emplace_back(k, l);
      }
    }
  }
  return report;
}

#define DRIFTLAB_INSTANTIATE(T)                                                                                   \
  template class CoefficientTable<T>;                                                                             \
  template std::vector<T> lower_coeffs_forward(const LevelStats<T>&, LevelIndex, LevelIndex);                     \
  template std::vector<T> upper_coeffs_forward(const LevelStats<T>&, LevelIndex, LevelIndex);                     \
  template std::vector<T> level_recursion_coeffs(const LevelStats<T>&, LevelIndex, LevelIndex, Direction);        \
  template std::vector<T> coeffs_reverse(const LevelStats<T>&, LevelIndex, LevelIndex, Direction);                \
  template std::vector<T> allpath_coeffs(const LevelStats<T>&, LevelIndex, LevelIndex, Direction);                \
  template std::vector<T> path_lower_coeffs(const LevelStats<T>&, const Path&, PathFormula);                      \
  template std::vector<T> path_upper_coeffs(const LevelStats<T>&, const Path&, PathFormula);                      \
  template T type_c_coeff(const LevelStats<T>&, Direction);                                                       \
  template std::vector<T> type_cl_coeffs(const LevelStats<T>&, Direction);                                        \
  template std::vector<T> random_init_coeffs(const LevelStats<T>&, std::span<const T>);                           \
  template CoefficientTable<T> forward_table(const LevelStats<T>&, Direction);                                    \
  template CoefficientTable<T> level_recursion_table(const LevelStats<T>&, Direction);                            \
  template CoefficientTable<T> reverse_table(const LevelStats<T>&, Direction);                                    \
  template CoefficientTable<T> allpath_table(const LevelStats<T>&, Direction);                                    \
  template CoefficientTable<T> type_c_table(const LevelStats<T>&, Direction);                                     \
  template CoefficientTable<T> type_cl_table(const LevelStats<T>&, Direction);                                    \
  template CoefficientTable<T> constant_table(LevelIndex, Direction, CoeffMethod, const T&);                      \
  template CoefficientTable<T> per_target_table(std::span<const T>, Direction, CoeffMethod);                      \
  template CoefficientTable<T> path_table(const LevelStats<T>&, const LevelGraph&, LevelIndex, Direction,         \
                                          PathStrategy, std::span<const Path>, PathFormula);                      \
  template T conditional_drift(const LevelStats<T>&, const CoefficientTable<T>&, StateIndex, LevelIndex);         \
  template T standard_drift(const LevelStats<T>&, const CoefficientTable<T>&, StateIndex, LevelIndex);            \
  template std::vector<DriftViolation> check_drift_conditions(const LevelStats<T>&, const CoefficientTable<T>&); \
  template DominanceReport dominance_check(std::span<const T>, const CoefficientTable<T>&);

DRIFTLAB_INSTANTIATE(Rational)
DRIFTLAB_INSTANTIATE(double)

#undef DRIFTLAB_INSTANTIATE

}  // namespace driftlab
