#include "driftlab/time_bounds.hpp"

#include <limits>

namespace driftlab {

namespace {

template <typename T>
bool is_zero(const T& x) {
  return ScalarTraits<T>::is_zero(x);
}

template <typename T>
std::vector<T> climb_vector(const LevelStats<T>& stats, Direction direction) {
  std::vector<T> climb(stats.top() + 1, T(0));
  for (LevelIndex l = 1; l <= stats.top(); ++l) {
    climb[l] = direction == Direction::lower ? stats.climb_max(l) : stats.climb_min(l);
  }
  return climb;
}

template <typename T>
std::vector<Extended<T>> level_function(const CoefficientTable<T>& table, std::span<const T> climb) {
  std::vector<Extended<T>> d(table.top() + 1, Extended<T>(T(0)));
  for (LevelIndex j = 1; j <= table.top(); ++j) {
    std::vector<T> row(j + 1, T(0));
    for (LevelIndex l = 1; l <= j; ++l) row[l] = table(j, l);
    d[j] = linear_time_bound<T>(row, climb, table.direction());
  }
  return d;
}

template <typename T>
BoundReport<T> row_bound(const LevelStats<T>& stats, const CoefficientTable<T>& table, LevelIndex k,
                         Direction expected) {
  if (table.direction() != expected) {
    throw AnalysisError(std::string("time bound: expected a ") + std::string(to_string(expected)) + " table");
  }
  if (table.top() != stats.top()) throw AnalysisError("time bound: table and chain disagree on K");
  if (k == 0 || k > stats.top()) throw AnalysisError("time bound: start level must be in 1..K");
  const auto climb = climb_vector(stats, expected);
  BoundReport<T> r;
  r.direction = expected;
  r.method = std::string(to_string(table.method()));
  r.start_level = k;
  std::vector<T> row(k + 1, T(0));
  for (LevelIndex l = 1; l <= k; ++l) row[l] = table(k, l);
  r.value = linear_time_bound<T>(row, climb, expected, &r.terms);
  r.level_values = level_function(table, std::span<const T>(climb));
  return r;
}

template <typename T>
Extended<T> divide(const Extended<T>& a, const Extended<T>& b) {
  if (!b.finite()) return a.finite() ? Extended<T>(T(0)) : Extended<T>::unbounded();
  if (!a.finite() || is_zero(b.value())) return Extended<T>::unbounded();
  return Extended<T>(T(a.value() / b.value()));
}

}  // namespace

template <typename T>
Extended<T> linear_time_bound(std::span<const T> coefficients, std::span<const T> climb, Direction direction,
                              std::vector<BoundTerm<T>>* terms) {
  if (climb.size() < coefficients.size()) throw AnalysisError("time bound: missing climb probabilities");
  T sum(0);
  bool unbounded = false;
  for (LevelIndex l = 1; l < coefficients.size(); ++l) {
    const T& c = coefficients[l];
    Extended<T> contribution(T(0));
    if (is_zero(climb[l])) {
      if (direction == Direction::lower) {
        throw AnalysisError("level " + std::to_string(l) + " unreachable upward, violates default assumption");
      }
      if (!is_zero(c)) {
        unbounded = true;
        contribution = Extended<T>::unbounded();
      }
    } else {
      T q = c / climb[l];
      sum += q;
      contribution = Extended<T>(std::move(q));
    }
    if (terms) terms->push_back({l, c, climb[l], contribution});
  }
  return unbounded ? Extended<T>::unbounded() : Extended<T>(std::move(sum));
}

template <typename T>
BoundReport<T> lower_time_bound(const LevelStats<T>& stats, const CoefficientTable<T>& table, LevelIndex k) {
  return row_bound(stats, table, k, Direction::lower);
}

template <typename T>
BoundReport<T> upper_time_bound(const LevelStats<T>& stats, const CoefficientTable<T>& table, LevelIndex k) {
  return row_bound(stats, table, k, Direction::upper);
}

template <typename T>
std::vector<T> point_distribution(LevelIndex top, LevelIndex k) {
  if (k > top) throw InputError("start level out of range");
  std::vector<T> out(top + 1, T(0));
  out[k] = T(1);
  return out;
}

template <typename T>
BoundReport<T> expected_time_bound(const LevelStats<T>& stats, const CoefficientTable<T>& table,
                                   std::span<const T> start_distribution) {
  const LevelIndex top = stats.top();
  if (table.top() != top) throw AnalysisError("time bound: table and chain disagree on K");
  if (start_distribution.size() != top + 1) throw InputError("start distribution: expected K+1 entries");
  const auto climb = climb_vector(stats, table.direction());

  BoundReport<T> r;
  r.direction = table.direction();
  r.method = std::string(to_string(table.method()));
  r.start_distribution.assign(start_distribution.begin(), start_distribution.end());
  for (LevelIndex k = 0; k <= top; ++k) {
    if (ScalarTraits<T>::is_one(start_distribution[k])) r.start_level = k;
  }

  std::vector<T> weighted(top + 1, T(0));
  for (LevelIndex l = 1; l <= top; ++l) {
    for (LevelIndex k = l; k <= top; ++k) weighted[l] += start_distribution[k] * table(k, l);
  }
  r.value = linear_time_bound<T>(weighted, climb, r.direction, &r.terms);
  r.level_values = level_function(table, std::span<const T>(climb));
  return r;
}

template <typename T>
BoundReport<T> doerr_kotzing_bound(const LevelStats<T>& stats, std::span<const T> per_target) {
  if (per_target.size() != stats.top() + 1) throw InputError("per-target coefficients: expected K+1 entries");
  const auto climb = climb_vector(stats, Direction::lower);
  BoundReport<T> r;
  r.direction = Direction::lower;
  r.method = "random_init";
  r.value = linear_time_bound<T>(per_target, climb, Direction::lower, &r.terms);
  return r;
}

template <typename T>
DriftReport verify_drift_inequality(const Chain<T>& chain, const LevelPartition& partition,
                                    const BoundReport<T>& report) {
  if (report.level_values.size() != partition.level_count()) {
    throw AnalysisError("drift check: report carries no level function for this partition");
  }
  DriftReport out;
  out.direction = report.direction;
  const auto& d = report.level_values;
  for (LevelIndex k = 1; k < partition.level_count(); ++k) {
    for (StateIndex s : partition.level(k)) {
      DriftCheck check{s, k, 0.0, true};
      if (!d[k].finite()) {
        check.drift = std::numeric_limits<double>::infinity();
        check.ok = report.direction == Direction::upper;
      } else {
        T drift(0);
        bool minus_infinity = false;
        for (const auto& t : chain.row(s)) {
          const LevelIndex i = partition.level_of(t.to);
          if (i == k) continue;
          if (!d[i].finite()) {
            minus_infinity = true;
            continue;
          }
          drift += t.probability * (d[k].value() - d[i].value());
        }
        if (minus_infinity) {
          check.drift = -std::numeric_limits<double>::infinity();
          check.ok = report.direction == Direction::lower;
        } else {
          check.drift = ScalarTraits<T>::to_double(drift);
          if constexpr (std::is_same_v<T, double>) {
            const double slack = 1e-9 * std::max(1.0, d[k].value());
            check.ok = report.direction == Direction::lower ? drift <= 1.0 + slack : drift >= 1.0 - slack;
          } else {
            check.ok = report.direction == Direction::lower ? drift <= 1 : drift >= 1;
          }
        }
      }
      if (!check.ok) ++out.violations;
      out.checks.push_back(check);
    }
  }
  return out;
}

template <typename T>
RatioInterval<T> compare_algorithms(const BoundReport<T>& a_lower, const BoundReport<T>& a_upper,
                                    const BoundReport<T>& b_lower, const BoundReport<T>& b_upper,
                                    std::optional<T> exact_a, std::optional<T> exact_b) {
  RatioInterval<T> out;
  out.lower = divide(a_lower.value, b_upper.value);
  out.upper = divide(a_upper.value, b_lower.value);
  if (exact_a && exact_b && !is_zero(*exact_b)) out.exact = T(*exact_a / *exact_b);
  return out;
}

#define DRIFTLAB_INSTANTIATE(T)                                                                               \
  template Extended<T> linear_time_bound(std::span<const T>, std::span<const T>, Direction,                   \
                                         std::vector<BoundTerm<T>>*);                                         \
  template BoundReport<T> lower_time_bound(const LevelStats<T>&, const CoefficientTable<T>&, LevelIndex);     \
  template BoundReport<T> upper_time_bound(const LevelStats<T>&, const CoefficientTable<T>&, LevelIndex);     \
  template std::vector<T> point_distribution(LevelIndex, LevelIndex);                                         \
  template BoundReport<T> expected_time_bound(const LevelStats<T>&, const CoefficientTable<T>&,               \
                                              std::span<const T>);                                            \
  template BoundReport<T> doerr_kotzing_bound(const LevelStats<T>&, std::span<const T>);                      \
  template DriftReport verify_drift_inequality(const Chain<T>&, const LevelPartition&, const BoundReport<T>&); \
  template RatioInterval<T> compare_algorithms(const BoundReport<T>&, const BoundReport<T>&,                  \
                                               const BoundReport<T>&, const BoundReport<T>&, std::optional<T>, \
                                               std::optional<T>);

DRIFTLAB_INSTANTIATE(Rational)
DRIFTLAB_INSTANTIATE(double)

#undef DRIFTLAB_INSTANTIATE

}  // namespace driftlab
