#include "driftlab/exact_oracle.hpp"

#include <algorithm>

#include "driftlab/linalg.hpp"

namespace driftlab {

namespace {

std::vector<std::size_t> positions_in_levels(const LevelPartition& partition, std::size_t state_count) {
  std::vector<std::size_t> pos(state_count, 0);
  for (LevelIndex k = 0; k < partition.level_count(); ++k) {
    const auto members = partition.level(k);
    for (std::size_t i = 0; i < members.size(); ++i) pos[members[i]] = i;
  }
  return pos;
}

// Builds I - P restricted to the states of level k.
template <typename T>
DenseMatrix<T> stay_system(const Chain<T>& chain, const LevelPartition& partition, LevelIndex k,
                           const std::vector<std::size_t>& pos) {
  const auto members = partition.level(k);
  DenseMatrix<T> a(members.size(), members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    a(i, i) = T(1);
    for (const auto& t : chain.row(members[i])) {
      if (partition.level_of(t.to) == k) a(i, pos[t.to]) -= t.probability;
    }
  }
  return a;
}

}  // namespace

template <typename T>
T HittingProfile<T>::min_over(const LevelPartition& partition, LevelIndex k) const {
  const auto members = partition.level(k);
  T best = probability[members.front()];
  for (StateIndex s : members) best = std::min(best, probability[s]);
  return best;
}

template <typename T>
T HittingProfile<T>::max_over(const LevelPartition& partition, LevelIndex k) const {
  const auto members = partition.level(k);
  T best = probability[members.front()];
  for (StateIndex s : members) best = std::max(best, probability[s]);
  return best;
}

template <typename T>
HittingProfile<T> hitting_probabilities(const Chain<T>& chain, const LevelPartition& partition, LevelIndex target) {
  if (target >= partition.level_count()) throw AnalysisError("hitting_probabilities: target level out of range");
  const std::size_t n = chain.size();
  const auto pos = positions_in_levels(partition, n);
  const auto entry = partition.level(target);
  const std::size_t width = entry.size();

  HittingProfile<T> out;
  out.target = target;
  out.probability.assign(n, T(0));
  out.first_entry.assign(n, std::vector<T>(width, T(0)));
  for (std::size_t i = 0; i < width; ++i) {
    out.first_entry[entry[i]][i] = T(1);
    out.probability[entry[i]] = T(1);
  }

  for (LevelIndex j = target + 1; j < partition.level_count(); ++j) {
    const auto members = partition.level(j);
    DenseMatrix<T> a = stay_system(chain, partition, j, pos);
    DenseMatrix<T> b(members.size(), width);
    for (std::size_t i = 0; i < members.size(); ++i) {
      auto rhs = b.row(i);
      for (const auto& t : chain.row(members[i])) {
        const LevelIndex lvl = partition.level_of(t.to);
        if (lvl == target) {
          rhs[pos[t.to]] += t.probability;
        } else if (lvl > target && lvl < j) {
          const auto& h = out.first_entry[t.to];
          for (std::size_t c = 0; c < width; ++c) {
            if (!ScalarTraits<T>::is_zero(h[c])) rhs[c] += t.probability * h[c];
          }
        }
      }
    }
    const DenseMatrix<T> x = solve(std::move(a), std::move(b));
    for (std::size_t i = 0; i < members.size(); ++i) {
      T total(0);
      for (std::size_t c = 0; c < width; ++c) {
        out.first_entry[members[i]][c] = x(i, c);
        total += x(i, c);
      }
      out.probability[members[i]] = total;
    }
  }
  return out;
}

template <typename T>
HittingExtrema<T> hitting_extrema(const Chain<T>& chain, const LevelPartition& partition) {
  const std::size_t w = partition.level_count();
  HittingExtrema<T> out;
  out.min.assign(w, std::vector<T>(w, T(0)));
  out.max.assign(w, std::vector<T>(w, T(0)));
  for (LevelIndex l = 0; l < w; ++l) {
    const HittingProfile<T> h = hitting_probabilities(chain, partition, l);
    for (LevelIndex k = l; k < w; ++k) {
      out.min[k][l] = h.min_over(partition, k);
      out.max[k][l] = h.max_over(partition, k);
    }
  }
  return out;
}

template <typename T>
std::vector<T> mean_exit_time(const Chain<T>& chain, const LevelPartition& partition, LevelIndex k) {
  if (k == 0 || k >= partition.level_count()) throw AnalysisError("mean_exit_time: level must be in 1..K");
  const auto pos = positions_in_levels(partition, chain.size());
  const auto members = partition.level(k);
  DenseMatrix<T> b(members.size(), 1);
  for (std::size_t i = 0; i < members.size(); ++i) b(i, 0) = T(1);
  const DenseMatrix<T> x = solve(stay_system(chain, partition, k, pos), std::move(b));
  std::vector<T> out(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) out[i] = x(i, 0);
  return out;
}

template <typename T>
std::vector<T> mean_hitting_time(const Chain<T>& chain, const LevelPartition& partition) {
  const std::size_t n = chain.size();
  const auto pos = positions_in_levels(partition, n);
  std::vector<T> m(n, T(0));
  for (LevelIndex j = 1; j < partition.level_count(); ++j) {
    const auto members = partition.level(j);
    DenseMatrix<T> b(members.size(), 1);
    for (std::size_t i = 0; i < members.size(); ++i) {
      T rhs(1);
      for (const auto& t : chain.row(members[i])) {
        const LevelIndex lvl = partition.level_of(t.to);
        if (lvl > 0 && lvl < j) rhs += t.probability * m[t.to];
      }
      b(i, 0) = rhs;
    }
    const DenseMatrix<T> x = solve(stay_system(chain, partition, j, pos), std::move(b));
    for (std::size_t i = 0; i < members.size(); ++i) m[members[i]] = x(i, 0);
  }
  return m;
}

template <typename T>
TimeProfile<T> time_profile(const Chain<T>& chain, const LevelPartition& partition) {
  TimeProfile<T> out;
  out.exit_time.assign(chain.size(), T(0));
  for (LevelIndex k = 1; k < partition.level_count(); ++k) {
    const auto members = partition.level(k);
    const auto exit = mean_exit_time(chain, partition, k);
    for (std::size_t i = 0; i < members.size(); ++i) out.exit_time[members[i]] = exit[i];
  }
  out.hitting_time = mean_hitting_time(chain, partition);
  return out;
}

template <typename T>
Decomposition<T> decompose_hitting_time(const Chain<T>& chain, const LevelPartition& partition, StateIndex start) {
  const LevelIndex k = partition.level_of(start);
  Decomposition<T> out;
  out.start = start;
  out.staying.assign(k + 1, T(0));
  for (LevelIndex l = 1; l <= k; ++l) {
    const HittingProfile<T> h = hitting_probabilities(chain, partition, l);
    const std::vector<T> exit = mean_exit_time(chain, partition, l);
    const auto& entry = h.first_entry[start];
    T sum(0);
    for (std::size_t i = 0; i < exit.size(); ++i) sum += entry[i] * exit[i];
    out.staying[l] = sum;
    out.total += sum;
  }
  return out;
}

#define DRIFTLAB_INSTANTIATE(T)                                                                              \
  template struct HittingProfile<T>;                                                                         \
  template HittingProfile<T> hitting_probabilities(const Chain<T>&, const LevelPartition&, LevelIndex);      \
  template HittingExtrema<T> hitting_extrema(const Chain<T>&, const LevelPartition&);                        \
  template std::vector<T> mean_exit_time(const Chain<T>&, const LevelPartition&, LevelIndex);                \
  template std::vector<T> mean_hitting_time(const Chain<T>&, const LevelPartition&);                         \
  template TimeProfile<T> time_profile(const Chain<T>&, const LevelPartition&);                              \
  template Decomposition<T> decompose_hitting_time(const Chain<T>&, const LevelPartition&, StateIndex);

DRIFTLAB_INSTANTIATE(Rational)
DRIFTLAB_INSTANTIATE(double)

#undef DRIFTLAB_INSTANTIATE

}  // namespace driftlab
