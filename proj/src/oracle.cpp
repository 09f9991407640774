#include "relcomm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relcomm {

// ---------------------------------------------------------------------------
// DiscretizedProblem
// ---------------------------------------------------------------------------

DiscretizedProblem::DiscretizedProblem(const Prior& prior, int n, double lo,
                                       double hi)
    : n_(n), lo_(lo), hi_(hi) {
  if (n < 1) throw std::invalid_argument("grid: need at least one cell");
  if (!(hi > lo)) throw std::invalid_argument("grid: empty span");
  pre_mass_.assign(n + 1, 0.0);
  pre_mom_.assign(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = edge(i), b = edge(i + 1);
    pre_mass_[i + 1] = pre_mass_[i] + prior.mass(a, b);
    pre_mom_[i + 1] = pre_mom_[i] + prior.first_moment(a, b);
  }
}

double DiscretizedProblem::edge(int i) const {
  if (i <= 0) return lo_;
  if (i >= n_) return hi_;
  return lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(n_);
}

double DiscretizedProblem::mass(int i, int j) const {
  return pre_mass_[j] - pre_mass_[i];
}

double DiscretizedProblem::moment(int i, int j) const {
  return pre_mom_[j] - pre_mom_[i];
}

double DiscretizedProblem::mean(int i, int j) const {
  const double m = mass(i, j);
  if (m <= 0.0) return 0.5 * (edge(i) + edge(j));
  return moment(i, j) / m;
}

// ---------------------------------------------------------------------------
// Partition oracles
// ---------------------------------------------------------------------------

namespace {

PartitionResult assemble(const DiscretizedProblem& grid, double value,
                         const std::vector<int>& boundaries) {
  // boundaries: ascending segment start indices, first 0, plus n at the end.
  PartitionResult out;
  out.value = value;
  std::vector<Interval> pools;
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
    const int i = boundaries[k], j = boundaries[k + 1];
    if (k > 0) out.cuts.push_back(i);
    if (j - i > 1) pools.push_back({grid.edge(i), grid.edge(j)});
    ++out.segments;
  }
  out.pooling = PoolingSet(std::move(pools));
  return out;
}

}  // namespace

PartitionResult dp_optimal_partition(const DiscretizedProblem& grid,
                                     const std::function<double(double)>& g) {
  const int n = grid.n();
  std::vector<double> best(n + 1, 0.0);
  std::vector<int> segs(n + 1, 0);
  std::vector<int> parent(n + 1, 0);
  for (int j = 1; j <= n; ++j) {
    bool first = true;
    for (int i = 0; i < j; ++i) {
      const double cand = best[i] + grid.mass(i, j) * g(grid.mean(i, j));
      const int cand_segs = segs[i] + 1;
      if (first || cand > best[j] ||
          (cand == best[j] && cand_segs < segs[j])) {
        best[j] = cand;
        segs[j] = cand_segs;
        parent[j] = i;
        first = false;
      }
    }
  }
  std::vector<int> boundaries{n};
  for (int j = n; j > 0; j = parent[j]) boundaries.push_back(parent[j]);
  std::reverse(boundaries.begin(), boundaries.end());
  return assemble(grid, best[n], boundaries);
}

PartitionResult enumerate_partitions(const DiscretizedProblem& grid,
                                     const std::function<double(double)>& g) {
  const int n = grid.n();
  if (n > 20) {
    throw std::invalid_argument(
        "enumerate: refusing more than 2^19 partitions (n > 20)");
  }
  const unsigned long total = 1UL << (n - 1);
  bool have = false;
  double best_value = 0.0;
  int best_segs = 0;
  unsigned long best_mask = 0;
  for (unsigned long mask = 0; mask < total; ++mask) {
    // Bit k set = cut after cell k; accumulate segment values left to right
    // in the same association order as the DP recursion.
    double value = 0.0;
    int segs = 0;
    int start = 0;
    for (int k = 0; k < n; ++k) {
      const bool cut_here = (k + 1 == n) || ((mask >> k) & 1UL);
      if (cut_here) {
        value = value + grid.mass(start, k + 1) * g(grid.mean(start, k + 1));
        ++segs;
        start = k + 1;
      }
    }
    if (!have || value > best_value ||
        (value == best_value && segs < best_segs)) {
      have = true;
      best_value = value;
      best_segs = segs;
      best_mask = mask;
    }
  }
  std::vector<int> boundaries{0};
  for (int k = 0; k < n; ++k) {
    const bool cut_here = (k + 1 == n) || ((best_mask >> k) & 1UL);
    if (cut_here) boundaries.push_back(k + 1);
  }
  return assemble(grid, best_value, boundaries);
}

WorstSenderScan oracle_worst_sender(const QuadraticModel& model,
                                    const Prior& prior, double leeway, int n) {
  if (n < 1) throw std::invalid_argument("worst-sender oracle: n must be >= 1");
  WorstSenderScan best;
  bool have = false;
  for (const PenalFamily family :
       {PenalFamily::minus_side, PenalFamily::plus_side}) {
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      const double v = penal_family_value(model, prior, leeway, family, t);
      if (!have || v < best.value) {
        have = true;
        best.value = v;
        best.threshold = t;
        best.family = family;
      }
    }
  }
  return best;
}

}  // namespace relcomm
