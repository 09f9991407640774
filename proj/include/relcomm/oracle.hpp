#pragma once

#include <functional>
#include <vector>

#include "relcomm/equilibrium.hpp"
#include "relcomm/pooling.hpp"
#include "relcomm/prior.hpp"

namespace relcomm {

// ---------------------------------------------------------------------------
// Grid discretization of the state space
// ---------------------------------------------------------------------------

/// Prior mass and first moment accumulated over n equal cells of [lo, hi],
/// with exact prefix sums so that any contiguous run of cells yields its mass
/// and conditional mean in O(1) without accumulation-order ambiguity.
class DiscretizedProblem {
 public:
  DiscretizedProblem(const Prior& prior, int n, double lo = 0.0,
                     double hi = 1.0);

  int n() const { return n_; }
  double edge(int i) const;             ///< i in [0, n]
  double mass(int i, int j) const;      ///< cells [i, j)
  double moment(int i, int j) const;    ///< first moment of cells [i, j)
  double mean(int i, int j) const;      ///< conditional mean (midpoint if null)

 private:
  int n_ = 0;
  double lo_ = 0.0, hi_ = 1.0;
  std::vector<double> pre_mass_;  ///< size n+1
  std::vector<double> pre_mom_;   ///< size n+1
};

// ---------------------------------------------------------------------------
// Optimal-partition oracles
// ---------------------------------------------------------------------------

/// An interval partition of the grid: cut indices (interior cell boundaries),
/// the induced pooling set (multi-cell segments become pools, single-cell
/// segments are treated as separated), and the objective value.
struct PartitionResult {
  double value = 0.0;
  std::vector<int> cuts;               ///< ascending, in (0, n)
  PoolingSet pooling{std::vector<Interval>{}};
  int segments = 0;
};

/// Dynamic program over interval partitions: best[j] = max over i < j of
/// best[i] + mass(i,j) * g(mean(i,j)). O(n^2). Ties break toward the
/// partition with fewer segments; accumulation is strictly left-to-right so
/// values agree bit-for-bit with brute-force enumeration.
PartitionResult dp_optimal_partition(const DiscretizedProblem& grid,
                                     const std::function<double(double)>& g);

/// Brute-force enumeration of all 2^(n-1) interval partitions. Guarded:
/// throws std::invalid_argument for n > 20.
PartitionResult enumerate_partitions(const DiscretizedProblem& grid,
                                     const std::function<double(double)>& g);

// ---------------------------------------------------------------------------
// Worst-sender grid oracle
// ---------------------------------------------------------------------------

/// True minimum of the sender's penal value over both band-edge families on
/// the threshold grid t_k = k/n, k = 0..n. No refinement: this is the
/// reference the structured search is checked against.
struct WorstSenderScan {
  double value = 0.0;
  double threshold = 0.0;
  PenalFamily family = PenalFamily::minus_side;
};

WorstSenderScan oracle_worst_sender(const QuadraticModel& model,
                                    const Prior& prior, double leeway, int n);

}  // namespace relcomm
