#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "relcomm/equilibrium.hpp"
#include "relcomm/model.hpp"
#include "relcomm/persuasion.hpp"
#include "relcomm/prior.hpp"

namespace relcomm {

// ---------------------------------------------------------------------------
// Public signal partitions
// ---------------------------------------------------------------------------

/// Interval partition of the state space induced by a public signal: interior
/// cut points in (0,1), strictly increasing. No cuts = uninformative signal.
class SignalPartition {
 public:
  SignalPartition() = default;
  static SignalPartition from_cuts(std::vector<double> cuts);

  const std::vector<double>& cuts() const { return cuts_; }
  std::size_t cells() const { return cuts_.size() + 1; }
  std::pair<double, double> cell(std::size_t i) const;

  /// True when every cell of *this nests inside a cell of coarser (equal
  /// partitions refine each other).
  bool refines(const SignalPartition& coarser, double tol = 1e-12) const;

  bool operator==(const SignalPartition& other) const {
    return cuts_ == other.cuts_;
  }

 private:
  std::vector<double> cuts_;
};

// ---------------------------------------------------------------------------
// Equilibrium under a public signal
// ---------------------------------------------------------------------------

/// Per-cell outcome: within each signal cell the continuation game is the
/// original problem restricted to the cell, played with the economy-wide
/// leeway (the surplus at stake is global).
struct CellOutcome {
  double lo = 0.0, hi = 1.0;
  double mass = 0.0;
  PoolingSet pooling{std::vector<Interval>{}};  ///< in original coordinates
  double v_bar = 0.0;    ///< conditional on the cell
  double v_s_min = 0.0;  ///< conditional on the cell
  double v_r_min = 0.0;  ///< conditional on the cell
  PenalResult penal;
};

struct SignalEquilibrium {
  SignalPartition partition;
  double leeway = 0.0;
  bool converged = false;
  int iterations = 0;
  double v_bar = 0.0;
  double v_s_min = 0.0;
  double v_r_min = 0.0;
  double surplus = 0.0;
  std::vector<CellOutcome> cells;
  PoolingSet pooling{std::vector<Interval>{}};  ///< union across cells
  std::string message;
};

/// Solve the fixed point for the leeway when play is conditioned on the
/// public signal. The empty partition reproduces the baseline exactly (same
/// code path).
SignalEquilibrium signal_equilibrium(const QuadraticModel& model,
                                     const Prior& prior,
                                     const SignalPartition& partition);

// ---------------------------------------------------------------------------
// Comparing transparency regimes
// ---------------------------------------------------------------------------

/// Comparison of a finer public signal against a coarser one. The predicted
/// direction (finer disclosure weakly narrows what relational incentives can
/// sustain) relies on the composed sender-worst decision map staying
/// nondecreasing across cell boundaries; when that hypothesis fails the
/// verdict says so instead of claiming an ordering.
struct TransparencyComparison {
  SignalEquilibrium fine;
  SignalEquilibrium coarse;
  bool is_refinement = false;
  bool hypothesis_ok = false;
  /// "strict-inclusion" | "equal" | "hypothesis-violated" | "not-nested"
  /// (the last is a numeric fallback: hypothesis holds yet values fail to
  /// nest beyond tolerance).
  std::string verdict;
  double dv_bar = 0.0;    ///< coarse.v_bar   - fine.v_bar   (>= 0 expected)
  double dv_s_min = 0.0;  ///< fine.v_s_min   - coarse.v_s_min (>= 0 expected)
  double dv_r_min = 0.0;  ///< fine.v_r_min   - coarse.v_r_min (>= 0 expected)
  double d_leeway = 0.0;  ///< coarse.leeway  - fine.leeway  (>= 0 expected)
  std::string note;
};

/// Requires fine to refine coarse (std::invalid_argument otherwise).
TransparencyComparison compare_transparency(const QuadraticModel& model,
                                            const Prior& prior,
                                            const SignalPartition& fine,
                                            const SignalPartition& coarse);

/// Monotonicity check on the composed sender-worst decision map: true when
/// the map never falls by more than tol across or within cells (upward jumps
/// at boundaries are fine).
bool penal_outcome_monotone(const QuadraticModel& model,
                            const SignalEquilibrium& eq, double tol = 1e-9);

}  // namespace relcomm
