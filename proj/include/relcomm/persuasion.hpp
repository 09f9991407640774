#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "relcomm/model.hpp"
#include "relcomm/pooling.hpp"
#include "relcomm/prior.hpp"

namespace relcomm {

// ---------------------------------------------------------------------------
// Indirect (posterior-mean) payoff
// ---------------------------------------------------------------------------

/// Piecewise-quadratic payoff of revealing posterior mean m when the decision
/// is the first-best clamped to the enforceable band around a*m + b:
///   d*(m) = clamp(m, a*m + b - ell, a*m + b + ell).
/// Three branches split where the bias (a-1)m + b crosses -ell and +ell; the
/// function is C^1 at the breakpoints.
class PosteriorPayoff {
 public:
  PosteriorPayoff(const QuadraticModel& model, double leeway);

  double value(double m) const;
  double deriv(double m) const;
  double second(double m) const;  ///< piecewise constant

  /// Optimal decision for posterior mean m (clamped first-best).
  double decision(double m) const;

  /// Branch breakpoints inside (0,1), sorted (0, 1, or 2 of them).
  const std::vector<double>& breakpoints() const { return breaks_; }

  /// Sign pattern of value''(m) on the branches intersecting [0,1]:
  /// one char per branch, '+' for convex, '-' for concave.
  std::string curvature_pattern() const;

  double leeway() const { return leeway_; }
  const QuadraticModel& model() const { return model_; }

 private:
  QuadraticModel model_;
  double leeway_ = 0.0;
  double theta_lo_ = 0.0;  ///< bias = -ell crossing (if a != 1)
  double theta_hi_ = 0.0;  ///< bias = +ell crossing
  std::vector<double> breaks_;
};

// ---------------------------------------------------------------------------
// Optimal pooling structures
// ---------------------------------------------------------------------------

enum class Regime {
  full_separation,
  lower_censorship,
  upper_censorship,
  two_sided_censorship,
  binary_split,
  complete_pooling,
};

std::string to_string(Regime r);

/// Result of maximizing the expected indirect payoff over pooling sets.
struct PoolingSolution {
  PoolingSet pooling;
  double value = 0.0;
  Regime regime = Regime::full_separation;
  /// Pool boundaries (nan when the regime has no such boundary):
  double theta_l = std::numeric_limits<double>::quiet_NaN();
  double theta_h = std::numeric_limits<double>::quiet_NaN();
  double theta_m = std::numeric_limits<double>::quiet_NaN();
  /// Conditional means of the low/high pools (nan when absent).
  double m_low = std::numeric_limits<double>::quiet_NaN();
  double m_high = std::numeric_limits<double>::quiet_NaN();
  /// True when the configuration sits exactly on a regime threshold and was
  /// resolved toward the more-pooled regime.
  bool boundary = false;
  std::string note;
};

/// Expected indirect payoff of a given pooling set (exact per cell).
double pooling_value(const Prior& prior, const PosteriorPayoff& payoff,
                     const PoolingSet& pooling);

/// Unconditional contribution of the slice [lo,hi] to the expected indirect
/// payoff: pools are clipped to the slice, states outside pools are
/// separated. pooling_value(...) equals pooling_value_on(..., 0, 1).
double pooling_value_on(const Prior& prior, const PosteriorPayoff& payoff,
                        const PoolingSet& pooling, double lo, double hi);

/// Best single pool [0,t) against a payoff whose curvature pattern is
/// concave-then-convex on [0,1] (pool at the bottom). The dispatcher handles
/// the mirrored convex-then-concave case by solving the reflected problem.
PoolingSolution solve_one_inflection(const Prior& prior,
                                     const PosteriorPayoff& payoff);

/// Best pooling against a convex-concave-convex payoff: candidates are the
/// two-sided pair [0,t) and (s,1] with decoupled tangency conditions, the
/// single middle pool (binary split) with an indifference condition, full
/// pooling, and no pooling.
PoolingSolution solve_two_inflection(const Prior& prior,
                                     const PosteriorPayoff& payoff);

/// Dispatch on the curvature pattern of the indirect payoff and return the
/// optimal pooling set with its diagnostics.
PoolingSolution optimal_pooling(const Prior& prior,
                                const PosteriorPayoff& payoff);

/// Reflect a solution through t -> 1 - t (pools mirror, value is preserved
/// up to the payoff symmetry used by the caller).
PoolingSolution reflect_solution(const PoolingSolution& sol);

/// Least concave majorant of the piecewise-linear interpolant through
/// (x[i], y[i]), evaluated at the same nodes. x must be strictly increasing
/// with at least two nodes. The majorant is the upper convex hull of the
/// point set; the optimal pooling value never exceeds it at the prior mean.
std::vector<double> concavify(const std::vector<double>& x,
                              const std::vector<double>& y);

}  // namespace relcomm
