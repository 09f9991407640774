#pragma once

#include <functional>
#include <limits>
#include <string>

#include "relcomm/model.hpp"
#include "relcomm/persuasion.hpp"
#include "relcomm/pooling.hpp"
#include "relcomm/prior.hpp"

namespace relcomm {

// ---------------------------------------------------------------------------
// Leeway and the enforceable band
// ---------------------------------------------------------------------------

/// Width of the enforceable decision band around a*m + b sustained by a
/// per-period surplus at stake:
///   leeway = sqrt(2 * (delta / (1 - delta)) * max(0, surplus) / c).
double leeway_from_surplus(double c, double delta, double surplus);

/// Set of states whose bias (a-1)m + b exceeds the leeway in absolute value,
/// i.e. where the clamped decision sits on the band edge. Returned as a
/// pooling-set (union of at most two intervals); empty when the band covers
/// the whole bias range.
PoolingSet extreme_set(const QuadraticModel& model, double leeway);

/// Optimal enforceable decision for posterior mean m: the first-best m
/// clamped to [a*m + b - leeway, a*m + b + leeway].
double rho_star(const QuadraticModel& model, double leeway, double m);

// ---------------------------------------------------------------------------
// Closed-form pooling regimes (uniform prior, steep response a > 2)
// ---------------------------------------------------------------------------

/// Leeway thresholds separating the pooling regimes, computed on the
/// orientation with a + 2b <= 1 (reflected = true when the input model was
/// mirrored through m -> 1 - m to reach that orientation).
struct RegimeThresholds {
  double ell_a = 0.0;      ///< above: full separation
  double ell_b = 0.0;      ///< above: one-sided censorship (rich case)
  double ell_c = 0.0;      ///< above: two-sided censorship
  double ell_d = 0.0;      ///< above: binary split; below: complete pooling
  double ell_b_prime = 0.0;///< sparse case: above, one-sided censorship
  bool rich = false;       ///< two-sided region nonempty (ell_c < ell_b)
  bool reflected = false;
};

RegimeThresholds regime_thresholds(const QuadraticModel& model);

/// Closed-form optimal pooling for the uniform prior when a > 2. Exact
/// threshold formulas; ties at a regime threshold resolve toward the
/// more-pooled regime with solution.boundary = true. Throws
/// std::invalid_argument when a <= 2 (no closed form applies).
PoolingSolution pooling_closed_form(const QuadraticModel& model,
                                    double leeway);

// ---------------------------------------------------------------------------
// Worst stationary values
// ---------------------------------------------------------------------------

/// Worst receiver value: no information is conveyed and the receiver
/// best-responds to the conditional mean of [lo, hi].
double receiver_worst(const QuadraticModel& model, const Prior& prior,
                      double lo = 0.0, double hi = 1.0);

/// Which side of the enforceable band the penal decision rule sits on.
enum class PenalFamily { minus_side, plus_side };

std::string to_string(PenalFamily f);

/// Conditional-on-[lo,hi] sender value of the penal scheme in the given
/// family with pooled region [lo,t) (minus side) or (t,hi] (plus side).
/// Exact for piecewise-constant priors.
double penal_family_value(const QuadraticModel& model, const Prior& prior,
                          double leeway, PenalFamily family, double t,
                          double lo = 0.0, double hi = 1.0);

/// Sender-worst penal scheme on a cell [lo, hi]: decisions sit on one band
/// edge, with the states nearest the punished end pooled up to a threshold.
///   minus side: D = rho_R(mean[lo,t)) - leeway on [lo,t),
///               D = rho_R(theta) - leeway on [t,hi];
///   plus side:  mirrored, pooling (s,hi] at the top edge + leeway.
/// The value is the expected sender payoff conditional on the cell under the
/// transfer scheme that leaves zero rent at the punished end.
struct PenalResult {
  PenalFamily family = PenalFamily::minus_side;
  double lo = 0.0, hi = 1.0;
  double threshold = 0.0;     ///< pooled region is [lo,threshold) or (threshold,hi]
  double pooled_mean = 0.0;   ///< conditional mean of the pooled region
  double value = 0.0;         ///< conditional-on-cell sender value (authoritative)
  PoolingSet pooling{std::vector<Interval>{}};
  /// Advisory closed form (uniform prior over the full interval only):
  double closed_form_threshold = std::numeric_limits<double>::quiet_NaN();
  double closed_form_value = std::numeric_limits<double>::quiet_NaN();
  bool closed_form_in_range = false;
  bool disagreement = false;  ///< closed form vs grid differ beyond 1e-3
  std::string note;
};

/// Minimize the sender's value within one penal family on [lo, hi] by direct
/// grid scan (1000 steps) with golden-section refinement of the threshold.
PenalResult sender_worst_family(const QuadraticModel& model,
                                const Prior& prior, double leeway,
                                PenalFamily family, double lo, double hi);

/// Minimize the sender's value over both penal families; the closed-form
/// threshold is attached for diagnostics when the prior is uniform and
/// [lo,hi] = [0,1].
PenalResult sender_worst(const QuadraticModel& model, const Prior& prior,
                         double leeway);
PenalResult sender_worst_on(const QuadraticModel& model, const Prior& prior,
                            double leeway, double lo, double hi);

/// Decision prescribed by a penal scheme at state theta.
double penal_decision(const QuadraticModel& model, double leeway,
                      const PenalResult& penal, double theta);

// ---------------------------------------------------------------------------
// Self-consistent leeway (fixed point)
// ---------------------------------------------------------------------------

struct FixedPointResult {
  double leeway = 0.0;
  bool converged = false;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  PoolingSolution solution;
  double v_bar = 0.0;
  double v_s_min = 0.0;
  double v_r_min = 0.0;
  double surplus = 0.0;
  std::string message;
};

/// Optimal pooling for the model at a given leeway (generic solver; the
/// closed form is advisory and only used in tests).
PoolingSolution optimal_for(const QuadraticModel& model, const Prior& prior,
                            double leeway);

/// Value triple (v_bar, v_s_min, v_r_min) at a given leeway.
struct ValueTriple {
  double v_bar = 0.0;
  double v_s_min = 0.0;
  double v_r_min = 0.0;
  double surplus() const { return v_bar - v_s_min - v_r_min; }
};

ValueTriple values_at(const QuadraticModel& model, const Prior& prior,
                      double leeway);

/// Largest self-consistent leeway: bisection on g(l) = leeway(surplus(l)) - l
/// over the rightmost sign change, |l' - l| < 1e-10, at most 200 iterations.
/// The initial upper bracket doubles (at most 8x) while g stays positive;
/// failure to bracket reports converged = false with the bracket in message.
FixedPointResult solve_fixed_point(const QuadraticModel& model,
                                   const Prior& prior);

/// Same fixed-point search with a caller-supplied value map (used when play
/// is conditioned on a public signal and the values aggregate over cells).
/// The solution field of the result is left default-constructed.
FixedPointResult solve_fixed_point_values(
    const QuadraticModel& model, const Prior& prior,
    const std::function<ValueTriple(double)>& values);

/// Discount factor that would sustain the given leeway, from
/// delta / (1 - delta) = c * leeway^2 / (2 * surplus(leeway)).
/// Returns NaN when the surplus at that leeway is nonpositive.
double delta_for_leeway(const QuadraticModel& model, const Prior& prior,
                        double leeway);

}  // namespace relcomm
