#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relcomm/equilibrium.hpp"
#include "relcomm/model.hpp"
#include "relcomm/persuasion.hpp"
#include "relcomm/prior.hpp"

namespace relcomm {

// ---------------------------------------------------------------------------
// Stationary equilibrium profile on a state grid
// ---------------------------------------------------------------------------

/// Discretized stationary profile: the state grid carries the induced
/// posterior mean, the on-path decision, the interim sender transfer
/// (normalized so its minimum is exactly zero), and the sender's net stage
/// payoff. Continuation values are constant: the sender is held to its worst
/// value and the receiver collects the rest.
struct EquilibriumProfile {
  std::vector<double> theta;   ///< grid states (cell midpoints)
  std::vector<double> weight;  ///< prior mass of each grid cell
  std::vector<double> mu;      ///< posterior mean revealed at theta[i]
  std::vector<double> d;       ///< on-path decision at theta[i]
  std::vector<double> t_s;     ///< sender transfer, min over grid == 0
  std::vector<double> u_s_net; ///< sender stage payoff net of transfer

  int punish_index = 0;        ///< argmin of t_s
  double m_p = 0.0;            ///< posterior mean at the punishment message
  double d_p = 0.0;            ///< decision at the punishment message
  double tau_s = 0.0;          ///< per-period budget payment made by the sender

  double leeway = 0.0;
  double v_bar = 0.0;
  double v_s_min = 0.0;
  double v_r_min = 0.0;
  double surplus = 0.0;        ///< v_bar - v_s_min - v_r_min
  PoolingSet pooling{std::vector<Interval>{}};
};

/// Interim sender transfer schedule on a state grid: pinned (up to a
/// constant) by the envelope of sender incentives,
///   t_s(theta_k) = u_s(d_k, theta_k)
///                - sum_{j<k} (1 - a c) (d_j + d_{j+1})/2 (theta_{j+1} -
///                theta_j) - C,
/// with C chosen so the minimum over the grid is exactly zero. The midpoint
/// rule splits each adjacent incentive constraint symmetrically, so the
/// schedule is incentive compatible in both directions whenever d is
/// nondecreasing and a c < 1, and states sharing a pooled decision receive
/// identical transfers.
std::vector<double> interim_transfers(const QuadraticModel& model,
                                      const std::vector<double>& theta,
                                      const std::vector<double>& d);

/// Assemble the full stationary profile for the on-path pooling solution at
/// the given leeway, with the sender held to its worst value.
EquilibriumProfile build_profile(const QuadraticModel& model,
                                 const Prior& prior, double leeway,
                                 const PoolingSolution& solution, int n = 500);

// ---------------------------------------------------------------------------
// One-shot-deviation checks
// ---------------------------------------------------------------------------

/// Minimum slack of each equilibrium condition over the profile grid.
/// Nonnegative (within tolerance) means the condition holds; failures are
/// reported as data, never as errors.
struct ConditionReport {
  double c1_s = 0.0;  ///< sender continuation meets its floor
  double c1_r = 0.0;  ///< receiver continuation meets its floor
  double c2a = 0.0;   ///< sender truth-telling across message pairs
  double c2b = 0.0;   ///< sender prefers reporting to triggering punishment
  double c3 = 0.0;    ///< sender pays the transfer rather than walking away
  double c4a = 0.0;   ///< receiver obeys the on-path decision
  double c4b = 0.0;   ///< receiver obeys at the punishment message
  double c5 = 0.0;    ///< receiver pays its budget share
  double c6 = 0.0;    ///< continuation values are feasible
  double c7 = 0.0;    ///< budget transfers balance
  double min_slack = 0.0;
  std::string worst;  ///< name of the binding condition

  std::vector<std::pair<std::string, double>> items() const;
  bool pass(double tol = 1e-9) const { return min_slack >= -tol; }
};

ConditionReport check_conditions(const QuadraticModel& model,
                                 const EquilibriumProfile& profile);

/// Most profitable sender misreport over all grid pairs (gain <= 0 when
/// truth-telling holds).
struct Deviation {
  double theta = 0.0;
  double theta_hat = 0.0;
  double gain = 0.0;
};

Deviation best_deviation(const QuadraticModel& model,
                         const EquilibriumProfile& profile);

// ---------------------------------------------------------------------------
// Scripted perturbations
// ---------------------------------------------------------------------------

enum class Perturbation {
  decision_push,     ///< push one pooled decision past the band edge
  transfer_undercut, ///< shave one interim transfer below its pinned value
  non_monotone,      ///< swap the decisions of two separated messages
};

std::string to_string(Perturbation p);

/// Apply the perturbation to a copy of the profile. Each one violates a
/// specific condition: decision_push -> c4a, transfer_undercut -> c2a,
/// non_monotone -> c2a (with the band conditions unharmed).
EquilibriumProfile perturb_profile(const QuadraticModel& model,
                                   const EquilibriumProfile& profile,
                                   Perturbation kind);

}  // namespace relcomm
