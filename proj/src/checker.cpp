#include "relcomm/checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relcomm {

std::vector<double> interim_transfers(const QuadraticModel& model,
                                      const std::vector<double>& theta,
                                      const std::vector<double>& d) {
  const std::size_t n = theta.size();
  if (n == 0 || d.size() != n)
    throw std::invalid_argument("transfers: grid arrays must match");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(theta[k] >= theta[k - 1]))
      throw std::invalid_argument("transfers: grid must be sorted");
  }
  const double slope = 1.0 - model.a() * model.c();
  std::vector<double> out(n);
  double envelope = 0.0;
  out[0] = model.u_sender(d[0], theta[0]);
  for (std::size_t k = 1; k < n; ++k) {
    envelope += slope * 0.5 * (d[k - 1] + d[k]) * (theta[k] - theta[k - 1]);
    out[k] = model.u_sender(d[k], theta[k]) - envelope;
  }
  const double base = *std::min_element(out.begin(), out.end());
  for (double& t : out) t -= base;
  return out;
}

EquilibriumProfile build_profile(const QuadraticModel& model,
                                 const Prior& prior, double leeway,
                                 const PoolingSolution& solution, int n) {
  if (n < 2) throw std::invalid_argument("profile grid needs at least 2 cells");
  if (!(leeway >= 0.0))
    throw std::invalid_argument("leeway must be nonnegative");
  EquilibriumProfile p;
  p.theta.resize(n);
  p.weight.resize(n);
  p.mu.resize(n);
  p.d.resize(n);
  p.pooling = solution.pooling;
  p.leeway = leeway;

  // Cache the conditional mean of each pool.
  std::vector<double> pool_mean;
  pool_mean.reserve(solution.pooling.size());
  for (const Interval& iv : solution.pooling.intervals()) {
    pool_mean.push_back(prior.mean(iv.lo, iv.hi));
  }

  for (int k = 0; k < n; ++k) {
    const double lo = static_cast<double>(k) / n;
    const double hi = static_cast<double>(k + 1) / n;
    p.theta[k] = (k + 0.5) / n;
    p.weight[k] = prior.mass(lo, hi);
    const auto pool = solution.pooling.interval_containing(p.theta[k]);
    p.mu[k] = pool ? pool_mean[*pool] : p.theta[k];
    p.d[k] = rho_star(model, leeway, p.mu[k]);
  }

  p.t_s = interim_transfers(model, p.theta, p.d);
  p.punish_index = static_cast<int>(
      std::min_element(p.t_s.begin(), p.t_s.end()) - p.t_s.begin());
  p.m_p = p.mu[p.punish_index];
  p.d_p = p.d[p.punish_index];

  p.u_s_net.resize(n);
  for (int k = 0; k < n; ++k) {
    p.u_s_net[k] = model.u_sender(p.d[k], p.theta[k]) - p.t_s[k];
  }

  p.v_bar = solution.value;
  p.v_s_min = sender_worst(model, prior, leeway).value;
  p.v_r_min = receiver_worst(model, prior);
  p.surplus = p.v_bar - p.v_s_min - p.v_r_min;

  double flow = 0.0;
  for (int k = 0; k < n; ++k) flow += p.weight[k] * p.u_s_net[k];
  p.tau_s = flow - p.v_s_min;
  return p;
}

// ---------------------------------------------------------------------------
// Condition slacks
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, double>> ConditionReport::items() const {
  return {{"c1_s", c1_s}, {"c1_r", c1_r}, {"c2a", c2a}, {"c2b", c2b},
          {"c3", c3},     {"c4a", c4a},   {"c4b", c4b}, {"c5", c5},
          {"c6", c6},     {"c7", c7}};
}

ConditionReport check_conditions(const QuadraticModel& model,
                                 const EquilibriumProfile& p) {
  const std::size_t n = p.theta.size();
  if (n == 0 || p.d.size() != n || p.t_s.size() != n || p.mu.size() != n ||
      p.weight.size() != n || p.u_s_net.size() != n) {
    throw std::invalid_argument("conditions: malformed profile");
  }
  const double delta = model.delta();
  const double keep = 1.0 - delta;
  ConditionReport r;

  double flow = 0.0;
  for (std::size_t k = 0; k < n; ++k) flow += p.weight[k] * p.u_s_net[k];
  r.c1_s = flow - p.tau_s - p.v_s_min;
  r.c1_r = p.surplus;

  double worst_pair = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double truthful = model.u_sender(p.d[i], p.theta[i]) - p.t_s[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double mimic = model.u_sender(p.d[j], p.theta[i]) - p.t_s[j];
      worst_pair = std::min(worst_pair, truthful - mimic);
    }
  }
  r.c2a = keep * worst_pair;

  double worst_exit = std::numeric_limits<double>::infinity();
  double worst_pay = std::numeric_limits<double>::infinity();
  double max_temptation = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst_exit =
        std::min(worst_exit, p.u_s_net[i] - model.u_sender(p.d_p, p.theta[i]));
    const double tempt = model.temptation(p.d[i], p.mu[i]);
    worst_pay = std::min(worst_pay, keep * (p.t_s[i] - tempt));
    max_temptation = std::max(max_temptation, tempt);
  }
  r.c2b = keep * worst_exit;
  r.c3 = worst_pay + delta * p.surplus;
  r.c4a = delta * p.surplus - keep * max_temptation;
  r.c4b = delta * p.surplus - keep * model.temptation(p.d_p, p.m_p);
  r.c5 = std::min(0.0, delta * p.surplus);
  r.c6 = std::min(0.0, p.surplus);
  r.c7 = 0.0;

  r.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& [name, slack] : r.items()) {
    if (slack < r.min_slack) {
      r.min_slack = slack;
      r.worst = name;
    }
  }
  return r;
}

Deviation best_deviation(const QuadraticModel& model,
                         const EquilibriumProfile& p) {
  Deviation best;
  best.gain = -std::numeric_limits<double>::infinity();
  const std::size_t n = p.theta.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double truthful = model.u_sender(p.d[i], p.theta[i]) - p.t_s[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double gain =
          model.u_sender(p.d[j], p.theta[i]) - p.t_s[j] - truthful;
      if (gain > best.gain) {
        best.gain = gain;
        best.theta = p.theta[i];
        best.theta_hat = p.theta[j];
      }
    }
  }
  if (!std::isfinite(best.gain)) best.gain = 0.0;
  return best;
}

// ---------------------------------------------------------------------------
// Scripted perturbations
// ---------------------------------------------------------------------------

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::decision_push:
      return "decision_push";
    case Perturbation::transfer_undercut:
      return "transfer_undercut";
    case Perturbation::non_monotone:
      return "non_monotone";
  }
  return "unknown";
}

namespace {

bool same_message(double a, double b) { return std::fabs(a - b) < 1e-15; }

void refresh_net(const QuadraticModel& model, EquilibriumProfile& p,
                 std::size_t k) {
  p.u_s_net[k] = model.u_sender(p.d[k], p.theta[k]) - p.t_s[k];
}

}  // namespace

EquilibriumProfile perturb_profile(const QuadraticModel& model,
                                   const EquilibriumProfile& profile,
                                   Perturbation kind) {
  EquilibriumProfile p = profile;
  const std::size_t n = p.theta.size();
  const double step = 0.01;

  switch (kind) {
    case Perturbation::decision_push: {
      // Find a pooled message whose decision sits on the band edge and push
      // it past the edge, toward the first-best. Among band-edge pools,
      // prefer the one with the largest transfer so the violation shows up
      // as a pure obedience failure rather than a transfer-payment one.
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!p.pooling.contains(p.theta[i])) continue;
        const double gap = p.d[i] - model.rho_r(p.mu[i]);
        if (p.leeway > 0.0 && std::fabs(std::fabs(gap) - p.leeway) < 1e-9) {
          if (pick == n || p.t_s[i] > p.t_s[pick]) pick = i;
        }
      }
      if (pick == n) {
        throw std::invalid_argument(
            "decision_push: no pooled message sits on the band edge");
      }
      const double target = p.mu[pick];
      const double pushed =
          p.d[pick] + step * (target >= p.d[pick] ? 1.0 : -1.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (same_message(p.mu[i], target)) p.d[i] = pushed;
      }
      // Re-pin the transfers to the perturbed decision schedule so the
      // defect is confined to the receiver's obedience at the pushed
      // message rather than leaking into the sender's truth-telling.
      p.t_s = interim_transfers(model, p.theta, p.d);
      double mean_net = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        refresh_net(model, p, i);
        mean_net += p.weight[i] * p.u_s_net[i];
      }
      p.tau_s = mean_net - p.v_s_min;
      p.punish_index = static_cast<int>(
          std::min_element(p.t_s.begin(), p.t_s.end()) - p.t_s.begin());
      break;
    }
    case Perturbation::transfer_undercut: {
      // Shave the largest transfer on a non-punishment message.
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (same_message(p.mu[i], p.m_p)) continue;
        if (pick == n || p.t_s[i] > p.t_s[pick]) pick = i;
      }
      if (pick == n) {
        throw std::invalid_argument(
            "transfer_undercut: only the punishment message is on path");
      }
      const double target = p.mu[pick];
      for (std::size_t i = 0; i < n; ++i) {
        if (same_message(p.mu[i], target)) {
          p.t_s[i] -= step;
          refresh_net(model, p, i);
        }
      }
      break;
    }
    case Perturbation::non_monotone: {
      // Swap the decisions of two separated messages. Both swapped
      // decisions must stay inside the enforceable band so the defect is
      // purely a violation of the sender's truth-telling monotonicity.
      std::vector<std::size_t> sep;
      for (std::size_t i = 0; i < n; ++i) {
        if (!p.pooling.contains(p.theta[i])) sep.push_back(i);
      }
      if (sep.size() < 2) {
        throw std::invalid_argument(
            "non_monotone: fewer than two separated messages on path");
      }
      const auto in_band = [&](double d, std::size_t at) {
        return std::fabs(d - model.rho_r(p.mu[at])) <= p.leeway + 1e-12;
      };
      const std::size_t count = sep.size();
      const std::size_t widest =
          std::min<std::size_t>(count - 1, std::max<std::size_t>(n / 20, 1));
      std::size_t pick_lo = n, pick_hi = n;
      for (std::size_t gap = widest; gap >= 1; --gap) {
        const std::size_t i = sep[(count - 1 - gap) / 2];
        const std::size_t j = sep[(count - 1 - gap) / 2 + gap];
        if (p.d[i] != p.d[j] && in_band(p.d[j], i) && in_band(p.d[i], j)) {
          pick_lo = i;
          pick_hi = j;
          break;
        }
      }
      if (pick_lo == n) {
        throw std::invalid_argument(
            "non_monotone: no band-feasible separated pair to swap");
      }
      std::swap(p.d[pick_lo], p.d[pick_hi]);
      refresh_net(model, p, pick_lo);
      refresh_net(model, p, pick_hi);
      break;
    }
  }

  p.m_p = p.mu[p.punish_index];
  p.d_p = p.d[p.punish_index];
  return p;
}

}  // namespace relcomm
