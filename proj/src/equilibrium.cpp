#include "relcomm/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relcomm/numeric.hpp"

namespace relcomm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Leeway and the enforceable band
// ---------------------------------------------------------------------------

double leeway_from_surplus(double c, double delta, double surplus) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in [0,1)");
  if (delta == 0.0) return 0.0;
  const double at_stake = delta / (1.0 - delta) * std::max(0.0, surplus);
  return std::sqrt(2.0 * at_stake / c);
}

PoolingSet extreme_set(const QuadraticModel& model, double leeway) {
  if (!(leeway >= 0.0))
    throw std::invalid_argument("leeway must be nonnegative");
  const double slope = model.a() - 1.0;
  if (std::fabs(slope) < 1e-15) {
    return std::fabs(model.b()) > leeway ? PoolingSet::all()
                                         : PoolingSet::none();
  }
  const double r1 = (-leeway - model.b()) / slope;
  const double r2 = (leeway - model.b()) / slope;
  const double lo_root = std::min(r1, r2);
  const double hi_root = std::max(r1, r2);
  std::vector<Interval> parts;
  if (lo_root > 0.0) parts.push_back({0.0, std::min(lo_root, 1.0)});
  if (hi_root < 1.0) parts.push_back({std::max(hi_root, 0.0), 1.0});
  return PoolingSet(std::move(parts));
}

double rho_star(const QuadraticModel& model, double leeway, double m) {
  const double center = model.rho_r(m);
  return std::clamp(m, center - leeway, center + leeway);
}

// ---------------------------------------------------------------------------
// Closed-form pooling regimes (uniform prior, a > 2)
// ---------------------------------------------------------------------------

RegimeThresholds regime_thresholds(const QuadraticModel& model) {
  if (!(model.a() > 2.0))
    throw std::invalid_argument("regime thresholds are defined for a > 2");
  RegimeThresholds th;
  th.reflected = model.a() + 2.0 * model.b() > 1.0;
  const QuadraticModel om = th.reflected ? model.reflected() : model;
  const double a = om.a();
  const double b = om.b();
  const double root_a = std::sqrt(a * (a - 2.0));
  th.ell_a = -b;
  th.ell_b = a + b - 1.0;
  th.ell_c = 0.25 * root_a;
  const double denom = 4.0 * (a + b - 1.0);
  const double ratio = denom > 0.0 ? a / denom : 0.0;
  th.ell_d = 0.25 * (a - 2.0) * std::max(ratio, 1.0);
  th.ell_b_prime = 0.5 * root_a - (a - 1.0) - b;
  th.rich = th.ell_c < th.ell_b;
  return th;
}

PoolingSolution pooling_closed_form(const QuadraticModel& model,
                                    double leeway) {
  if (!(model.a() > 2.0))
    throw std::invalid_argument("closed-form pooling requires a > 2");
  if (!(leeway >= 0.0) || !std::isfinite(leeway))
    throw std::invalid_argument("leeway must be nonnegative and finite");
  const RegimeThresholds th = regime_thresholds(model);
  const QuadraticModel om = th.reflected ? model.reflected() : model;
  const double a = om.a();
  const double b = om.b();
  const double curve = a * (a - 2.0);
  const double gamma = 2.0 * (2.0 * (a - 1.0) + std::sqrt(curve)) /
                       (3.0 * (a - 1.0) * (a - 1.0) + 1.0);

  const bool tie =
      leeway == th.ell_a ||
      (th.rich ? (leeway == th.ell_b || leeway == th.ell_c ||
                  leeway == th.ell_d)
               : (leeway == th.ell_b_prime));

  PoolingSolution sol;
  if (leeway > th.ell_a) {
    sol.regime = Regime::full_separation;
    sol.pooling = PoolingSet::none();
  } else if (th.rich) {
    if (leeway > th.ell_b) {
      sol.regime = Regime::lower_censorship;
      sol.theta_l = gamma * (-b - leeway);
      sol.pooling = PoolingSet::of(0.0, sol.theta_l);
    } else if (leeway > th.ell_c) {
      sol.regime = Regime::two_sided_censorship;
      sol.theta_l = gamma * (-b - leeway);
      sol.theta_h = 1.0 - gamma * (a + b - 1.0 - leeway);
      sol.pooling = PoolingSet(
          std::vector<Interval>{{0.0, sol.theta_l}, {sol.theta_h, 1.0}});
    } else if (leeway > th.ell_d) {
      sol.regime = Regime::binary_split;
      sol.theta_m = (curve + 16.0 * b * leeway) /
                    (2.0 * (curve + 8.0 * leeway * (1.0 - a)));
      sol.pooling = PoolingSet(
          std::vector<Interval>{{0.0, sol.theta_m}, {sol.theta_m, 1.0}});
    } else {
      sol.regime = Regime::complete_pooling;
      sol.pooling = PoolingSet::all();
    }
  } else {
    if (leeway > th.ell_b_prime) {
      sol.regime = Regime::lower_censorship;
      sol.theta_l = gamma * (-b - leeway);
      sol.pooling = PoolingSet::of(0.0, sol.theta_l);
    } else {
      sol.regime = Regime::complete_pooling;
      sol.pooling = PoolingSet::all();
    }
  }
  sol.boundary = tie;
  if (th.reflected) sol = reflect_solution(sol);

  // Conditional pool means under the uniform prior, read off the final set.
  sol.m_low = kNan;
  sol.m_high = kNan;
  for (const Interval& iv : sol.pooling.intervals()) {
    const double mid = 0.5 * (iv.lo + iv.hi);
    if (iv.lo <= 1e-15) {
      sol.m_low = mid;
    } else {
      sol.m_high = mid;
    }
  }

  const PosteriorPayoff payoff(model, leeway);
  sol.value = pooling_value(Prior::uniform(), payoff, sol.pooling);
  return sol;
}

// ---------------------------------------------------------------------------
// Worst stationary values
// ---------------------------------------------------------------------------

double receiver_worst(const QuadraticModel& model, const Prior& prior,
                      double lo, double hi) {
  const double pooled = model.rho_r(prior.mean(lo, hi));
  return 0.5 * model.c() * pooled * pooled;
}

std::string to_string(PenalFamily f) {
  return f == PenalFamily::minus_side ? "minus" : "plus";
}

double penal_family_value(const QuadraticModel& model, const Prior& prior,
                          double leeway, PenalFamily family, double t,
                          double lo, double hi) {
  if (!(hi > lo))
    throw std::invalid_argument("penal cell must have positive width");
  t = std::clamp(t, lo, hi);
  const double cell_mass = prior.mass(lo, hi);
  const double slope = 1.0 - model.a() * model.c();
  std::vector<double> breaks = prior.edges();
  breaks.push_back(t);
  if (family == PenalFamily::minus_side) {
    const bool pooled = t > lo;
    const double pooled_decision =
        model.rho_r(pooled ? prior.mean(lo, t) : lo) - leeway;
    const auto decision = [&](double s) {
      return s < t ? pooled_decision : model.rho_r(s) - leeway;
    };
    const double integral = integrate_split(
        [&](double s) {
          return decision(s) * (1.0 - prior.mass(lo, s) / cell_mass);
        },
        lo, hi, breaks, 1);
    return model.u_sender(decision(lo), lo) + slope * integral;
  }
  const bool pooled = t < hi;
  const double pooled_decision =
      model.rho_r(pooled ? prior.mean(t, hi) : hi) + leeway;
  const auto decision = [&](double s) {
    return s > t ? pooled_decision : model.rho_r(s) + leeway;
  };
  const double integral = integrate_split(
      [&](double s) { return decision(s) * (prior.mass(lo, s) / cell_mass); },
      lo, hi, breaks, 1);
  return model.u_sender(decision(hi), hi) - slope * integral;
}

namespace {

/// Threshold of the bottom-pool penal scheme for the uniform prior on [0,1]:
/// the stationarity condition is the quadratic
///   (1-ac) t^2 - a(1-c) t + 2Q = 0,  Q = -bc - (1-c)(b - leeway),
/// whose larger root is the interior minimum when it exists; otherwise the
/// minimum sits at the corner t = 0 (no pooling).
double penal_threshold_uniform(double a, double b, double c, double leeway) {
  const double oac = 1.0 - a * c;
  const double q = -b * c - (1.0 - c) * (b - leeway);
  const double lhs = oac * q / (a * a);
  const double rhs = 3.0 / 32.0 * (1.0 - c) * (1.0 - c);
  const double disc = (1.0 - c) * (1.0 - c) - 8.0 * oac * q / (a * a);
  if (lhs <= rhs && disc >= 0.0 && std::fabs(oac) > 1e-14) {
    return a * ((1.0 - c) + std::sqrt(disc)) / (2.0 * oac);
  }
  return 0.0;
}

}  // namespace

PenalResult sender_worst_family(const QuadraticModel& model,
                                const Prior& prior, double leeway,
                                PenalFamily family, double lo, double hi) {
  if (!(hi > lo))
    throw std::invalid_argument("penal cell must have positive width");
  const int kGrid = 1000;
  const double width = hi - lo;
  const auto value_at = [&](double t) {
    return penal_family_value(model, prior, leeway, family, t, lo, hi);
  };
  int best_k = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double v = value_at(lo + width * k / kGrid);
    if (v < best_v) {
      best_v = v;
      best_k = k;
    }
  }
  double t_best = lo + width * best_k / kGrid;
  const double t_lo = lo + width * std::max(0, best_k - 1) / kGrid;
  const double t_hi = lo + width * std::min(kGrid, best_k + 1) / kGrid;
  const double t_ref = golden_min(value_at, t_lo, t_hi);
  const double v_ref = value_at(t_ref);
  if (v_ref < best_v) {
    best_v = v_ref;
    t_best = t_ref;
  }
  PenalResult out;
  out.family = family;
  out.lo = lo;
  out.hi = hi;
  out.threshold = t_best;
  out.value = best_v;
  if (family == PenalFamily::minus_side) {
    const bool pooled = t_best > lo;
    out.pooled_mean = pooled ? prior.mean(lo, t_best) : kNan;
    out.pooling = pooled ? PoolingSet::of(lo, t_best) : PoolingSet::none();
  } else {
    const bool pooled = t_best < hi;
    out.pooled_mean = pooled ? prior.mean(t_best, hi) : kNan;
    out.pooling = pooled ? PoolingSet::of(t_best, hi) : PoolingSet::none();
  }
  return out;
}

PenalResult sender_worst_on(const QuadraticModel& model, const Prior& prior,
                            double leeway, double lo, double hi) {
  PenalResult best;
  bool have = false;
  for (PenalFamily family :
       {PenalFamily::minus_side, PenalFamily::plus_side}) {
    PenalResult cand =
        sender_worst_family(model, prior, leeway, family, lo, hi);
    if (!have || cand.value < best.value) {
      have = true;
      best = std::move(cand);
    }
  }

  if (prior.is_uniform() && lo == 0.0 && hi == 1.0) {
    // The top-pool family is the bottom-pool family of the mirrored payoffs.
    const double t_tilde =
        best.family == PenalFamily::minus_side
            ? penal_threshold_uniform(model.a(), model.b(), model.c(), leeway)
            : penal_threshold_uniform(model.a(), 1.0 - model.a() - model.b(),
                                      model.c(), leeway);
    const bool in_range = t_tilde >= 0.0 && t_tilde < 1.0;
    const double cf = best.family == PenalFamily::minus_side ? t_tilde
                                                             : 1.0 - t_tilde;
    best.closed_form_threshold = cf;
    best.closed_form_in_range = in_range;
    if (in_range) {
      best.closed_form_value = penal_family_value(model, prior, leeway,
                                                  best.family, cf, lo, hi);
      best.disagreement =
          std::fabs(best.closed_form_value - best.value) > 1e-3;
      if (best.disagreement) {
        best.note = "closed-form value " + fmt(best.closed_form_value) +
                    " (t=" + fmt(cf) + ") differs from grid value " +
                    fmt(best.value) + "; grid is authoritative";
      } else {
        best.note = "closed-form threshold " + fmt(cf) +
                    " matches grid value " + fmt(best.value);
      }
    } else {
      best.closed_form_value = kNan;
      best.disagreement = true;
      best.note = "closed-form threshold " + fmt(cf) +
                  " lies outside the valid range; grid minimum " +
                  fmt(best.value) + " at t=" + fmt(best.threshold) +
                  " is authoritative";
    }
  }
  return best;
}

PenalResult sender_worst(const QuadraticModel& model, const Prior& prior,
                         double leeway) {
  return sender_worst_on(model, prior, leeway, 0.0, 1.0);
}

double penal_decision(const QuadraticModel& model, double leeway,
                      const PenalResult& penal, double theta) {
  if (penal.family == PenalFamily::minus_side) {
    if (penal.threshold > penal.lo && theta < penal.threshold) {
      return model.rho_r(penal.pooled_mean) - leeway;
    }
    return model.rho_r(theta) - leeway;
  }
  if (penal.threshold < penal.hi && theta > penal.threshold) {
    return model.rho_r(penal.pooled_mean) + leeway;
  }
  return model.rho_r(theta) + leeway;
}

// ---------------------------------------------------------------------------
// Self-consistent leeway
// ---------------------------------------------------------------------------

PoolingSolution optimal_for(const QuadraticModel& model, const Prior& prior,
                            double leeway) {
  const PosteriorPayoff payoff(model, leeway);
  return optimal_pooling(prior, payoff);
}

ValueTriple values_at(const QuadraticModel& model, const Prior& prior,
                      double leeway) {
  ValueTriple t;
  t.v_bar = optimal_for(model, prior, leeway).value;
  t.v_s_min = sender_worst(model, prior, leeway).value;
  t.v_r_min = receiver_worst(model, prior);
  return t;
}

FixedPointResult solve_fixed_point_values(
    const QuadraticModel& model, const Prior& prior,
    const std::function<ValueTriple(double)>& values) {
  FixedPointResult r;
  const double c = model.c();
  const double delta = model.delta();
  const auto fill = [&](double ell) {
    const ValueTriple t = values(ell);
    r.v_bar = t.v_bar;
    r.v_s_min = t.v_s_min;
    r.v_r_min = t.v_r_min;
    r.surplus = t.surplus();
  };
  if (delta == 0.0) {
    r.leeway = 0.0;
    r.converged = true;
    fill(0.0);
    return r;
  }
  const auto g = [&](double ell) {
    return leeway_from_surplus(c, delta, values(ell).surplus()) - ell;
  };

  // When the sender's floor falls only linearly in the band width (c = 1)
  // the largest fixed point scales like delta/(1-delta) and can sit far
  // above the myopic scale, so the upper bracket doubles until the update
  // map crosses from above or a hard cap is reached. Superlinear surplus
  // growth (c < 1 with a wide band) never crosses: that is genuine
  // divergence and is reported as such.
  constexpr double kBracketCap = 1e9;
  double hi = std::sqrt(delta / (1.0 - delta) * prior.second_moment() / c) +
              1.0;
  double g_hi = g(hi);
  while (g_hi > 0.0 && hi < kBracketCap) {
    hi *= 2.0;
    g_hi = g(hi);
  }
  if (g_hi > 0.0) {
    r.leeway = hi;
    r.converged = false;
    r.bracket_hi = hi;
    fill(hi);
    r.message = "no self-consistent leeway below " + fmt(hi) +
                ": the surplus keeps outgrowing the band it sustains";
    return r;
  }

  // Rightmost coarse node where the update still points outward; the largest
  // fixed point lies between it and the next node.
  const int kScan = 128;
  double blo = 0.0;
  double bhi = hi;
  for (int i = kScan - 1; i >= 1; --i) {
    const double x = hi * i / kScan;
    if (g(x) >= 0.0) {
      blo = x;
      bhi = hi * (i + 1) / kScan;
      break;
    }
    bhi = x;
  }
  r.bracket_lo = blo;
  r.bracket_hi = bhi;

  double root = blo;
  int used = 0;
  if (g(blo) > 0.0) {
    double a0 = blo;
    double b0 = bhi;
    for (; used < 200 && (b0 - a0) > 1e-12; ++used) {
      const double mid = 0.5 * (a0 + b0);
      if (g(mid) >= 0.0) {
        a0 = mid;
      } else {
        b0 = mid;
      }
    }
    root = a0;
  }
  r.leeway = root;
  r.iterations = used;
  const double residual = g(root);
  r.converged = std::fabs(residual) < 1e-10;
  if (!r.converged) {
    r.message = "fixed-point residual " + fmt(residual) +
                " exceeds tolerance after " + fmt(used) + " bisection steps";
  }
  fill(root);
  return r;
}

FixedPointResult solve_fixed_point(const QuadraticModel& model,
                                   const Prior& prior) {
  FixedPointResult r = solve_fixed_point_values(
      model, prior,
      [&](double ell) { return values_at(model, prior, ell); });
  r.solution = optimal_for(model, prior, r.leeway);
  return r;
}

double delta_for_leeway(const QuadraticModel& model, const Prior& prior,
                        double leeway) {
  if (!(leeway >= 0.0) || !std::isfinite(leeway))
    throw std::invalid_argument("leeway must be nonnegative and finite");
  if (leeway == 0.0) return 0.0;
  const double s = values_at(model, prior, leeway).surplus();
  if (!(s > 0.0)) return kNan;
  const double x = model.c() * leeway * leeway / (2.0 * s);
  return x / (1.0 + x);
}

}  // namespace relcomm
