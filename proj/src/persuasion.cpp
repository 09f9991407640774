#include "relcomm/persuasion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relcomm/numeric.hpp"

namespace relcomm {

// ---------------------------------------------------------------------------
// PosteriorPayoff
// ---------------------------------------------------------------------------

PosteriorPayoff::PosteriorPayoff(const QuadraticModel& model, double leeway)
    : model_(model), leeway_(leeway) {
  if (!(leeway >= 0.0) || !std::isfinite(leeway)) {
    throw std::invalid_argument("payoff: leeway must be nonnegative");
  }
  const double a = model_.a(), b = model_.b();
  if (a != 1.0) {
    // Crossings of bias = -leeway and bias = +leeway.
    theta_lo_ = (-leeway - b) / (a - 1.0);
    theta_hi_ = (leeway - b) / (a - 1.0);
    for (double t : {std::min(theta_lo_, theta_hi_),
                     std::max(theta_lo_, theta_hi_)}) {
      if (t > 0.0 && t < 1.0) {
        if (breaks_.empty() || t > breaks_.back()) breaks_.push_back(t);
      }
    }
  }
}

double PosteriorPayoff::decision(double m) const {
  const double center = model_.rho_r(m);
  return std::clamp(m, center - leeway_, center + leeway_);
}

double PosteriorPayoff::value(double m) const {
  const double d = decision(m);
  return model_.u_total(d, m);
}

double PosteriorPayoff::deriv(double m) const {
  const double beta = model_.bias(m);
  const double a = model_.a(), b = model_.b();
  if (beta < -leeway_) {
    // Decision pinned to the upper band edge a m + b + leeway.
    return a * (2.0 - a) * m + (1.0 - a) * (b + leeway_);
  }
  if (beta > leeway_) {
    return a * (2.0 - a) * m + (1.0 - a) * (b - leeway_);
  }
  return m;
}

double PosteriorPayoff::second(double m) const {
  const double beta = model_.bias(m);
  if (beta < -leeway_ || beta > leeway_) {
    const double a = model_.a();
    return a * (2.0 - a);
  }
  return 1.0;
}

std::string PosteriorPayoff::curvature_pattern() const {
  std::string pattern;
  double prev = 0.0;
  for (std::size_t i = 0; i <= breaks_.size(); ++i) {
    const double next = (i == breaks_.size()) ? 1.0 : breaks_[i];
    const double s = second(0.5 * (prev + next));
    pattern.push_back(s < 0.0 ? '-' : '+');
    prev = next;
  }
  return pattern;
}

// ---------------------------------------------------------------------------
// Values of pooling sets
// ---------------------------------------------------------------------------

namespace {

/// \int_lo^hi payoff(t) f(t) dt with exact splits at the payoff kinks and the
/// prior cell edges (the integrand is piecewise cubic there).
double separated_value_on(const Prior& prior, const PosteriorPayoff& payoff,
                          double lo, double hi) {
  if (hi <= lo) return 0.0;
  std::vector<double> breaks = payoff.breakpoints();
  for (double e : prior.edges()) breaks.push_back(e);
  return integrate_split(
      [&](double t) { return payoff.value(t) * prior.density(t); }, lo, hi,
      breaks, 1);
}

}  // namespace

double pooling_value_on(const Prior& prior, const PosteriorPayoff& payoff,
                        const PoolingSet& pooling, double lo, double hi) {
  double acc = 0.0;
  double pos = lo;
  for (const Interval& pool : pooling.intervals()) {
    if (pool.hi <= lo || pool.lo >= hi) continue;
    const double plo = std::max(pool.lo, lo);
    const double phi = std::min(pool.hi, hi);
    acc += separated_value_on(prior, payoff, pos, plo);
    const double m = prior.mass(plo, phi);
    if (m > 0.0) acc += m * payoff.value(prior.mean(plo, phi));
    pos = phi;
  }
  acc += separated_value_on(prior, payoff, pos, hi);
  return acc;
}

double pooling_value(const Prior& prior, const PosteriorPayoff& payoff,
                     const PoolingSet& pooling) {
  return pooling_value_on(prior, payoff, pooling, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Candidate search
// ---------------------------------------------------------------------------

namespace {

constexpr int kScanPoints = 512;

/// Roots of r on (0,1), located by a sign-change scan plus bisection. The
/// scan grid is augmented with the payoff kinks so brackets never straddle a
/// spurious discontinuity in r'.
std::vector<double> scan_roots(const std::function<double(double)>& r,
                               const std::vector<double>& kinks) {
  std::vector<double> grid;
  grid.reserve(kScanPoints + kinks.size() + 1);
  for (int i = 1; i < kScanPoints; ++i) {
    grid.push_back(static_cast<double>(i) / kScanPoints);
  }
  for (double k : kinks) {
    if (k > 0.0 && k < 1.0) grid.push_back(k);
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> roots;
  double prev_x = grid.front();
  double prev_v = r(prev_x);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x = grid[i];
    const double v = r(x);
    if (v == 0.0) {
      roots.push_back(x);
    } else if (prev_v != 0.0 && (v > 0.0) != (prev_v > 0.0)) {
      roots.push_back(bisect(r, prev_x, x));
    }
    prev_x = x;
    prev_v = v;
  }
  return roots;
}

/// Tangency residual for a bottom pool [0,t): the tangent to the payoff at
/// the pooled mean, extended to t, minus the payoff at t. The derivative of
/// the pooled value in t is the prior density times this residual.
double bottom_residual(const Prior& prior, const PosteriorPayoff& payoff,
                       double t) {
  const double m = prior.mean(0.0, t);
  return payoff.value(m) + payoff.deriv(m) * (t - m) - payoff.value(t);
}

/// Tangency residual for a top pool (s,1].
double top_residual(const Prior& prior, const PosteriorPayoff& payoff,
                    double s) {
  const double m = prior.mean(s, 1.0);
  return payoff.value(m) + payoff.deriv(m) * (s - m) - payoff.value(s);
}

/// Indifference residual for a binary split [0,t) | [t,1]: the two tangents
/// extended to the split point must meet.
double split_residual(const Prior& prior, const PosteriorPayoff& payoff,
                      double t) {
  const double ml = prior.mean(0.0, t);
  const double mh = prior.mean(t, 1.0);
  const double low = payoff.value(ml) + payoff.deriv(ml) * (t - ml);
  const double high = payoff.value(mh) + payoff.deriv(mh) * (t - mh);
  return low - high;
}

struct Candidate {
  PoolingSet pooling;
  double value;
  Regime regime;
  double theta_l, theta_h, theta_m;
};

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Candidate make_candidate(const Prior& prior, const PosteriorPayoff& payoff,
                         PoolingSet pooling, Regime regime, double theta_l,
                         double theta_h, double theta_m) {
  const double v = pooling_value(prior, payoff, pooling);
  return Candidate{std::move(pooling), v, regime, theta_l, theta_h, theta_m};
}

PoolingSolution pick_best(const Prior& prior,
                          const std::vector<Candidate>& candidates) {
  const Candidate* best = &candidates.front();
  for (const Candidate& c : candidates) {
    if (c.value > best->value) best = &c;
  }
  PoolingSolution sol;
  sol.pooling = best->pooling;
  sol.value = best->value;
  sol.regime = best->regime;
  sol.theta_l = best->theta_l;
  sol.theta_h = best->theta_h;
  sol.theta_m = best->theta_m;
  if (!std::isnan(best->theta_l) && best->theta_l > 0.0) {
    sol.m_low = prior.mean(0.0, best->theta_l);
  }
  if (!std::isnan(best->theta_h) && best->theta_h < 1.0) {
    sol.m_high = prior.mean(best->theta_h, 1.0);
  }
  if (!std::isnan(best->theta_m)) {
    sol.m_low = prior.mean(0.0, best->theta_m);
    sol.m_high = prior.mean(best->theta_m, 1.0);
  }
  return sol;
}

}  // namespace

PoolingSolution solve_one_inflection(const Prior& prior,
                                     const PosteriorPayoff& payoff) {
  std::vector<Candidate> candidates;
  candidates.push_back(make_candidate(prior, payoff, PoolingSet::none(),
                                      Regime::full_separation, kNan, kNan,
                                      kNan));
  candidates.push_back(make_candidate(prior, payoff, PoolingSet::all(),
                                      Regime::complete_pooling, kNan, kNan,
                                      kNan));
  const auto roots = scan_roots(
      [&](double t) { return bottom_residual(prior, payoff, t); },
      payoff.breakpoints());
  for (double t : roots) {
    candidates.push_back(make_candidate(prior, payoff, PoolingSet::of(0.0, t),
                                        Regime::lower_censorship, t, kNan,
                                        kNan));
  }
  return pick_best(prior, candidates);
}

PoolingSolution solve_two_inflection(const Prior& prior,
                                     const PosteriorPayoff& payoff) {
  std::vector<Candidate> candidates;
  candidates.push_back(make_candidate(prior, payoff, PoolingSet::none(),
                                      Regime::full_separation, kNan, kNan,
                                      kNan));
  candidates.push_back(make_candidate(prior, payoff, PoolingSet::all(),
                                      Regime::complete_pooling, kNan, kNan,
                                      kNan));
  const auto low_roots = scan_roots(
      [&](double t) { return bottom_residual(prior, payoff, t); },
      payoff.breakpoints());
  const auto high_roots = scan_roots(
      [&](double s) { return top_residual(prior, payoff, s); },
      payoff.breakpoints());
  const auto split_roots = scan_roots(
      [&](double t) { return split_residual(prior, payoff, t); },
      payoff.breakpoints());
  for (double t : low_roots) {
    candidates.push_back(make_candidate(prior, payoff, PoolingSet::of(0.0, t),
                                        Regime::lower_censorship, t, kNan,
                                        kNan));
  }
  for (double s : high_roots) {
    candidates.push_back(make_candidate(prior, payoff, PoolingSet::of(s, 1.0),
                                        Regime::upper_censorship, kNan, s,
                                        kNan));
  }
  for (double t : low_roots) {
    for (double s : high_roots) {
      if (t < s) {
        candidates.push_back(make_candidate(
            prior, payoff,
            PoolingSet(std::vector<Interval>{{0.0, t}, {s, 1.0}}),
            Regime::two_sided_censorship, t, s, kNan));
      }
    }
  }
  for (double t : split_roots) {
    candidates.push_back(make_candidate(
        prior, payoff, PoolingSet(std::vector<Interval>{{0.0, t}, {t, 1.0}}),
        Regime::binary_split, kNan, kNan, t));
  }
  return pick_best(prior, candidates);
}

PoolingSolution reflect_solution(const PoolingSolution& sol) {
  PoolingSolution out = sol;
  out.pooling = sol.pooling.reflected();
  switch (sol.regime) {
    case Regime::lower_censorship:
      out.regime = Regime::upper_censorship;
      break;
    case Regime::upper_censorship:
      out.regime = Regime::lower_censorship;
      break;
    default:
      break;
  }
  out.theta_l = std::isnan(sol.theta_h) ? kNan : 1.0 - sol.theta_h;
  out.theta_h = std::isnan(sol.theta_l) ? kNan : 1.0 - sol.theta_l;
  out.theta_m = std::isnan(sol.theta_m) ? kNan : 1.0 - sol.theta_m;
  out.m_low = std::isnan(sol.m_high) ? kNan : 1.0 - sol.m_high;
  out.m_high = std::isnan(sol.m_low) ? kNan : 1.0 - sol.m_low;
  return out;
}

PoolingSolution optimal_pooling(const Prior& prior,
                                const PosteriorPayoff& payoff) {
  const std::string pattern = payoff.curvature_pattern();
  const bool any_concave = pattern.find('-') != std::string::npos;
  const bool any_convex = pattern.find('+') != std::string::npos;

  if (!any_concave) {
    // Convex throughout: revealing everything is optimal.
    PoolingSolution sol;
    sol.pooling = PoolingSet::none();
    sol.regime = Regime::full_separation;
    sol.value = pooling_value(prior, payoff, sol.pooling);
    return sol;
  }
  if (!any_convex) {
    PoolingSolution sol;
    sol.pooling = PoolingSet::all();
    sol.regime = Regime::complete_pooling;
    sol.value = pooling_value(prior, payoff, sol.pooling);
    sol.m_low = prior.mean();
    return sol;
  }
  if (pattern == "-+") {
    return solve_one_inflection(prior, payoff);
  }
  if (pattern == "+-") {
    // Solve the mirrored problem, then map the solution back and re-evaluate
    // its value against the original payoff (reflection changes the payoff
    // only by a term that is linear in the state, which no pooling affects).
    const PosteriorPayoff mirrored(payoff.model().reflected(),
                                   payoff.leeway());
    const Prior rprior = prior.reflected();
    PoolingSolution sol = reflect_solution(solve_one_inflection(rprior, mirrored));
    sol.value = pooling_value(prior, payoff, sol.pooling);
    if (!std::isnan(sol.theta_h) && sol.theta_h < 1.0) {
      sol.m_high = prior.mean(sol.theta_h, 1.0);
    }
    return sol;
  }
  // "-+-" (and, defensively, any other mixed pattern): enumerate the full
  // candidate family.
  return solve_two_inflection(prior, payoff);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::full_separation:
      return "full_separation";
    case Regime::lower_censorship:
      return "lower_censorship";
    case Regime::upper_censorship:
      return "upper_censorship";
    case Regime::two_sided_censorship:
      return "two_sided_censorship";
    case Regime::binary_split:
      return "binary_split";
    case Regime::complete_pooling:
      return "complete_pooling";
  }
  return "unknown";
}

std::vector<double> concavify(const std::vector<double>& x,
                              const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("concavify: size mismatch");
  if (n < 2) throw std::invalid_argument("concavify: need at least two nodes");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x[i] > x[i - 1])) {
      throw std::invalid_argument("concavify: x must be strictly increasing");
    }
  }
  // Upper convex hull via monotone chain: a kept vertex must turn clockwise.
  std::vector<std::size_t> hull;
  hull.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t p = hull[hull.size() - 2];
      const std::size_t q = hull[hull.size() - 1];
      const double cross = (x[q] - x[p]) * (y[i] - y[p]) -
                           (y[q] - y[p]) * (x[i] - x[p]);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 2 < hull.size() && x[hull[seg + 1]] < x[i]) ++seg;
    const std::size_t p = hull[seg];
    const std::size_t q = hull[seg + 1];
    const double t = (x[i] - x[p]) / (x[q] - x[p]);
    out[i] = y[p] + t * (y[q] - y[p]);
  }
  return out;
}

}  // namespace relcomm
