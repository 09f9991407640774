#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "relcomm/model.hpp"
#include "relcomm/persuasion.hpp"
#include "relcomm/pooling.hpp"
#include "relcomm/prior.hpp"
#include "relcomm/transforms.hpp"

using namespace relcomm;

namespace {
bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }

PoolingSet random_pooling(std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> cuts(6);
  for (double& c : cuts) c = unif(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> ivs;
  for (int k = 0; k < 3; ++k) {
    if (cuts[2 * k + 1] - cuts[2 * k] > 1e-3) {
      ivs.push_back(Interval{cuts[2 * k], cuts[2 * k + 1]});
    }
  }
  return PoolingSet(ivs);
}

double tangency_residual(const PosteriorPayoff& u, double m, double t) {
  return u.value(m) + u.deriv(m) * (t - m) - u.value(t);
}
}  // namespace

TEST_CASE("indirect payoff branches and clamped decisions", "[payoff]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const PosteriorPayoff u(m, 0.35);
  REQUIRE(u.breakpoints().size() == 2);
  REQUIRE(near(u.breakpoints()[0], 0.425, 1e-12));
  REQUIRE(near(u.breakpoints()[1], 0.775, 1e-12));
  REQUIRE(u.curvature_pattern() == "-+-");

  const PosteriorPayoff mid(m, 1.0);
  REQUIRE(mid.curvature_pattern() == "-+");  // upper crossing exits [0,1]
  const PosteriorPayoff wide(m, 1.25);
  REQUIRE(wide.curvature_pattern() == "+");  // band covers every bias

  const PosteriorPayoff tight(m, 0.2);
  REQUIRE(near(tight.decision(0.2), -0.4, 1e-14));  // clamped up to the band
  REQUIRE(near(tight.decision(0.5), 0.5, 1e-14));   // first-best inside
  REQUIRE(near(tight.decision(0.9), 1.3, 1e-14));   // clamped down
  REQUIRE(near(mid.value(0.5), 0.125, 1e-14));      // interior: t^2/2
  REQUIRE(near(mid.value(0.0), -0.02, 1e-14));      // d = -0.2 at the edge

  // Low-responsiveness model is convex on the extreme branches.
  const QuadraticModel flat(1.5, -0.5, 0.5, 0.0);
  const PosteriorPayoff uf(flat, 0.1);
  REQUIRE(uf.curvature_pattern().find('-') == std::string::npos);
}

TEST_CASE("indirect payoff is C1 with consistent derivatives", "[payoff]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  for (double ell : {0.35, 0.7, 1.0}) {
    const PosteriorPayoff u(m, ell);
    for (double bp : u.breakpoints()) {
      REQUIRE(near(u.value(bp - 1e-8), u.value(bp + 1e-8), 1e-7));
      REQUIRE(near(u.deriv(bp - 1e-8), u.deriv(bp + 1e-8), 1e-6));
    }
    for (double t : {0.1, 0.3, 0.5, 0.85}) {
      // Difference quotients are only clean strictly inside a branch.
      bool near_break = false;
      for (double bp : u.breakpoints()) {
        if (std::abs(t - bp) < 1e-2) near_break = true;
      }
      if (near_break) continue;
      const double h = 1e-6;
      const double fd = (u.value(t + h) - u.value(t - h)) / (2.0 * h);
      REQUIRE(near(u.deriv(t), fd, 1e-8));
      const double fd2 =
          (u.value(t + h) - 2.0 * u.value(t) + u.value(t - h)) / (h * h);
      REQUIRE(near(u.second(t), fd2, 1e-3));
    }
  }
}

TEST_CASE("pooling values against hand-computed expectations", "[pooling]") {
  // With a = 1/2, b = 0, c = 1 and a wide band the decision is first-best,
  // so the indirect payoff is t^2/2 exactly.
  const QuadraticModel m(0.5, 0.0, 1.0, 0.0);
  const PosteriorPayoff u(m, 0.5);
  const Prior prior = Prior::uniform();
  REQUIRE(near(pooling_value(prior, u, PoolingSet::none()), 1.0 / 6.0,
               1e-12));
  REQUIRE(near(pooling_value(prior, u, PoolingSet::all()), 0.125, 1e-12));
  REQUIRE(near(pooling_value(prior, u, PoolingSet::of(0.0, 0.5)),
               0.5 * 0.03125 + (1.0 - 0.125) / 6.0, 1e-12));

  // Slice additivity when no pool straddles the cut.
  const PoolingSet p({Interval{0.1, 0.4}, Interval{0.6, 0.9}});
  const double whole = pooling_value(prior, u, p);
  REQUIRE(near(pooling_value_on(prior, u, p, 0.0, 0.5) +
                   pooling_value_on(prior, u, p, 0.5, 1.0),
               whole, 1e-12));
  REQUIRE(near(pooling_value_on(prior, u, p, 0.0, 1.0), whole, 1e-15));
}

TEST_CASE("one-sided censorship matches its tangency condition", "[solve]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const Prior prior = Prior::uniform();
  const PosteriorPayoff u(m, 1.0);
  const PoolingSolution sol = optimal_pooling(prior, u);
  REQUIRE(sol.regime == Regime::lower_censorship);
  REQUIRE(near(sol.theta_l, 0.17637079407904466, 1e-9));
  REQUIRE(near(sol.m_low, 0.08818539703952233, 1e-9));
  REQUIRE(sol.pooling.size() == 1);
  REQUIRE(near(sol.pooling.intervals()[0].hi, sol.theta_l, 1e-12));
  REQUIRE(near(tangency_residual(u, sol.m_low, sol.theta_l), 0.0, 1e-10));
  REQUIRE(near(sol.value, pooling_value(prior, u, sol.pooling), 1e-12));

  // The pooled-threshold identity theta*_L = (a-1) gamma theta^L, with
  // theta^L the lower band crossing, holds across the one-sided regime and
  // the pool strictly overshoots the crossing.
  const double root = std::sqrt(3.0);
  const double gamma = 2.0 * (2.0 * 2.0 + root) / (3.0 * 4.0 + 1.0);
  for (double ell : {0.85, 0.95, 1.05, 1.15}) {
    const PosteriorPayoff ue(m, ell);
    const PoolingSolution se = optimal_pooling(prior, ue);
    REQUIRE(se.regime == Regime::lower_censorship);
    const double theta_low = (-ell - m.b()) / (m.a() - 1.0);
    REQUIRE(near(se.theta_l, (m.a() - 1.0) * gamma * theta_low, 1e-9));
    REQUIRE(se.theta_l > theta_low);
  }
}

TEST_CASE("two-sided censorship splits at both tangencies", "[solve]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const Prior prior = Prior::uniform();
  const PosteriorPayoff u(m, 0.6);
  const PoolingSolution sol = optimal_pooling(prior, u);
  REQUIRE(sol.regime == Regime::two_sided_censorship);
  REQUIRE(near(sol.theta_l, 0.52911238223712687, 1e-9));
  REQUIRE(near(sol.theta_h, 0.82362920592095534, 1e-9));
  REQUIRE(near(tangency_residual(u, sol.m_low, sol.theta_l), 0.0, 1e-10));
  REQUIRE(near(tangency_residual(u, sol.m_high, sol.theta_h), 0.0, 1e-10));

  // Pool means bracket the convex stretch: m_L < lower crossing of the
  // band, m_H above the upper crossing.
  const double theta_lo = u.breakpoints()[0];
  const double theta_hi = u.breakpoints()[1];
  REQUIRE(near(theta_lo, 0.3, 1e-12));
  REQUIRE(near(theta_hi, 0.9, 1e-12));
  REQUIRE(sol.m_low < theta_lo);
  REQUIRE(theta_lo < sol.theta_l);
  REQUIRE(sol.theta_l < sol.theta_h);
  REQUIRE(sol.theta_h < theta_hi);
  REQUIRE(sol.m_high > theta_hi);
}

TEST_CASE("binary split solves the chord indifference", "[solve]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const Prior prior = Prior::uniform();
  const PosteriorPayoff u(m, 0.35);
  const PoolingSolution sol = optimal_pooling(prior, u);
  REQUIRE(sol.regime == Regime::binary_split);
  REQUIRE(near(sol.theta_m, (3.0 + 16.0 * (-1.2) * 0.35) /
                                (2.0 * (3.0 + 8.0 * 0.35 * (1.0 - 3.0))),
               1e-9));
  REQUIRE(near(sol.m_low, sol.theta_m / 2.0, 1e-9));
  REQUIRE(near(sol.m_high, (1.0 + sol.theta_m) / 2.0, 1e-9));
  const double lhs = u.value(sol.m_low) +
                     u.deriv(sol.m_low) * (sol.theta_m - sol.m_low);
  const double rhs = u.value(sol.m_high) +
                     u.deriv(sol.m_high) * (sol.theta_m - sol.m_high);
  REQUIRE(near(lhs, rhs, 1e-10));
  // Beats one full pool.
  REQUIRE(sol.value >= u.value(0.5) - 1e-12);
}

TEST_CASE("myopic band collapses to the curvature dichotomy", "[solve]") {
  const Prior prior = Prior::uniform();
  {
    const QuadraticModel steep(3.0, -1.2, 1.0, 0.0);
    const PoolingSolution sol =
        optimal_pooling(prior, PosteriorPayoff(steep, 0.0));
    REQUIRE(sol.regime == Regime::complete_pooling);
    REQUIRE(near(sol.value, PosteriorPayoff(steep, 0.0).value(0.5), 1e-12));
  }
  {
    const QuadraticModel shallow(1.5, -0.5, 0.5, 0.0);
    const PoolingSolution sol =
        optimal_pooling(prior, PosteriorPayoff(shallow, 0.0));
    REQUIRE(sol.regime == Regime::full_separation);
    REQUIRE(sol.pooling.empty());
  }
}

TEST_CASE("solutions are optimal against random pooling sets",
          "[solve][property]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const Prior prior = Prior::uniform();
  std::mt19937 rng(77041u);
  for (double ell : {1.0, 0.6, 0.35, 0.2}) {
    const PosteriorPayoff u(m, ell);
    const PoolingSolution sol = optimal_pooling(prior, u);
    for (int rep = 0; rep < 250; ++rep) {
      const PoolingSet candidate = random_pooling(rng);
      REQUIRE(pooling_value(prior, u, candidate) <= sol.value + 1e-9);
    }
  }
}

TEST_CASE("integration by parts agrees with direct pooling values",
          "[solve]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const Prior prior = Prior::uniform();
  const PosteriorPayoff u(m, 0.6);
  const auto g = [&u](double t) { return u.value(t); };
  const auto dg = [&u](double t) { return u.deriv(t); };
  const auto d2g = [&u](double t) { return u.second(t); };
  std::mt19937 rng(90121u);
  for (int rep = 0; rep < 20; ++rep) {
    const PoolingSet p = random_pooling(rng);
    const double direct = pooling_value(prior, u, p);
    const double via_ibp =
        ibp_expected_value(prior, p, g, dg, d2g, 2000, u.breakpoints());
    REQUIRE(near(direct, via_ibp, 1e-6));
  }
}

TEST_CASE("reflected models mirror their solutions", "[solve]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const QuadraticModel r = m.reflected();  // b' = 1 - a - b = -0.8
  REQUIRE(near(r.b(), -0.8, 1e-15));
  const Prior prior = Prior::uniform();
  for (double ell : {1.0, 0.6, 0.35, 0.18}) {
    const PoolingSolution sol = optimal_pooling(prior, PosteriorPayoff(m, ell));
    const PoolingSolution mir = optimal_pooling(prior, PosteriorPayoff(r, ell));
    REQUIRE(near(sol.value, mir.value, 1e-9));
    REQUIRE(near(sol.pooling.measure(), mir.pooling.measure(), 1e-8));
    REQUIRE(near(
        sol.pooling.symmetric_difference(mir.pooling.reflected()), 0.0, 1e-8));
  }
  // At ell = 1 the mirrored problem pools at the top instead of the bottom.
  const PoolingSolution mir = optimal_pooling(prior, PosteriorPayoff(r, 1.0));
  REQUIRE(mir.regime == Regime::upper_censorship);
  REQUIRE(near(mir.theta_h, 1.0 - 0.17637079407904466, 1e-9));
  REQUIRE(near(mir.m_high, 1.0 - 0.08818539703952233, 1e-9));
}

TEST_CASE("concave majorant of sampled payoffs", "[concavify]") {
  // Convex parabola: the majorant is the chord through the endpoints.
  {
    std::vector<double> x(11), y(11);
    for (int i = 0; i < 11; ++i) {
      x[i] = i / 10.0;
      y[i] = x[i] * x[i];
    }
    const std::vector<double> h = concavify(x, y);
    for (int i = 0; i < 11; ++i) REQUIRE(near(h[i], x[i], 1e-14));
  }
  // Concave function: unchanged.
  {
    std::vector<double> x(11), y(11);
    for (int i = 0; i < 11; ++i) {
      x[i] = i / 10.0;
      y[i] = std::sqrt(x[i]);
    }
    const std::vector<double> h = concavify(x, y);
    for (int i = 0; i < 11; ++i) REQUIRE(near(h[i], y[i], 1e-14));
  }
  // Tent function on 1000 nodes: already its own majorant, peak plateau at
  // the two nodes flanking 1/2.
  {
    std::vector<double> x(1000), y(1000);
    for (int i = 0; i < 1000; ++i) {
      x[i] = i / 999.0;
      y[i] = std::min(x[i], 1.0 - x[i]);
    }
    const std::vector<double> h = concavify(x, y);
    for (int i = 0; i < 1000; ++i) REQUIRE(near(h[i], y[i], 1e-12));
    REQUIRE(near(h[499], 499.0 / 999.0, 1e-12));
    REQUIRE(near(h[500], 499.0 / 999.0, 1e-12));
  }
  // Wiggly function vs the brute-force best chord at every node.
  {
    const int n = 17;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = i / 16.0;
      y[i] = std::sin(7.0 * x[i]) + 0.3 * x[i];
    }
    const std::vector<double> h = concavify(x, y);
    for (int i = 0; i < n; ++i) {
      double best = y[i];
      for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
          if (x[p] <= x[i] && x[i] <= x[q]) {
            const double t = (x[i] - x[p]) / (x[q] - x[p]);
            best = std::max(best, y[p] + t * (y[q] - y[p]));
          }
        }
      }
      REQUIRE(near(h[i], best, 1e-12));
    }
  }
  REQUIRE_THROWS_AS(concavify({0.0}, {1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(concavify({0.0, 1.0}, {1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(concavify({0.0, 0.0, 1.0}, {1.0, 2.0, 3.0}),
                    std::invalid_argument);
}

TEST_CASE("optimal value never exceeds the concavified payoff at the mean",
          "[concavify][solve]") {
  const Prior prior = Prior::uniform();
  for (double ell : {1.0, 0.6, 0.35, 0.2, 0.0}) {
    const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
    const PosteriorPayoff u(m, ell);
    const int n = 2001;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = i / 2000.0;
      y[i] = u.value(x[i]);
    }
    const std::vector<double> hull = concavify(x, y);
    const double cap = hull[1000];  // node at the prior mean 1/2
    const PoolingSolution sol = optimal_pooling(prior, u);
    REQUIRE(sol.value <= cap + 2e-6);
    // Complete pooling attains the cap exactly when the payoff is concave.
    if (sol.regime == Regime::complete_pooling && ell == 0.0) {
      REQUIRE(near(sol.value, u.value(0.5), 1e-12));
    }
  }
}
