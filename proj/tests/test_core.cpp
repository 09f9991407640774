#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "relcomm/model.hpp"
#include "relcomm/pooling.hpp"
#include "relcomm/prior.hpp"
#include "relcomm/transforms.hpp"

using namespace relcomm;

namespace {
bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }
}  // namespace

TEST_CASE("model validates its parameters", "[model]") {
  REQUIRE_NOTHROW(QuadraticModel(3.0, -1.2, 1.0, 0.6));
  REQUIRE_NOTHROW(QuadraticModel(0.5, 0.0, 1.0, 0.0));
  REQUIRE_THROWS_AS(QuadraticModel(0.0, 0.0, 1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(QuadraticModel(-1.0, 0.0, 1.0, 0.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(QuadraticModel(2.0, 0.0, 0.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(QuadraticModel(2.0, 0.0, 1.01, 0.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(QuadraticModel(2.0, 0.0, -0.5, 0.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(QuadraticModel(2.0, 0.0, 1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(QuadraticModel(2.0, 0.0, 1.0, -0.1),
                    std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(QuadraticModel(2.0, inf, 1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(QuadraticModel(2.0, std::nan(""), 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("decision benchmarks and bias", "[model]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.6);
  REQUIRE(near(m.rho_r(0.5), 0.3, 1e-15));
  REQUIRE(near(m.rho_fb(0.5), 0.5, 1e-15));
  REQUIRE(near(m.bias(0.5), -0.2, 1e-15));
  REQUIRE(near(m.bias(0.6), 0.0, 1e-15));
  REQUIRE(near(m.rho_r(0.0), -1.2, 1e-15));
  REQUIRE_FALSE(m.sorting_ok());  // a*c = 3
  const QuadraticModel ok(2.5, -1.0, 0.3, 0.0);
  REQUIRE(ok.sorting_ok());  // a*c = 0.75
}

TEST_CASE("stage payoffs split the total", "[model]") {
  const QuadraticModel m(3.0, -1.2, 0.5, 0.0);
  REQUIRE(near(m.u_total(0.5, 0.5), 0.125, 1e-15));
  // Receiver best response at m=0.5 is rho_r=0.3 and earns (c/2) rho_r^2.
  REQUIRE(near(m.u_receiver(0.3, 0.5), 0.0225, 1e-15));
  for (double d : {-0.3, 0.0, 0.4, 0.9}) {
    for (double t : {0.0, 0.25, 0.7, 1.0}) {
      const StagePayoffs p = m.stage_payoffs(d, t);
      REQUIRE(near(p.sender + p.receiver, p.total, 1e-14));
      REQUIRE(near(p.total, m.u_total(d, t), 1e-15));
      REQUIRE(near(p.sender, m.u_sender(d, t), 1e-15));
    }
  }
}

TEST_CASE("temptation is the quadratic override gain", "[model]") {
  const QuadraticModel m(3.0, -1.2, 0.5, 0.0);
  REQUIRE(near(m.temptation(m.rho_r(0.5), 0.5), 0.0, 1e-15));
  REQUIRE(near(m.temptation(0.1, 0.5), 0.25 * 0.2 * 0.2, 1e-15));
  // Equals the receiver's gain from overriding d with rho_r(m).
  for (double d : {-0.5, 0.2, 1.1}) {
    for (double t : {0.1, 0.6}) {
      const double gain =
          m.u_receiver(m.rho_r(t), t) - m.u_receiver(d, t);
      REQUIRE(near(m.temptation(d, t), gain, 1e-14));
    }
  }
  const QuadraticModel s(2.0, 0.0, 1.0, 0.0);
  REQUIRE(near(s.sender_state_slope(2.0), (1.0 - 2.0) * 2.0, 1e-15));
}

TEST_CASE("reflection relabels the state", "[model]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.6);
  const QuadraticModel r = m.reflected();
  REQUIRE(near(r.a(), 3.0, 1e-15));
  REQUIRE(near(r.b(), 1.0 - 3.0 + 1.2, 1e-15));
  REQUIRE(near(r.c(), m.c(), 1e-15));
  REQUIRE(near(r.delta(), m.delta(), 1e-15));
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    REQUIRE(near(r.rho_r(1.0 - t), 1.0 - m.rho_r(t), 1e-14));
    REQUIRE(near(r.bias(1.0 - t), -m.bias(t), 1e-14));
    // Mirroring state and decision shifts the total by the affine term
    // (1-t)(1-d) - (1-d)^2/2 - (t d - d^2/2) = 1/2 - t at d = 0.4.
    REQUIRE(near(r.u_total(1.0 - 0.4, 1.0 - t), m.u_total(0.4, t) + 0.5 - t,
                 1e-14));
  }
  REQUIRE(near(m.reflected().reflected().b(), m.b(), 1e-15));
}

TEST_CASE("presets map their primitives", "[model]") {
  const QuadraticModel ag = agency_preset(0.5, 0.6);
  REQUIRE(near(ag.a(), 0.5, 1e-15));
  REQUIRE(near(ag.b(), 0.0, 1e-15));
  REQUIRE(near(ag.c(), 1.0, 1e-15));
  REQUIRE(near(ag.delta(), 0.6, 1e-15));
  REQUIRE_THROWS_AS(agency_preset(1.0, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(agency_preset(0.0, 0.5), std::invalid_argument);

  const QuadraticModel lb = lobbying_preset(0.75, 0.8, 1.0, 0.5);
  REQUIRE(near(lb.a(), 2.5, 1e-12));
  REQUIRE(near(lb.b(), -1.5, 1e-12));
  REQUIRE(near(lb.c(), 0.25, 1e-12));
  REQUIRE_THROWS_AS(lobbying_preset(1.0, 0.8, 1.0, 0.5),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(lobbying_preset(0.75, 1.0, 1.0, 0.5),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(lobbying_preset(0.75, 0.8, 0.4, 0.5),
                    std::invalid_argument);
}

TEST_CASE("uniform prior moments are exact", "[prior]") {
  const Prior u = Prior::uniform();
  REQUIRE(u.is_uniform());
  REQUIRE(near(u.mean(), 0.5, 1e-15));
  REQUIRE(near(u.second_moment(), 1.0 / 3.0, 1e-15));
  REQUIRE(near(u.cdf(0.3), 0.3, 1e-15));
  REQUIRE(near(u.cdf_integral(1.0), 0.5, 1e-15));
  REQUIRE(near(u.cdf_integral(0.4), 0.08, 1e-15));
  REQUIRE(near(u.mass(0.2, 0.6), 0.4, 1e-15));
  REQUIRE(near(u.mean(0.2, 0.6), 0.4, 1e-15));
  REQUIRE(near(u.first_moment(0.2, 0.6), 0.16, 1e-15));
  REQUIRE(near(posterior_mean(u, 0.2, 0.6), 0.4, 1e-15));
  REQUIRE(near(u.density(0.77), 1.0, 1e-15));
  // Null interval falls back to the midpoint.
  REQUIRE(near(u.mean(0.3, 0.3), 0.3, 1e-15));
}

TEST_CASE("piecewise priors integrate exactly", "[prior]") {
  const Prior p = Prior::from_density({1.5, 0.5});
  REQUIRE_FALSE(p.is_uniform());
  REQUIRE(near(p.mean(), 0.375, 1e-15));
  REQUIRE(near(p.cdf(0.5), 0.75, 1e-15));
  REQUIRE(near(p.mass(0.25, 0.75), 0.375 + 0.125, 1e-15));
  const Prior r = p.reflected();
  REQUIRE(near(r.mean(), 0.625, 1e-15));
  REQUIRE(near(r.density(0.1), 0.5, 1e-15));
  REQUIRE(near(r.density(0.9), 1.5, 1e-15));

  const Prior e = Prior::from_edges({0.0, 0.25, 1.0}, {2.0, 2.0 / 3.0});
  REQUIRE(near(e.cdf(0.25), 0.5, 1e-15));
  REQUIRE(near(e.mean(0.0, 0.25), 0.125, 1e-15));

  // A triangular density sampled on 1000 cells: mean 2/3 up to O(h^2).
  std::vector<double> tri(1000);
  for (int i = 0; i < 1000; ++i) tri[i] = 2.0 * (i + 0.5) / 1000.0;
  const Prior t = Prior::from_density(tri);
  REQUIRE(near(t.mean(), 2.0 / 3.0, 1e-4));
  REQUIRE(near(t.second_moment(), 0.5, 1e-4));

  REQUIRE_THROWS_AS(Prior::from_density({}), std::invalid_argument);
  REQUIRE_THROWS_AS(Prior::from_density({1.0, -1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(Prior::from_edges({0.0, 0.5}, {1.0, 1.0}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(Prior::from_edges({0.0, 0.5, 0.9}, {1.0, 1.0}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(Prior::from_edges({0.0, 0.6, 0.4, 1.0}, {1.0, 1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("conditioning rescales to the unit interval", "[prior]") {
  const Prior u = Prior::uniform();
  const Prior c = u.restrict_rescaled(0.2, 0.6);
  REQUIRE(near(c.mean(), 0.5, 1e-14));
  REQUIRE(near(c.mass(0.0, 1.0), 1.0, 1e-14));
  const Prior p = Prior::from_density({1.5, 0.5});
  const Prior q = p.restrict_rescaled(0.25, 0.75);
  // Conditional mass splits 1/3 vs 2/3 across the midpoint after rescaling.
  REQUIRE(near(q.cdf(0.5), 0.75, 1e-14));
  REQUIRE_THROWS_AS(u.restrict_rescaled(0.5, 0.5), std::invalid_argument);
}

TEST_CASE("csv priors renormalize with a warning", "[prior]") {
  const std::string path = "relcomm_test_prior.csv";
  {
    std::ofstream f(path);
    f << "cell_index,density\n0,3\n1,1\n";
  }
  std::string warning;
  const Prior p = Prior::from_csv(path, &warning);
  REQUIRE_FALSE(warning.empty());
  REQUIRE(near(p.mass(0.0, 1.0), 1.0, 1e-14));
  REQUIRE(near(p.density(0.25), 1.5, 1e-14));
  REQUIRE(near(p.density(0.75), 0.5, 1e-14));
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(Prior::from_csv("no_such_file.csv"),
                    std::invalid_argument);
}

TEST_CASE("pooling sets normalize their intervals", "[pooling]") {
  const PoolingSet p = PoolingSet::of(0.2, 0.6);
  REQUIRE(near(p.measure(), 0.4, 1e-15));
  REQUIRE(p.contains(0.3));
  REQUIRE_FALSE(p.contains(0.2));  // open interval
  REQUIRE_FALSE(p.contains(0.7));
  REQUIRE(PoolingSet::none().empty());
  REQUIRE(near(PoolingSet::all().measure(), 1.0, 1e-15));

  const PoolingSet merged(
      {Interval{0.1, 0.4}, Interval{0.3, 0.6}});
  REQUIRE(merged.size() == 1);
  REQUIRE(near(merged.measure(), 0.5, 1e-15));

  const PoolingSet adjacent({Interval{0.1, 0.3}, Interval{0.3, 0.6}});
  REQUIRE(adjacent.size() == 2);  // distinct messages stay distinct

  REQUIRE(p.interval_containing(0.25).has_value());
  REQUIRE_FALSE(p.interval_containing(0.9).has_value());
  REQUIRE_FALSE(p.to_string().empty());

  const PoolingSet refl = p.reflected();
  REQUIRE(near(refl.intervals()[0].lo, 0.4, 1e-15));
  REQUIRE(near(refl.intervals()[0].hi, 0.8, 1e-15));
}

TEST_CASE("set comparisons measure disagreement", "[pooling]") {
  const PoolingSet a = PoolingSet::of(0.0, 0.5);
  const PoolingSet b = PoolingSet::of(0.25, 0.75);
  REQUIRE(near(a.symmetric_difference(b), 0.5, 1e-12));
  REQUIRE(near(a.symmetric_difference(a), 0.0, 1e-15));
  REQUIRE(a.subset_of(PoolingSet::all()));
  REQUIRE_FALSE(PoolingSet::all().subset_of(a));

  // Message structure: overlapping but unequal pools disagree everywhere
  // either set pools.
  REQUIRE(near(message_difference(a, b), 0.75, 1e-12));
  REQUIRE(near(message_difference(a, a), 0.0, 1e-15));
  REQUIRE(near(message_difference(a, PoolingSet::none()), 0.5, 1e-12));
  // A binary split and one full pool differ as messages on all of [0,1].
  const PoolingSet split({Interval{0.0, 0.7}, Interval{0.7, 1.0}});
  REQUIRE(near(message_difference(split, PoolingSet::all()), 1.0, 1e-12));
  // ... even though their symmetric difference is null.
  REQUIRE(near(split.symmetric_difference(PoolingSet::all()), 0.0, 1e-12));
}

TEST_CASE("gamma transform closed-form spot checks", "[transforms]") {
  const Prior u = Prior::uniform();
  REQUIRE(near(gamma_transform(u, PoolingSet::none(), 1.0), 0.5, 1e-14));
  REQUIRE(near(gamma_transform(u, PoolingSet::none(), 0.4), 0.08, 1e-14));
  REQUIRE(near(gamma_transform(u, PoolingSet::all(), 0.75), 0.25, 1e-14));
  REQUIRE(near(gamma_transform(u, PoolingSet::all(), 0.5), 0.0, 1e-14));
  const PoolingSet p = PoolingSet::of(0.2, 0.6);
  REQUIRE(near(gamma_transform(u, p, 0.6), 0.18, 1e-14));
  REQUIRE(near(gamma_transform(u, p, 0.4), 0.06, 1e-14));

  // The posterior-mean CDF itself: flat across the pool except at its mean.
  REQUIRE(near(posterior_mean_cdf(u, p, 0.3), 0.2, 1e-14));
  REQUIRE(near(posterior_mean_cdf(u, p, 0.45), 0.6, 1e-14));
  REQUIRE(near(posterior_mean_cdf(u, p, 0.7), 0.7, 1e-14));
}

TEST_CASE("gamma transform invariants on random pooling sets",
          "[transforms][property]") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Prior u = Prior::uniform();
  const Prior skew = Prior::from_density({0.5, 1.0, 2.0, 0.5});
  for (int rep = 0; rep < 60; ++rep) {
    const Prior& prior = (rep % 2 == 0) ? u : skew;
    // Random union of up to three disjoint intervals.
    std::vector<double> cuts(6);
    for (double& c : cuts) c = unif(rng);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Interval> ivs;
    for (int k = 0; k < 3; ++k) {
      if (cuts[2 * k + 1] - cuts[2 * k] > 1e-3) {
        ivs.push_back(Interval{cuts[2 * k], cuts[2 * k + 1]});
      }
    }
    const PoolingSet pool(ivs);

    double prev = gamma_transform(prior, pool, 0.0);
    REQUIRE(near(prev, 0.0, 1e-14));
    double prev_slope = -1.0;
    for (int i = 1; i <= 200; ++i) {
      const double t = i / 200.0;
      const double g = gamma_transform(prior, pool, t);
      const double slope = (g - prev) * 200.0;
      // Convex: slopes nondecreasing (the integrand is a CDF).
      REQUIRE(slope >= prev_slope - 1e-10);
      // Sandwiched between full pooling and full separation.
      REQUIRE(g >= gamma_transform(prior, PoolingSet::all(), t) - 1e-12);
      REQUIRE(g <= gamma_transform(prior, PoolingSet::none(), t) + 1e-12);
      prev = g;
      prev_slope = slope;
    }
    // Endpoint pins down the mean regardless of pooling.
    REQUIRE(near(gamma_transform(prior, pool, 1.0), 1.0 - prior.mean(),
                 1e-12));
    // Outside the pooled hull the transform coincides with no pooling.
    if (!pool.empty()) {
      const double lo = pool.intervals().front().lo;
      const double hi = pool.intervals().back().hi;
      if (lo > 0.05) {
        const double t = lo * 0.5;
        REQUIRE(near(gamma_transform(prior, pool, t),
                     gamma_transform(prior, PoolingSet::none(), t), 1e-12));
      }
      if (hi < 0.95) {
        const double t = hi + (1.0 - hi) * 0.5;
        REQUIRE(near(gamma_transform(prior, pool, t),
                     gamma_transform(prior, PoolingSet::none(), t), 1e-12));
      }
    }
  }
}

TEST_CASE("integration by parts reproduces direct expectations",
          "[transforms]") {
  const Prior u = Prior::uniform();
  // Smooth cubic payoff with hand-computable direct value.
  const auto g = [](double t) { return t * t * t - 0.5 * t; };
  const auto dg = [](double t) { return 3.0 * t * t - 0.5; };
  const auto d2g = [](double t) { return 6.0 * t; };

  // No pooling: E[g] = 1/4 - 1/4 = 0.
  REQUIRE(near(ibp_expected_value(u, PoolingSet::none(), g, dg, d2g, 2000),
               0.0, 1e-9));
  // Full pooling: g(1/2) = 1/8 - 1/4.
  REQUIRE(near(ibp_expected_value(u, PoolingSet::all(), g, dg, d2g, 2000),
               -0.125, 1e-9));
  // One pool (0.2, 0.6): 0.4 g(0.4) + int over the rest.
  const PoolingSet p = PoolingSet::of(0.2, 0.6);
  const double direct = 0.4 * g(0.4) +
                        (0.25 * (std::pow(0.2, 4) - 0.0) -
                         0.25 * (0.2 * 0.2 - 0.0)) +
                        (0.25 * (1.0 - std::pow(0.6, 4)) -
                         0.25 * (1.0 - 0.6 * 0.6));
  REQUIRE(near(ibp_expected_value(u, p, g, dg, d2g, 2000), direct, 1e-9));
}
