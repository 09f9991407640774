#include "relcomm/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "relcomm/numeric.hpp"

namespace relcomm {

double posterior_mean_cdf(const Prior& prior, const PoolingSet& pooling,
                          double t) {
  if (t < 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const auto idx = pooling.interval_containing(t);
  if (!idx.has_value()) return prior.cdf(t);
  const Interval& pool = pooling.intervals()[*idx];
  const double mu = prior.mean(pool.lo, pool.hi);
  return (t < mu) ? prior.cdf(pool.lo) : prior.cdf(pool.hi);
}

double gamma_transform(const Prior& prior, const PoolingSet& pooling,
                       double t) {
  if (t <= 0.0) return 0.0;
  t = std::min(t, 1.0);
  // Outside pools the transform coincides with the integrated prior CDF: the
  // deficit accumulated while crossing a pool closes exactly at its right
  // edge (the pooled mass keeps its conditional mean).
  const auto idx = pooling.interval_containing(t);
  if (!idx.has_value()) return prior.cdf_integral(t);
  const Interval& pool = pooling.intervals()[*idx];
  const double mu = prior.mean(pool.lo, pool.hi);
  double acc = prior.cdf_integral(pool.lo);
  acc += prior.cdf(pool.lo) * (std::min(t, mu) - pool.lo);
  if (t > mu) acc += prior.cdf(pool.hi) * (t - mu);
  return acc;
}

double ibp_expected_value(const Prior& prior, const PoolingSet& pooling,
                          const std::function<double(double)>& g,
                          const std::function<double(double)>& dg,
                          const std::function<double(double)>& d2g, int n,
                          const std::vector<double>& extra_breaks) {
  std::vector<double> breaks = extra_breaks;
  for (const Interval& pool : pooling.intervals()) {
    breaks.push_back(pool.lo);
    breaks.push_back(pool.hi);
    breaks.push_back(prior.mean(pool.lo, pool.hi));
  }
  for (double e : prior.edges()) breaks.push_back(e);
  std::sort(breaks.begin(), breaks.end());
  const int spans = static_cast<int>(breaks.size()) + 1;
  const int pieces = std::max(1, n / std::max(1, spans));
  const double tail =
      integrate_split([&](double t) { return d2g(t) *
                                             gamma_transform(prior, pooling, t); },
                      0.0, 1.0, breaks, pieces);
  return g(1.0) - dg(1.0) * (1.0 - prior.mean()) + tail;
}

}  // namespace relcomm
