#pragma once

#include <functional>
#include <vector>

#include "relcomm/pooling.hpp"
#include "relcomm/prior.hpp"

namespace relcomm {

/// CDF of the posterior-mean state induced by pooling set P: equals the prior
/// CDF outside pools; inside a pool (xi,zeta) with conditional mean mu it is
/// flat at F(xi) left of mu and at F(zeta) from mu on.
double posterior_mean_cdf(const Prior& prior, const PoolingSet& pooling,
                          double t);

/// Integral of the posterior-mean CDF from 0 to t, computed exactly:
/// outside pools it coincides with \int_0^t F; inside a pool the flat pieces
/// integrate in closed form (integration by parts leaves no quadrature
/// defect). Always ends at 1 - E[state] at t = 1.
double gamma_transform(const Prior& prior, const PoolingSet& pooling,
                       double t);

/// Expected payoff under the posterior-mean distribution, evaluated by
/// integrating twice by parts:
///   g(1) - g'(1)(1 - E[state]) + \int_0^1 g''(t) Gamma_P(t) dt,
/// with the last integral on an n-piece composite rule split additionally at
/// the pool edges, conditional means, and any kinks of g'' passed in
/// extra_breaks. Used to cross-check direct evaluation.
double ibp_expected_value(const Prior& prior, const PoolingSet& pooling,
                          const std::function<double(double)>& g,
                          const std::function<double(double)>& dg,
                          const std::function<double(double)>& d2g, int n,
                          const std::vector<double>& extra_breaks = {});

}  // namespace relcomm
