#pragma once

#include <functional>
#include <vector>

namespace relcomm {

/// Bisection for a sign change of f on [lo,hi]; requires f(lo) and f(hi) of
/// opposite (weak) sign. Returns the midpoint of the final bracket.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 1e-14, int max_iter = 200);

/// Golden-section minimizer on [lo,hi] for a unimodal function.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol = 1e-11);

/// Gauss-Legendre quadrature of f over [lo,hi] with 7 nodes per piece,
/// splitting the interval into `pieces` equal parts. Exact for polynomials of
/// degree <= 13 per piece.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 int pieces = 1);

/// Gauss-Legendre quadrature with the interval additionally split at the
/// provided breakpoints (clipped to [lo,hi]).
double integrate_split(const std::function<double(double)>& f, double lo,
                       double hi, const std::vector<double>& breakpoints,
                       int pieces_per_span = 1);

}  // namespace relcomm
