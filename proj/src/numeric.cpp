#include "relcomm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relcomm {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bisect: no sign change on the bracket");
  }
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol) {
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5)-1)/2
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > xtol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNodes[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
    0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kWeights[7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

double gauss7(const std::function<double(double)>& f, double lo, double hi) {
  const double h = 0.5 * (hi - lo);
  const double m = 0.5 * (hi + lo);
  double acc = 0.0;
  for (int i = 0; i < 7; ++i) acc += kWeights[i] * f(m + h * kNodes[i]);
  return acc * h;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 int pieces) {
  if (hi <= lo) return 0.0;
  pieces = std::max(1, pieces);
  double acc = 0.0;
  const double step = (hi - lo) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double a = lo + i * step;
    const double b = (i + 1 == pieces) ? hi : lo + (i + 1) * step;
    acc += gauss7(f, a, b);
  }
  return acc;
}

double integrate_split(const std::function<double(double)>& f, double lo,
                       double hi, const std::vector<double>& breakpoints,
                       int pieces_per_span) {
  if (hi <= lo) return 0.0;
  std::vector<double> pts{lo, hi};
  for (double b : breakpoints) {
    if (b > lo && b < hi) pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] > pts[i]) {
      acc += integrate(f, pts[i], pts[i + 1], pieces_per_span);
    }
  }
  return acc;
}

}  // namespace relcomm
