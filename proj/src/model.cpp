#include "relcomm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace relcomm {

QuadraticModel::QuadraticModel(double a, double b, double c, double delta)
    : a_(a), b_(b), c_(c), delta_(delta) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("model: a must be positive and finite");
  }
  if (!std::isfinite(b)) {
    throw std::invalid_argument("model: b must be finite");
  }
  if (!(c > 0.0) || !(c <= 1.0)) {
    throw std::invalid_argument("model: c must lie in (0, 1]");
  }
  if (!(delta >= 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("model: delta must lie in [0, 1)");
  }
}

StagePayoffs QuadraticModel::stage_payoffs(double d, double m) const {
  StagePayoffs p;
  p.total = u_total(d, m);
  p.receiver = u_receiver(d, m);
  p.sender = p.total - p.receiver;
  return p;
}

double QuadraticModel::temptation(double d, double m) const {
  const double gap = rho_r(m) - d;
  return 0.5 * c_ * gap * gap;
}

QuadraticModel QuadraticModel::reflected() const {
  return QuadraticModel(a_, 1.0 - a_ - b_, c_, delta_);
}

QuadraticModel agency_preset(double a, double delta) {
  if (!(a > 0.0) || !(a < 1.0)) {
    throw std::invalid_argument("agency preset: share must lie in (0, 1)");
  }
  return QuadraticModel(a, 0.0, 1.0, delta);
}

QuadraticModel lobbying_preset(double lambda_s, double alpha, double d0,
                               double delta) {
  if (!(lambda_s > 0.0) || !(lambda_s < 1.0)) {
    throw std::invalid_argument(
        "lobbying preset: influence weight must lie in (0, 1)");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument(
        "lobbying preset: responsiveness must lie in (0, 1)");
  }
  if (!(d0 >= 0.5) || !std::isfinite(d0)) {
    throw std::invalid_argument("lobbying preset: anchor must be >= 1/2");
  }
  const double k = alpha * lambda_s;
  return QuadraticModel(1.0 / (1.0 - k), -k * d0 / (1.0 - k), 1.0 - lambda_s,
                        delta);
}

}  // namespace relcomm
