#pragma once

namespace relcomm {

struct StagePayoffs {
  double sender = 0.0;
  double receiver = 0.0;
  double total = 0.0;
};

/// Linear-quadratic payoff primitives. The receiver values
/// u_R(d,t) = c((a t + b) d - d^2/2); the joint payoff is u(d,t) = t d - d^2/2
/// and the sender gets the difference. Payoffs are linear in the state for a
/// fixed decision, so every formula below applies verbatim with a posterior
/// mean in place of the state.
class QuadraticModel {
 public:
  /// Validates c in (0,1], delta in [0,1), a > 0, finite b.
  /// Throws std::invalid_argument otherwise.
  QuadraticModel(double a, double b, double c, double delta);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double delta() const { return delta_; }

  /// Receiver-preferred decision a m + b.
  double rho_r(double m) const { return a_ * m + b_; }
  /// Joint-surplus-maximizing decision.
  double rho_fb(double m) const { return m; }
  /// Signed gap rho_r(m) - rho_fb(m) = (a-1)m + b.
  double bias(double m) const { return (a_ - 1.0) * m + b_; }

  double u_total(double d, double m) const { return m * d - 0.5 * d * d; }
  double u_receiver(double d, double m) const {
    return c_ * (rho_r(m) * d - 0.5 * d * d);
  }
  double u_sender(double d, double m) const {
    return u_total(d, m) - u_receiver(d, m);
  }
  StagePayoffs stage_payoffs(double d, double m) const;

  /// Receiver's one-period gain from overriding d with rho_r(m):
  /// (c/2)(rho_r(m) - d)^2.
  double temptation(double d, double m) const;

  /// d u_sender / d state at fixed decision: (1 - a c) d.
  double sender_state_slope(double d) const { return (1.0 - a_ * c_) * d; }

  /// Whether the sender's single-crossing direction is the standard one
  /// (a c < 1). Solvers stay well-defined without it, but truthful
  /// implementation of increasing decision rules requires it; the
  /// certification checker reports honest violations when it fails.
  bool sorting_ok() const { return a_ * c_ < 1.0; }

  /// Same payoffs with the state relabeled t -> 1-t: (a, 1-a-b, c, delta).
  QuadraticModel reflected() const;

 private:
  double a_, b_, c_, delta_;
};

/// Output-sharing contract: principal observes returns, agent takes a costly
/// action and keeps share `a` of output. Maps to (a, b=0, c=1); requires
/// a in (0,1).
QuadraticModel agency_preset(double a, double delta);

/// Interest-group lobbying with influence weight lambda_s in (0,1), policy
/// anchor d0 >= 1/2 and responsiveness alpha in (0,1). After rescaling the
/// state so the joint optimum is the identity, the parameters are
/// a = 1/(1 - alpha lambda_s), b = -alpha lambda_s d0 / (1 - alpha lambda_s),
/// c = 1 - lambda_s.
QuadraticModel lobbying_preset(double lambda_s, double alpha, double d0,
                               double delta);

}  // namespace relcomm
