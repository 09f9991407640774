#pragma once

#include <string>
#include <vector>

namespace relcomm {

/// Prior distribution of the state on [0,1]: a piecewise-constant, strictly
/// positive density over a sorted cell grid. All integrals (CDF, mass, first
/// moment, integrated CDF) are exact via prefix sums, which keeps downstream
/// oracles bit-reproducible.
class Prior {
 public:
  /// Uniform density on [0,1].
  static Prior uniform();
  /// Piecewise-constant density over n equal cells of [0,1].
  static Prior from_density(std::vector<double> cell_density);
  /// Piecewise-constant density over arbitrary sorted edges (edges.front()=0,
  /// edges.back()=1, density.size()+1 == edges.size()).
  static Prior from_edges(std::vector<double> edges, std::vector<double> density);
  /// Loads a `cell_index,density` CSV (equal cells). Densities are
  /// renormalized to integrate to 1; a message is appended to *warning when
  /// the raw integral is off by more than 1e-6.
  static Prior from_csv(const std::string& path, std::string* warning = nullptr);

  double density(double t) const;
  /// F(t) = P(state <= t).
  double cdf(double t) const;
  /// \int_0^t F(s) ds, exact.
  double cdf_integral(double t) const;
  /// P(lo < state < hi), exact.
  double mass(double lo, double hi) const;
  /// \int_lo^hi s f(s) ds, exact.
  double first_moment(double lo, double hi) const;
  /// E[state | state in (lo,hi)]; midpoint for null intervals.
  double mean(double lo, double hi) const;
  /// E[state].
  double mean() const;
  /// E[state^2], exact (used for first-best values).
  double second_moment() const;

  /// True when the density is identically 1 (closed forms apply).
  bool is_uniform() const { return uniform_; }
  /// Conditional distribution on (lo,hi), rescaled to live on [0,1].
  Prior restrict_rescaled(double lo, double hi) const;
  /// Mirror image under t -> 1-t.
  Prior reflected() const;

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& cell_density() const { return dens_; }

 private:
  Prior(std::vector<double> edges, std::vector<double> dens);
  void build_prefix();
  std::size_t cell_of(double t) const;

  std::vector<double> edges_;     // k+1 sorted edges spanning [0,1]
  std::vector<double> dens_;      // k cell densities, strictly positive
  std::vector<double> pre_mass_;  // prefix \int f at edges
  std::vector<double> pre_mom_;   // prefix \int s f at edges
  std::vector<double> pre_cdfint_;  // prefix \int F at edges
  bool uniform_ = false;
};

/// E[state | state in interval] under the prior.
double posterior_mean(const Prior& prior, double lo, double hi);

}  // namespace relcomm
