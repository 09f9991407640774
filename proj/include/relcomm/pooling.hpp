#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace relcomm {

/// Open subinterval of [0,1].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// A finite union of disjoint open intervals of [0,1]: the states whose
/// messages are pooled. States outside are separated singleton messages.
/// Intervals sharing an endpoint are kept distinct (they induce different
/// messages), but overlapping input intervals are merged.
class PoolingSet {
 public:
  PoolingSet() = default;
  explicit PoolingSet(std::vector<Interval> intervals);

  static PoolingSet none();                   // full separation
  static PoolingSet all();                    // single pool (0,1)
  static PoolingSet of(double lo, double hi); // single pool

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }
  double measure() const;

  /// Index of the interval strictly containing t, if any.
  std::optional<std::size_t> interval_containing(double t) const;
  bool contains(double t) const { return interval_containing(t).has_value(); }

  /// Lebesgue measure of the symmetric difference with another set.
  double symmetric_difference(const PoolingSet& other) const;
  /// True when every interval of this set is contained in some interval of
  /// the other (as subsets of [0,1], up to tol at the endpoints).
  bool subset_of(const PoolingSet& other, double tol = 1e-12) const;

  /// Mirror image under t -> 1-t.
  PoolingSet reflected() const;

  std::string to_string() const;

 private:
  std::vector<Interval> intervals_;  // sorted, disjoint
};

/// Lebesgue measure of the set of states whose induced message differs
/// between the two pooling sets. A state separated by both induces the same
/// singleton message; a state pooled by exactly one induces different
/// messages; a state pooled by both induces different messages unless the
/// containing pool intervals coincide (endpoints within tol).
double message_difference(const PoolingSet& lhs, const PoolingSet& rhs,
                          double tol = 1e-12);

}  // namespace relcomm
