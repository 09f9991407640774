#include "relcomm/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace relcomm {

namespace {
constexpr double kTol = 1e-12;
}

PoolingSet::PoolingSet(std::vector<Interval> intervals) {
  std::vector<Interval> clean;
  clean.reserve(intervals.size());
  for (Interval iv : intervals) {
    iv.lo = std::max(iv.lo, 0.0);
    iv.hi = std::min(iv.hi, 1.0);
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi))) {
      throw std::invalid_argument("pooling: interval endpoints must be finite");
    }
    if (iv.hi - iv.lo <= kTol) continue;  // drop null pools
    clean.push_back(iv);
  }
  std::sort(clean.begin(), clean.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  // Merge genuinely overlapping intervals; keep touching ones distinct
  // (they carry different pooled messages).
  for (const Interval& iv : clean) {
    if (!intervals_.empty() && iv.lo < intervals_.back().hi - kTol) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

PoolingSet PoolingSet::none() { return PoolingSet(std::vector<Interval>{}); }

PoolingSet PoolingSet::all() { return of(0.0, 1.0); }

PoolingSet PoolingSet::of(double lo, double hi) {
  return PoolingSet(std::vector<Interval>{{lo, hi}});
}

double PoolingSet::measure() const {
  double acc = 0.0;
  for (const Interval& iv : intervals_) acc += iv.length();
  return acc;
}

std::optional<std::size_t> PoolingSet::interval_containing(double t) const {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (intervals_[i].lo < t && t < intervals_[i].hi) return i;
    if (intervals_[i].lo >= t) break;  // sorted: nothing further can match
  }
  return std::nullopt;
}

double PoolingSet::symmetric_difference(const PoolingSet& other) const {
  std::vector<double> cuts{0.0, 1.0};
  for (const Interval& iv : intervals_) {
    cuts.push_back(iv.lo);
    cuts.push_back(iv.hi);
  }
  for (const Interval& iv : other.intervals_) {
    cuts.push_back(iv.lo);
    cuts.push_back(iv.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi - lo <= 0.0) continue;
    const double mid = 0.5 * (lo + hi);
    if (contains(mid) != other.contains(mid)) acc += hi - lo;
  }
  return acc;
}

bool PoolingSet::subset_of(const PoolingSet& other, double tol) const {
  for (const Interval& iv : intervals_) {
    bool covered = false;
    for (const Interval& jv : other.intervals_) {
      if (jv.lo <= iv.lo + tol && iv.hi <= jv.hi + tol) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

PoolingSet PoolingSet::reflected() const {
  std::vector<Interval> out;
  out.reserve(intervals_.size());
  for (auto it = intervals_.rbegin(); it != intervals_.rend(); ++it) {
    out.push_back({1.0 - it->hi, 1.0 - it->lo});
  }
  return PoolingSet(std::move(out));
}

double message_difference(const PoolingSet& lhs, const PoolingSet& rhs,
                          double tol) {
  std::vector<double> cuts{0.0, 1.0};
  for (const Interval& iv : lhs.intervals()) {
    cuts.push_back(iv.lo);
    cuts.push_back(iv.hi);
  }
  for (const Interval& iv : rhs.intervals()) {
    cuts.push_back(iv.lo);
    cuts.push_back(iv.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi - lo <= 0.0) continue;
    const double mid = 0.5 * (lo + hi);
    const auto in_l = lhs.interval_containing(mid);
    const auto in_r = rhs.interval_containing(mid);
    bool differ;
    if (in_l.has_value() != in_r.has_value()) {
      differ = true;
    } else if (!in_l.has_value()) {
      differ = false;  // separated by both: same singleton message
    } else {
      const Interval& a = lhs.intervals()[*in_l];
      const Interval& b = rhs.intervals()[*in_r];
      differ =
          std::fabs(a.lo - b.lo) > tol || std::fabs(a.hi - b.hi) > tol;
    }
    if (differ) acc += hi - lo;
  }
  return acc;
}

std::string PoolingSet::to_string() const {
  if (intervals_.empty()) return "{}";
  std::string s = "{";
  char buf[64];
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", intervals_[i].lo,
                  intervals_[i].hi);
    if (i > 0) s += ", ";
    s += buf;
  }
  s += "}";
  return s;
}

}  // namespace relcomm
