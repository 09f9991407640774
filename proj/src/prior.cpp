#include "relcomm/prior.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relcomm {

namespace {

constexpr double kEdgeTol = 1e-12;

bool nearly(double x, double y) { return std::fabs(x - y) <= kEdgeTol; }

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Prior::Prior(std::vector<double> edges, std::vector<double> dens)
    : edges_(std::move(edges)), dens_(std::move(dens)) {
  if (edges_.size() < 2 || dens_.size() + 1 != edges_.size()) {
    throw std::invalid_argument("prior: need k+1 edges for k cell densities");
  }
  if (!nearly(edges_.front(), 0.0) || !nearly(edges_.back(), 1.0)) {
    throw std::invalid_argument("prior: support must span [0,1]");
  }
  edges_.front() = 0.0;
  edges_.back() = 1.0;
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    if (!(edges_[i] < edges_[i + 1])) {
      throw std::invalid_argument("prior: edges must be strictly increasing");
    }
  }
  for (double d : dens_) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("prior: density must be strictly positive");
    }
  }
  build_prefix();
  uniform_ = true;
  for (double d : dens_) {
    if (std::fabs(d - 1.0) > 1e-15) {
      uniform_ = false;
      break;
    }
  }
}

void Prior::build_prefix() {
  const std::size_t k = dens_.size();
  pre_mass_.assign(k + 1, 0.0);
  pre_mom_.assign(k + 1, 0.0);
  pre_cdfint_.assign(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const double e0 = edges_[i], e1 = edges_[i + 1], f = dens_[i];
    const double w = e1 - e0;
    pre_mass_[i + 1] = pre_mass_[i] + f * w;
    pre_mom_[i + 1] = pre_mom_[i] + 0.5 * f * (e1 * e1 - e0 * e0);
    // \int_{e0}^{e1} F(s) ds with F affine on the cell:
    pre_cdfint_[i + 1] = pre_cdfint_[i] + pre_mass_[i] * w + 0.5 * f * w * w;
  }
  // Guard against drift: total mass should already be ~1 for valid inputs;
  // we do not renormalize here (from_csv handles that explicitly).
}

Prior Prior::uniform() { return Prior({0.0, 1.0}, {1.0}); }

Prior Prior::from_density(std::vector<double> cell_density) {
  const std::size_t n = cell_density.size();
  if (n == 0) throw std::invalid_argument("prior: empty density");
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    edges[i] = static_cast<double>(i) / static_cast<double>(n);
  }
  // Normalize so the density integrates to exactly 1.
  double total = 0.0;
  for (double d : cell_density) total += d / static_cast<double>(n);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("prior: density must have positive mass");
  }
  for (double& d : cell_density) d /= total;
  return Prior(std::move(edges), std::move(cell_density));
}

Prior Prior::from_edges(std::vector<double> edges,
                        std::vector<double> density) {
  return Prior(std::move(edges), std::move(density));
}

Prior Prior::from_csv(const std::string& path, std::string* warning) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("prior: cannot open " + path);
  std::vector<std::pair<long, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    // Trim whitespace and skip blanks / comments.
    const auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r\n");
    line = line.substr(b, e - b + 1);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string c0, c1;
    if (!std::getline(ss, c0, ',') || !std::getline(ss, c1)) {
      throw std::invalid_argument("prior: malformed CSV row: " + line);
    }
    try {
      rows.emplace_back(std::stol(c0), std::stod(c1));
    } catch (const std::exception&) {
      if (first) {
        first = false;  // tolerate one header row
        continue;
      }
      throw std::invalid_argument("prior: non-numeric CSV row: " + line);
    }
    first = false;
  }
  if (rows.empty()) throw std::invalid_argument("prior: empty CSV " + path);
  std::sort(rows.begin(), rows.end());
  const long base = rows.front().first;  // accept 0- or 1-based indices
  if (base != 0 && base != 1) {
    throw std::invalid_argument("prior: cell_index must start at 0 or 1");
  }
  std::vector<double> dens(rows.size(), -1.0);
  for (const auto& [idx, val] : rows) {
    const long i = idx - base;
    if (i < 0 || i >= static_cast<long>(rows.size()) || dens[i] >= 0.0) {
      throw std::invalid_argument("prior: cell_index gaps or duplicates");
    }
    dens[i] = val;
  }
  const std::size_t n = dens.size();
  double total = 0.0;
  for (double d : dens) {
    if (!(d > 0.0)) {
      throw std::invalid_argument("prior: density must be strictly positive");
    }
    total += d / static_cast<double>(n);
  }
  if (warning != nullptr && std::fabs(total - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "prior: density integrated to " << total
        << "; renormalized to unit mass";
    *warning = msg.str();
  }
  return from_density(std::move(dens));
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

std::size_t Prior::cell_of(double t) const {
  // Index of the cell whose half-open span [e_i, e_{i+1}) contains t.
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
  if (it == edges_.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - edges_.begin()) - 1;
  if (i >= dens_.size()) i = dens_.size() - 1;
  return i;
}

double Prior::density(double t) const {
  if (t < 0.0 || t > 1.0) return 0.0;
  return dens_[cell_of(t)];
}

double Prior::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return pre_mass_.back();
  const std::size_t i = cell_of(t);
  return pre_mass_[i] + dens_[i] * (t - edges_[i]);
}

double Prior::cdf_integral(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) {
    return pre_cdfint_.back() + pre_mass_.back() * (t - 1.0);
  }
  const std::size_t i = cell_of(t);
  const double dt = t - edges_[i];
  return pre_cdfint_[i] + pre_mass_[i] * dt + 0.5 * dens_[i] * dt * dt;
}

double Prior::mass(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  return cdf(hi) - cdf(lo);
}

double Prior::first_moment(double lo, double hi) const {
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (hi <= lo) return 0.0;
  auto prefix = [this](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return pre_mom_.back();
    const std::size_t i = cell_of(t);
    return pre_mom_[i] + 0.5 * dens_[i] * (t * t - edges_[i] * edges_[i]);
  };
  return prefix(hi) - prefix(lo);
}

double Prior::mean(double lo, double hi) const {
  const double m = mass(lo, hi);
  if (m <= 0.0) return 0.5 * (lo + hi);
  return first_moment(lo, hi) / m;
}

double Prior::mean() const { return pre_mom_.back(); }

double Prior::second_moment() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < dens_.size(); ++i) {
    const double e0 = edges_[i], e1 = edges_[i + 1];
    acc += dens_[i] * (e1 * e1 * e1 - e0 * e0 * e0) / 3.0;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Derived distributions
// ---------------------------------------------------------------------------

Prior Prior::restrict_rescaled(double lo, double hi) const {
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (!(hi > lo)) {
    throw std::invalid_argument("prior: cannot condition on a null interval");
  }
  const double w = hi - lo;
  const double m = mass(lo, hi);
  std::vector<double> edges{0.0};
  std::vector<double> dens;
  for (std::size_t i = 0; i < dens_.size(); ++i) {
    const double a = std::max(edges_[i], lo);
    const double b = std::min(edges_[i + 1], hi);
    if (b <= a) continue;
    dens.push_back(dens_[i] * w / m);
    edges.push_back((b - lo) / w);
  }
  edges.back() = 1.0;
  return Prior(std::move(edges), std::move(dens));
}

Prior Prior::reflected() const {
  std::vector<double> edges(edges_.size());
  std::vector<double> dens(dens_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    edges[i] = 1.0 - edges_[edges_.size() - 1 - i];
  }
  edges.front() = 0.0;
  edges.back() = 1.0;
  for (std::size_t i = 0; i < dens_.size(); ++i) {
    dens[i] = dens_[dens_.size() - 1 - i];
  }
  return Prior(std::move(edges), std::move(dens));
}

double posterior_mean(const Prior& prior, double lo, double hi) {
  return prior.mean(lo, hi);
}

}  // namespace relcomm
