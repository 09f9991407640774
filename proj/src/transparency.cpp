#include "relcomm/transparency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relcomm {

// ---------------------------------------------------------------------------
// SignalPartition
// ---------------------------------------------------------------------------

SignalPartition SignalPartition::from_cuts(std::vector<double> cuts) {
  std::sort(cuts.begin(), cuts.end());
  SignalPartition p;
  for (double c : cuts) {
    if (!(c > 0.0 && c < 1.0)) {
      throw std::invalid_argument(
          "signal cuts must lie strictly inside (0,1)");
    }
    if (!p.cuts_.empty() && !(c > p.cuts_.back() + 1e-12)) {
      throw std::invalid_argument("signal cuts must be strictly increasing");
    }
    p.cuts_.push_back(c);
  }
  return p;
}

std::pair<double, double> SignalPartition::cell(std::size_t i) const {
  if (i >= cells()) throw std::out_of_range("signal cell index out of range");
  const double lo = i == 0 ? 0.0 : cuts_[i - 1];
  const double hi = i == cuts_.size() ? 1.0 : cuts_[i];
  return {lo, hi};
}

bool SignalPartition::refines(const SignalPartition& coarser,
                              double tol) const {
  for (double c : coarser.cuts_) {
    bool found = false;
    for (double mine : cuts_) {
      if (std::fabs(mine - c) <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Equilibrium under a public signal
// ---------------------------------------------------------------------------

namespace {

/// Per-cell data hoisted out of the fixed-point loop. Restricting the game to
/// a cell [lo,hi] and rescaling the state to [0,1] maps the payoffs, up to
/// terms affine in the posterior mean, onto the same family with
/// b -> ((a-1) lo + b) / width and leeway -> leeway / width, so the in-cell
/// pooling problem reuses the global solver verbatim.
struct CellSetup {
  double lo;
  double hi;
  double width;
  double mass;
  QuadraticModel rescaled;
  Prior restricted;
};

PoolingSet cell_pooling(const CellSetup& cs, double leeway) {
  const PosteriorPayoff local(cs.rescaled, leeway / cs.width);
  const PoolingSolution s = optimal_pooling(cs.restricted, local);
  std::vector<Interval> mapped;
  mapped.reserve(s.pooling.size());
  for (const Interval& iv : s.pooling.intervals()) {
    mapped.push_back({cs.lo + cs.width * iv.lo, cs.lo + cs.width * iv.hi});
  }
  return PoolingSet(std::move(mapped));
}

}  // namespace

SignalEquilibrium signal_equilibrium(const QuadraticModel& model,
                                     const Prior& prior,
                                     const SignalPartition& partition) {
  std::vector<CellSetup> setup;
  setup.reserve(partition.cells());
  for (std::size_t i = 0; i < partition.cells(); ++i) {
    const auto [lo, hi] = partition.cell(i);
    const double width = hi - lo;
    const double shifted_b = ((model.a() - 1.0) * lo + model.b()) / width;
    setup.push_back(CellSetup{
        lo, hi, width, prior.mass(lo, hi),
        QuadraticModel(model.a(), shifted_b, model.c(), model.delta()),
        prior.restrict_rescaled(lo, hi)});
  }

  // Sender-worst severity: the punishing band edge is chosen once for the
  // whole game (the penal code must stay a single decision schedule that is
  // monotone across signal realizations), while the pooled-threshold within
  // each cell adapts to the conditional prior. Flipping the edge cell by cell
  // would generally break monotonicity of the stitched schedule and would
  // compare punishment classes that no longer nest across signal refinements.
  const auto family_aggregate = [&](double ell, PenalFamily family) {
    double v = 0.0;
    for (const CellSetup& cs : setup) {
      v += cs.mass *
           sender_worst_family(model, prior, ell, family, cs.lo, cs.hi).value;
    }
    return v;
  };
  const auto sender_floor = [&](double ell) {
    return std::min(family_aggregate(ell, PenalFamily::minus_side),
                    family_aggregate(ell, PenalFamily::plus_side));
  };

  const auto values = [&](double ell) {
    ValueTriple t;
    const PosteriorPayoff payoff(model, ell);
    for (const CellSetup& cs : setup) {
      t.v_bar += pooling_value_on(prior, payoff, cell_pooling(cs, ell),
                                  cs.lo, cs.hi);
      t.v_r_min += cs.mass * receiver_worst(model, prior, cs.lo, cs.hi);
    }
    t.v_s_min = sender_floor(ell);
    return t;
  };

  const FixedPointResult fp = solve_fixed_point_values(model, prior, values);

  SignalEquilibrium eq;
  eq.partition = partition;
  eq.leeway = fp.leeway;
  eq.converged = fp.converged;
  eq.iterations = fp.iterations;
  eq.v_bar = fp.v_bar;
  eq.v_s_min = fp.v_s_min;
  eq.v_r_min = fp.v_r_min;
  eq.surplus = fp.surplus;
  eq.message = fp.message;

  const PosteriorPayoff payoff(model, fp.leeway);
  const PenalFamily chosen =
      family_aggregate(fp.leeway, PenalFamily::minus_side) <=
              family_aggregate(fp.leeway, PenalFamily::plus_side)
          ? PenalFamily::minus_side
          : PenalFamily::plus_side;
  std::vector<Interval> merged;
  bool cell_flip = false;
  for (const CellSetup& cs : setup) {
    CellOutcome out;
    out.lo = cs.lo;
    out.hi = cs.hi;
    out.mass = cs.mass;
    out.pooling = cell_pooling(cs, fp.leeway);
    out.v_bar =
        pooling_value_on(prior, payoff, out.pooling, cs.lo, cs.hi) / cs.mass;
    // The per-cell unrestricted minimum is kept as the reported penal scheme:
    // it is the cell's own harshest code and the object whose stitched
    // decision map the monotonicity hypothesis is about. Its value can sit
    // below v_s_min when the cell would prefer the other band edge.
    out.penal = sender_worst_on(model, prior, fp.leeway, cs.lo, cs.hi);
    if (out.penal.family != chosen) cell_flip = true;
    out.v_s_min =
        sender_worst_family(model, prior, fp.leeway, chosen, cs.lo, cs.hi)
            .value;
    out.v_r_min = receiver_worst(model, prior, cs.lo, cs.hi);
    for (const Interval& iv : out.pooling.intervals()) merged.push_back(iv);
    eq.cells.push_back(std::move(out));
  }
  if (cell_flip) {
    const std::string note =
        "some cells prefer the opposite band edge in isolation; the sender "
        "floor keeps one edge across all cells so that punishment classes "
        "nest across signal refinements";
    eq.message = eq.message.empty() ? note : eq.message + "; " + note;
  }
  eq.pooling = PoolingSet(std::move(merged));
  return eq;
}

// ---------------------------------------------------------------------------
// Comparisons
// ---------------------------------------------------------------------------

bool penal_outcome_monotone(const QuadraticModel& model,
                            const SignalEquilibrium& eq, double tol) {
  const double eps = 1e-9;
  double prev = -std::numeric_limits<double>::infinity();
  for (const CellOutcome& cell : eq.cells) {
    std::vector<double> xs;
    xs.push_back(cell.lo + eps);
    xs.push_back(cell.hi - eps);
    xs.push_back(cell.penal.threshold - eps);
    xs.push_back(cell.penal.threshold + eps);
    const int kInner = 64;
    for (int k = 0; k < kInner; ++k) {
      xs.push_back(cell.lo + (cell.hi - cell.lo) * (k + 0.5) / kInner);
    }
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
      if (x < cell.lo || x > cell.hi) continue;
      const double dec = penal_decision(model, eq.leeway, cell.penal, x);
      if (dec < prev - tol) return false;
      prev = dec;
    }
  }
  return true;
}

TransparencyComparison compare_transparency(const QuadraticModel& model,
                                            const Prior& prior,
                                            const SignalPartition& fine,
                                            const SignalPartition& coarse) {
  if (!fine.refines(coarse)) {
    throw std::invalid_argument(
        "transparency comparison requires the fine signal to refine the "
        "coarse one");
  }
  TransparencyComparison out;
  out.fine = signal_equilibrium(model, prior, fine);
  out.coarse = signal_equilibrium(model, prior, coarse);
  out.is_refinement = true;
  out.hypothesis_ok = penal_outcome_monotone(model, out.fine);

  out.dv_bar = out.coarse.v_bar - out.fine.v_bar;
  out.dv_s_min = out.fine.v_s_min - out.coarse.v_s_min;
  out.dv_r_min = out.fine.v_r_min - out.coarse.v_r_min;
  out.d_leeway = out.coarse.leeway - out.fine.leeway;

  if (!out.hypothesis_ok) {
    out.verdict = "hypothesis-violated";
    out.note =
        "the stitched sender-worst decision map falls across a cell "
        "boundary, so the enlargement claim is not certified";
    return out;
  }
  const double tol = 1e-9;
  const bool nested = out.dv_bar >= -tol && out.dv_s_min >= -tol &&
                      out.dv_r_min > tol;
  const bool same = std::fabs(out.dv_bar) <= tol &&
                    std::fabs(out.dv_s_min) <= tol &&
                    std::fabs(out.dv_r_min) <= tol &&
                    std::fabs(out.d_leeway) <= tol;
  if (nested) {
    out.verdict = "strict-inclusion";
    out.note =
        "the coarser signal sustains harsher punishments and a weakly "
        "wider enforceable band";
  } else if (same) {
    out.verdict = "equal";
    out.note = "both signals induce identical equilibrium values";
  } else {
    out.verdict = "not-nested";
    out.note =
        "the computed payoff sets do not nest within tolerance; the "
        "finer signal's values fall outside the coarser simplex";
  }
  return out;
}

}  // namespace relcomm
