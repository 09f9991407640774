#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "relcomm/equilibrium.hpp"
#include "relcomm/model.hpp"
#include "relcomm/prior.hpp"
#include "relcomm/transparency.hpp"

using namespace relcomm;

namespace {
bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }
}  // namespace

TEST_CASE("signal partitions validate and order their cuts", "[partition]") {
  const SignalPartition p = SignalPartition::from_cuts({0.25, 0.5, 0.75});
  REQUIRE(p.cells() == 4);
  REQUIRE(p.cell(0) == std::pair<double, double>(0.0, 0.25));
  REQUIRE(p.cell(3) == std::pair<double, double>(0.75, 1.0));
  REQUIRE(SignalPartition().cells() == 1);
  REQUIRE(SignalPartition().cell(0) == std::pair<double, double>(0.0, 1.0));

  // Unordered input is normalized; duplicates and boundary cuts are errors.
  REQUIRE(SignalPartition::from_cuts({0.5, 0.25}).cuts() ==
          std::vector<double>{0.25, 0.5});
  REQUIRE_THROWS_AS(SignalPartition::from_cuts({0.5, 0.5}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(SignalPartition::from_cuts({0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(SignalPartition::from_cuts({1.0}), std::invalid_argument);
}

TEST_CASE("refinement is cut-set inclusion", "[partition]") {
  const SignalPartition none;
  const SignalPartition half = SignalPartition::from_cuts({0.5});
  const SignalPartition quarters = SignalPartition::from_cuts({0.25, 0.5, 0.75});
  const SignalPartition off = SignalPartition::from_cuts({0.3});

  REQUIRE(half.refines(none));
  REQUIRE(quarters.refines(half));
  REQUIRE(quarters.refines(none));
  REQUIRE(half.refines(half));  // equal partitions refine each other
  REQUIRE_FALSE(none.refines(half));
  REQUIRE_FALSE(off.refines(half));
  REQUIRE_FALSE(half.refines(quarters));
}

TEST_CASE("the uninformative signal reproduces the baseline", "[signal]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.6);
  const Prior u = Prior::uniform();
  const SignalEquilibrium eq = signal_equilibrium(m, u, SignalPartition());
  const FixedPointResult fp = solve_fixed_point(m, u);
  REQUIRE(eq.converged);
  REQUIRE(eq.cells.size() == 1);
  REQUIRE(near(eq.leeway, fp.leeway, 1e-15));
  REQUIRE(near(eq.v_s_min, fp.v_s_min, 1e-12));
  REQUIRE(near(eq.v_r_min, fp.v_r_min, 1e-12));
  REQUIRE(near(eq.v_bar, fp.v_bar, 1e-12));
}

TEST_CASE("disclosure narrows the enforceable band", "[compare]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.6);
  const Prior u = Prior::uniform();
  const TransparencyComparison cmp = compare_transparency(
      m, u, SignalPartition::from_cuts({0.5}), SignalPartition());

  REQUIRE(cmp.is_refinement);
  REQUIRE(cmp.hypothesis_ok);
  REQUIRE(cmp.verdict == "strict-inclusion");

  REQUIRE(near(cmp.fine.leeway, 1.6252358280695014, 1e-12));
  REQUIRE(near(cmp.fine.v_bar, 0.16666666666666669, 1e-12));
  REQUIRE(near(cmp.fine.v_s_min, -1.0400471656139003, 1e-12));
  REQUIRE(near(cmp.fine.v_r_min, 0.32625, 1e-12));
  REQUIRE(near(cmp.coarse.leeway, 2.343281674169714, 1e-12));
  REQUIRE(near(cmp.coarse.v_s_min, -1.7086563348339432, 1e-12));
  REQUIRE(near(cmp.coarse.v_r_min, 0.045, 1e-12));

  REQUIRE(cmp.dv_bar >= -1e-8);  // sender optimum is signal-invariant here
  REQUIRE(near(cmp.dv_s_min, 0.6686091692200429, 1e-12));
  REQUIRE(near(cmp.dv_r_min, 0.28125, 1e-12));
  REQUIRE(near(cmp.d_leeway, 0.7180458461002126, 1e-12));
  REQUIRE(cmp.dv_s_min > 1e-8);
  REQUIRE(cmp.dv_r_min > 1e-8);
  REQUIRE(cmp.d_leeway > 1e-8);

  // Both cells are punished with the same (global) band edge even though the
  // right cell would prefer the opposite one in isolation; its own preferred
  // family is reported as a diagnostic.
  REQUIRE(cmp.fine.cells.size() == 2);
  const CellOutcome& left = cmp.fine.cells[0];
  const CellOutcome& right = cmp.fine.cells[1];
  REQUIRE(near(left.mass, 0.5, 1e-12));
  REQUIRE(left.penal.family == PenalFamily::minus_side);
  REQUIRE(near(left.penal.value, -2.2276650796486508, 1e-12));
  REQUIRE(near(left.v_s_min, left.penal.value, 1e-12));
  REQUIRE(right.penal.family == PenalFamily::plus_side);
  REQUIRE(near(right.penal.value, -1.2775707484208507, 1e-12));
  REQUIRE(near(right.v_s_min, 0.14757074842085033, 1e-12));
  REQUIRE(right.v_s_min > right.penal.value);
  REQUIRE(near(cmp.fine.v_s_min,
               left.mass * left.v_s_min + right.mass * right.v_s_min, 1e-12));
  REQUIRE(cmp.fine.message.find("opposite band edge") != std::string::npos);
  REQUIRE(penal_outcome_monotone(m, cmp.fine));
}

TEST_CASE("further refinement narrows the band again", "[compare]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.6);
  const Prior u = Prior::uniform();
  const TransparencyComparison cmp = compare_transparency(
      m, u, SignalPartition::from_cuts({0.25, 0.5, 0.75}),
      SignalPartition::from_cuts({0.5}));
  REQUIRE(cmp.verdict == "strict-inclusion");
  REQUIRE(near(cmp.fine.leeway, 1.3709224995301228, 1e-12));
  REQUIRE(near(cmp.dv_s_min, 0.18367516570787612, 1e-12));
  REQUIRE(near(cmp.dv_r_min, 0.07031250000000006, 1e-12));
  REQUIRE(cmp.dv_bar >= -1e-8);
}

TEST_CASE("equal partitions compare as equal", "[compare]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.6);
  const Prior u = Prior::uniform();
  const TransparencyComparison cmp =
      compare_transparency(m, u, SignalPartition::from_cuts({0.5}),
                           SignalPartition::from_cuts({0.5}));
  REQUIRE(cmp.verdict == "equal");
  REQUIRE(cmp.dv_bar == 0.0);
  REQUIRE(cmp.dv_s_min == 0.0);
  REQUIRE(cmp.dv_r_min == 0.0);
  REQUIRE(cmp.d_leeway == 0.0);
}

TEST_CASE("non-nested signals are rejected", "[compare]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.6);
  const Prior u = Prior::uniform();
  REQUIRE_THROWS_AS(
      compare_transparency(m, u, SignalPartition::from_cuts({0.3}),
                           SignalPartition::from_cuts({0.5})),
      std::invalid_argument);
}

TEST_CASE("a falling stitched punishment map voids the ordering claim",
          "[compare]") {
  // Shallow response (a < 1): the left cell is punished at the upper band
  // edge and the right cell at the lower one, so the composed worst-case
  // decision map drops across the boundary and no inclusion is certified.
  const QuadraticModel m(0.5, 0.25, 1.0, 0.3);
  const Prior u = Prior::uniform();
  const TransparencyComparison cmp = compare_transparency(
      m, u, SignalPartition::from_cuts({0.5}), SignalPartition());
  REQUIRE(cmp.is_refinement);
  REQUIRE_FALSE(cmp.hypothesis_ok);
  REQUIRE(cmp.verdict == "hypothesis-violated");
  REQUIRE(near(cmp.fine.leeway, 0.12987121175427219, 1e-12));
  REQUIRE(cmp.fine.cells.size() == 2);
  REQUIRE(cmp.fine.cells[0].penal.family == PenalFamily::plus_side);
  REQUIRE(cmp.fine.cells[1].penal.family == PenalFamily::minus_side);
  REQUIRE_FALSE(penal_outcome_monotone(m, cmp.fine));
  REQUIRE(cmp.note.find("falls across a cell boundary") != std::string::npos);
}

TEST_CASE("a fully revealing signal drives play to the myopic benchmark",
          "[signal]") {
  const QuadraticModel m(3.0, -1.2, 1.0, 0.0);
  const Prior u = Prior::uniform();
  std::vector<double> cuts;
  for (int k = 1; k < 500; ++k) cuts.push_back(k / 500.0);
  const SignalEquilibrium fine =
      signal_equilibrium(m, u, SignalPartition::from_cuts(cuts));
  REQUIRE(fine.converged);
  REQUIRE(fine.leeway == 0.0);
  // Receiver gets its first-best decision in every (tiny) cell:
  // E[(a theta + b)^2] * c / 2 = 0.42, total value -0.02.
  REQUIRE(near(fine.v_r_min, 0.42, 1e-5));
  REQUIRE(near(fine.v_bar, -0.02, 1e-5));

  const SignalEquilibrium base = signal_equilibrium(m, u, SignalPartition());
  REQUIRE(near(base.v_r_min, 0.045, 1e-12));  // complete pooling instead
  REQUIRE(near(base.v_bar, 0.105, 1e-12));
  REQUIRE(fine.v_r_min > base.v_r_min);
  REQUIRE(fine.v_bar < base.v_bar);

  // Halving the cell width quarters the discretization error.
  std::vector<double> cuts2;
  for (int k = 1; k < 1000; ++k) cuts2.push_back(k / 1000.0);
  const SignalEquilibrium finer =
      signal_equilibrium(m, u, SignalPartition::from_cuts(cuts2));
  REQUIRE(std::abs(finer.v_r_min - 0.42) < std::abs(fine.v_r_min - 0.42));
}
