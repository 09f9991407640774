#include "relcomm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "relcomm/checker.hpp"
#include "relcomm/equilibrium.hpp"
#include "relcomm/model.hpp"
#include "relcomm/oracle.hpp"
#include "relcomm/persuasion.hpp"
#include "relcomm/pooling.hpp"
#include "relcomm/prior.hpp"
#include "relcomm/transparency.hpp"

namespace relcomm {
namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNoConvergence = 2;
constexpr int kVerifyFailure = 3;

/// Tolerance for the worst-sender grid oracle: the structured search refines
/// its threshold beyond the oracle grid, so agreement is only expected to the
/// oracle's own resolution.
constexpr double kWorstOracleTol = 1e-3;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

enum class Mode { delta, leeway };

struct Options {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double delta = 0.0;
  double leeway = 0.0;
  std::string preset;
  double lambda_s = 0.0;
  double alpha = 0.0;
  double d0 = 0.0;
  std::string prior_file;
  int grid_n = 500;
  double tol = 1e-6;
  double sweep_min = 0.0;
  double sweep_max = 0.0;
  int sweep_steps = 0;
  std::string signal;
  std::string signal_hat;
  std::string format;
  std::string out_path;
  std::string perturb;
  int oracle_n = 2000;
  bool exhaustive = false;
};

void add_common_flags(CLI::App* sub, Options* o) {
  sub->add_option("--a", o->a,
                  "response slope (or the output share for --preset agency)");
  sub->add_option("--b", o->b, "response intercept");
  sub->add_option("--c", o->c, "receiver share of the joint payoff, in (0,1]");
  sub->add_option("--delta", o->delta,
                  "discount factor in [0,1); solves the leeway fixed point");
  sub->add_option("--leeway", o->leeway,
                  "enforceable band half-width; bypasses the fixed point");
  sub->add_option("--preset", o->preset, "named configuration")
      ->check(CLI::IsMember({"agency", "lobbying"}));
  sub->add_option("--lambda-s", o->lambda_s,
                  "lobbying preset: sender influence weight in (0,1)");
  sub->add_option("--alpha", o->alpha, "lobbying preset: response scale");
  sub->add_option("--d0", o->d0,
                  "lobbying preset: sender's preferred decision offset");
  sub->add_option("--prior-file", o->prior_file,
                  "CSV file with prior cell densities (uniform if omitted)");
  sub->add_option("--format", o->format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", o->out_path,
                  "write the report to this file instead of stdout");
}

Mode resolve_mode(const CLI::App& sub) {
  const bool has_delta = sub.count("--delta") > 0;
  const bool has_leeway = sub.count("--leeway") > 0;
  if (has_delta == has_leeway) {
    throw std::invalid_argument(
        "exactly one of --delta and --leeway is required");
  }
  return has_delta ? Mode::delta : Mode::leeway;
}

QuadraticModel make_model(const Options& o, const CLI::App& sub,
                          double delta) {
  const auto has = [&sub](const std::string& name) {
    return sub.count(name) > 0;
  };
  if (o.preset == "agency") {
    if (!has("--a")) {
      throw std::invalid_argument(
          "--preset agency requires --a (the output share, in (0,1))");
    }
    if (has("--b") || has("--c")) {
      throw std::invalid_argument(
          "--preset agency fixes b = 0 and c = 1; drop --b/--c");
    }
    if (has("--lambda-s") || has("--alpha") || has("--d0")) {
      throw std::invalid_argument(
          "--lambda-s/--alpha/--d0 belong to --preset lobbying");
    }
    return agency_preset(o.a, delta);
  }
  if (o.preset == "lobbying") {
    if (!has("--lambda-s") || !has("--alpha") || !has("--d0")) {
      throw std::invalid_argument(
          "--preset lobbying requires --lambda-s, --alpha and --d0");
    }
    if (has("--a") || has("--b") || has("--c")) {
      throw std::invalid_argument(
          "--preset lobbying derives a, b, c from --lambda-s/--alpha/--d0; "
          "drop --a/--b/--c");
    }
    return lobbying_preset(o.lambda_s, o.alpha, o.d0, delta);
  }
  if (!has("--a")) {
    throw std::invalid_argument("--a is required (or use --preset)");
  }
  return QuadraticModel(o.a, o.b, o.c, delta);
}

Prior make_prior(const Options& o, std::ostream& err) {
  if (o.prior_file.empty()) return Prior::uniform();
  std::string warning;
  Prior prior = Prior::from_csv(o.prior_file, &warning);
  if (!warning.empty()) err << "warning: " << warning << "\n";
  return prior;
}

void warn_sorting(const QuadraticModel& model, std::ostream& err) {
  if (!model.sorting_ok()) {
    err << "warning: a*c = " << fmt17(model.a() * model.c())
        << " >= 1; the sender's marginal value of higher decisions flips "
           "sign, so truthful implementation of increasing decision rules "
           "is not guaranteed (certification will report any violation)\n";
  }
}

void require_json_format(const Options& o, const char* command) {
  if (!o.format.empty() && o.format != "json") {
    throw std::invalid_argument(std::string(command) +
                                " emits json; --format csv is only "
                                "available for sweep");
  }
}

void emit(const Options& o, const std::string& payload, std::ostream& out) {
  if (o.out_path.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open output file: " + o.out_path);
  }
  file << payload;
}

std::vector<double> parse_cuts(const std::string& text) {
  std::vector<double> cuts;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse signal cut '" + item + "'");
    }
    if (used != item.size()) {
      throw std::invalid_argument("cannot parse signal cut '" + item + "'");
    }
    cuts.push_back(value);
  }
  return cuts;
}

// ---------------------------------------------------------------------------
// JSON builders
// ---------------------------------------------------------------------------

json pooling_json(const PoolingSet& pooling) {
  json arr = json::array();
  for (const auto& iv : pooling.intervals()) {
    arr.push_back(json::array({iv.lo, iv.hi}));
  }
  return arr;
}

json model_json(const QuadraticModel& m) {
  json j;
  j["a"] = m.a();
  j["b"] = m.b();
  j["c"] = m.c();
  j["delta"] = m.delta();
  j["sorting_ok"] = m.sorting_ok();
  return j;
}

json prior_json(const Options& o) {
  json j;
  j["kind"] = o.prior_file.empty() ? "uniform" : "csv";
  if (!o.prior_file.empty()) j["file"] = o.prior_file;
  return j;
}

json simplex_json(const ValueTriple& vals) {
  json j;
  j["v_bar"] = vals.v_bar;
  j["v_s_min"] = vals.v_s_min;
  j["v_r_min"] = vals.v_r_min;
  j["surplus"] = vals.surplus();
  return j;
}

json fixed_point_json(const FixedPointResult& fp) {
  json j;
  j["converged"] = fp.converged;
  j["iterations"] = fp.iterations;
  j["bracket"] = json::array({fp.bracket_lo, fp.bracket_hi});
  if (!fp.message.empty()) j["message"] = fp.message;
  return j;
}

json penal_json(const PenalResult& penal) {
  json cf;
  cf["threshold"] = penal.closed_form_threshold;
  cf["value"] = penal.closed_form_value;
  cf["in_range"] = penal.closed_form_in_range;
  cf["disagreement"] = penal.disagreement;
  json j;
  j["family"] = to_string(penal.family);
  j["interval"] = json::array({penal.lo, penal.hi});
  j["threshold"] = penal.threshold;
  j["pooled_mean"] = penal.pooled_mean;
  j["value"] = penal.value;
  j["pooling"] = pooling_json(penal.pooling);
  j["closed_form"] = cf;
  if (!penal.note.empty()) j["note"] = penal.note;
  return j;
}

json messages_json(const QuadraticModel& model, const Prior& prior,
                   double leeway, const PoolingSolution& sol) {
  json msgs = json::array();
  const auto separated = [&](double lo, double hi) {
    json m;
    m["kind"] = "separated";
    m["interval"] = json::array({lo, hi});
    m["decision_lo"] = rho_star(model, leeway, lo);
    m["decision_hi"] = rho_star(model, leeway, hi);
    msgs.push_back(m);
  };
  double cursor = 0.0;
  for (const auto& iv : sol.pooling.intervals()) {
    if (iv.lo > cursor + 1e-12) separated(cursor, iv.lo);
    const double mean = prior.mean(iv.lo, iv.hi);
    json m;
    m["kind"] = "pooled";
    m["interval"] = json::array({iv.lo, iv.hi});
    m["mean"] = mean;
    m["decision"] = rho_star(model, leeway, mean);
    msgs.push_back(m);
    cursor = iv.hi;
  }
  if (cursor < 1.0 - 1e-12) separated(cursor, 1.0);
  return msgs;
}

void fill_solution(json* j, const QuadraticModel& model, const Prior& prior,
                   double leeway, const PoolingSolution& sol) {
  (*j)["regime"] = to_string(sol.regime);
  (*j)["pooling"] = pooling_json(sol.pooling);
  json thresholds;
  thresholds["theta_l"] = sol.theta_l;
  thresholds["theta_h"] = sol.theta_h;
  thresholds["theta_m"] = sol.theta_m;
  (*j)["thresholds"] = thresholds;
  json pool_means;
  pool_means["m_low"] = sol.m_low;
  pool_means["m_high"] = sol.m_high;
  (*j)["pool_means"] = pool_means;
  (*j)["boundary"] = sol.boundary;
  (*j)["messages"] = messages_json(model, prior, leeway, sol);
  if (!sol.note.empty()) (*j)["note"] = sol.note;
}

json cell_json(const CellOutcome& cell) {
  json j;
  j["interval"] = json::array({cell.lo, cell.hi});
  j["mass"] = cell.mass;
  j["pooling"] = pooling_json(cell.pooling);
  j["v_bar"] = cell.v_bar;
  j["v_s_min"] = cell.v_s_min;
  j["v_r_min"] = cell.v_r_min;
  json penal;
  penal["family"] = to_string(cell.penal.family);
  penal["threshold"] = cell.penal.threshold;
  penal["value"] = cell.penal.value;
  j["penal"] = penal;
  return j;
}

json signal_json(const SignalEquilibrium& eq) {
  json j;
  j["cuts"] = eq.partition.cuts();
  j["leeway"] = eq.leeway;
  j["converged"] = eq.converged;
  j["iterations"] = eq.iterations;
  j["v_bar"] = eq.v_bar;
  j["v_s_min"] = eq.v_s_min;
  j["v_r_min"] = eq.v_r_min;
  j["surplus"] = eq.surplus;
  j["pooling"] = pooling_json(eq.pooling);
  json cells = json::array();
  for (const auto& cell : eq.cells) cells.push_back(cell_json(cell));
  j["cells"] = cells;
  if (!eq.message.empty()) j["message"] = eq.message;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Shared delta/leeway resolution. Fills the leeway, solution and value
/// triple; on a failed fixed point, emits the diagnostic payload and returns
/// the non-convergence exit code.
struct Resolved {
  double leeway = 0.0;
  PoolingSolution solution;
  ValueTriple values;
  std::optional<FixedPointResult> fixed_point;
};

int resolve_equilibrium(const QuadraticModel& model, const Prior& prior,
                        Mode mode, const Options& o, json* j,
                        std::ostream& out, std::ostream& err,
                        Resolved* resolved) {
  if (mode == Mode::delta) {
    FixedPointResult fp = solve_fixed_point(model, prior);
    (*j)["fixed_point"] = fixed_point_json(fp);
    (*j)["delta"] = model.delta();
    (*j)["leeway"] = fp.leeway;
    if (!fp.converged) {
      err << "fixed point did not converge: " << fp.message << "\n";
      emit(o, dump(*j), out);
      return kNoConvergence;
    }
    resolved->leeway = fp.leeway;
    resolved->solution = fp.solution;
    resolved->values.v_bar = fp.v_bar;
    resolved->values.v_s_min = fp.v_s_min;
    resolved->values.v_r_min = fp.v_r_min;
    resolved->fixed_point = fp;
    return kOk;
  }
  if (o.leeway < 0.0) {
    throw std::invalid_argument("--leeway must be nonnegative");
  }
  (*j)["delta"] = json();  // unknown in direct-leeway mode
  (*j)["leeway"] = o.leeway;
  resolved->leeway = o.leeway;
  resolved->solution = optimal_for(model, prior, o.leeway);
  resolved->values = values_at(model, prior, o.leeway);
  return kOk;
}

int cmd_solve(const CLI::App& sub, const Options& o, std::ostream& out,
              std::ostream& err) {
  require_json_format(o, "solve");
  const Mode mode = resolve_mode(sub);
  const QuadraticModel model =
      make_model(o, sub, mode == Mode::delta ? o.delta : 0.0);
  warn_sorting(model, err);
  const Prior prior = make_prior(o, err);

  json j;
  j["command"] = "solve";
  j["model"] = model_json(model);
  j["prior"] = prior_json(o);
  Resolved r;
  const int code = resolve_equilibrium(model, prior, mode, o, &j, out, err, &r);
  if (code != kOk) return code;
  fill_solution(&j, model, prior, r.leeway, r.solution);
  j["simplex"] = simplex_json(r.values);
  emit(o, dump(j), out);
  return kOk;
}

int cmd_worst(const CLI::App& sub, const Options& o, std::ostream& out,
              std::ostream& err) {
  require_json_format(o, "worst");
  const Mode mode = resolve_mode(sub);
  const QuadraticModel model =
      make_model(o, sub, mode == Mode::delta ? o.delta : 0.0);
  warn_sorting(model, err);
  const Prior prior = make_prior(o, err);

  json j;
  j["command"] = "worst";
  j["model"] = model_json(model);
  j["prior"] = prior_json(o);
  Resolved r;
  const int code = resolve_equilibrium(model, prior, mode, o, &j, out, err, &r);
  if (code != kOk) return code;
  j["sender_worst"] = penal_json(sender_worst(model, prior, r.leeway));
  j["receiver_worst"] = receiver_worst(model, prior);
  j["simplex"] = simplex_json(r.values);
  emit(o, dump(j), out);
  return kOk;
}

int cmd_sweep(const CLI::App& sub, const Options& o, std::ostream& out,
              std::ostream& err) {
  if (sub.count("--delta") > 0) {
    throw std::invalid_argument(
        "sweep varies the discount factor via --sweep-min/--sweep-max; pass "
        "--leeway (value ignored) to sweep the band width instead of delta");
  }
  const bool leeway_mode = sub.count("--leeway") > 0;
  if (o.sweep_steps < 1) {
    throw std::invalid_argument("--sweep-steps must be at least 1");
  }
  if (o.sweep_min < 0.0 || o.sweep_max < o.sweep_min) {
    throw std::invalid_argument(
        "empty sweep range: need 0 <= --sweep-min <= --sweep-max");
  }
  if (!leeway_mode && o.sweep_max >= 1.0) {
    throw std::invalid_argument(
        "delta sweep requires --sweep-max < 1 (pass --leeway to sweep the "
        "band width directly)");
  }
  const QuadraticModel base = make_model(o, sub, 0.0);
  warn_sorting(base, err);
  const Prior prior = make_prior(o, err);

  struct Row {
    double delta, ell;
    std::string regime;
    double theta_l, theta_h, theta_m, v_bar, v_s_min, v_r_min;
  };
  const int steps = o.sweep_steps;
  std::vector<Row> rows(static_cast<std::size_t>(steps));
  std::vector<std::string> failures(static_cast<std::size_t>(steps));
  // Grid points are independent; compute them in a worker pool and emit in
  // parameter order so the output is byte-identical regardless of scheduling.
  const auto compute = [&](int i) {
    const double x =
        steps == 1
            ? o.sweep_min
            : o.sweep_min + (o.sweep_max - o.sweep_min) * i / (steps - 1);
    Row row{};
    try {
      if (leeway_mode) {
        row.delta = std::numeric_limits<double>::quiet_NaN();
        row.ell = x;
        const PoolingSolution sol = optimal_for(base, prior, x);
        const ValueTriple vals = values_at(base, prior, x);
        row.regime = to_string(sol.regime);
        row.theta_l = sol.theta_l;
        row.theta_h = sol.theta_h;
        row.theta_m = sol.theta_m;
        row.v_bar = vals.v_bar;
        row.v_s_min = vals.v_s_min;
        row.v_r_min = vals.v_r_min;
      } else {
        const QuadraticModel model = make_model(o, sub, x);
        const FixedPointResult fp = solve_fixed_point(model, prior);
        if (!fp.converged) {
          failures[static_cast<std::size_t>(i)] =
              "fixed point did not converge at delta = " + fmt17(x) + ": " +
              fp.message;
          return;
        }
        row.delta = x;
        row.ell = fp.leeway;
        row.regime = to_string(fp.solution.regime);
        row.theta_l = fp.solution.theta_l;
        row.theta_h = fp.solution.theta_h;
        row.theta_m = fp.solution.theta_m;
        row.v_bar = fp.v_bar;
        row.v_s_min = fp.v_s_min;
        row.v_r_min = fp.v_r_min;
      }
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
      return;
    }
    rows[static_cast<std::size_t>(i)] = std::move(row);
  };
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers = std::max(
      1u, std::min(hw == 0 ? 1u : hw, static_cast<unsigned>(steps)));
  if (workers <= 1) {
    for (int i = 0; i < steps; ++i) compute(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < steps; i = next.fetch_add(1)) {
          compute(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < steps; ++i) {
    if (!failures[static_cast<std::size_t>(i)].empty()) {
      err << failures[static_cast<std::size_t>(i)] << "\n";
      return kNoConvergence;
    }
  }

  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j;
      j["delta"] = r.delta;
      j["ell"] = r.ell;
      j["regime"] = r.regime;
      j["theta_L_star"] = r.theta_l;
      j["theta_H_star"] = r.theta_h;
      j["theta_M_star"] = r.theta_m;
      j["v_bar"] = r.v_bar;
      j["v_s_min"] = r.v_s_min;
      j["v_r_min"] = r.v_r_min;
      arr.push_back(j);
    }
    emit(o, dump(arr), out);
    return kOk;
  }
  std::ostringstream csv;
  csv << "delta,ell,regime,theta_L_star,theta_H_star,theta_M_star,"
         "v_bar,v_s_min,v_r_min\n";
  for (const auto& r : rows) {
    csv << fmt17(r.delta) << ',' << fmt17(r.ell) << ',' << r.regime << ','
        << fmt17(r.theta_l) << ',' << fmt17(r.theta_h) << ','
        << fmt17(r.theta_m) << ',' << fmt17(r.v_bar) << ','
        << fmt17(r.v_s_min) << ',' << fmt17(r.v_r_min) << '\n';
  }
  emit(o, csv.str(), out);
  return kOk;
}

Perturbation parse_perturbation(const std::string& name) {
  if (name == "decision_push") return Perturbation::decision_push;
  if (name == "transfer_undercut") return Perturbation::transfer_undercut;
  if (name == "non_monotone") return Perturbation::non_monotone;
  throw std::invalid_argument(
      "--perturb must be one of decision_push, transfer_undercut, "
      "non_monotone");
}

int cmd_verify(const CLI::App& sub, const Options& o, std::ostream& out,
               std::ostream& err) {
  require_json_format(o, "verify");
  if (o.grid_n < 100) {
    throw std::invalid_argument("--grid-n must be at least 100");
  }
  if (o.oracle_n < 2) {
    throw std::invalid_argument("--oracle-n must be at least 2");
  }
  if (o.exhaustive && o.oracle_n > 20) {
    throw std::invalid_argument(
        "--exhaustive enumerates 2^(n-1) partitions; --oracle-n must be "
        "<= 20");
  }
  if (o.tol <= 0.0) {
    throw std::invalid_argument("--tol must be positive");
  }
  const Mode mode = resolve_mode(sub);
  QuadraticModel model =
      make_model(o, sub, mode == Mode::delta ? o.delta : 0.0);
  const Prior prior = make_prior(o, err);
  // Enforcement conditions need a discount factor. When the band is given
  // directly, certify at the implied factor that makes it exactly
  // self-enforcing.
  if (mode == Mode::leeway) {
    if (o.leeway < 0.0) {
      throw std::invalid_argument("--leeway must be nonnegative");
    }
    const double implied = delta_for_leeway(model, prior, o.leeway);
    if (!std::isfinite(implied)) {
      throw std::invalid_argument(
          "no discount factor sustains --leeway " + fmt17(o.leeway) +
          " (nonpositive surplus at that band); pass --delta instead");
    }
    model = make_model(o, sub, implied);
  }
  warn_sorting(model, err);

  json j;
  j["command"] = "verify";
  j["model"] = model_json(model);
  j["prior"] = prior_json(o);
  j["grid_n"] = o.grid_n;
  j["oracle_n"] = o.oracle_n;
  Resolved r;
  const int code = resolve_equilibrium(model, prior, mode, o, &j, out, err, &r);
  if (code != kOk) return code;
  if (mode == Mode::leeway) j["delta_implied"] = model.delta();

  EquilibriumProfile profile =
      build_profile(model, prior, r.leeway, r.solution, o.grid_n);
  if (!o.perturb.empty()) {
    profile = perturb_profile(model, profile, parse_perturbation(o.perturb));
    j["perturbation"] = o.perturb;
  } else {
    j["perturbation"] = json();
  }

  const ConditionReport report = check_conditions(model, profile);
  json conditions;
  for (const auto& [name, slack] : report.items()) conditions[name] = slack;
  conditions["min_slack"] = report.min_slack;
  conditions["worst"] = report.worst;
  const bool cond_pass = report.pass();
  conditions["pass"] = cond_pass;
  j["conditions"] = conditions;

  const Deviation dev = best_deviation(model, profile);
  const bool dev_pass = dev.gain <= 1e-9;
  json deviation;
  deviation["theta"] = dev.theta;
  deviation["theta_hat"] = dev.theta_hat;
  deviation["gain"] = dev.gain;
  deviation["pass"] = dev_pass;
  j["deviation"] = deviation;

  const PosteriorPayoff payoff(model, r.leeway);
  const DiscretizedProblem grid(prior, o.oracle_n);
  const auto g = [&payoff](double m) { return payoff.value(m); };
  const PartitionResult dp = dp_optimal_partition(grid, g);
  const double dp_gap = std::abs(dp.value - r.values.v_bar);
  const double pool_symdiff =
      dp.pooling.symmetric_difference(r.solution.pooling);
  // The grid oracles carry an O(1/n^2) discretization defect (thresholds
  // snap to cell edges and the value is locally quadratic around them), so
  // coarse diagnostic grids widen the acceptance window accordingly.
  const double grid_defect =
      4.0 / (static_cast<double>(o.oracle_n) * o.oracle_n);
  const double dp_tol = std::max(o.tol, grid_defect);
  const bool dp_pass = dp_gap <= dp_tol;
  const WorstSenderScan scan =
      oracle_worst_sender(model, prior, r.leeway, o.oracle_n);
  const double worst_gap = std::abs(scan.value - r.values.v_s_min);
  const double worst_tol = std::max(kWorstOracleTol, grid_defect);
  const bool worst_pass = worst_gap <= worst_tol;
  json oracle;
  oracle["dp_value"] = dp.value;
  oracle["solver_value"] = r.values.v_bar;
  oracle["value_gap"] = dp_gap;
  oracle["pool_symdiff"] = pool_symdiff;
  oracle["segments"] = dp.segments;
  oracle["pass"] = dp_pass;
  json worst_oracle;
  worst_oracle["oracle_value"] = scan.value;
  worst_oracle["oracle_threshold"] = scan.threshold;
  worst_oracle["oracle_family"] = to_string(scan.family);
  worst_oracle["solver_value"] = r.values.v_s_min;
  worst_oracle["value_gap"] = worst_gap;
  worst_oracle["pass"] = worst_pass;
  oracle["worst_sender"] = worst_oracle;
  j["oracle"] = oracle;

  bool exhaustive_pass = true;
  if (o.exhaustive) {
    const PartitionResult full = enumerate_partitions(grid, g);
    const bool value_match = full.value == dp.value;
    const bool cuts_match = full.cuts == dp.cuts;
    exhaustive_pass = value_match && cuts_match;
    json exhaustive;
    exhaustive["n"] = o.oracle_n;
    exhaustive["dp_value"] = dp.value;
    exhaustive["enumeration_value"] = full.value;
    exhaustive["value_match"] = value_match;
    exhaustive["cuts_match"] = cuts_match;
    exhaustive["match"] = exhaustive_pass;
    j["exhaustive"] = exhaustive;
    if (exhaustive_pass) {
      err << "dp-vs-enumeration: exact match over " << o.oracle_n
          << " cells\n";
    }
  } else {
    j["exhaustive"] = json();
  }

  const bool pass =
      cond_pass && dev_pass && dp_pass && worst_pass && exhaustive_pass;
  j["pass"] = pass;
  if (!pass) {
    err << "verification failed:";
    if (!cond_pass) {
      err << " condition " << report.worst << " has slack "
          << fmt17(report.min_slack) << ";";
    }
    if (!dev_pass) {
      err << " profitable misreport with gain " << fmt17(dev.gain) << ";";
    }
    if (!dp_pass) {
      err << " partition oracle value gap " << fmt17(dp_gap) << " exceeds "
          << fmt17(dp_tol) << ";";
    }
    if (!worst_pass) {
      err << " worst-sender oracle gap " << fmt17(worst_gap) << " exceeds "
          << fmt17(worst_tol) << ";";
    }
    if (!exhaustive_pass) {
      err << " dp and enumeration disagree;";
    }
    err << "\n";
  }
  emit(o, dump(j), out);
  return pass ? kOk : kVerifyFailure;
}

int cmd_transparency(const CLI::App& sub, const Options& o, std::ostream& out,
                     std::ostream& err) {
  require_json_format(o, "transparency");
  if (sub.count("--leeway") > 0) {
    throw std::invalid_argument(
        "transparency solves the leeway fixed point per signal; pass --delta "
        "instead of --leeway");
  }
  if (sub.count("--delta") == 0) {
    throw std::invalid_argument("--delta is required for transparency");
  }
  if (sub.count("--signal") == 0) {
    throw std::invalid_argument(
        "--signal is required (comma-separated interior cuts; the empty "
        "string is the uninformative signal)");
  }
  const QuadraticModel model = make_model(o, sub, o.delta);
  warn_sorting(model, err);
  const Prior prior = make_prior(o, err);
  const SignalPartition fine = SignalPartition::from_cuts(parse_cuts(o.signal));
  const SignalPartition coarse =
      SignalPartition::from_cuts(parse_cuts(o.signal_hat));
  const TransparencyComparison cmp =
      compare_transparency(model, prior, fine, coarse);

  json j;
  j["command"] = "transparency";
  j["model"] = model_json(model);
  j["prior"] = prior_json(o);
  j["fine"] = signal_json(cmp.fine);
  j["coarse"] = signal_json(cmp.coarse);
  j["is_refinement"] = cmp.is_refinement;
  j["hypothesis_ok"] = cmp.hypothesis_ok;
  j["verdict"] = cmp.verdict;
  j["dv_bar"] = cmp.dv_bar;
  j["dv_s_min"] = cmp.dv_s_min;
  j["dv_r_min"] = cmp.dv_r_min;
  j["d_leeway"] = cmp.d_leeway;
  j["note"] = cmp.note;
  if (!cmp.fine.converged || !cmp.coarse.converged) {
    err << "fixed point did not converge for the "
        << (cmp.fine.converged ? "coarse" : "fine") << " signal\n";
    emit(o, dump(j), out);
    return kNoConvergence;
  }
  emit(o, dump(j), out);
  return kOk;
}

}  // namespace

CliResult run_command(const std::vector<std::string>& args) {
  CliResult result;
  std::ostringstream out;
  std::ostringstream err;
  Options o;

  CLI::App app{"relational communication: equilibrium leeway, optimal "
               "disclosure, punishment values and certification"};
  app.name("relcomm");
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand(
      "solve", "optimal disclosure and the value simplex at the "
               "equilibrium leeway");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "tabulate the solution over delta (default) or leeway");
  CLI::App* worst = app.add_subcommand(
      "worst", "punishment values: sender-worst penal scheme and the "
               "receiver's floor");
  CLI::App* verify = app.add_subcommand(
      "verify", "certify the stationary profile against equilibrium "
                "conditions and partition oracles");
  CLI::App* transparency = app.add_subcommand(
      "transparency", "compare equilibria across nested public signals");

  for (CLI::App* sub : {solve, sweep, worst, verify, transparency}) {
    add_common_flags(sub, &o);
  }
  sweep->add_option("--sweep-min", o.sweep_min, "first swept value")
      ->required();
  sweep->add_option("--sweep-max", o.sweep_max, "last swept value")
      ->required();
  sweep->add_option("--sweep-steps", o.sweep_steps, "number of sweep points")
      ->required();
  verify->add_option("--grid-n", o.grid_n,
                     "state-grid resolution for the certified profile");
  verify->add_option("--tol", o.tol,
                     "value tolerance for the partition oracle");
  verify->add_option("--perturb", o.perturb,
                     "scripted defect: decision_push | transfer_undercut | "
                     "non_monotone");
  verify->add_option("--oracle-n", o.oracle_n,
                     "cell count for the partition and worst-sender oracles");
  verify->add_flag("--exhaustive", o.exhaustive,
                   "also brute-force all interval partitions (needs "
                   "--oracle-n <= 20)");
  transparency->add_option("--signal", o.signal,
                           "fine signal: comma-separated interior cuts");
  transparency->add_option("--signal-hat", o.signal_hat,
                           "coarse signal the fine one refines (default: "
                           "uninformative)");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("relcomm");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    result.exit_code = code == 0 ? kOk : kConfigError;
    result.out = out.str();
    result.err = err.str();
    return result;
  }

  int code = kOk;
  try {
    if (solve->parsed()) {
      code = cmd_solve(*solve, o, out, err);
    } else if (sweep->parsed()) {
      code = cmd_sweep(*sweep, o, out, err);
    } else if (worst->parsed()) {
      code = cmd_worst(*worst, o, out, err);
    } else if (verify->parsed()) {
      code = cmd_verify(*verify, o, out, err);
    } else if (transparency->parsed()) {
      code = cmd_transparency(*transparency, o, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kConfigError;
  }
  result.exit_code = code;
  result.out = out.str();
  result.err = err.str();
  return result;
}

}  // namespace relcomm
