#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stabletail/errors.hpp"
#include "stabletail/mc_estimation.hpp"
#include "stabletail/repro/bank.hpp"
#include "stabletail/repro/examples.hpp"
#include "stabletail/repro/report.hpp"
#include "stabletail/repro/scenario.hpp"
#include "stabletail/stable_univariate.hpp"
#include "stabletail/tail_asymptotics.hpp"

namespace fs = std::filesystem;
using namespace stabletail;
using namespace stabletail::repro;

namespace {

enum Exit { ok = 0, tolerance_failure = 1, input_error = 2, capability_error = 3, runtime_error = 4 };

struct Common {
  std::uint64_t seed = 20240601;
  std::optional<std::size_t> n;
  std::optional<double> alpha;
  std::vector<double> h_grid;
  int workers = 1;
  double tolerance_scale = 1.0;
  bool json = false;
  std::string out;
};

struct ScenarioArgs {
  std::string scenario;
  std::string model;
  std::string region;
  std::string example;
  std::optional<int> k;
  std::string variant;
  std::optional<double> h;
  std::string method;
  std::optional<int> smoothing_index;
  bool max_partition = false;
  bool iid = false;
  bool no_log_model = false;
  double tolerance = 5e-3;
};

void add_common(CLI::App* app, Common& c, bool with_grid = true) {
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--n", c.n, "sample count");
  app->add_option("--alpha", c.alpha, "stability index in (0, 2)");
  if (with_grid) app->add_option("--h-grid", c.h_grid, "comma-separated scale grid")->delimiter(',');
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--tolerance-scale", c.tolerance_scale, "multiplies every bank tolerance")
      ->check(CLI::PositiveNumber);
  app->add_flag("--json", c.json, "print JSON instead of text");
  app->add_option("--out", c.out, "directory for JSON and CSV report files");
}

void add_scenario(CLI::App* app, ScenarioArgs& s) {
  app->add_option("--scenario", s.scenario, "scenario JSON file");
  app->add_option("--model", s.model, "model JSON (inline or file)");
  app->add_option("--region", s.region, "region JSON (inline or file)");
  app->add_option("--example", s.example, "builtin model: independent, shared_factor, permutation");
  app->add_option("--k", s.k, "order k");
  app->add_option("--variant", s.variant, "interior, closure, dilated:<d> or eroded:<d>");
}

StableVectorModel builtin_model(const std::string& name, double alpha) {
  if (name == "independent") return independent_model(alpha);
  if (name == "shared_factor") return shared_factor_model(alpha);
  if (name == "permutation") return permutation_model(alpha, 0.5);
  throw ParseError("--example", "unknown builtin model '" + name + "'");
}

RegionVariant variant_from_flag(const std::string& v) {
  const auto colon = v.find(':');
  if (colon == std::string::npos) return parse_variant(Json(v), "--variant");
  const std::string key = v.substr(0, colon);
  double d = 0.0;
  try {
    d = std::stod(v.substr(colon + 1));
  } catch (const std::exception&) {
    throw ParseError("--variant", "bad delta in '" + v + "'");
  }
  return parse_variant(Json{{key, d}}, "--variant");
}

Scenario resolve(const Common& c, const ScenarioArgs& a, Task task) {
  Scenario s;
  if (!a.scenario.empty()) s = parse_scenario(load_json_argument(a.scenario));
  s.task = task;
  if (!a.model.empty()) {
    s.model_json = load_json_argument(a.model);
    s.model = parse_model(s.model_json, "--model");
  }
  if (!a.region.empty()) {
    s.region_json = load_json_argument(a.region);
    s.region = parse_region(s.region_json, "--region");
  }
  if (!a.example.empty()) {
    s.model = builtin_model(a.example, c.alpha.value_or(s.model ? s.model->alpha() : 1.0));
    s.model_json = model_to_json(*s.model);
  }
  if (c.alpha && s.model) {
    s.model = StableVectorModel(*c.alpha, s.model->measure());
    s.model_json = model_to_json(*s.model);
  }
  if (!s.model) throw ParseError("--model", "no model given (use --scenario, --model or --example)");
  if (s.region && s.region->dim() != s.model->dim()) throw ParseError("--region", "dimension differs from the model");
  auto& p = s.params;
  if (c.n) p.n = *c.n;
  p.seed = c.seed;
  if (!c.h_grid.empty()) p.h_grid = c.h_grid;
  if (a.k) p.k = *a.k;
  if (!a.variant.empty()) p.variant = variant_from_flag(a.variant);
  if (a.h) p.h = *a.h;
  if (!a.method.empty()) p.method = a.method;
  if (a.smoothing_index) p.smoothing_index = *a.smoothing_index;
  if (a.max_partition) p.max_partition = true;
  if (a.iid) p.stratified = false;
  if (a.no_log_model) p.log_model = false;
  if (task != Task::reproduce && !s.region) throw ParseError("--region", "no region given");
  check_capabilities(s);
  return s;
}

ConditionalOptions conditional_options(const Scenario& s, int workers) {
  ConditionalOptions o;
  o.smoothing = s.params.max_partition ? ConditionalOptions::Smoothing::max_partition
                                       : ConditionalOptions::Smoothing::single;
  o.smoothing_index = s.params.smoothing_index;
  o.sampling = s.params.stratified ? ConditionalOptions::Sampling::stratified : ConditionalOptions::Sampling::iid;
  o.workers = workers;
  return o;
}

std::vector<EstimateReport> run_grid(const Scenario& s, const Common& c) {
  if (s.params.h_grid.empty()) throw ParseError("--h-grid", "an h grid is required");
  ProbeOptions po;
  po.method = s.params.method == "crude" ? EstimateMethod::crude : EstimateMethod::conditional;
  po.conditional = conditional_options(s, c.workers);
  po.workers = c.workers;
  return normalized_limit_probe(*s.model, *s.region, s.params.k, s.params.h_grid, s.params.n, s.params.seed, po);
}

void emit(const Common& c, const Json& j, const std::vector<Table>& tables, const std::string& stem) {
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_json_file((fs::path(c.out) / (stem + ".json")).string(), j);
    for (const auto& t : tables) write_csv_file((fs::path(c.out) / (stem + "_" + t.name + ".csv")).string(), t);
  }
  if (c.json || tables.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (const auto& t : tables) write_csv(std::cout, t);
}

int cmd_dist(const Common& c, const std::vector<double>& xs, const std::vector<double>& us, std::size_t samples) {
  if (!c.alpha) throw ParseError("--alpha", "dist needs --alpha");
  const auto& law = stable_law(*c.alpha);
  Json j = {{"alpha", law.alpha()}, {"c_alpha", law.c()}};
  Table t{"dist", {"x", "pdf", "cdf", "sf"}, {}};
  for (double x : xs) t.rows.push_back({x, law.pdf(x), law.cdf(x), law.sf(x)});
  Table q{"quantiles", {"u", "quantile"}, {}};
  for (double u : us) q.rows.push_back({u, law.quantile(u)});
  std::vector<Table> tables;
  if (!t.rows.empty()) tables.push_back(t);
  if (!q.rows.empty()) tables.push_back(q);
  if (samples > 0) {
    RandomStream rng(c.seed, 0);
    Table s{"samples", {"draw"}, {}};
    for (std::size_t i = 0; i < samples; ++i) s.rows.push_back({law.sample(rng)});
    tables.push_back(s);
  }
  for (const auto& tb : tables) j[tb.name] = {{"columns", tb.columns}, {"rows", tb.rows}};
  emit(c, j, tables, "dist");
  return ok;
}

int cmd_cf_check(const Common& c, const ScenarioArgs& a) {
  ScenarioArgs args = a;
  if (args.scenario.empty() && args.model.empty() && args.example.empty()) args.example = "independent";
  const Scenario s = resolve(c, args, Task::reproduce);
  const std::size_t n = c.n.value_or(100000);
  const auto thetas = theta_grid(s.model->dim());
  std::vector<double> sum(thetas.size(), 0.0), sum2(thetas.size(), 0.0);
  RandomStream rng(c.seed, 0);
  if (s.model->measure().is_atomic()) {
    const VectorSampler vs(*s.model);
    for (std::size_t i = 0; i < n; ++i) {
      const Vector x = vs.sample(rng);
      for (std::size_t q = 0; q < thetas.size(); ++q) {
        const double v = std::cos(thetas[q].dot(x));
        sum[q] += v;
        sum2[q] += v * v;
      }
    }
  } else {
    const LePageSampler lp(*s.model);
    for (std::size_t i = 0; i < n; ++i) {
      const Vector x = lp.sample(rng).value;
      for (std::size_t q = 0; q < thetas.size(); ++q) {
        const double v = std::cos(thetas[q].dot(x));
        sum[q] += v;
        sum2[q] += v * v;
      }
    }
  }
  Table t{"cf", {"theta", "empirical", "exact", "std_error", "z"}, {}};
  double worst = 0.0;
  for (std::size_t q = 0; q < thetas.size(); ++q) {
    const double nn = static_cast<double>(n);
    const double mean = sum[q] / nn;
    const double se = std::sqrt(std::max(sum2[q] / nn - mean * mean, 0.0) / nn);
    const double exact = cf_value(*s.model, thetas[q]);
    const double z = se > 0.0 ? (mean - exact) / se : 0.0;
    worst = std::max(worst, std::abs(z));
    std::ostringstream th;
    th << thetas[q].transpose();
    t.rows.push_back({th.str(), mean, exact, se, z});
  }
  Json j = {{"model", s.model_json}, {"n", n}, {"max_abs_z", worst}, {"cf", {{"columns", t.columns}, {"rows", t.rows}}}};
  emit(c, j, {t}, "cf_check");
  return ok;
}

int cmd_L(const Common& c, const ScenarioArgs& a, bool montecarlo) {
  const Scenario s = resolve(c, a, Task::L);
  Json j;
  std::vector<Table> tables;
  if (montecarlo) {
    MonteCarloLOptions o;
    o.seed = s.params.seed;
    o.workers = c.workers;
    if (c.n) o.n = *c.n;
    const auto mc = L_montecarlo(*s.model, *s.region, s.params.k, s.params.variant, o);
    j = lvalue_to_json(mc.value, s.params.k, s.params.variant);
    j["stabilized"] = mc.stabilized;
    Table t{"truncation_sweep", {"s_min", "L", "std_error"}, {}};
    for (const auto& r : mc.sweep) t.rows.push_back({r.s_min, r.value, r.std_error});
    tables.push_back(t);
  } else {
    QuadratureOptions q;
    q.tolerance = a.tolerance * c.tolerance_scale;
    q.seed = s.params.seed;
    q.workers = c.workers;
    j = lvalue_to_json(L_quadrature(*s.model, *s.region, s.params.k, s.params.variant, q), s.params.k,
                       s.params.variant);
  }
  Common quiet = c;
  quiet.json = true;
  emit(quiet, j, tables, "L");
  return ok;
}

int cmd_bounds(const Common& c, const ScenarioArgs& a) {
  const Scenario s = resolve(c, a, Task::bounds);
  QuadratureOptions q;
  q.tolerance = a.tolerance * c.tolerance_scale;
  q.seed = s.params.seed;
  q.workers = c.workers;
  const auto b = theorem_bounds(*s.model, *s.region, s.params.k, q);
  const Table t = sweep_table("delta_sweep", b.sweep);
  Json j = bounds_to_json(b, s.params.k);
  emit(c, j, {t}, "bounds");
  return ok;
}

int cmd_estimate(const Common& c, const ScenarioArgs& a) {
  const Scenario s = resolve(c, a, Task::estimate);
  EstimateReport r = s.params.method == "crude"
                         ? estimate_crude(*s.model, *s.region, s.params.h, s.params.n, s.params.seed, c.workers)
                         : estimate_conditional(*s.model, *s.region, s.params.h, s.params.n, s.params.seed,
                                                conditional_options(s, c.workers));
  if (a.k) r.normalized = std::pow(r.h, *a.k * s.model->alpha()) * r.p_hat;
  emit(c, estimate_to_json(r), {estimate_table("estimate", {r})}, "estimate");
  return ok;
}

int cmd_probe(const Common& c, const ScenarioArgs& a) {
  const Scenario s = resolve(c, a, Task::probe);
  const auto rows = run_grid(s, c);
  Json j = Json::array();
  for (const auto& r : rows) j.push_back(estimate_to_json(r));
  emit(c, j, {estimate_table("probe", rows)}, "probe");
  return ok;
}

int cmd_slope(const Common& c, const ScenarioArgs& a) {
  const Scenario s = resolve(c, a, Task::slope);
  const auto rows = run_grid(s, c);
  const auto fit = slope_fit(rows, s.params.log_model);
  Json j = slope_to_json(fit);
  Json est = Json::array();
  for (const auto& r : rows) est.push_back(estimate_to_json(r));
  j["estimates"] = est;
  Common quiet = c;
  quiet.json = true;
  emit(quiet, j, {estimate_table("probe", rows)}, "slope");
  return ok;
}

int cmd_reproduce(const Common& c, std::vector<std::string> ids, bool all) {
  if (all) {
    ids.clear();
    for (const auto& e : bank()) ids.push_back(e.id);
  }
  if (ids.empty()) throw ParseError("reproduce", "give bank ids or --all");
  RunOptions o;
  o.seed = c.seed;
  o.n = c.n;
  o.alpha = c.alpha;
  o.h_grid = c.h_grid;
  o.workers = c.workers;
  o.tolerance_scale = c.tolerance_scale;
  const std::string out = c.out.empty() ? std::string("reports") : c.out;
  fs::create_directories(out);
  bool all_pass = true;
  Json summary = Json::array();
  for (const auto& id : ids) {
    const auto& entry = find_entry(id);
    const auto r = run_entry(entry, o);
    all_pass = all_pass && r.pass();
    const Json j = result_to_json(r);
    write_json_file((fs::path(out) / (id + ".json")).string(), j);
    for (const auto& t : r.tables) write_csv_file((fs::path(out) / (id + "_" + t.name + ".csv")).string(), t);
    summary.push_back(j);
    if (!c.json) {
      std::cout << (r.pass() ? "PASS " : "FAIL ") << id << " (alpha=" << r.alpha << ", " << std::fixed
                << std::setprecision(1) << r.seconds << " s)" << std::defaultfloat << std::setprecision(6) << "\n";
      for (const auto& ch : r.checks)
        std::cout << "    " << (ch.pass ? "ok   " : "FAIL ") << ch.name << ": observed " << ch.observed
                  << ", expected " << ch.expected << " (" << ch.rule << ", tol " << ch.tolerance << ")\n";
    }
  }
  if (c.json) std::cout << summary.dump(2) << "\n";
  return all_pass ? ok : tolerance_failure;
}

int cmd_list_bank(const Common& c) {
  Json j = Json::array();
  for (const auto& e : bank()) j.push_back(entry_to_json(e));
  if (c.json) {
    std::cout << j.dump(2) << "\n";
    return ok;
  }
  for (const auto& e : bank())
    std::cout << std::left << std::setw(18) << e.id << " alpha=" << std::setw(5) << e.default_alpha << e.title
              << "\n    anchor: " << e.anchor << "\n    expected: " << e.expected
              << "\n    provenance: " << e.provenance << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabletail: tail asymptotics of multivariate symmetric stable vectors"};
  app.require_subcommand(1);
  Common common;
  ScenarioArgs sargs;

  auto* dist = app.add_subcommand("dist", "univariate stable density, distribution and quantiles");
  std::vector<double> xs, us;
  std::size_t samples = 0;
  add_common(dist, common, false);
  dist->add_option("--x", xs, "evaluation points")->delimiter(',');
  dist->add_option("--quantile", us, "probabilities for quantiles")->delimiter(',');
  dist->add_option("--sample", samples, "number of draws to print");

  auto* cf = app.add_subcommand("cf-check", "empirical versus exact characteristic function");
  add_common(cf, common, false);
  add_scenario(cf, sargs);

  auto* lcmd = app.add_subcommand("L", "limit constant L(E, k, alpha)");
  bool montecarlo = false;
  add_common(lcmd, common, false);
  add_scenario(lcmd, sargs);
  lcmd->add_option("--tolerance", sargs.tolerance, "relative quadrature tolerance");
  lcmd->add_flag("--montecarlo", montecarlo, "use the sphere-form Monte Carlo estimator");

  auto* bounds = app.add_subcommand("bounds", "lower and upper limit bounds with the dilation sweep");
  add_common(bounds, common, false);
  add_scenario(bounds, sargs);
  bounds->add_option("--tolerance", sargs.tolerance, "relative quadrature tolerance");

  auto* estimate = app.add_subcommand("estimate", "estimate P(X in hE)");
  add_common(estimate, common, false);
  add_scenario(estimate, sargs);
  estimate->add_option("--scale", sargs.h, "scale h");
  estimate->add_option("--method", sargs.method, "crude or conditional")
      ->check(CLI::IsMember({"crude", "conditional"}));
  estimate->add_option("--smoothing-index", sargs.smoothing_index, "column integrated exactly");
  estimate->add_flag("--max-partition", sargs.max_partition, "smooth over the largest column term");
  estimate->add_flag("--iid", sargs.iid, "plain sampling instead of stratified");

  auto* probe = app.add_subcommand("probe", "normalized probabilities h^(k alpha) P(X in hE) over an h grid");
  add_common(probe, common);
  add_scenario(probe, sargs);
  probe->add_option("--method", sargs.method, "crude or conditional")->check(CLI::IsMember({"crude", "conditional"}));
  probe->add_option("--smoothing-index", sargs.smoothing_index, "column integrated exactly");
  probe->add_flag("--max-partition", sargs.max_partition, "smooth over the largest column term");
  probe->add_flag("--iid", sargs.iid, "plain sampling instead of stratified");

  auto* slope = app.add_subcommand("slope", "fit the decay exponent over an h grid");
  add_common(slope, common);
  add_scenario(slope, sargs);
  slope->add_option("--method", sargs.method, "crude or conditional")->check(CLI::IsMember({"crude", "conditional"}));
  slope->add_option("--smoothing-index", sargs.smoothing_index, "column integrated exactly");
  slope->add_flag("--max-partition", sargs.max_partition, "smooth over the largest column term");
  slope->add_flag("--iid", sargs.iid, "plain sampling instead of stratified");
  slope->add_flag("--no-log-model", sargs.no_log_model, "skip the log-corrected fit");

  auto* reproduce = app.add_subcommand("reproduce", "run bank entries and compare with expected values");
  std::vector<std::string> ids;
  bool all = false;
  add_common(reproduce, common);
  reproduce->add_option("ids", ids, "bank entry ids");
  reproduce->add_flag("--all", all, "run every bank entry");

  auto* list = app.add_subcommand("list-bank", "list the scenario bank");
  list->add_flag("--json", common.json, "print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : input_error;
  }

  try {
    if (*dist) return cmd_dist(common, xs, us, samples);
    if (*cf) return cmd_cf_check(common, sargs);
    if (*lcmd) return cmd_L(common, sargs, montecarlo);
    if (*bounds) return cmd_bounds(common, sargs);
    if (*estimate) return cmd_estimate(common, sargs);
    if (*probe) return cmd_probe(common, sargs);
    if (*slope) return cmd_slope(common, sargs);
    if (*reproduce) return cmd_reproduce(common, ids, all);
    if (*list) return cmd_list_bank(common);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  } catch (const CapabilityError& e) {
    std::cerr << "capability error: " << e.what() << "\n";
    return capability_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runtime_error;
  }
  return ok;
}
