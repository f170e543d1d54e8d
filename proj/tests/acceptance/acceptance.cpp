#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stabletail/repro/bank.hpp"
#include "stabletail/repro/examples.hpp"
#include "stabletail/stable_univariate.hpp"
#include "stabletail/tail_asymptotics.hpp"

using namespace stabletail;
using namespace stabletail::repro;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  std::vector<Check> checks;
  double budget_seconds = 0.0;

  void add(const std::string& prefix, const EntryResult& r, const std::set<std::string>& names = {}) {
    for (auto c : r.checks) {
      if (!names.empty() && !names.count(c.name)) continue;
      c.name = prefix + "." + c.name;
      checks.push_back(c);
    }
  }
  void relative(const std::string& name, double observed, double expected, double tol) {
    checks.push_back({name, observed, expected, tol, "relative", std::abs(observed - expected) <= tol * std::abs(expected)});
  }
};

EntryResult run(const std::string& id, std::optional<double> alpha = std::nullopt) {
  RunOptions o;
  o.alpha = alpha;
  return run_entry(find_entry(id), o);
}

std::string alpha_tag(double a) {
  std::ostringstream s;
  s << "a" << a;
  return s.str();
}

Outcome c1() {
  Outcome out;
  for (double a : {0.5, 1.0, 1.5}) out.add(alpha_tag(a), run("univariate_tail", a), {"tail_ratio", "mc_tail_ratio"});
  out.budget_seconds = 60;
  return out;
}

Outcome c2() {
  Outcome out;
  for (double a : {0.5, 1.0, 1.5}) {
    const double h = 1e3;
    const double ratio = 2.0 * std_stable_pdf(a, h) * std::pow(h, 1.0 + a) / (c_alpha(a) * a);
    out.checks.push_back({alpha_tag(a) + ".density_ratio", ratio, 1.0, 0.02, "absolute", ratio >= 0.98 && ratio <= 1.02});
  }
  out.budget_seconds = 10;
  return out;
}

Outcome c3() {
  Outcome out;
  for (double a : {0.5, 1.5}) {
    const auto L = L_quadrature(independent_model(a), quadrant_region(), 2, RegionVariant::closure());
    const double c = c_alpha(a);
    out.relative(alpha_tag(a) + ".L_quadrature", L.value, c * c / 4, 5e-3);
  }
  out.add("a1", run("ex1_i", 1.0));
  const double exact = std::pow(0.5 - std::atan(100.0) / kPi, 2);
  out.relative("a1.exact_cauchy_reference", exact, 1.0132e-5, 1e-4);
  out.budget_seconds = 120;
  return out;
}

Outcome c4() {
  Outcome out;
  const auto r = run("ex1_ii_cone", 1.0);
  out.add("a1", r);
  out.relative("a1.reference_value", r.checks.front().expected, 2.0 / (kPi * kPi), 1e-9);
  out.budget_seconds = 60;
  return out;
}

Outcome c5() {
  Outcome out;
  out.add("a1", run("ex1_iii", 1.0));
  out.budget_seconds = 120;
  return out;
}

Outcome c6() {
  Outcome out;
  for (double a : {0.3, 0.8}) {
    const auto L = L_quadrature(shared_factor_model(a), corner_region(), 2, RegionVariant::closure());
    out.relative(alpha_tag(a) + ".L_quadrature_closure", L.finite() ? L.value : INFINITY,
                 closed_form_reference("ex2_lowalpha", a).value, 1e-2);
  }
  out.add("a0.5", run("ex2_lowalpha", 0.5));
  out.budget_seconds = 180;
  return out;
}

Outcome c7() {
  Outcome out;
  out.add("a1", run("ex2_alpha1"));
  out.budget_seconds = 300;
  return out;
}

Outcome c8() {
  Outcome out;
  out.add("a1.5", run("ex2_highalpha", 1.5));
  out.budget_seconds = 300;
  return out;
}

Outcome c9() {
  Outcome out;
  for (double a : {0.5, 0.8, 1.0, 1.2}) out.add(alpha_tag(a), run("ex2_bounds_k2", a));
  out.budget_seconds = 30;
  return out;
}

Outcome c10() {
  Outcome out;
  out.add("a0.5", run("ex2_gplus_gminus", 0.5));
  out.budget_seconds = 180;
  return out;
}

Outcome c11() {
  Outcome out;
  out.add("a0.25", run("remark4_below"));
  out.add("a0.5", run("remark4_at"));
  out.add("a1", run("remark4_above"));
  out.budget_seconds = 300;
  return out;
}

Outcome c12() {
  Outcome out;
  out.add("a0.5", run("ex3_lowalpha", 0.5));
  out.budget_seconds = 180;
  return out;
}

Outcome c13() {
  Outcome out;
  for (double a : {0.5, 1.2}) out.add(alpha_tag(a), run("lepage_ks", a));
  out.budget_seconds = 180;
  return out;
}

Outcome c14() {
  Outcome out;
  out.add("a0.5", run("lemma1_probe", 0.5));
  out.budget_seconds = 120;
  return out;
}

Outcome c15() {
  Outcome out;
  for (double a : {0.5, 1.2}) out.add(alpha_tag(a), run("cf_check", a));
  out.budget_seconds = 120;
  return out;
}

struct Criterion {
  int number;
  std::string title;
  std::function<Outcome()> run;
};

std::string summarize(const Check& c) {
  std::ostringstream s;
  s.precision(6);
  s << c.name << " observed=" << c.observed << " expected=" << c.expected;
  if (c.rule == "relative" || c.rule == "absolute") s << " tol=" << c.tolerance << "(" << c.rule << ")";
  else s << " rule=" << c.rule;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "univariate tail ratio", c1},
      {2, "univariate density ratio", c2},
      {3, "independent quadrant constant and exact Cauchy value", c3},
      {4, "cone above an arc", c4},
      {5, "half strip bounds and probe", c5},
      {6, "shared factor constant below alpha=1", c6},
      {7, "shared factor log correction at alpha=1", c7},
      {8, "shared factor decay above alpha=1", c8},
      {9, "second-order divergence structure", c9},
      {10, "ball perturbation monotonicity", c10},
      {11, "power region phase transition", c11},
      {12, "permutation-invariant model", c12},
      {13, "series representation equivalence", c13},
      {14, "truncated series moments", c14},
      {15, "characteristic function", c15},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    std::string error;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = error.empty() && !o.checks.empty();
    std::vector<std::string> failures;
    for (const auto& ch : o.checks)
      if (!ch.pass) {
        pass = false;
        failures.push_back(summarize(ch));
      }
    if (pass && secs > o.budget_seconds) {
      pass = false;
      failures.push_back("runtime " + std::to_string(secs) + "s over budget " + std::to_string(o.budget_seconds) + "s");
    }
    failed += !pass;
    std::ostringstream line;
    line.precision(3);
    line << (pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title << " [" << o.checks.size()
         << " checks, " << std::fixed << secs << "s]";
    if (!error.empty()) line << " error: " << error;
    for (const auto& f : failures) line << " | " << f;
    std::cout << line.str() << std::endl;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "acceptance: " << failed << " failing criteria, total " << total << "s" << std::endl;
  return failed == 0 ? 0 : 1;
}
