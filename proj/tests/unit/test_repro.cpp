#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "stabletail/errors.hpp"
#include "stabletail/repro/bank.hpp"
#include "stabletail/repro/examples.hpp"
#include "stabletail/repro/report.hpp"
#include "stabletail/repro/scenario.hpp"

using namespace stabletail;
using namespace stabletail::repro;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

}  // namespace

TEST(JsonInput, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_json_text("{\n  \"box\": [1,\n", "region.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where().rfind("region.json:", 0), 0u) << e.where();
    EXPECT_NE(e.where().find(":3:"), std::string::npos) << e.where();
  }
}

TEST(JsonInput, InlineArgument) {
  const auto j = load_json_argument("{\"power_region\": {\"sigma\": 0.5}}");
  EXPECT_TRUE(j.contains("power_region"));
  EXPECT_THROW(load_json_argument("/nonexistent/file.json"), ParseError);
}

TEST(ModelJson, MatrixIsRowMajorWithColumnsAsDirections) {
  const auto m = parse_model(Json::parse(R"({"alpha": 0.8, "matrix": [[1, 0], [1, -1]]})"));
  EXPECT_DOUBLE_EQ(m.alpha(), 0.8);
  const auto ref = shared_factor_model(0.8);
  EXPECT_NEAR(m.measure().total_mass(), ref.measure().total_mass(), 1e-14);
  EXPECT_NEAR(cf_value(m, vec({0.3, 0.7})), cf_value(ref, vec({0.3, 0.7})), 1e-14);
}

TEST(ModelJson, RoundTrip) {
  const auto m = permutation_model(0.7, 0.4);
  const auto back = parse_model(model_to_json(m));
  const Vector t = vec({0.2, -0.5, 0.9});
  EXPECT_NEAR(cf_value(back, t), cf_value(m, t), 1e-14);
  const auto iso = parse_model(Json::parse(R"({"alpha": 1, "measure": {"dim": 2, "isotropic_mass": 1}})"));
  EXPECT_FALSE(iso.measure().is_atomic());
}

TEST(ModelJson, SemanticErrorsCarryPointer) {
  try {
    parse_model(Json::parse(R"({"alpha": 2.5, "matrix": [[1]]})"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), "/alpha");
  }
  try {
    parse_model(Json::parse(R"({"alpha": 1, "measure": {"atoms": [{"dir": [1, 1], "mass": 1}]}})"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), "/measure/atoms/0/dir");
  }
}

TEST(RegionJson, ShorthandsAndRoundTrip) {
  const auto r = parse_region(Json::parse(
      R"({"and": [{"halfspace": {"normal": [1, 0], "offset": 1, "strict": true}},
                  {"halfspace": {"normal": [0, -1], "offset": -1, "strict": true}}]})"));
  EXPECT_TRUE(contains(r, vec({1.5, 0.5}), RegionVariant::interior()));
  EXPECT_FALSE(contains(r, vec({1.5, 1.5}), RegionVariant::interior()));
  const auto box = parse_region(Json::parse(R"({"box": {"lo": [1, 1], "hi": [null, "inf"]}})"));
  EXPECT_NEAR(origin_gap(box), std::sqrt(2.0), 1e-14);
  for (const auto& region : {corner_with_ball(0.1), corner_without_ball(0.2), cone_region(0.3, 1.2),
                             Region::power_region(0.5, 2.0), permutation_region()}) {
    const auto back = parse_region(region_to_json(region));
    EXPECT_EQ(back.describe(), region.describe());
  }
}

TEST(RegionJson, ErrorNamesNode) {
  try {
    parse_region(Json::parse(R"({"and": [{"box": {"lo": [1, 1], "hi": [2, 2]}}, {"ball": {"radius": 1}}]})"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("/and/1"), std::string::npos) << e.where();
  }
  EXPECT_THROW(parse_region(Json::parse(R"({"blob": {}})")), ParseError);
}

TEST(Scenario, ParsesParams) {
  const auto s = parse_scenario(Json::parse(R"({
    "id": "s1", "task": "probe",
    "model": {"alpha": 0.5, "matrix": [[1, 0], [0, 1]]},
    "region": {"box": {"lo": [1, 1], "hi": ["inf", "inf"]}},
    "params": {"k": 2, "h_grid": [100, 1000], "n": 5000, "seed": 7, "variant": {"dilated": 0.1}}})"));
  EXPECT_EQ(s.id, "s1");
  EXPECT_EQ(s.task, Task::probe);
  ASSERT_TRUE(s.model && s.region);
  EXPECT_EQ(s.params.h_grid.size(), 2u);
  EXPECT_EQ(s.params.n, 5000u);
  EXPECT_EQ(s.params.seed, 7u);
  EXPECT_EQ(s.params.variant.tag, VariantTag::dilated);
  EXPECT_THROW(parse_task("integrate"), ParseError);
}

TEST(Scenario, CapabilityErrorNamesNode) {
  auto s = parse_scenario(Json::parse(R"({
    "task": "bounds",
    "model": {"alpha": 0.5, "matrix": [[1, 0], [0, 1]]},
    "region": {"and": [{"box": {"lo": [1, 0], "hi": ["inf", "inf"]}}, {"power_region": {"sigma": 0.5}}]}})"));
  try {
    check_capabilities(s);
    FAIL();
  } catch (const CapabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("/region/and/1 (power_region)"), std::string::npos) << e.what();
  }
  s.task = Task::L;
  EXPECT_NO_THROW(check_capabilities(s));
}

TEST(Bank, EnumeratesEntriesWithAnchors) {
  const auto& b = bank();
  EXPECT_GE(b.size(), 16u);
  std::set<std::string> ids;
  for (const auto& e : b) {
    EXPECT_TRUE(ids.insert(e.id).second) << e.id;
    EXPECT_FALSE(e.anchor.empty()) << e.id;
    EXPECT_FALSE(e.provenance.empty()) << e.id;
    EXPECT_TRUE(e.run) << e.id;
  }
  for (const char* id : {"ex1_i", "ex1_ii_cone", "ex1_iii", "ex2_lowalpha", "ex2_alpha1", "ex2_highalpha",
                         "ex2_bounds_k1", "ex2_bounds_k2", "ex2_gplus_gminus", "ex3_lowalpha", "remark4_below",
                         "remark4_at", "remark4_above"})
    EXPECT_TRUE(ids.count(id)) << id;
}

TEST(Bank, ListingRoundTripsThroughSchema) {
  Json list = Json::array();
  for (const auto& e : bank()) list.push_back(entry_to_json(e));
  const auto reparsed = Json::parse(list.dump());
  std::string err;
  EXPECT_TRUE(validate_bank_json(reparsed, &err)) << err;
  EXPECT_EQ(reparsed, list);
  Json broken = reparsed;
  broken[0].erase("anchor");
  EXPECT_FALSE(validate_bank_json(broken, &err));
  EXPECT_NE(err.find("anchor"), std::string::npos);
}

TEST(Bank, UnknownIdAndFixedAlpha) {
  EXPECT_THROW(find_entry("ex9"), DomainError);
  RunOptions o;
  o.alpha = 0.7;
  EXPECT_THROW(run_entry(find_entry("remark4_at"), o), DomainError);
}

TEST(Bank, ReproduceIndependentQuadrant) {
  RunOptions o;
  o.alpha = 0.5;
  const auto r = run_entry(find_entry("ex1_i"), o);
  EXPECT_TRUE(r.pass());
  ASSERT_FALSE(r.checks.empty());
  EXPECT_NEAR(r.checks[0].observed, 0.159155, 1e-3);
  const auto j = result_to_json(r);
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_EQ(j.at("id"), "ex1_i");
}

TEST(Bank, SharedFactorFirstOrderBounds) {
  RunOptions o;
  o.alpha = 0.7;
  const auto r = run_entry(find_entry("ex2_bounds_k1"), o);
  EXPECT_TRUE(r.pass());
  for (const auto& c : r.checks) EXPECT_NEAR(c.observed, 0.0, 1e-6) << c.name;
}

TEST(Report, CsvAndNonFiniteJson) {
  Table t{"t", {"a", "b"}, {{1.5, "x,y"}, {Json(), "plain"}}};
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(), "a,b\n1.5,\"x,y\"\n,plain\n");
  EXPECT_EQ(finite_or_string(INFINITY), "inf");
  EXPECT_EQ(finite_or_string(2.0), 2.0);
}

TEST(Statistics, KolmogorovDistribution) {
  EXPECT_NEAR(kolmogorov_sf(1.36), 0.0495, 5e-4);
  EXPECT_NEAR(kolmogorov_sf(1.0), 0.27, 1e-3);
  EXPECT_NEAR(kolmogorov_sf(0.0), 1.0, 1e-12);
  const auto same = ks_two_sample({1, 2, 3, 4}, {1, 2, 3, 4});
  EXPECT_EQ(same.statistic, 0.0);
  const auto far = ks_two_sample({1, 2, 3, 4, 5, 6, 7, 8}, {11, 12, 13, 14, 15, 16, 17, 18});
  EXPECT_EQ(far.statistic, 1.0);
  EXPECT_LT(far.p_value, 0.01);
}
