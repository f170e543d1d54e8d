#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stabletail/region.hpp"
#include "stabletail/spectral_model.hpp"

namespace stabletail::repro {

using Json = nlohmann::json;

// Malformed input: carries a location (line:column for syntax, JSON pointer for content).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

enum class Task { L, bounds, estimate, probe, slope, reproduce };
std::string task_name(Task task);
Task parse_task(const std::string& name);

struct ScenarioParams {
  int k = 2;
  RegionVariant variant = RegionVariant::closure();
  std::vector<double> h_grid;
  double h = 100.0;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::string method = "conditional";
  int smoothing_index = -1;
  bool max_partition = false;
  bool stratified = true;
  double tolerance = 5e-3;
  bool log_model = true;
};

struct Scenario {
  std::string id;
  Task task = Task::L;
  std::optional<StableVectorModel> model;
  std::optional<Region> region;
  Json model_json;
  Json region_json;
  ScenarioParams params;
};

// Parses JSON text; syntax errors report "line L, column C".
Json parse_json_text(const std::string& text, const std::string& source = "input");
// Reads a file, or treats the argument as inline JSON when it starts with '{' or '['.
Json load_json_argument(const std::string& argument);

StableVectorModel parse_model(const Json& j, const std::string& pointer = "");
Region parse_region(const Json& j, const std::string& pointer = "");
RegionVariant parse_variant(const Json& j, const std::string& pointer = "");
Scenario parse_scenario(const Json& j);

Json model_to_json(const StableVectorModel& model);
Json region_to_json(const Region& region);

// Throws CapabilityError naming the first region node (JSON pointer) that lacks what the task needs.
void check_capabilities(const Scenario& scenario);

}  // namespace stabletail::repro
