#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stabletail::repro {

using Json = nlohmann::json;

struct RunOptions {
  std::uint64_t seed = 20240601;
  std::optional<std::size_t> n;
  std::optional<double> alpha;
  std::vector<double> h_grid;
  int workers = 1;
  double tolerance_scale = 1.0;  // multiplies every tolerance
};

struct Check {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string rule;  // how observed is compared with expected
  bool pass = false;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct EntryResult {
  std::string id;
  std::string anchor;
  std::string provenance;
  double alpha = 0.0;
  std::vector<Check> checks;
  std::vector<Table> tables;
  Json details = Json::object();
  double seconds = 0.0;

  bool pass() const;
};

struct BankEntry {
  std::string id;
  std::string title;
  std::string anchor;      // the statement being reproduced
  std::string provenance;  // where the expected value comes from
  std::string expected;    // human-readable expected outcome
  double default_alpha = 1.0;
  bool alpha_free = true;  // false: the entry is defined at one alpha only
  std::function<EntryResult(const BankEntry&, const RunOptions&)> run;
};

const std::vector<BankEntry>& bank();
const BankEntry& find_entry(const std::string& id);
EntryResult run_entry(const BankEntry& entry, const RunOptions& options);

Json entry_to_json(const BankEntry& entry);
Json result_to_json(const EntryResult& result);
// Validates a list-bank document: array of objects with non-empty string fields
// id, title, anchor, provenance, expected and numeric default_alpha.
bool validate_bank_json(const Json& j, std::string* error = nullptr);

}  // namespace stabletail::repro
