#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stabletail/mc_estimation.hpp"
#include "stabletail/repro/bank.hpp"
#include "stabletail/tail_asymptotics.hpp"

namespace stabletail::repro {

// JSON has no infinities: non-finite numbers become "inf", "-inf" or "nan".
Json finite_or_string(double x);

Json lvalue_to_json(const LValue& value, int k, RegionVariant variant);
Json bounds_to_json(const TheoremBounds& bounds, int k);
Json estimate_to_json(const EstimateReport& report);
Json slope_to_json(const SlopeFit& fit);

// Columns h, p_hat, ci_lo, ci_hi, n, method, seed, normalized.
Table estimate_table(const std::string& name, const std::vector<EstimateReport>& rows);
// Columns delta, L, err.
Table sweep_table(const std::string& name, const std::vector<DeltaRow>& rows);

void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const std::string& path, const Table& table);
void write_json_file(const std::string& path, const Json& j);

// Ten frequencies of growing length spread over directions in R^dim.
std::vector<Vector> theta_grid(int dim);

}  // namespace stabletail::repro
