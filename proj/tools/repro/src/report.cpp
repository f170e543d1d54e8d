#include "stabletail/repro/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace stabletail::repro {

namespace {

std::string csv_cell(const Json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(finite_or_string(v[i]));
  return out;
}

}  // namespace

Json finite_or_string(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json lvalue_to_json(const LValue& value, int k, RegionVariant variant) {
  Json j = {{"k", k},
            {"variant", variant.name()},
            {"status", value.finite() ? "finite" : "infinite"},
            {"value", finite_or_string(value.finite() ? value.value : INFINITY)},
            {"error", value.error}};
  if (value.divergence_witness) {
    const auto& t = *value.divergence_witness;
    Json w = {{"order", t.k}, {"verified", t.verified}};
    if (t.witness) {
      w["columns"] = t.witness->columns;
      w["coefficients"] = t.witness->coefficients;
      w["point"] = vector_json(t.witness->point);
    }
    j["witness"] = w;
  }
  if (!value.note.empty()) j["note"] = value.note;
  return j;
}

Json bounds_to_json(const TheoremBounds& bounds, int k) {
  Json sweep = Json::array();
  for (const auto& r : bounds.sweep) sweep.push_back({{"delta", r.delta}, {"L", r.value}, {"err", r.error}});
  return {{"lower", lvalue_to_json(bounds.lower, k, RegionVariant::interior())},
          {"upper", lvalue_to_json(bounds.upper, k, RegionVariant::closure())},
          {"converged", bounds.converged},
          {"sweep", sweep}};
}

Json estimate_to_json(const EstimateReport& r) {
  Json j = {{"h", r.h},
            {"p_hat", r.p_hat},
            {"ci", {r.ci_lo, r.ci_hi}},
            {"std_error", r.std_error},
            {"n", r.n},
            {"method", method_name(r.method)},
            {"seed", r.seed}};
  if (r.normalized) j["normalized"] = *r.normalized;
  return j;
}

Json slope_to_json(const SlopeFit& f) {
  Json j = {{"slope", f.slope}, {"slope_se", f.slope_se}, {"h_grid", f.h_grid}};
  if (f.log_model) {
    j["base_slope"] = f.base_slope;
    j["base_slope_se"] = f.base_slope_se;
    j["log_coefficient"] = f.log_coefficient;
    j["log_coefficient_se"] = f.log_coefficient_se;
    j["log_significant"] = f.log_significant;
  }
  return j;
}

Table estimate_table(const std::string& name, const std::vector<EstimateReport>& rows) {
  Table t{name, {"h", "p_hat", "ci_lo", "ci_hi", "n", "method", "seed", "normalized"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({r.h, r.p_hat, r.ci_lo, r.ci_hi, r.n, method_name(r.method), r.seed,
                      r.normalized ? Json(*r.normalized) : Json()});
  return t;
}

Table sweep_table(const std::string& name, const std::vector<DeltaRow>& rows) {
  Table t{name, {"delta", "L", "err"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.delta, r.value, r.error});
  return t;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << "\n";
  }
}

void write_csv_file(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, table);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<Vector> theta_grid(int dim) {
  constexpr double kPi = 3.141592653589793;
  std::vector<Vector> grid;
  for (int i = 0; i < 10; ++i) {
    const double r = 0.2 * (i + 1);
    Vector u = Vector::Zero(dim);
    const double phi = (i + 0.5) * kPi / 10.0;
    if (dim == 1) {
      u[0] = 1.0;
    } else if (dim == 2) {
      u[0] = std::cos(phi);
      u[1] = std::sin(phi);
    } else {
      const double psi = (i + 0.5) * kPi / 10.0 * 0.9 + 0.05;
      u[0] = std::sin(psi) * std::cos(2.0 * phi);
      u[1] = std::sin(psi) * std::sin(2.0 * phi);
      u[2] = std::cos(psi);
    }
    grid.push_back(r * u);
  }
  return grid;
}

}  // namespace stabletail::repro
