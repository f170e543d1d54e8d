#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stabletail/region.hpp"
#include "stabletail/spectral_model.hpp"

namespace stabletail {

// Reachability certificate: sum_i coefficients[i] * column(columns[i]) lies in the region variant.
struct Witness {
  std::vector<int> columns;
  std::vector<double> coefficients;
  Vector point;
};

struct TailOrder {
  int k = 0;
  std::optional<Witness> witness;
  bool verified = true;  // false when smaller orders were excluded only by random probing
};

struct CoordinateFloors {
  bool feasible = false;
  std::vector<int> subset;
  std::vector<double> floors;  // inf |s_i| over the feasible set, 0 when unbounded toward 0
};

struct LValue {
  enum class Status { finite, infinite };
  Status status = Status::finite;
  double value = 0.0;
  double error = 0.0;
  std::optional<TailOrder> divergence_witness;
  std::string note;

  bool finite() const { return status == Status::finite; }
};

// Columns y_j of the matrix representation of an atomic model.
Matrix model_columns(const StableVectorModel& model);

// variant must be interior or closure. For regions without LP support, orders >= 2 are
// searched by random probing up to candidate_k (0 means the number of columns).
TailOrder min_hits(const StableVectorModel& model, const Region& region, RegionVariant variant,
                   int candidate_k = 0, std::uint64_t seed = 1);

CoordinateFloors coordinate_floors(const StableVectorModel& model, const std::vector<int>& subset,
                                   const Region& region, RegionVariant variant);

struct QuadratureOptions {
  double tolerance = 5e-3;        // relative accuracy target
  std::size_t qmc_points = 1u << 16;  // per replicate, orders k >= 3
  int replicates = 8;
  std::uint64_t seed = 12345;
  int workers = 1;
};

LValue L_quadrature(const StableVectorModel& model, const Region& region, int k, RegionVariant variant,
                    const QuadratureOptions& options = {});

struct MonteCarloLOptions {
  std::size_t n = 1u << 18;  // samples per truncation level
  double s_min = 0.0;        // fixed truncation when positive, otherwise a geometric sweep
  int max_levels = 8;
  std::uint64_t seed = 2024;
  int workers = 1;
};

struct SweepRow {
  double s_min;
  double value;
  double std_error;
};

struct MonteCarloL {
  LValue value;
  std::vector<SweepRow> sweep;
  bool stabilized = true;
};

MonteCarloL L_montecarlo(const StableVectorModel& model, const Region& region, int k, RegionVariant variant,
                         const MonteCarloLOptions& options = {});

struct DeltaRow {
  double delta;
  double value;
  double error;
};

struct TheoremBounds {
  LValue lower;
  LValue upper;
  std::vector<DeltaRow> sweep;
  bool converged = true;
};

TheoremBounds theorem_bounds(const StableVectorModel& model, const Region& region, int k,
                             const QuadratureOptions& options = {});

struct ClosedForm {
  std::string id;
  bool is_order = false;
  double value = 0.0;       // constant, when !is_order
  double exponent = 0.0;    // decay exponent, when is_order
  bool log_correction = false;
  std::string formula;
};

// Known ids: ex1_i, ex1_ii_cone (theta_lo, theta_hi), ex1_iii, ex2_lowalpha, ex2_alpha1, ex2_highalpha,
// ex3_lowalpha (a), remark4_order (sigma).
ClosedForm closed_form_reference(const std::string& id, double alpha,
                                 const std::map<std::string, double>& params = {});
std::vector<std::string> closed_form_ids();

}  // namespace stabletail
