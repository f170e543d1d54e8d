#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabletail/region.hpp"
#include "stabletail/spectral_model.hpp"

namespace stabletail {

enum class EstimateMethod { crude, conditional };
std::string method_name(EstimateMethod method);

struct EstimateReport {
  double h = 1.0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  EstimateMethod method = EstimateMethod::crude;
  std::uint64_t seed = 0;
  std::optional<double> normalized;  // h^{k alpha} p_hat
};

// Crude Monte Carlo in fixed chunks of 2^14 draws with a Wilson 95% interval.
EstimateReport estimate_crude(const StableVectorModel& model, const Region& region, double h, std::size_t n,
                              std::uint64_t seed, int workers = 1);

struct ConditionalOptions {
  enum class Smoothing { single, max_partition };
  enum class Sampling { iid, stratified };
  Smoothing smoothing = Smoothing::single;
  int smoothing_index = -1;  // column used for single smoothing; negative selects automatically
  Sampling sampling = Sampling::iid;
  int batches = 32;
  int workers = 1;
};

// Conditional Monte Carlo: integrates one stable coordinate exactly along the line clip.
// max_partition sums, over every column j, the conditional probability of the event
// restricted to |S_j| |y_j| exceeding all other |S_i| |y_i|. stratified sampling draws the
// remaining coordinates by Latin hypercube within each batch, on the warped scale
// u = v - sin(2 pi v) / (2 pi) with weight 1 - cos(2 pi v) so that the tails get their own strata.
EstimateReport estimate_conditional(const StableVectorModel& model, const Region& region, double h, std::size_t n,
                                    std::uint64_t seed, const ConditionalOptions& options = {});

int default_smoothing_index(const StableVectorModel& model, const Region& region);

struct SlopeFit {
  double slope = 0.0;  // d log p / d log h
  double slope_se = 0.0;
  std::vector<double> h_grid;
  bool log_model = false;
  double base_slope = 0.0;  // slope in log p = c + slope log h + b log log h
  double base_slope_se = 0.0;
  double log_coefficient = 0.0;
  double log_coefficient_se = 0.0;
  bool log_significant = false;  // |b| > 2 se(b)
};

SlopeFit slope_fit(const std::vector<EstimateReport>& reports, bool with_log_model = true);

struct ProbeOptions {
  EstimateMethod method = EstimateMethod::conditional;
  ConditionalOptions conditional;
  int workers = 1;
};

std::vector<EstimateReport> normalized_limit_probe(const StableVectorModel& model, const Region& region, int k,
                                                   const std::vector<double>& h_grid, std::size_t n,
                                                   std::uint64_t seed, const ProbeOptions& options = {});

}  // namespace stabletail
