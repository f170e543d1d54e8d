#pragma once

#include <functional>
#include <vector>

#include "stabletail/region.hpp"
#include "stabletail/spectral_model.hpp"

namespace stabletail::repro {

// Independent coordinates: columns e1, e2.
StableVectorModel independent_model(double alpha);
// Columns (1,1) and (0,-1): X = (S1, S1 - S2).
StableVectorModel shared_factor_model(double alpha);
// Columns a(1,1,1) and c e_i with c = (1 - a^alpha)^(1/alpha).
StableVectorModel permutation_model(double alpha, double a);

// {x1 > 1, x2 > 1}
Region quadrant_region();
// {x1 > 1, x2 < 0}
Region half_strip_region();
// {x1 > 1, x2 < 1}
Region corner_region();
// {x1 > 1, x2 > 1, x3 < 1}
Region permutation_region();
Region cone_region(double theta_lo, double theta_hi);
// corner_region united with the sup-norm ball of radius eps around (1,1).
Region corner_with_ball(double eps);
// corner_region minus the sup-norm ball of radius eps around (1,1).
Region corner_without_ball(double eps);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_sf(double lambda);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

}  // namespace stabletail::repro
