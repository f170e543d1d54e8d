#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "stabletail/random.hpp"

namespace stabletail {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One symmetric pair of atoms: mass `mass` at +direction and at -direction.
struct AtomPair {
  Vector direction;  // unit norm, first nonzero component positive
  double mass = 0.0;
};

// Finite symmetric measure on the unit sphere: atom pairs plus an optional
// uniform component carrying `isotropic_mass` in total.
class SpectralMeasure {
 public:
  explicit SpectralMeasure(int dim);
  SpectralMeasure(int dim, std::vector<AtomPair> atoms, double isotropic_mass = 0.0);

  int dim() const { return dim_; }
  const std::vector<AtomPair>& atoms() const { return atoms_; }
  double isotropic_mass() const { return isotropic_mass_; }
  double total_mass() const;
  bool is_atomic() const { return isotropic_mass_ == 0.0; }

  // Adds mass m at +/- direction (merged with an existing pair when collinear).
  void add_pair(const Vector& direction, double mass);

 private:
  int dim_;
  std::vector<AtomPair> atoms_;
  double isotropic_mass_ = 0.0;
};

// X = A S with S having i.i.d. standard symmetric stable entries.
struct LinearRepresentation {
  double alpha = 1.0;
  Matrix columns;  // n x m
};

class StableVectorModel {
 public:
  StableVectorModel(double alpha, SpectralMeasure measure);

  double alpha() const { return alpha_; }
  int dim() const { return measure_.dim(); }
  const SpectralMeasure& measure() const { return measure_; }

 private:
  double alpha_;
  SpectralMeasure measure_;
};

StableVectorModel from_matrix(const LinearRepresentation& rep);
LinearRepresentation to_matrix(const StableVectorModel& model);

double cf_value(const StableVectorModel& model, const Vector& theta);
// E|u_1|^alpha for u uniform on the unit sphere of R^n.
double sphere_abs_moment(int n, double alpha);

// Exact sampler X = sum_i S_i yhat_i; requires an atomic measure.
class VectorSampler {
 public:
  explicit VectorSampler(const StableVectorModel& model);
  Vector sample(RandomStream& rng) const;
  const Matrix& columns() const { return columns_; }

 private:
  double alpha_;
  Matrix columns_;
};

Vector sample_vector(const StableVectorModel& model, RandomStream& rng);

struct TruncationControl {
  enum class Mode { fixed, adaptive };
  Mode mode = Mode::adaptive;
  std::size_t terms = 1000;       // fixed mode
  double relative_tolerance = 1e-4;
  std::size_t block = 100;
  std::size_t max_terms = 1000000;
  bool gaussian_remainder = false;  // add a Gaussian draw matching the omitted terms' covariance
  // Adaptive mode with a Gaussian remainder also stops once the next term is below this
  // fraction of the remainder's standard deviation.
  double gaussian_ratio = 0.02;
};

struct LePageDraw {
  Vector value;
  std::size_t terms = 0;
  bool reached_max_terms = false;
};

class LePageSampler {
 public:
  LePageSampler(const StableVectorModel& model, TruncationControl control = {});
  LePageDraw sample(RandomStream& rng) const;
  // W ~ normalized spectral measure, sign folded in.
  Vector draw_direction(RandomStream& rng) const;

 private:
  StableVectorModel model_;
  TruncationControl control_;
  double scale_;
  std::vector<double> cumulative_;  // cumulative pair masses (2m) for direction draws
  double total_;
  Matrix second_moment_root_;       // square root of E[W W^T]
};

LePageDraw lepage_sample(const StableVectorModel& model, RandomStream& rng,
                         const TruncationControl& control = {});

struct TailMomentRow {
  std::size_t n_terms = 0;
  int coordinate = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

// Moments E|sum_{i=k}^N eps_i Gamma_i^{-1/alpha} W_i(j)|^{(k-1)alpha+eps} estimated from
// nested truncations of the same series (common random numbers across N).
std::vector<TailMomentRow> lepage_tail_moment_probe(const StableVectorModel& model, int k, double eps,
                                                    const std::vector<std::size_t>& n_grid,
                                                    std::size_t replicates, std::uint64_t seed);

// Atomic approximation of the isotropic component with m atoms (m/2 antipodal
// pairs): equal arcs in 2-D, equal-area patches in 3-D.
SpectralMeasure discretize_measure(const SpectralMeasure& measure, int m);

}  // namespace stabletail
