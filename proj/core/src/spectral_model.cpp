#include "stabletail/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "stabletail/errors.hpp"
#include "stabletail/stable_univariate.hpp"

namespace stabletail {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCollinearTol = 1e-12;

Vector canonical_direction(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("direction must be a nonzero finite vector");
  Vector u = v / norm;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-12) {
      if (u[i] < 0) u = -u;
      break;
    }
  }
  return u;
}

}  // namespace

SpectralMeasure::SpectralMeasure(int dim) : dim_(dim) {
  if (dim < 1) throw DomainError("dimension must be at least 1");
}

SpectralMeasure::SpectralMeasure(int dim, std::vector<AtomPair> atoms, double isotropic_mass) : dim_(dim) {
  if (dim < 1) throw DomainError("dimension must be at least 1");
  if (!(isotropic_mass >= 0.0)) throw DomainError("isotropic mass must be nonnegative");
  isotropic_mass_ = isotropic_mass;
  for (const auto& atom : atoms) add_pair(atom.direction, atom.mass);
  if (!(total_mass() > 0.0)) throw DomainError("spectral measure must have positive total mass");
}

void SpectralMeasure::add_pair(const Vector& direction, double mass) {
  if (direction.size() != dim_) throw DomainError("atom direction has wrong dimension");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("atom mass must be positive");
  const Vector u = canonical_direction(direction);
  for (auto& atom : atoms_) {
    if (std::abs(std::abs(atom.direction.dot(u)) - 1.0) < kCollinearTol) {
      atom.mass += mass;
      return;
    }
  }
  atoms_.push_back({u, mass});
}

double SpectralMeasure::total_mass() const {
  double total = isotropic_mass_;
  for (const auto& atom : atoms_) total += 2.0 * atom.mass;
  return total;
}

StableVectorModel::StableVectorModel(double alpha, SpectralMeasure measure)
    : alpha_(Alpha(alpha).value()), measure_(std::move(measure)) {}

StableVectorModel from_matrix(const LinearRepresentation& rep) {
  const double alpha = Alpha(rep.alpha).value();
  const auto n = static_cast<int>(rep.columns.rows());
  if (rep.columns.cols() == 0) throw DomainError("matrix representation has no columns");
  SpectralMeasure measure(n);
  for (Eigen::Index j = 0; j < rep.columns.cols(); ++j) {
    const Vector col = rep.columns.col(j);
    const double norm = col.norm();
    if (!(norm > 0.0)) throw DomainError("matrix representation has a zero column");
    measure.add_pair(col / norm, std::pow(norm, alpha) / 2.0);
  }
  return StableVectorModel(alpha, std::move(measure));
}

LinearRepresentation to_matrix(const StableVectorModel& model) {
  const auto& measure = model.measure();
  if (!measure.is_atomic()) throw DomainError("matrix representation requires a purely atomic measure");
  LinearRepresentation rep;
  rep.alpha = model.alpha();
  rep.columns.resize(measure.dim(), static_cast<Eigen::Index>(measure.atoms().size()));
  for (std::size_t j = 0; j < measure.atoms().size(); ++j) {
    const auto& atom = measure.atoms()[j];
    rep.columns.col(static_cast<Eigen::Index>(j)) = std::pow(2.0 * atom.mass, 1.0 / model.alpha()) * atom.direction;
  }
  return rep;
}

double sphere_abs_moment(int n, double alpha) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (n == 1) return 1.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto weight = [n](double phi) { return n == 2 ? 1.0 : std::pow(std::sin(phi), n - 2); };
  const double num = 2.0 * ts.integrate([&](double phi) { return std::pow(std::cos(phi), alpha) * weight(phi); },
                                        0.0, kPi / 2.0, 1e-14);
  const double den = 2.0 * ts.integrate(weight, 0.0, kPi / 2.0, 1e-14);
  return num / den;
}

double cf_value(const StableVectorModel& model, const Vector& theta) {
  const auto& measure = model.measure();
  if (theta.size() != measure.dim()) throw DomainError("theta has wrong dimension");
  const double a = model.alpha();
  double exponent = 0.0;
  for (const auto& atom : measure.atoms()) exponent += 2.0 * atom.mass * std::pow(std::abs(theta.dot(atom.direction)), a);
  if (measure.isotropic_mass() > 0.0) {
    const double norm = theta.norm();
    if (norm > 0.0) exponent += measure.isotropic_mass() * std::pow(norm, a) * sphere_abs_moment(measure.dim(), a);
  }
  return std::exp(-exponent);
}

VectorSampler::VectorSampler(const StableVectorModel& model)
    : alpha_(model.alpha()), columns_(to_matrix(model).columns) {}

Vector VectorSampler::sample(RandomStream& rng) const {
  const StableLaw& law = stable_law(alpha_);
  Vector x = Vector::Zero(columns_.rows());
  for (Eigen::Index j = 0; j < columns_.cols(); ++j) x += law.sample(rng) * columns_.col(j);
  return x;
}

Vector sample_vector(const StableVectorModel& model, RandomStream& rng) {
  return VectorSampler(model).sample(rng);
}

LePageSampler::LePageSampler(const StableVectorModel& model, TruncationControl control)
    : model_(model), control_(control) {
  const auto& measure = model.measure();
  const double a = model.alpha();
  total_ = measure.total_mass();
  scale_ = std::pow(c_alpha(a) * total_, 1.0 / a);
  double acc = 0.0;
  for (const auto& atom : measure.atoms()) {
    acc += 2.0 * atom.mass;
    cumulative_.push_back(acc);
  }
  const int n = measure.dim();
  Matrix second = Matrix::Zero(n, n);
  for (const auto& atom : measure.atoms()) second += 2.0 * atom.mass * atom.direction * atom.direction.transpose();
  second += measure.isotropic_mass() / n * Matrix::Identity(n, n);
  second /= total_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(second);
  second_moment_root_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                        eig.eigenvectors().transpose();
  if (control_.block == 0) control_.block = 1;
}

Vector LePageSampler::draw_direction(RandomStream& rng) const {
  const auto& measure = model_.measure();
  const double pick = rng.uniform() * total_;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), pick);
  if (it != cumulative_.end()) {
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return rng.sign() * measure.atoms()[idx].direction;
  }
  Vector g(measure.dim());
  do {
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
  } while (g.norm() == 0.0);
  return g / g.norm();
}

LePageDraw LePageSampler::sample(RandomStream& rng) const {
  const double inv_a = 1.0 / model_.alpha();
  const int n = model_.dim();
  LePageDraw out;
  Vector sum = Vector::Zero(n);
  Vector block = Vector::Zero(n);
  double gamma = 0.0;
  std::size_t i = 0;
  const bool fixed = control_.mode == TruncationControl::Mode::fixed;
  const std::size_t limit = fixed ? control_.terms : control_.max_terms;
  while (i < limit) {
    gamma += rng.exponential();
    block += std::pow(gamma, -inv_a) * draw_direction(rng);
    ++i;
    if (i % control_.block == 0 || i == limit) {
      sum += block;
      const double inc = block.lpNorm<Eigen::Infinity>();
      block.setZero();
      if (!fixed && inc < control_.relative_tolerance * sum.norm()) break;
      if (!fixed && control_.gaussian_remainder &&
          (2.0 * inv_a - 1.0) / gamma < control_.gaussian_ratio * control_.gaussian_ratio)
        break;
    }
  }
  sum += block;
  out.terms = i;
  out.reached_max_terms = !fixed && i >= limit;
  if (control_.gaussian_remainder && model_.alpha() < 2.0) {
    const double var = std::pow(gamma, 1.0 - 2.0 * inv_a) / (2.0 * inv_a - 1.0);
    Vector z(n);
    for (int k = 0; k < n; ++k) z[k] = rng.normal();
    sum += std::sqrt(var) * (second_moment_root_ * z);
  }
  out.value = scale_ * sum;
  return out;
}

LePageDraw lepage_sample(const StableVectorModel& model, RandomStream& rng, const TruncationControl& control) {
  return LePageSampler(model, control).sample(rng);
}

std::vector<TailMomentRow> lepage_tail_moment_probe(const StableVectorModel& model, int k, double eps,
                                                    const std::vector<std::size_t>& n_grid,
                                                    std::size_t replicates, std::uint64_t seed) {
  const double a = model.alpha();
  if (k < 2) throw DomainError("k must be at least 2");
  if (!(eps > 0.0 && eps < std::min(a, (k - 1) * (2.0 - a)))) {
    throw DomainError("epsilon must lie in (0, min(alpha, (k-1)(2-alpha)))");
  }
  if (n_grid.empty() || replicates < 2) throw DomainError("probe needs a nonempty grid and at least 2 replicates");
  std::vector<std::size_t> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  const double power = (k - 1) * a + eps;
  const int n = model.dim();
  const std::size_t rows = grid.size() * static_cast<std::size_t>(n);
  std::vector<double> sum(rows, 0.0), sum_sq(rows, 0.0);
  LePageSampler sampler(model);
  const double inv_a = 1.0 / a;
  for (std::size_t r = 0; r < replicates; ++r) {
    RandomStream rng(seed, r);
    Vector partial = Vector::Zero(n);
    double gamma = 0.0;
    std::size_t g = 0;
    for (std::size_t i = 1; i <= grid.back(); ++i) {
      gamma += rng.exponential();
      const Vector w = sampler.draw_direction(rng);
      if (static_cast<int>(i) >= k) partial += std::pow(gamma, -inv_a) * w;
      while (g < grid.size() && grid[g] == i) {
        for (int j = 0; j < n; ++j) {
          const double v = std::pow(std::abs(partial[j]), power);
          sum[g * n + j] += v;
          sum_sq[g * n + j] += v * v;
        }
        ++g;
      }
    }
  }
  std::vector<TailMomentRow> out;
  const auto R = static_cast<double>(replicates);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int j = 0; j < n; ++j) {
      const double mean = sum[g * n + j] / R;
      const double var = std::max(0.0, (sum_sq[g * n + j] - R * mean * mean) / (R - 1.0));
      out.push_back({grid[g], j, mean, std::sqrt(var / R)});
    }
  }
  return out;
}

SpectralMeasure discretize_measure(const SpectralMeasure& measure, int m) {
  if (measure.is_atomic()) return measure;
  const int n = measure.dim();
  if (n != 2 && n != 3) throw CapabilityError("discretize_measure supports dimensions 2 and 3 only");
  if (m < 2 || m % 2 != 0) throw DomainError("atom count must be a positive even number");
  SpectralMeasure out(n);
  for (const auto& atom : measure.atoms()) out.add_pair(atom.direction, atom.mass);
  const double mass = measure.isotropic_mass() / m;
  const int pairs = m / 2;
  if (n == 2) {
    for (int j = 0; j < pairs; ++j) {
      const double phi = (j + 0.5) * 2.0 * kPi / m;
      Vector y(2);
      y << std::cos(phi), std::sin(phi);
      out.add_pair(y, mass);
    }
    return out;
  }
  int bands = 1;
  for (int b = 1; b <= pairs; ++b) {
    if (pairs % b == 0 && std::abs(b - std::sqrt(pairs / 2.0)) < std::abs(bands - std::sqrt(pairs / 2.0))) bands = b;
  }
  const int sectors = pairs / bands;
  for (int b = 0; b < bands; ++b) {
    const double z = (b + 0.5) / bands;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int s = 0; s < sectors; ++s) {
      const double phi = (s + 0.5) * 2.0 * kPi / sectors;
      Vector y(3);
      y << rho * std::cos(phi), rho * std::sin(phi), z;
      out.add_pair(y, mass);
    }
  }
  return out;
}

}  // namespace stabletail
