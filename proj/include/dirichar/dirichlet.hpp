#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dirichar/random.hpp"

namespace dirichar {

/// Entries at or below this value are treated as lying on the simplex boundary.
inline constexpr double kBoundaryTolerance = 1e-300;
/// Allowed deviation of a simplex point's coordinate sum from one.
inline constexpr double kSimplexSumTolerance = 1e-12;

/// ln Gamma(x) for x > 0 (Lanczos approximation, reflection below 1/2).
/// Throws DomainError for non-positive or non-finite x.
double log_gamma(double x);

/// ln B(a) = sum ln Gamma(a_i) - ln Gamma(sum a_i).
double log_multivariate_beta(std::span<const double> alphas);

/// An interior point of the probability simplex. All l coordinates are
/// stored, including the redundant last one.
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> values);

  /// Builds the point (v_1, ..., v_{l-1}, 1 - sum v_i).
  static SimplexPoint from_free(std::span<const double> free);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  /// The first l-1 coordinates.
  std::span<const double> free() const noexcept {
    return std::span<const double>(values_).first(values_.size() - 1);
  }

 private:
  std::vector<double> values_;
};

class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> alphas);

  std::size_t size() const noexcept { return alphas_.size(); }
  double operator[](std::size_t i) const { return alphas_[i]; }
  std::span<const double> alphas() const noexcept { return alphas_; }
  double total() const noexcept { return total_; }

  friend bool operator==(const DirichletParams& a, const DirichletParams& b) {
    return a.alphas_ == b.alphas_;
  }

 private:
  std::vector<double> alphas_;
  double total_;
};

/// Log density of the first l-1 coordinates of `point` under Dir(params),
/// with respect to Lebesgue measure on those free coordinates.
double log_density(const DirichletParams& params, const SimplexPoint& point);

/// Same density, evaluated from free coordinates alone. Throws DomainError
/// when the implied point is not interior.
double log_density_free(const DirichletParams& params, std::span<const double> free);

SimplexPoint mean(const DirichletParams& params);

/// Gamma-ratio draw from Dir(params). Work is carried out in log space so
/// that small exponents do not underflow to the boundary; draws that still
/// land on the boundary are redrawn.
SimplexPoint sample(const DirichletParams& params, Rng& rng);

}  // namespace dirichar
