#include "dirichar/dirichlet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dirichar/error.hpp"

namespace dirichar {
namespace {

// Godfrey's coefficients for g = 607/128, n = 15.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

// ln Gamma(x) for x >= 1/2.
double lanczos_log_gamma(double x) {
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t k = kLanczos.size() - 1; k >= 1; --k) {
    series += kLanczos[k] / (z + static_cast<double>(k));
  }
  const double t = z + kLanczosG + 0.5;
  // 0.5 * ln(2 pi)
  constexpr double kHalfLogTwoPi = 0.91893853320467274178;
  return kHalfLogTwoPi + (z + 0.5) * std::log(t) - t + std::log(series);
}

void check_interior(std::span<const double> values) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v <= kBoundaryTolerance) {
      std::ostringstream msg;
      msg << "simplex coordinate " << i << " = " << v << " is not interior";
      throw DomainError(msg.str());
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "simplex coordinates sum to " << sum << ", not 1";
    throw DomainError(msg.str());
  }
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    std::ostringstream msg;
    msg << "log_gamma: argument " << x << " is not a positive finite number";
    throw DomainError(msg.str());
  }
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x < 0.5) {
    // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    return std::log(std::numbers::pi) - std::log(std::sin(std::numbers::pi * x)) -
           lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double log_multivariate_beta(std::span<const double> alphas) {
  double sum_log = 0.0;
  double total = 0.0;
  for (double a : alphas) {
    sum_log += log_gamma(a);
    total += a;
  }
  return sum_log - log_gamma(total);
}

SimplexPoint::SimplexPoint(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw DimensionError("a simplex point needs at least two coordinates");
  }
  check_interior(values_);
}

SimplexPoint SimplexPoint::from_free(std::span<const double> free) {
  std::vector<double> values(free.begin(), free.end());
  double sum = 0.0;
  for (double v : free) sum += v;
  values.push_back(1.0 - sum);
  return SimplexPoint(std::move(values));
}

DirichletParams::DirichletParams(std::vector<double> alphas)
    : alphas_(std::move(alphas)), total_(0.0) {
  if (alphas_.size() < 2) {
    throw DimensionError("Dirichlet parameters need at least two exponents");
  }
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (!std::isfinite(alphas_[i]) || alphas_[i] <= 0.0) {
      std::ostringstream msg;
      msg << "Dirichlet exponent " << i << " = " << alphas_[i] << " must be positive";
      throw DomainError(msg.str());
    }
    total_ += alphas_[i];
  }
}

double log_density(const DirichletParams& params, const SimplexPoint& point) {
  if (params.size() != point.size()) {
    throw DimensionError("Dirichlet parameters and point differ in length");
  }
  double result = -log_multivariate_beta(params.alphas());
  for (std::size_t i = 0; i < params.size(); ++i) {
    result += (params[i] - 1.0) * std::log(point[i]);
  }
  return result;
}

double log_density_free(const DirichletParams& params, std::span<const double> free) {
  if (free.size() + 1 != params.size()) {
    throw DimensionError("free coordinates do not match the Dirichlet dimension");
  }
  double rest = 1.0;
  double result = -log_multivariate_beta(params.alphas());
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (!(free[i] > kBoundaryTolerance && free[i] < 1.0)) {
      throw DomainError("free coordinate outside (0, 1)");
    }
    rest -= free[i];
    result += (params[i] - 1.0) * std::log(free[i]);
  }
  if (!(rest > kBoundaryTolerance)) throw DomainError("free coordinates sum to 1 or more");
  result += (params[free.size()] - 1.0) * std::log(rest);
  return result;
}

SimplexPoint mean(const DirichletParams& params) {
  std::vector<double> m(params.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = params[i] / params.total();
  return SimplexPoint(std::move(m));
}

SimplexPoint sample(const DirichletParams& params, Rng& rng) {
  const std::size_t l = params.size();
  std::vector<double> logs(l);
  for (;;) {
    for (std::size_t i = 0; i < l; ++i) logs[i] = rng.log_gamma_variate(params[i]);
    const double top = *std::max_element(logs.begin(), logs.end());
    double norm = 0.0;
    for (double v : logs) norm += std::exp(v - top);
    const double log_norm = top + std::log(norm);
    std::vector<double> values(l);
    bool interior = true;
    for (std::size_t i = 0; i < l; ++i) {
      values[i] = std::exp(logs[i] - log_norm);
      interior = interior && values[i] > kBoundaryTolerance;
    }
    if (!interior) continue;
    // Renormalise once more so the stored coordinates sum to one to rounding.
    const double s = std::accumulate(values.begin(), values.end(), 0.0);
    for (double& v : values) v /= s;
    return SimplexPoint(std::move(values));
  }
}

}  // namespace dirichar
