#pragma once

// Reference computations used by the unit tests. Each one is written
// directly from its textbook definition and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "dirichar/random.hpp"
#include "dirichar/reparam.hpp"

namespace oracle {

inline double uniform_in(dirichar::Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline Eigen::MatrixXd random_alpha_matrix(dirichar::Rng& rng, Eigen::Index k, Eigen::Index n, double lo = 0.5,
                                           double hi = 5.0) {
  Eigen::MatrixXd a(k, n);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = uniform_in(rng, lo, hi);
  return a;
}

/// Uniform point of the open simplex via normalized exponentials, as a k x n table.
inline Eigen::MatrixXd random_table_entries(dirichar::Rng& rng, Eigen::Index k, Eigen::Index n) {
  Eigen::MatrixXd m(k, n);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = -std::log(rng.uniform());
  return m / m.sum();
}

inline dirichar::ProbTable random_table(dirichar::Rng& rng, Eigen::Index k, Eigen::Index n) {
  return dirichar::ProbTable(random_table_entries(rng, k, n));
}

/// Dirichlet log density from std::lgamma.
inline double dirichlet_log_density(const std::vector<double>& alpha, const std::vector<double>& phi) {
  double total = 0.0, out = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    total += alpha[i];
    out += (alpha[i] - 1.0) * std::log(phi[i]) - std::lgamma(alpha[i]);
  }
  return out + std::lgamma(total);
}

/// log p(counts) under a Dirichlet-multinomial with exponents alpha
/// (sequence probability, not the multinomial coefficient).
inline double dirichlet_multinomial(const std::vector<double>& alpha, const std::vector<double>& counts) {
  double a = 0.0, n = 0.0, out = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    a += alpha[i];
    n += counts[i];
    out += std::lgamma(alpha[i] + counts[i]) - std::lgamma(alpha[i]);
  }
  return out + std::lgamma(a) - std::lgamma(a + n);
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

/// Distance correlation by explicit double centring of both distance matrices.
inline double distance_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::Index n = x.rows();
  auto centred = [n](const Eigen::MatrixXd& z) {
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (z.row(i) - z.row(j)).norm();
    const Eigen::VectorXd rm = d.rowwise().mean();
    const Eigen::RowVectorXd cm = d.colwise().mean();
    const double gm = d.mean();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) d(i, j) += gm - rm(i) - cm(j);
    return d;
  };
  const Eigen::MatrixXd a = centred(x), b = centred(y);
  const double vxy = (a.array() * b.array()).mean();
  const double vxx = (a.array() * a.array()).mean();
  const double vyy = (b.array() * b.array()).mean();
  return std::sqrt(std::max(vxy, 0.0) / std::sqrt(vxx * vyy));
}

/// Gauss-Legendre nodes and weights on [a, b] by Newton iteration.
inline void gauss_legendre(int m, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(m), 0.0);
  w.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = 0.5 * (a + b) - 0.5 * (b - a) * t;
    w[static_cast<std::size_t>(i)] = (b - a) / ((1.0 - t * t) * dp * dp);
  }
}

// Table from (marginal, conditionals) free coordinates, written out directly.
inline Eigen::VectorXd table_free_from(const Eigen::VectorXd& u, Eigen::Index k, Eigen::Index n, dirichar::Axis axis) {
  const Eigen::Index m = axis == dirichar::Axis::Rows ? k : n;  // marginal length
  const Eigen::Index c = axis == dirichar::Axis::Rows ? n : k;  // conditional length
  std::vector<double> marg(static_cast<std::size_t>(m));
  double s = 0.0;
  for (Eigen::Index i = 0; i < m - 1; ++i) s += marg[static_cast<std::size_t>(i)] = u(i);
  marg.back() = 1.0 - s;
  Eigen::MatrixXd t(k, n);
  Eigen::Index pos = m - 1;
  for (Eigen::Index i = 0; i < m; ++i) {
    double cs = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) {
      double cond;
      if (j < c - 1) {
        cond = u(pos++);
        cs += cond;
      } else {
        cond = 1.0 - cs;
      }
      const double v = marg[static_cast<std::size_t>(i)] * cond;
      if (axis == dirichar::Axis::Rows) t(i, j) = v;
      else t(j, i) = v;
    }
  }
  Eigen::VectorXd out(k * n - 1);
  for (Eigen::Index idx = 0; idx < k * n - 1; ++idx) out(idx) = t(idx / n, idx % n);
  return out;
}

inline double table_map_fd_log_det(const dirichar::Decomposition& dec, Eigen::Index k, Eigen::Index n, dirichar::Axis axis) {
  std::vector<double> u;
  for (double x : dec.marginal.free()) u.push_back(x);
  for (const auto& c : dec.conditionals)
    for (double x : c.free()) u.push_back(x);
  const Eigen::Index d = static_cast<Eigen::Index>(u.size());
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(u.data(), d);
  Eigen::MatrixXd jac(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = 1e-6 * x(j);
    Eigen::VectorXd up = x, dn = x;
    up(j) += h;
    dn(j) -= h;
    jac.col(j) = (table_free_from(up, k, n, axis) - table_free_from(dn, k, n, axis)) / (2 * h);
  }
  return std::log(std::abs(jac.determinant()));
}


using Vec5 = Eigen::Matrix<double, 5, 1>;

// Flip of the regression parameters through the joint moments. The map is
// its own inverse, so it serves both directions.
inline Vec5 gaussian_flip(const Vec5& f) {
  const double mu1 = f(0), v1 = f(1), mc = f(2), b = f(3), vc = f(4);
  const double mu2 = mc + b * mu1;
  const double s12 = b * v1, s22 = vc + b * b * v1;
  const double b21 = s12 / s22;
  return (Vec5() << mu2, s22, mu1 - b21 * mu2, b21, v1 - s12 * s12 / s22).finished();
}

inline double gaussian_flip_fd_log_det(const Vec5& x) {
  Eigen::Matrix<double, 5, 5> j;
  for (int c = 0; c < 5; ++c) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(c)));
    Vec5 up = x, dn = x;
    up(c) += h;
    dn(c) -= h;
    j.col(c) = (gaussian_flip(up) - gaussian_flip(dn)) / (2 * h);
  }
  return std::log(std::abs(j.determinant()));
}

}  // namespace oracle
