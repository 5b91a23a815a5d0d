#include "dirichar/functional_eq.hpp"

#include <cmath>
#include <sstream>

#include "dirichar/error.hpp"

namespace dirichar {
namespace {

void require_open_unit(double v, const char* what) {
  if (!std::isfinite(v) || !(v > kBoundaryTolerance) || !(v < 1.0)) {
    std::ostringstream msg;
    msg << what << " = " << v << " is outside (0, 1)";
    throw DomainError(msg.str());
  }
}

double log_positive(double value, const std::string& name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    std::ostringstream msg;
    msg << "function " << name << " returned " << value << ", expected a positive finite value";
    throw DomainError(msg.str());
  }
  return std::log(value);
}

double eval_log(const FnSimplex& fn, std::span<const double> args, const std::string& name) {
  if (args.size() != fn.arity) {
    std::ostringstream msg;
    msg << "function " << name << " takes " << fn.arity << " arguments, got " << args.size();
    throw DimensionError(msg.str());
  }
  return log_positive(fn.evaluator(args), name);
}

double beta_log_density(double a, double b, double t) {
  return (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) + log_gamma(a + b) - log_gamma(a) -
         log_gamma(b);
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j, Eigen::Index len) {
  std::vector<double> out(static_cast<std::size_t>(len));
  for (Eigen::Index i = 0; i < len; ++i) out[static_cast<std::size_t>(i)] = m(i, j);
  return out;
}

std::vector<double> row(const Eigen::MatrixXd& m, Eigen::Index i, Eigen::Index len) {
  std::vector<double> out(static_cast<std::size_t>(len));
  for (Eigen::Index j = 0; j < len; ++j) out[static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

// The two sides of the k x n equation, each as a log.
struct Sides {
  double column_side;  // ln f0(y) + sum_j ln g_j(z_.j)
  double row_side;     // ln g0(x) + sum_i ln f_i(w_i.)
};

Sides evaluate_sides(const GeneralBundle& b, const std::vector<double>& y,
                     const Eigen::MatrixXd& z, const std::vector<double>& x,
                     const Eigen::MatrixXd& w) {
  const auto k = static_cast<Eigen::Index>(b.k);
  const auto n = static_cast<Eigen::Index>(b.n);
  if (b.g.size() != b.n || b.f.size() != b.k) {
    throw DimensionError("bundle needs n g-functions and k f-functions");
  }
  if (z.rows() != k || z.cols() != n) throw DimensionError("point shape does not match bundle");
  Sides s{0.0, 0.0};
  s.column_side = eval_log(b.f0, std::span<const double>(y).first(b.n - 1), "f0");
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto args = column(z, j, k - 1);
    s.column_side += eval_log(b.g[static_cast<std::size_t>(j)], args, "g" + std::to_string(j + 1));
  }
  s.row_side = eval_log(b.g0, std::span<const double>(x).first(b.k - 1), "g0");
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto args = row(w, i, n - 1);
    s.row_side += eval_log(b.f[static_cast<std::size_t>(i)], args, "f" + std::to_string(i + 1));
  }
  return s;
}

FnSimplex dirichlet_fn(DirichletParams params) {
  const std::size_t arity = params.size() - 1;
  return FnSimplex{[params = std::move(params)](std::span<const double> free) {
                     return std::exp(log_density_free(params, free));
                   },
                   arity};
}

// Dirichlet density divided by prod_l t_l^power over all l coordinates.
FnSimplex absorbed_dirichlet_fn(DirichletParams params, double power) {
  const std::size_t arity = params.size() - 1;
  return FnSimplex{[params = std::move(params), power](std::span<const double> free) {
                     double rest = 1.0;
                     double log_jac = 0.0;
                     for (double v : free) {
                       rest -= v;
                       log_jac += std::log(v);
                     }
                     log_jac += std::log(rest);
                     return std::exp(log_density_free(params, free) - power * log_jac);
                   },
                   arity};
}

}  // namespace

BinaryPoint::BinaryPoint(double y, double z, double w) : y_(y), z_(z), w_(w) {
  require_open_unit(y, "y");
  require_open_unit(z, "z");
  require_open_unit(w, "w");
}

GeneralPoint::GeneralPoint(std::vector<double> y, Eigen::MatrixXd z) {
  const std::size_t n = y.size() + 1;
  if (n < 2 || static_cast<std::size_t>(z.cols()) != n || z.rows() < 1) {
    throw DimensionError("general point needs y of length n-1 and z of shape (k-1) x n");
  }
  const Eigen::Index k = z.rows() + 1;
  y_full_ = std::move(y);
  double rest = 1.0;
  for (double v : y_full_) {
    require_open_unit(v, "y_j");
    rest -= v;
  }
  y_full_.push_back(rest);
  require_open_unit(rest, "y_n");

  z_full_.resize(k, static_cast<Eigen::Index>(n));
  z_full_.topRows(k - 1) = z;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    double zr = 1.0;
    for (Eigen::Index i = 0; i < k - 1; ++i) {
      require_open_unit(z(i, j), "z_ij");
      zr -= z(i, j);
    }
    require_open_unit(zr, "z_kj");
    z_full_(k - 1, j) = zr;
  }

  x_full_.assign(static_cast<std::size_t>(k), 0.0);
  double xr = 1.0;
  for (Eigen::Index i = 0; i < k - 1; ++i) {
    double xi = 0.0;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
      xi += z_full_(i, j) * y_full_[static_cast<std::size_t>(j)];
    }
    require_open_unit(xi, "x_i");
    x_full_[static_cast<std::size_t>(i)] = xi;
    xr -= xi;
  }
  require_open_unit(xr, "x_k");
  x_full_[static_cast<std::size_t>(k - 1)] = xr;

  w_full_.resize(k, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
      const double wij =
          z_full_(i, j) * y_full_[static_cast<std::size_t>(j)] / x_full_[static_cast<std::size_t>(i)];
      require_open_unit(wij, "w_ij");
      w_full_(i, j) = wij;
    }
  }
}

DualPoint::DualPoint(std::vector<double> x, Eigen::MatrixXd w) {
  const std::size_t k = x.size() + 1;
  if (k < 2 || static_cast<std::size_t>(w.rows()) != k || w.cols() < 1) {
    throw DimensionError("dual point needs x of length k-1 and w of shape k x (n-1)");
  }
  const Eigen::Index n = w.cols() + 1;
  const auto kk = static_cast<Eigen::Index>(k);
  x_full_ = std::move(x);
  double rest = 1.0;
  for (double v : x_full_) {
    require_open_unit(v, "x_i");
    rest -= v;
  }
  require_open_unit(rest, "x_k");
  x_full_.push_back(rest);

  w_full_.resize(kk, n);
  w_full_.leftCols(n - 1) = w;
  for (Eigen::Index i = 0; i < kk; ++i) {
    double wr = 1.0;
    for (Eigen::Index j = 0; j < n - 1; ++j) {
      require_open_unit(w(i, j), "w_ij");
      wr -= w(i, j);
    }
    require_open_unit(wr, "w_in");
    w_full_(i, n - 1) = wr;
  }

  y_full_.assign(static_cast<std::size_t>(n), 0.0);
  double yr = 1.0;
  for (Eigen::Index j = 0; j < n - 1; ++j) {
    double yj = 0.0;
    for (Eigen::Index i = 0; i < kk; ++i) yj += w_full_(i, j) * x_full_[static_cast<std::size_t>(i)];
    require_open_unit(yj, "y_j");
    y_full_[static_cast<std::size_t>(j)] = yj;
    yr -= yj;
  }
  require_open_unit(yr, "y_n");
  y_full_[static_cast<std::size_t>(n - 1)] = yr;

  z_full_.resize(kk, n);
  for (Eigen::Index i = 0; i < kk; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double zij =
          w_full_(i, j) * x_full_[static_cast<std::size_t>(i)] / y_full_[static_cast<std::size_t>(j)];
      require_open_unit(zij, "z_ij");
      z_full_(i, j) = zij;
    }
  }
}

DualPoint to_dual(const GeneralPoint& p) {
  std::vector<double> x(p.x().begin(), p.x().end() - 1);
  return DualPoint(std::move(x), p.w().leftCols(p.w().cols() - 1));
}

GeneralPoint to_general(const DualPoint& p) {
  std::vector<double> y(p.y().begin(), p.y().end() - 1);
  return GeneralPoint(std::move(y), p.z().topRows(p.z().rows() - 1));
}

double binary_residual(const BinaryBundle& b, const BinaryPoint& p) {
  const double y = p.y(), z = p.z(), w = p.w(), x = p.x();
  const double lhs = log_positive(b.f0(y), "f0") + log_positive(b.g1(z), "g1") +
                     log_positive(b.g2(w), "g2");
  const double rhs = log_positive(b.g0(x), "g0") + log_positive(b.f1(y * z / x), "f1") +
                     log_positive(b.f2(y * (1.0 - z) / (1.0 - x)), "f2");
  return std::abs(lhs - rhs);
}

double general_residual_yz(const GeneralBundle& bundle, const GeneralPoint& p) {
  if (p.k() != bundle.k || p.n() != bundle.n) {
    throw DimensionError("point shape does not match bundle");
  }
  const Sides s = evaluate_sides(bundle, p.y(), p.z(), p.x(), p.w());
  return std::abs(s.column_side - s.row_side);
}

double general_residual_xw(const GeneralBundle& bundle, const DualPoint& p) {
  const Sides s = evaluate_sides(bundle, p.y(), p.z(), p.x(), p.w());
  return std::abs(s.row_side - s.column_side);
}

double general_residual(const GeneralBundle& bundle, const GeneralPoint& p) {
  return std::max(general_residual_yz(bundle, p), general_residual_xw(bundle, to_dual(p)));
}

BinaryBundle dirichlet_binary_bundle(const TableDirichletParams& params) {
  if (params.rows() != 2 || params.cols() != 2) {
    throw DimensionError("the binary bundle needs 2 x 2 parameters");
  }
  const double a11 = params(0, 0), a12 = params(0, 1), a21 = params(1, 0), a22 = params(1, 1);
  const double c1 = a11 + a21, c2 = a12 + a22;  // column sums
  const double r1 = a11 + a12, r2 = a21 + a22;  // row sums
  BinaryBundle b;
  b.f0 = [c1, c2](double y) {
    return std::exp(beta_log_density(c1, c2, y) - std::log(y) - std::log1p(-y));
  };
  b.g0 = [r1, r2](double x) {
    return std::exp(beta_log_density(r1, r2, x) - std::log(x) - std::log1p(-x));
  };
  b.g1 = [a11, a21](double z) { return std::exp(beta_log_density(a11, a21, z)); };
  b.g2 = [a12, a22](double w) { return std::exp(beta_log_density(a12, a22, w)); };
  b.f1 = [a11, a12](double t) { return std::exp(beta_log_density(a11, a12, t)); };
  b.f2 = [a21, a22](double t) { return std::exp(beta_log_density(a21, a22, t)); };
  return b;
}

GeneralBundle dirichlet_general_bundle(const TableDirichletParams& params) {
  const DirichletFactors cols = decompose_dirichlet(params, Axis::Columns);
  const DirichletFactors rows = decompose_dirichlet(params, Axis::Rows);
  GeneralBundle b;
  b.k = static_cast<std::size_t>(params.rows());
  b.n = static_cast<std::size_t>(params.cols());
  b.f0 = absorbed_dirichlet_fn(cols.marginal, static_cast<double>(b.k) - 1.0);
  for (const auto& c : cols.conditionals) b.g.push_back(dirichlet_fn(c));
  b.g0 = absorbed_dirichlet_fn(rows.marginal, static_cast<double>(b.n) - 1.0);
  for (const auto& r : rows.conditionals) b.f.push_back(dirichlet_fn(r));
  return b;
}

BinaryLogDerivatives dirichlet_log_derivatives(const TableDirichletParams& params) {
  if (params.rows() != 2 || params.cols() != 2) {
    throw DimensionError("log derivatives are defined for 2 x 2 parameters");
  }
  const double a11 = params(0, 0), a12 = params(0, 1), a21 = params(1, 0), a22 = params(1, 1);
  const double c1 = a11 + a21, c2 = a12 + a22;
  const double r1 = a11 + a12, r2 = a21 + a22;
  BinaryLogDerivatives d;
  // f0 and g0 carry the absorbed 1/(t(1-t)), which lowers both exponents by one.
  d.f0 = [c1, c2](double t) { return (c1 - 2.0) / t - (c2 - 2.0) / (1.0 - t); };
  d.g0 = [r1, r2](double t) { return (r1 - 2.0) / t - (r2 - 2.0) / (1.0 - t); };
  d.g1 = [a11, a21](double t) { return (a11 - 1.0) / t - (a21 - 1.0) / (1.0 - t); };
  d.g2 = [a12, a22](double t) { return (a12 - 1.0) / t - (a22 - 1.0) / (1.0 - t); };
  return d;
}

double verify_eq24(const BinaryLogDerivatives& d, const BinaryPoint& p) {
  const double y = p.y(), z = p.z(), w = p.w(), x = p.x();
  const double h = y * (1.0 - y) * (w - z) * (w - z) + y * z * (1.0 - z) + (1.0 - y) * (1.0 - w) * w;
  const double lhs = h * d.g0(x);
  const double rhs = z * (1.0 - z) * d.g1(z) + w * (1.0 - w) * d.g2(w) -
                     y * (1.0 - y) * (w - z) * d.f0(y);
  return std::abs(lhs - rhs);
}

double verify_eq24(const TableDirichletParams& params, const BinaryPoint& p) {
  return verify_eq24(dirichlet_log_derivatives(params), p);
}

double ode28_lhs(double a, double b, double w) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("exponents must be positive");
  require_open_unit(w, "w");
  const double d1 = a / w - b / (1.0 - w);
  const double d2 = -a / (w * w) - b / ((1.0 - w) * (1.0 - w));
  return (1.0 - 2.0 * w) * d1 + w * (1.0 - w) * d2;
}

double verify_ode28(double a, double b, double w) { return std::abs(ode28_lhs(a, b, w) + (a + b)); }

BinaryPoint random_binary_point(Rng& rng, double margin) {
  const double span = 1.0 - 2.0 * margin;
  const double y = margin + span * rng.uniform();
  const double z = margin + span * rng.uniform();
  const double w = margin + span * rng.uniform();
  return BinaryPoint(y, z, w);
}

std::vector<double> random_simplex_free(std::size_t l, Rng& rng, double margin) {
  if (margin * static_cast<double>(l) >= 1.0) throw DomainError("margin too large for dimension");
  std::vector<double> e(l);
  for (;;) {
    // Uniform on the simplex via normalised exponentials.
    double total = 0.0;
    for (double& v : e) {
      v = -std::log(rng.uniform());
      total += v;
    }
    bool ok = true;
    for (double& v : e) {
      v /= total;
      ok = ok && v >= margin;
    }
    if (ok) return std::vector<double>(e.begin(), e.end() - 1);
  }
}

GeneralPoint random_general_point(std::size_t k, std::size_t n, Rng& rng, double margin) {
  std::vector<double> y = random_simplex_free(n, rng, margin);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const std::vector<double> col = random_simplex_free(k, rng, margin);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
  }
  return GeneralPoint(std::move(y), std::move(z));
}

}  // namespace dirichar
