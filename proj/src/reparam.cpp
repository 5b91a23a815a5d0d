#include "dirichar/reparam.hpp"

#include <cmath>
#include <vector>

#include <Eigen/LU>
#include <sstream>

#include "dirichar/error.hpp"

namespace dirichar {
namespace {

// Views the table so that "rows" are the cells being conditioned on.
Eigen::MatrixXd oriented(const Eigen::MatrixXd& m, Axis axis) {
  return axis == Axis::Rows ? m : Eigen::MatrixXd(m.transpose());
}

}  // namespace

ProbTable::ProbTable(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 2 || entries_.cols() < 2) {
    throw DimensionError("probability tables need at least two rows and two columns");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double v = entries_(i, j);
      if (!std::isfinite(v) || v <= kBoundaryTolerance) {
        std::ostringstream msg;
        msg << "table cell (" << i << ", " << j << ") = " << v << " is not interior";
        throw DomainError(msg.str());
      }
      sum += v;
    }
  }
  if (std::abs(sum - 1.0) > kSimplexSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "table entries sum to " << sum << ", not 1";
    throw DomainError(msg.str());
  }
}

TableDirichletParams::TableDirichletParams(Eigen::MatrixXd alphas) : alphas_(std::move(alphas)) {
  if (alphas_.rows() < 2 || alphas_.cols() < 2) {
    throw DimensionError("table Dirichlet parameters need at least a 2 x 2 shape");
  }
  for (Eigen::Index i = 0; i < alphas_.rows(); ++i) {
    for (Eigen::Index j = 0; j < alphas_.cols(); ++j) {
      if (!std::isfinite(alphas_(i, j)) || alphas_(i, j) <= 0.0) {
        std::ostringstream msg;
        msg << "exponent (" << i << ", " << j << ") = " << alphas_(i, j) << " must be positive";
        throw DomainError(msg.str());
      }
    }
  }
}

DirichletParams TableDirichletParams::flattened() const {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(alphas_.size()));
  for (Eigen::Index i = 0; i < alphas_.rows(); ++i) {
    for (Eigen::Index j = 0; j < alphas_.cols(); ++j) flat.push_back(alphas_(i, j));
  }
  return DirichletParams(std::move(flat));
}

Decomposition decompose_table(const ProbTable& table, Axis axis) {
  const Eigen::MatrixXd t = oriented(table.entries(), axis);
  std::vector<double> marginal(static_cast<std::size_t>(t.rows()));
  std::vector<SimplexPoint> conditionals;
  conditionals.reserve(marginal.size());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double m = t.row(i).sum();
    marginal[static_cast<std::size_t>(i)] = m;
    std::vector<double> cond(static_cast<std::size_t>(t.cols()));
    for (Eigen::Index j = 0; j < t.cols(); ++j) cond[static_cast<std::size_t>(j)] = t(i, j) / m;
    conditionals.emplace_back(std::move(cond));
  }
  return Decomposition{SimplexPoint(std::move(marginal)), std::move(conditionals)};
}

ProbTable compose_table(const Decomposition& dec, Axis axis) {
  const std::size_t k = dec.marginal.size();
  if (dec.conditionals.size() != k) {
    throw DimensionError("need one conditional per marginal cell");
  }
  const std::size_t n = dec.conditionals.front().size();
  Eigen::MatrixXd t(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < k; ++i) {
    if (dec.conditionals[i].size() != n) {
      throw DimensionError("conditionals differ in length");
    }
    for (std::size_t j = 0; j < n; ++j) {
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          dec.marginal[i] * dec.conditionals[i][j];
    }
  }
  return ProbTable(oriented(t, axis));
}

double log_jacobian(const SimplexPoint& marginal, int n) {
  if (n < 1) throw DomainError("conditional length must be at least 1");
  double sum_log = 0.0;
  for (double v : marginal.values()) sum_log += std::log(v);
  return static_cast<double>(n - 1) * sum_log;
}

DirichletFactors decompose_dirichlet(const TableDirichletParams& params, Axis axis) {
  const Eigen::MatrixXd a = oriented(params.alphas(), axis);
  std::vector<double> marginal(static_cast<std::size_t>(a.rows()));
  std::vector<DirichletParams> conditionals;
  conditionals.reserve(marginal.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    std::vector<double> cond(static_cast<std::size_t>(a.cols()));
    double total = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      cond[static_cast<std::size_t>(j)] = a(i, j);
      total += a(i, j);
    }
    marginal[static_cast<std::size_t>(i)] = total;
    conditionals.emplace_back(std::move(cond));
  }
  return DirichletFactors{DirichletParams(std::move(marginal)), std::move(conditionals)};
}

TableDirichletParams compose_dirichlet(const DirichletParams& marginal,
                                       std::span<const DirichletParams> conditionals,
                                       Axis axis) {
  if (conditionals.size() != marginal.size()) {
    throw DimensionError("need one conditional Dirichlet per marginal cell");
  }
  const std::size_t n = conditionals.front().size();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(marginal.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < conditionals.size(); ++i) {
    const DirichletParams& cond = conditionals[i];
    if (cond.size() != n) throw DimensionError("conditional Dirichlets differ in length");
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cond[j];
      total += cond[j];
    }
    if (std::abs(total - marginal[i]) > kCompositionTolerance) {
      std::ostringstream msg;
      msg << "conditional " << i << " exponents sum to " << total
          << " but the marginal exponent is " << marginal[i];
      throw ConsistencyError(i, msg.str());
    }
  }
  return TableDirichletParams(oriented(a, axis));
}

double table_log_density(const TableDirichletParams& params, const ProbTable& table) {
  if (params.rows() != table.rows() || params.cols() != table.cols()) {
    throw DimensionError("parameter and table shapes differ");
  }
  double total_alpha = 0.0;
  double result = 0.0;
  for (Eigen::Index i = 0; i < params.rows(); ++i) {
    for (Eigen::Index j = 0; j < params.cols(); ++j) {
      total_alpha += params(i, j);
      result += (params(i, j) - 1.0) * std::log(table(i, j)) - log_gamma(params(i, j));
    }
  }
  return result + log_gamma(total_alpha);
}

double factored_log_density(const DirichletFactors& factors, const Decomposition& dec) {
  if (factors.conditionals.size() != dec.conditionals.size()) {
    throw DimensionError("factor count does not match the decomposition");
  }
  double result = log_density(factors.marginal, dec.marginal);
  for (std::size_t i = 0; i < dec.conditionals.size(); ++i) {
    result += log_density(factors.conditionals[i], dec.conditionals[i]);
  }
  return result;
}

double verify_change_of_variables(const TableDirichletParams& params, const ProbTable& table,
                                  Axis axis) {
  return verify_change_of_variables(params, decompose_dirichlet(params, axis), table, axis);
}

double verify_change_of_variables(const TableDirichletParams& params,
                                  const DirichletFactors& factors, const ProbTable& table,
                                  Axis axis) {
  const Decomposition dec = decompose_table(table, axis);
  const int n = static_cast<int>(dec.conditionals.front().size());
  const double joint = table_log_density(params, table);
  const double factored = factored_log_density(factors, dec) - log_jacobian(dec.marginal, n);
  return std::abs(joint - factored);
}

namespace {

std::vector<double> free_coordinates(const Decomposition& dec) {
  std::vector<double> x(dec.marginal.free().begin(), dec.marginal.free().end());
  for (const auto& c : dec.conditionals) x.insert(x.end(), c.free().begin(), c.free().end());
  return x;
}

Eigen::VectorXd table_free(const std::vector<double>& x, std::size_t m, std::size_t l, Axis axis) {
  std::vector<SimplexPoint> conds;
  conds.reserve(m);
  std::size_t off = m - 1;
  for (std::size_t i = 0; i < m; ++i, off += l - 1) {
    conds.push_back(SimplexPoint::from_free(std::span<const double>(x).subspan(off, l - 1)));
  }
  const Decomposition dec{SimplexPoint::from_free(std::span<const double>(x).first(m - 1)), std::move(conds)};
  const ProbTable t = compose_table(dec, axis);
  Eigen::VectorXd out(t.rows() * t.cols() - 1);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      if (c < out.size()) out(c++) = t(i, j);
    }
  }
  return out;
}

}  // namespace

double numerical_log_jacobian(const Decomposition& dec, Axis axis, double rel_step) {
  const std::size_t m = dec.marginal.size();
  if (dec.conditionals.size() != m) throw DimensionError("one conditional per marginal cell required");
  const std::size_t l = dec.conditionals.front().size();
  const std::vector<double> x = free_coordinates(dec);
  const auto d = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd jac(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = rel_step * std::abs(x[static_cast<std::size_t>(j)]);
    std::vector<double> hi = x, lo = x;
    hi[static_cast<std::size_t>(j)] += h;
    lo[static_cast<std::size_t>(j)] -= h;
    const double width = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
    jac.col(j) = (table_free(hi, m, l, axis) - table_free(lo, m, l, axis)) / width;
  }
  return std::log(std::abs(jac.fullPivLu().determinant()));
}

}  // namespace dirichar
