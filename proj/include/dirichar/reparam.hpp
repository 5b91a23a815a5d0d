#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dirichar/dirichlet.hpp"

namespace dirichar {

/// Which variable a decomposition conditions on. ROWS gives the row
/// marginal theta_i. and the row conditionals theta_{j|i}; COLUMNS gives the
/// column marginal theta_.j and the column conditionals theta_{i|j}.
enum class Axis { Rows, Columns };

/// A strictly positive k x n joint probability table, k, n >= 2.
class ProbTable {
 public:
  explicit ProbTable(Eigen::MatrixXd entries);

  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

struct Decomposition {
  SimplexPoint marginal;
  std::vector<SimplexPoint> conditionals;
};

/// Exponents of a joint Dirichlet over a k x n table.
class TableDirichletParams {
 public:
  explicit TableDirichletParams(Eigen::MatrixXd alphas);

  Eigen::Index rows() const noexcept { return alphas_.rows(); }
  Eigen::Index cols() const noexcept { return alphas_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return alphas_(i, j); }
  const Eigen::MatrixXd& alphas() const noexcept { return alphas_; }

  /// Row-major flattening, the order used for the joint Dirichlet.
  DirichletParams flattened() const;

 private:
  Eigen::MatrixXd alphas_;
};

/// The marginal Dirichlet and one conditional Dirichlet per marginal cell.
struct DirichletFactors {
  DirichletParams marginal;
  std::vector<DirichletParams> conditionals;
};

Decomposition decompose_table(const ProbTable& table, Axis axis);
ProbTable compose_table(const Decomposition& dec, Axis axis);

/// ln prod_i theta_i^(n-1): the log Jacobian of the map from
/// (marginal, conditionals) to the table, where n is the length of each
/// conditional. n = 1 is accepted and yields 0.
double log_jacobian(const SimplexPoint& marginal, int n);

DirichletFactors decompose_dirichlet(const TableDirichletParams& params, Axis axis);

/// Inverse of decompose_dirichlet. Each conditional's exponents must sum to
/// the matching marginal exponent within kCompositionTolerance, otherwise a
/// ConsistencyError naming the conditional is thrown.
TableDirichletParams compose_dirichlet(const DirichletParams& marginal,
                                       std::span<const DirichletParams> conditionals,
                                       Axis axis);

inline constexpr double kCompositionTolerance = 1e-9;

/// ln |det| of the Jacobian of the map from the free coordinates of
/// (marginal, conditionals) to the free coordinates of the table (all cells
/// but the last in row-major order), by central differences with relative
/// step `rel_step`.
double numerical_log_jacobian(const Decomposition& dec, Axis axis, double rel_step = 1e-6);

/// Joint Dirichlet log density of the table (free coordinates: all cells but
/// the last one in row-major order).
double table_log_density(const TableDirichletParams& params, const ProbTable& table);

/// Log density of the (marginal, conditionals) coordinates under the
/// product of the supplied factor densities.
double factored_log_density(const DirichletFactors& factors, const Decomposition& dec);

/// |log f_U(table) - [log f(marginal, conditionals) - log_jacobian]|, with the
/// factors of decompose_dirichlet(params, axis).
double verify_change_of_variables(const TableDirichletParams& params, const ProbTable& table,
                                  Axis axis = Axis::Rows);

/// Same residual with caller-supplied factors (used to show that wrong
/// factors break the identity).
double verify_change_of_variables(const TableDirichletParams& params,
                                  const DirichletFactors& factors, const ProbTable& table,
                                  Axis axis);

}  // namespace dirichar
