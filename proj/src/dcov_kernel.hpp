#pragma once

#include <cstddef>
#include <vector>

namespace dirichar::detail {

inline constexpr std::size_t kLanes = 8;

/// Strict upper triangle of the Euclidean distance matrix of the n rows of
/// the row-major n x dim array x, packed row by row (row i holds
/// j = i+1 .. n-1). Computed in double and stored in single precision.
struct PackedDistances {
  std::size_t n = 0;
  std::vector<float> d;
};

PackedDistances pack_distances(const double* x, std::size_t n, std::size_t dim);

/// For each lane p: sums[p] = sum_{i<j} a_ij * ||f_p(i) - f_p(j)||, where
/// f_p(i) is row i of the p-th permuted block. `interleaved` holds
/// n * df * kLanes floats laid out as [row][coordinate][lane].
void cross_sums(const PackedDistances& a, const float* interleaved, std::size_t df, double* sums);

}  // namespace dirichar::detail
