#include "dcov_kernel.hpp"

#include <cmath>

namespace dirichar::detail {

PackedDistances pack_distances(const double* rm, std::size_t n, std::size_t du) {
  PackedDistances out;
  out.n = n;
  out.d.resize(n * (n - 1) / 2);
  float* dst = out.d.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = &rm[i * du];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* xj = &rm[j * du];
      double s = 0.0;
      for (std::size_t c = 0; c < du; ++c) {
        const double t = xi[c] - xj[c];
        s += t * t;
      }
      *dst++ = static_cast<float>(std::sqrt(s));
    }
  }
  return out;
}

namespace {

void cross_sums_1d(const PackedDistances& a, const float* f, double* sums) {
  const std::size_t n = a.n;
  double total[kLanes] = {};
  const float* row = a.d.data();
  for (std::size_t i = 0; i < n; ++i) {
    float xi[kLanes];
    for (std::size_t p = 0; p < kLanes; ++p) xi[p] = f[i * kLanes + p];
    float acc[kLanes] = {};
    const std::size_t len = n - 1 - i;
    const float* xs = f + (i + 1) * kLanes;
    for (std::size_t j = 0; j < len; ++j) {
      const float aij = row[j];
      for (std::size_t p = 0; p < kLanes; ++p) acc[p] += aij * std::fabs(xi[p] - xs[j * kLanes + p]);
    }
    for (std::size_t p = 0; p < kLanes; ++p) total[p] += acc[p];
    row += len;
  }
  for (std::size_t p = 0; p < kLanes; ++p) sums[p] = total[p];
}

void cross_sums_nd(const PackedDistances& a, const float* f, std::size_t df, double* sums) {
  const std::size_t n = a.n;
  const std::size_t stride = df * kLanes;
  double total[kLanes] = {};
  const float* row = a.d.data();
  for (std::size_t i = 0; i < n; ++i) {
    const float* xi = f + i * stride;
    float acc[kLanes] = {};
    const std::size_t len = n - 1 - i;
    for (std::size_t j = 0; j < len; ++j) {
      const float* xj = f + (i + 1 + j) * stride;
      float sq[kLanes] = {};
      for (std::size_t c = 0; c < df; ++c) {
        for (std::size_t p = 0; p < kLanes; ++p) {
          const float t = xi[c * kLanes + p] - xj[c * kLanes + p];
          sq[p] += t * t;
        }
      }
      const float aij = row[j];
      for (std::size_t p = 0; p < kLanes; ++p) acc[p] += aij * std::sqrt(sq[p]);
    }
    for (std::size_t p = 0; p < kLanes; ++p) total[p] += acc[p];
    row += len;
  }
  for (std::size_t p = 0; p < kLanes; ++p) sums[p] = total[p];
}

}  // namespace

void cross_sums(const PackedDistances& a, const float* interleaved, std::size_t df, double* sums) {
  if (df == 1) {
    cross_sums_1d(a, interleaved, sums);
  } else {
    cross_sums_nd(a, interleaved, df, sums);
  }
}

}  // namespace dirichar::detail
