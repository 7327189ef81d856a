// Copyright 2026 The UTI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include "uti/simd/kernels.hpp"

namespace uti::simd {

void gemm_ref(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
              const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
              double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* row = c + i * ldc;
    if (beta == 0.0) {
      for (std::size_t j = 0; j < n; ++j) row[j] = 0.0;
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) row[j] *= beta;
    }
  }
  if (m == 0 || n == 0 || k == 0 || alpha == 0.0) return;

  // Row access to op(B) must be contiguous for the i-p-j loop below.
  std::vector<double> bt;
  const double* bop = b;
  std::size_t ldbop = ldb;
  if (tb == Trans::Yes) {
    bt.resize(k * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b[j * ldb + p];
    bop = bt.data();
    ldbop = n;
  }

  for (std::size_t i = 0; i < m; ++i) {
    double* row = c + i * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = alpha * (ta == Trans::No ? a[i * lda + p] : a[p * lda + i]);
      if (aip == 0.0) continue;
      const double* brow = bop + p * ldbop;
      for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
    }
  }
}

double dot_ref(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace uti::simd
