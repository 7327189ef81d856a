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

// Compiled with -mavx2 -mfma. Nothing in this file may run before the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "uti/simd/kernels.hpp"

namespace uti::simd {
namespace {

constexpr std::size_t kMr = 6;  // widest row tile
constexpr std::size_t kNr = 8;
constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = 96;
constexpr std::size_t kNc = 512;

inline double load_a(Trans ta, const double* a, std::size_t lda, std::size_t i, std::size_t p) {
  return ta == Trans::No ? a[i * lda + p] : a[p * lda + i];
}

// Packs op(A)[i0:i0+mc, p0:p0+kc] scaled by alpha into kMr-row panels,
// layout [panel][p][r]. Rows past mc are zero.
template <std::size_t MR>
void pack_a(Trans ta, const double* a, std::size_t lda, std::size_t i0, std::size_t mc,
            std::size_t p0, std::size_t kc, double alpha, double* dst) {
  for (std::size_t ir = 0; ir < mc; ir += MR) {
    const std::size_t rows = std::min(MR, mc - ir);
    for (std::size_t p = 0; p < kc; ++p) {
      for (std::size_t r = 0; r < MR; ++r) {
        *dst++ = r < rows ? alpha * load_a(ta, a, lda, i0 + ir + r, p0 + p) : 0.0;
      }
    }
  }
}

// Packs op(B)[p0:p0+kc, j0:j0+nc] into kNr-column panels, layout
// [panel][p][c]. Columns past nc are zero.
void pack_b(Trans tb, const double* b, std::size_t ldb, std::size_t p0, std::size_t kc,
            std::size_t j0, std::size_t nc, double* dst) {
  for (std::size_t jr = 0; jr < nc; jr += kNr) {
    const std::size_t cols = std::min(kNr, nc - jr);
    if (tb == Trans::No && cols == kNr) {
      for (std::size_t p = 0; p < kc; ++p) {
        const double* src = b + (p0 + p) * ldb + j0 + jr;
        _mm256_storeu_pd(dst, _mm256_loadu_pd(src));
        _mm256_storeu_pd(dst + 4, _mm256_loadu_pd(src + 4));
        dst += kNr;
      }
      continue;
    }
    for (std::size_t p = 0; p < kc; ++p) {
      for (std::size_t cc = 0; cc < kNr; ++cc) {
        double v = 0.0;
        if (cc < cols) {
          const std::size_t row = p0 + p;
          const std::size_t col = j0 + jr + cc;
          v = tb == Trans::No ? b[row * ldb + col] : b[col * ldb + row];
        }
        *dst++ = v;
      }
    }
  }
}

// acc[4x8] = sum_p A[:,p] * B[p,:] over packed panels.
// MR x 8 tile held in 2*MR accumulators; MR = 6 keeps both FMA ports
// busy, MR = 4 wastes less on row counts like 16.
template <std::size_t MR>
inline void store_tile(const __m256d (&acc)[MR][2], double* c, std::size_t ldc, std::size_t rows,
                       std::size_t cols) {
  if (rows == MR && cols == kNr) {
    for (std::size_t r = 0; r < MR; ++r) {
      double* dst = c + r * ldc;
      _mm256_storeu_pd(dst, _mm256_add_pd(_mm256_loadu_pd(dst), acc[r][0]));
      _mm256_storeu_pd(dst + 4, _mm256_add_pd(_mm256_loadu_pd(dst + 4), acc[r][1]));
    }
    return;
  }
  alignas(32) double tile[MR * kNr];
  for (std::size_t r = 0; r < MR; ++r) {
    _mm256_store_pd(tile + r * kNr, acc[r][0]);
    _mm256_store_pd(tile + r * kNr + 4, acc[r][1]);
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t cc = 0; cc < cols; ++cc) c[r * ldc + cc] += tile[r * kNr + cc];
}

template <std::size_t MR>
void micro_kernel(std::size_t kc, const double* ap, const double* bp, double* c, std::size_t ldc,
                  std::size_t rows, std::size_t cols);

template <>
inline void micro_kernel<6>(std::size_t kc, const double* ap, const double* bp, double* c,
                               std::size_t ldc, std::size_t rows, std::size_t cols) {
  __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
  __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
  __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
  __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
  __m256d c40 = _mm256_setzero_pd(), c41 = _mm256_setzero_pd();
  __m256d c50 = _mm256_setzero_pd(), c51 = _mm256_setzero_pd();
  for (std::size_t p = 0; p < kc; ++p) {
    const __m256d b0 = _mm256_loadu_pd(bp);
    const __m256d b1 = _mm256_loadu_pd(bp + 4);
    __m256d a;
    a = _mm256_broadcast_sd(ap + 0);
    c00 = _mm256_fmadd_pd(a, b0, c00);
    c01 = _mm256_fmadd_pd(a, b1, c01);
    a = _mm256_broadcast_sd(ap + 1);
    c10 = _mm256_fmadd_pd(a, b0, c10);
    c11 = _mm256_fmadd_pd(a, b1, c11);
    a = _mm256_broadcast_sd(ap + 2);
    c20 = _mm256_fmadd_pd(a, b0, c20);
    c21 = _mm256_fmadd_pd(a, b1, c21);
    a = _mm256_broadcast_sd(ap + 3);
    c30 = _mm256_fmadd_pd(a, b0, c30);
    c31 = _mm256_fmadd_pd(a, b1, c31);
    a = _mm256_broadcast_sd(ap + 4);
    c40 = _mm256_fmadd_pd(a, b0, c40);
    c41 = _mm256_fmadd_pd(a, b1, c41);
    a = _mm256_broadcast_sd(ap + 5);
    c50 = _mm256_fmadd_pd(a, b0, c50);
    c51 = _mm256_fmadd_pd(a, b1, c51);
    ap += 6;
    bp += kNr;
  }
  const __m256d acc[6][2] = {{c00, c01}, {c10, c11}, {c20, c21}, {c30, c31}, {c40, c41}, {c50, c51}};
  store_tile<6>(acc, c, ldc, rows, cols);
}

template <>
inline void micro_kernel<4>(std::size_t kc, const double* ap, const double* bp, double* c,
                               std::size_t ldc, std::size_t rows, std::size_t cols) {
  __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
  __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
  __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
  __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
  for (std::size_t p = 0; p < kc; ++p) {
    const __m256d b0 = _mm256_loadu_pd(bp);
    const __m256d b1 = _mm256_loadu_pd(bp + 4);
    __m256d a;
    a = _mm256_broadcast_sd(ap + 0);
    c00 = _mm256_fmadd_pd(a, b0, c00);
    c01 = _mm256_fmadd_pd(a, b1, c01);
    a = _mm256_broadcast_sd(ap + 1);
    c10 = _mm256_fmadd_pd(a, b0, c10);
    c11 = _mm256_fmadd_pd(a, b1, c11);
    a = _mm256_broadcast_sd(ap + 2);
    c20 = _mm256_fmadd_pd(a, b0, c20);
    c21 = _mm256_fmadd_pd(a, b1, c21);
    a = _mm256_broadcast_sd(ap + 3);
    c30 = _mm256_fmadd_pd(a, b0, c30);
    c31 = _mm256_fmadd_pd(a, b1, c31);
    ap += 4;
    bp += kNr;
  }
  const __m256d acc[4][2] = {{c00, c01}, {c10, c11}, {c20, c21}, {c30, c31}};
  store_tile<4>(acc, c, ldc, rows, cols);
}

template <std::size_t MR>
void gemm_blocked(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
                  const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                  std::size_t ldc) {
  thread_local std::vector<double> apack;
  thread_local std::vector<double> bpack;
  apack.resize(kMc * kKc);
  bpack.resize(kKc * (kNc + kNr));

  for (std::size_t j0 = 0; j0 < n; j0 += kNc) {
    const std::size_t nc = std::min(kNc, n - j0);
    for (std::size_t p0 = 0; p0 < k; p0 += kKc) {
      const std::size_t kc = std::min(kKc, k - p0);
      pack_b(tb, b, ldb, p0, kc, j0, nc, bpack.data());
      for (std::size_t i0 = 0; i0 < m; i0 += kMc) {
        const std::size_t mc = std::min(kMc, m - i0);
        pack_a<MR>(ta, a, lda, i0, mc, p0, kc, alpha, apack.data());
        for (std::size_t jr = 0; jr < nc; jr += kNr) {
          const std::size_t cols = std::min(kNr, nc - jr);
          const double* bp = bpack.data() + jr * kc;
          for (std::size_t ir = 0; ir < mc; ir += MR) {
            const std::size_t rows = std::min(MR, mc - ir);
            micro_kernel<MR>(kc, apack.data() + ir * kc, bp, c + (i0 + ir) * ldc + j0 + jr, ldc,
                             rows, cols);
          }
        }
      }
    }
  }
}

}  // namespace

void gemm_avx2(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
               const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
               double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* row = c + i * ldc;
    if (beta == 0.0) {
      std::fill(row, row + n, 0.0);
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) row[j] *= beta;
    }
  }
  if (m == 0 || n == 0 || k == 0 || alpha == 0.0) return;

  if (m % 6 != 0 && m % 4 == 0 && m < 64)
    gemm_blocked<4>(ta, tb, m, n, k, alpha, a, lda, b, ldb, c, ldc);
  else
    gemm_blocked<kMr>(ta, tb, m, n, k, alpha, a, lda, b, ldb, c, ldc);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace uti::simd
