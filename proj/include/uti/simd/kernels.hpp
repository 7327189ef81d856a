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

#pragma once

// Dense double-precision kernels used by the feature transforms and the
// network layers. Every kernel has a portable reference implementation
// (`*_ref`) and, on x86-64, an AVX2/FMA variant. The variant is chosen once
// at runtime; set UTI_SIMD=scalar in the environment to force the reference
// path.

#include <cstddef>
#include <span>
#include <string_view>

namespace uti::simd {

enum class Isa { Scalar, Avx2 };

enum class Trans { No, Yes };

// C[m x n] = alpha * op(A) * op(B) + beta * C, all row-major.
// op(A) is m x k; when ta == Trans::Yes, A is stored as k x m.
// beta == 0 overwrites C without reading it.
using GemmFn = void (*)(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k,
                        double alpha, const double* a, std::size_t lda, const double* b,
                        std::size_t ldb, double beta, double* c, std::size_t ldc);
using DotFn = double (*)(const double* x, const double* y, std::size_t n);
// y += alpha * x
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);

struct KernelTable {
  Isa isa;
  GemmFn gemm;
  DotFn dot;
  AxpyFn axpy;
};

bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

// Table for a specific ISA. Requesting an unavailable ISA returns the
// reference table.
const KernelTable& kernels_for(Isa isa);

// Table selected at first use: best available ISA unless UTI_SIMD=scalar.
const KernelTable& kernels();

// Reference kernels, exposed for equivalence tests.
void gemm_ref(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
              const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
              double* c, std::size_t ldc);
double dot_ref(const double* x, const double* y, std::size_t n);
void axpy_ref(double alpha, const double* x, double* y, std::size_t n);

#if defined(UTI_HAVE_AVX2)
void gemm_avx2(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
               const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
               double* c, std::size_t ldc);
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif

inline double dot(std::span<const double> x, std::span<const double> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace uti::simd
