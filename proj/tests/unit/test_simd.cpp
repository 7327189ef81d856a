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

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "uti/simd/kernels.hpp"

using namespace uti::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Plain triple loop, independent of both kernel tables.
void naive_gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
                const std::vector<double>& a, std::size_t lda, const std::vector<double>& b, std::size_t ldb,
                double beta, std::vector<double>& c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = ta == Trans::No ? a[i * lda + p] : a[p * lda + i];
        const double bv = tb == Trans::No ? b[p * ldb + j] : b[j * ldb + p];
        s += av * bv;
      }
      c[i * ldc + j] = alpha * s + (beta == 0.0 ? 0.0 : beta * c[i * ldc + j]);
    }
}

void check_gemm(const KernelTable& kt, std::mt19937_64& rng, Trans ta, Trans tb, std::size_t m, std::size_t n,
                std::size_t k, double alpha, double beta) {
  const std::size_t lda = (ta == Trans::No ? k : m) + 3;
  const std::size_t ldb = (tb == Trans::No ? n : k) + 1;
  const std::size_t ldc = n + 2;
  const auto a = random_vec(rng, (ta == Trans::No ? m : k) * lda);
  const auto b = random_vec(rng, (tb == Trans::No ? k : n) * ldb);
  auto c = random_vec(rng, m * ldc);
  auto expect = c;
  naive_gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, expect, ldc);
  kt.gemm(ta, tb, m, n, k, alpha, a.data(), lda, b.data(), ldb, beta, c.data(), ldc);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      REQUIRE(c[i * ldc + j] == doctest::Approx(expect[i * ldc + j]).epsilon(1e-12).scale(1.0));
  // padding columns stay untouched
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(c[i * ldc + n] == expect[i * ldc + n]);
    CHECK(c[i * ldc + n + 1] == expect[i * ldc + n + 1]);
  }
}

std::vector<Isa> available() {
  std::vector<Isa> out{Isa::Scalar};
  if (isa_available(Isa::Avx2)) out.push_back(Isa::Avx2);
  return out;
}

}  // namespace

TEST_CASE("gemm matches the triple loop for every transpose, tile edge and scaling") {
  std::mt19937_64 rng(11);
  const std::size_t sizes[] = {1, 3, 4, 6, 7, 8, 13, 16, 33};
  for (Isa isa : available()) {
    CAPTURE(isa_name(isa));
    const auto& kt = kernels_for(isa);
    for (Trans ta : {Trans::No, Trans::Yes})
      for (Trans tb : {Trans::No, Trans::Yes})
        for (std::size_t m : sizes)
          for (std::size_t n : {std::size_t{1}, std::size_t{9}, std::size_t{17}})
            for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{64}})
              check_gemm(kt, rng, ta, tb, m, n, k, 0.7, m % 2 ? 0.0 : 1.3);
  }
}

TEST_CASE("gemm blocks larger than one cache panel") {
  std::mt19937_64 rng(12);
  for (Isa isa : available()) {
    CAPTURE(isa_name(isa));
    check_gemm(kernels_for(isa), rng, Trans::No, Trans::No, 130, 530, 300, 1.0, 1.0);
    check_gemm(kernels_for(isa), rng, Trans::Yes, Trans::Yes, 97, 41, 515, -0.5, 0.0);
  }
}

TEST_CASE("beta zero overwrites even non-finite output") {
  for (Isa isa : available()) {
    std::vector<double> a{1, 2}, b{3, 4}, c{std::nan("")};
    kernels_for(isa).gemm(Trans::No, Trans::No, 1, 1, 2, 1.0, a.data(), 2, b.data(), 1, 0.0, c.data(), 1);
    CHECK(c[0] == 11.0);
  }
}

TEST_CASE("simd gemm agrees with the scalar reference") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("AVX2 not available; equivalence check skipped");
    return;
  }
  std::mt19937_64 rng(13);
  const auto& ref = kernels_for(Isa::Scalar);
  const auto& fast = kernels_for(Isa::Avx2);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(1, 70);
    const std::size_t m = dim(rng), n = dim(rng), k = dim(rng);
    const Trans ta = trial % 2 ? Trans::Yes : Trans::No;
    const Trans tb = trial % 3 ? Trans::Yes : Trans::No;
    const std::size_t lda = ta == Trans::No ? k : m, ldb = tb == Trans::No ? n : k;
    const auto a = random_vec(rng, m * k), b = random_vec(rng, k * n);
    auto c1 = random_vec(rng, m * n);
    auto c2 = c1;
    ref.gemm(ta, tb, m, n, k, 1.1, a.data(), lda, b.data(), ldb, 0.5, c1.data(), n);
    fast.gemm(ta, tb, m, n, k, 1.1, a.data(), lda, b.data(), ldb, 0.5, c2.data(), n);
    for (std::size_t i = 0; i < c1.size(); ++i) REQUIRE(c2[i] == doctest::Approx(c1[i]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("dot and axpy across lengths around the vector width") {
  std::mt19937_64 rng(14);
  for (Isa isa : available()) {
    CAPTURE(isa_name(isa));
    const auto& kt = kernels_for(isa);
    for (std::size_t n = 0; n < 40; ++n) {
      const auto x = random_vec(rng, n), y0 = random_vec(rng, n);
      double expect = 0.0;
      for (std::size_t i = 0; i < n; ++i) expect += x[i] * y0[i];
      CHECK(kt.dot(x.data(), y0.data(), n) == doctest::Approx(expect).epsilon(1e-13).scale(1.0));
      auto y = y0;
      kt.axpy(-2.5, x.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(y0[i] - 2.5 * x[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("dispatch honours the environment override and reports its isa") {
  const auto& active = kernels();
  CHECK(isa_available(active.isa));
  CHECK(!isa_name(active.isa).empty());
  CHECK(kernels_for(Isa::Scalar).isa == Isa::Scalar);
}
