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

#include <cstdlib>
#include <string>

#include "uti/simd/kernels.hpp"

namespace uti::simd {
namespace {

constexpr KernelTable kRefTable{Isa::Scalar, &gemm_ref, &dot_ref, &axpy_ref};
#if defined(UTI_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::Avx2, &gemm_avx2, &dot_avx2, &axpy_avx2};
#endif

const KernelTable& select() {
  if (const char* env = std::getenv("UTI_SIMD")) {
    if (std::string(env) == "scalar") return kRefTable;
  }
  if (isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  return kRefTable;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(UTI_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

const KernelTable& kernels_for(Isa isa) {
#if defined(UTI_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return kAvx2Table;
#endif
  (void)isa;
  return kRefTable;
}

const KernelTable& kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace uti::simd
