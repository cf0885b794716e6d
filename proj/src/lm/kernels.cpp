/* Copyright 2026 The Tunelab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tunelab/lm/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace tunelab::lm::kernels {
namespace {

SimdLevel probe() {
#if defined(TUNELAB_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return SimdLevel::Avx2;
#endif
  return SimdLevel::Scalar;
}

SimdLevel initial_level() {
  const SimdLevel best = probe();
  if (const char* env = std::getenv("TUNELAB_SIMD")) {
    const std::string value(env);
    if (value == "scalar" || value == "none") return SimdLevel::Scalar;
  }
  return best;
}

std::atomic<SimdLevel>& level_slot() {
  static std::atomic<SimdLevel> level{initial_level()};
  return level;
}

bool use_avx2() {
#ifdef TUNELAB_HAVE_AVX2_KERNELS
  return level_slot().load(std::memory_order_relaxed) == SimdLevel::Avx2;
#else
  return false;
#endif
}

}  // namespace

std::string_view to_string(SimdLevel level) { return level == SimdLevel::Avx2 ? "avx2" : "scalar"; }

SimdLevel detected_level() {
  static const SimdLevel best = probe();
  return best;
}

SimdLevel active_level() { return level_slot().load(); }

void set_level(SimdLevel level) {
  if (level == SimdLevel::Avx2 && detected_level() != SimdLevel::Avx2) level = SimdLevel::Scalar;
  level_slot().store(level);
}

#ifdef TUNELAB_HAVE_AVX2_KERNELS
#define TUNELAB_DISPATCH(name, ...) \
  if (use_avx2()) return avx2::name(__VA_ARGS__); \
  return scalar::name(__VA_ARGS__)
#else
#define TUNELAB_DISPATCH(name, ...) return scalar::name(__VA_ARGS__)
#endif

void gemm_nn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc) {
  TUNELAB_DISPATCH(gemm_nn, m, n, k, a, lda, b, ldb, c, ldc);
}
void gemm_nt(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc) {
  TUNELAB_DISPATCH(gemm_nt, m, n, k, a, lda, b, ldb, c, ldc);
}
void gemm_tn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc) {
  TUNELAB_DISPATCH(gemm_tn, m, n, k, a, lda, b, ldb, c, ldc);
}
void axpy(int n, float alpha, const float* x, float* y) { TUNELAB_DISPATCH(axpy, n, alpha, x, y); }
float dot(int n, const float* x, const float* y) { TUNELAB_DISPATCH(dot, n, x, y); }

#undef TUNELAB_DISPATCH

}  // namespace tunelab::lm::kernels
