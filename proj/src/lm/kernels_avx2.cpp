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

// Built with -mavx2 -mfma; only reached after a run-time CPU check.

#include <immintrin.h>

#include <cstddef>

#include "tunelab/lm/kernels.hpp"

namespace tunelab::lm::kernels::avx2 {
namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

inline void axpy_row(int n, float s, const float* x, float* y) {
  const __m256 vs = _mm256_set1_ps(s);
  int j = 0;
  for (; j + 16 <= n; j += 16) {
    __m256 y0 = _mm256_loadu_ps(y + j);
    __m256 y1 = _mm256_loadu_ps(y + j + 8);
    y0 = _mm256_fmadd_ps(vs, _mm256_loadu_ps(x + j), y0);
    y1 = _mm256_fmadd_ps(vs, _mm256_loadu_ps(x + j + 8), y1);
    _mm256_storeu_ps(y + j, y0);
    _mm256_storeu_ps(y + j + 8, y1);
  }
  for (; j + 8 <= n; j += 8)
    _mm256_storeu_ps(y + j, _mm256_fmadd_ps(vs, _mm256_loadu_ps(x + j), _mm256_loadu_ps(y + j)));
  for (; j < n; ++j) y[j] += s * x[j];
}

}  // namespace

void gemm_nn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc) {
  // Four rows of A share each pass over a row of B.
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    const float* a0 = a + static_cast<std::ptrdiff_t>(i) * lda;
    const float* a1 = a0 + lda;
    const float* a2 = a1 + lda;
    const float* a3 = a2 + lda;
    float* c0 = c + static_cast<std::ptrdiff_t>(i) * ldc;
    float* c1 = c0 + ldc;
    float* c2 = c1 + ldc;
    float* c3 = c2 + ldc;
    for (int j = 0; j < n; j += 8) {
      const int w = n - j < 8 ? n - j : 8;
      if (w < 8) {
        for (int p = 0; p < k; ++p) {
          const float* bp = b + static_cast<std::ptrdiff_t>(p) * ldb + j;
          for (int q = 0; q < w; ++q) {
            c0[j + q] += a0[p] * bp[q];
            c1[j + q] += a1[p] * bp[q];
            c2[j + q] += a2[p] * bp[q];
            c3[j + q] += a3[p] * bp[q];
          }
        }
        break;
      }
      __m256 r0 = _mm256_loadu_ps(c0 + j);
      __m256 r1 = _mm256_loadu_ps(c1 + j);
      __m256 r2 = _mm256_loadu_ps(c2 + j);
      __m256 r3 = _mm256_loadu_ps(c3 + j);
      for (int p = 0; p < k; ++p) {
        const __m256 bv = _mm256_loadu_ps(b + static_cast<std::ptrdiff_t>(p) * ldb + j);
        r0 = _mm256_fmadd_ps(_mm256_set1_ps(a0[p]), bv, r0);
        r1 = _mm256_fmadd_ps(_mm256_set1_ps(a1[p]), bv, r1);
        r2 = _mm256_fmadd_ps(_mm256_set1_ps(a2[p]), bv, r2);
        r3 = _mm256_fmadd_ps(_mm256_set1_ps(a3[p]), bv, r3);
      }
      _mm256_storeu_ps(c0 + j, r0);
      _mm256_storeu_ps(c1 + j, r1);
      _mm256_storeu_ps(c2 + j, r2);
      _mm256_storeu_ps(c3 + j, r3);
    }
  }
  for (; i < m; ++i) {
    const float* ai = a + static_cast<std::ptrdiff_t>(i) * lda;
    float* ci = c + static_cast<std::ptrdiff_t>(i) * ldc;
    for (int p = 0; p < k; ++p) {
      if (ai[p] != 0.0f) axpy_row(n, ai[p], b + static_cast<std::ptrdiff_t>(p) * ldb, ci);
    }
  }
}

void gemm_nt(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    const float* ai = a + static_cast<std::ptrdiff_t>(i) * lda;
    float* ci = c + static_cast<std::ptrdiff_t>(i) * ldc;
    for (int j = 0; j < n; ++j) ci[j] += dot(k, ai, b + static_cast<std::ptrdiff_t>(j) * ldb);
  }
}

void gemm_tn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc) {
  for (int p = 0; p < k; ++p) {
    const float* ap = a + static_cast<std::ptrdiff_t>(p) * lda;
    const float* bp = b + static_cast<std::ptrdiff_t>(p) * ldb;
    for (int i = 0; i < m; ++i) {
      if (ap[i] != 0.0f) axpy_row(n, ap[i], bp, c + static_cast<std::ptrdiff_t>(i) * ldc);
    }
  }
}

void axpy(int n, float alpha, const float* x, float* y) { axpy_row(n, alpha, x, y); }

float dot(int n, const float* x, const float* y) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  int i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
  float sum = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace tunelab::lm::kernels::avx2
