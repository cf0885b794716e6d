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

#pragma once

// Dense kernels behind the LSTM. Matrices are row-major with explicit leading
// dimensions and every GEMM accumulates into C.
//
// The scalar templates are the reference: they serve double precision and any
// CPU. Float calls dispatch at run time to an AVX2/FMA variant when the CPU has
// it, unless TUNELAB_SIMD=scalar is set in the environment.

#include <cstddef>
#include <string_view>

namespace tunelab::lm::kernels {

enum class SimdLevel { Scalar, Avx2 };

std::string_view to_string(SimdLevel level);
// Best level this CPU (and build) supports.
SimdLevel detected_level();
// Level float kernels currently use.
SimdLevel active_level();
// Forces a level; anything above detected_level() is clamped down.
void set_level(SimdLevel level);

namespace scalar {

// C[M x N] += A[M x K] * B[K x N]
template <class T>
void gemm_nn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    T* ci = c + static_cast<std::ptrdiff_t>(i) * ldc;
    const T* ai = a + static_cast<std::ptrdiff_t>(i) * lda;
    for (int p = 0; p < k; ++p) {
      const T s = ai[p];
      if (s == T(0)) continue;  // one-hot and dropout rows are mostly zero
      const T* bp = b + static_cast<std::ptrdiff_t>(p) * ldb;
      for (int j = 0; j < n; ++j) ci[j] += s * bp[j];
    }
  }
}

// C[M x N] += A[M x K] * B[N x K]^T
template <class T>
void gemm_nt(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    const T* ai = a + static_cast<std::ptrdiff_t>(i) * lda;
    T* ci = c + static_cast<std::ptrdiff_t>(i) * ldc;
    for (int j = 0; j < n; ++j) {
      const T* bj = b + static_cast<std::ptrdiff_t>(j) * ldb;
      T sum = 0;
      for (int p = 0; p < k; ++p) sum += ai[p] * bj[p];
      ci[j] += sum;
    }
  }
}

// C[M x N] += A[K x M]^T * B[K x N]
template <class T>
void gemm_tn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  for (int p = 0; p < k; ++p) {
    const T* ap = a + static_cast<std::ptrdiff_t>(p) * lda;
    const T* bp = b + static_cast<std::ptrdiff_t>(p) * ldb;
    for (int i = 0; i < m; ++i) {
      const T s = ap[i];
      if (s == T(0)) continue;
      T* ci = c + static_cast<std::ptrdiff_t>(i) * ldc;
      for (int j = 0; j < n; ++j) ci[j] += s * bp[j];
    }
  }
}

// y += alpha * x
template <class T>
void axpy(int n, T alpha, const T* x, T* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
T dot(int n, const T* x, const T* y) {
  T sum = 0;
  for (int i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TUNELAB_HAVE_AVX2_KERNELS 1
namespace avx2 {
void gemm_nn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc);
void gemm_nt(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc);
void gemm_tn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc);
void axpy(int n, float alpha, const float* x, float* y);
float dot(int n, const float* x, const float* y);
}  // namespace avx2
#endif

// Dispatching float entry points.
void gemm_nn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc);
void gemm_nt(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc);
void gemm_tn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc);
void axpy(int n, float alpha, const float* x, float* y);
float dot(int n, const float* x, const float* y);

// Double precision always takes the reference path.
inline void gemm_nn(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c, int ldc) {
  scalar::gemm_nn(m, n, k, a, lda, b, ldb, c, ldc);
}
inline void gemm_nt(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c, int ldc) {
  scalar::gemm_nt(m, n, k, a, lda, b, ldb, c, ldc);
}
inline void gemm_tn(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c, int ldc) {
  scalar::gemm_tn(m, n, k, a, lda, b, ldb, c, ldc);
}
inline void axpy(int n, double alpha, const double* x, double* y) { scalar::axpy(n, alpha, x, y); }
inline double dot(int n, const double* x, const double* y) { return scalar::dot(n, x, y); }

}  // namespace tunelab::lm::kernels
