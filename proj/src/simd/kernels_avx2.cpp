// Copyright 2026-present the homodyne project
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

// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels.hpp"

namespace homodyne::simd::detail {
namespace {

void pattern_row_f64(double two_x, const double* u, const double* ut_next,
                     const double* v, const double* vt_next, double* out,
                     std::size_t n) {
    const __m256d tx = _mm256_set1_pd(two_x);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d uk = _mm256_loadu_pd(u + k);
        const __m256d br = _mm256_fmsub_pd(tx, uk, _mm256_loadu_pd(ut_next + k));
        const __m256d t2 = _mm256_mul_pd(uk, _mm256_loadu_pd(vt_next + k));
        _mm256_storeu_pd(out + k, _mm256_fmsub_pd(br, _mm256_loadu_pd(v + k), t2));
    }
    for (; k < n; ++k) out[k] = (two_x * u[k] - ut_next[k]) * v[k] - u[k] * vt_next[k];
}

void pattern_row_f32(float two_x, const float* u, const float* ut_next, const float* v,
                     const float* vt_next, float* out, std::size_t n) {
    const __m256 tx = _mm256_set1_ps(two_x);
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256 uk = _mm256_loadu_ps(u + k);
        const __m256 br = _mm256_fmsub_ps(tx, uk, _mm256_loadu_ps(ut_next + k));
        const __m256 t2 = _mm256_mul_ps(uk, _mm256_loadu_ps(vt_next + k));
        _mm256_storeu_ps(out + k, _mm256_fmsub_ps(br, _mm256_loadu_ps(v + k), t2));
    }
    for (; k < n; ++k) out[k] = (two_x * u[k] - ut_next[k]) * v[k] - u[k] * vt_next[k];
}

void accumulate_weighted(double wr, double wi, double qr, double qi, const double* f,
                         double* s_re, double* s_im, double* q_re, double* q_im,
                         std::size_t n) {
    const __m256d vwr = _mm256_set1_pd(wr), vwi = _mm256_set1_pd(wi);
    const __m256d vqr = _mm256_set1_pd(qr), vqi = _mm256_set1_pd(qi);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d fk = _mm256_loadu_pd(f + k);
        const __m256d f2 = _mm256_mul_pd(fk, fk);
        _mm256_storeu_pd(s_re + k, _mm256_fmadd_pd(vwr, fk, _mm256_loadu_pd(s_re + k)));
        _mm256_storeu_pd(s_im + k, _mm256_fmadd_pd(vwi, fk, _mm256_loadu_pd(s_im + k)));
        _mm256_storeu_pd(q_re + k, _mm256_fmadd_pd(vqr, f2, _mm256_loadu_pd(q_re + k)));
        _mm256_storeu_pd(q_im + k, _mm256_fmadd_pd(vqi, f2, _mm256_loadu_pd(q_im + k)));
    }
    for (; k < n; ++k) {
        const double f2 = f[k] * f[k];
        s_re[k] += wr * f[k];
        s_im[k] += wi * f[k];
        q_re[k] += qr * f2;
        q_im[k] += qi * f2;
    }
}

void accumulate_shifted(double wr, double wi, const double* f, const double* ref_re,
                        const double* ref_im, double* s_re, double* s_im, double* q_re,
                        double* q_im, std::size_t n) {
    const __m256d vwr = _mm256_set1_pd(wr), vwi = _mm256_set1_pd(wi);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d fk = _mm256_loadu_pd(f + k);
        // no FMA here: the shift must cancel the reference product exactly
        const __m256d a = _mm256_sub_pd(_mm256_mul_pd(vwr, fk), _mm256_loadu_pd(ref_re + k));
        const __m256d b = _mm256_sub_pd(_mm256_mul_pd(vwi, fk), _mm256_loadu_pd(ref_im + k));
        _mm256_storeu_pd(s_re + k, _mm256_add_pd(_mm256_loadu_pd(s_re + k), a));
        _mm256_storeu_pd(s_im + k, _mm256_add_pd(_mm256_loadu_pd(s_im + k), b));
        _mm256_storeu_pd(q_re + k, _mm256_fmadd_pd(a, a, _mm256_loadu_pd(q_re + k)));
        _mm256_storeu_pd(q_im + k, _mm256_fmadd_pd(b, b, _mm256_loadu_pd(q_im + k)));
    }
    for (; k < n; ++k) {
        const double a = wr * f[k] - ref_re[k];
        const double b = wi * f[k] - ref_im[k];
        s_re[k] += a;
        s_im[k] += b;
        q_re[k] += a * a;
        q_im[k] += b * b;
    }
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void dot_real_complex(const double* a, const double* re, const double* im,
                      std::size_t n, double* out_re, double* out_im) {
    __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d ak = _mm256_loadu_pd(a + k);
        sr = _mm256_fmadd_pd(ak, _mm256_loadu_pd(re + k), sr);
        si = _mm256_fmadd_pd(ak, _mm256_loadu_pd(im + k), si);
    }
    double r = hsum(sr), i = hsum(si);
    for (; k < n; ++k) {
        r += a[k] * re[k];
        i += a[k] * im[k];
    }
    *out_re = r;
    *out_im = i;
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{
        Isa::avx2,           &pattern_row_f64,    &pattern_row_f32,
        &accumulate_weighted, &accumulate_shifted, &dot_real_complex,
    };
    return table;
}

}  // namespace homodyne::simd::detail
