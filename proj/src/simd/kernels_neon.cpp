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

#if defined(__aarch64__)

#include <arm_neon.h>

#include "kernels.hpp"

namespace homodyne::simd::detail {
namespace {

void pattern_row_f64(double two_x, const double* u, const double* ut_next,
                     const double* v, const double* vt_next, double* out,
                     std::size_t n) {
    const float64x2_t tx = vdupq_n_f64(two_x);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t uk = vld1q_f64(u + k);
        const float64x2_t br = vsubq_f64(vmulq_f64(tx, uk), vld1q_f64(ut_next + k));
        const float64x2_t t2 = vmulq_f64(uk, vld1q_f64(vt_next + k));
        vst1q_f64(out + k, vfmaq_f64(vnegq_f64(t2), br, vld1q_f64(v + k)));
    }
    for (; k < n; ++k) out[k] = (two_x * u[k] - ut_next[k]) * v[k] - u[k] * vt_next[k];
}

void pattern_row_f32(float two_x, const float* u, const float* ut_next, const float* v,
                     const float* vt_next, float* out, std::size_t n) {
    const float32x4_t tx = vdupq_n_f32(two_x);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const float32x4_t uk = vld1q_f32(u + k);
        const float32x4_t br = vsubq_f32(vmulq_f32(tx, uk), vld1q_f32(ut_next + k));
        const float32x4_t t2 = vmulq_f32(uk, vld1q_f32(vt_next + k));
        vst1q_f32(out + k, vfmaq_f32(vnegq_f32(t2), br, vld1q_f32(v + k)));
    }
    for (; k < n; ++k) out[k] = (two_x * u[k] - ut_next[k]) * v[k] - u[k] * vt_next[k];
}

void accumulate_weighted(double wr, double wi, double qr, double qi, const double* f,
                         double* s_re, double* s_im, double* q_re, double* q_im,
                         std::size_t n) {
    const float64x2_t vwr = vdupq_n_f64(wr), vwi = vdupq_n_f64(wi);
    const float64x2_t vqr = vdupq_n_f64(qr), vqi = vdupq_n_f64(qi);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t fk = vld1q_f64(f + k);
        const float64x2_t f2 = vmulq_f64(fk, fk);
        vst1q_f64(s_re + k, vfmaq_f64(vld1q_f64(s_re + k), vwr, fk));
        vst1q_f64(s_im + k, vfmaq_f64(vld1q_f64(s_im + k), vwi, fk));
        vst1q_f64(q_re + k, vfmaq_f64(vld1q_f64(q_re + k), vqr, f2));
        vst1q_f64(q_im + k, vfmaq_f64(vld1q_f64(q_im + k), vqi, f2));
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
    const float64x2_t vwr = vdupq_n_f64(wr), vwi = vdupq_n_f64(wi);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t fk = vld1q_f64(f + k);
        const float64x2_t a = vsubq_f64(vmulq_f64(vwr, fk), vld1q_f64(ref_re + k));
        const float64x2_t b = vsubq_f64(vmulq_f64(vwi, fk), vld1q_f64(ref_im + k));
        vst1q_f64(s_re + k, vaddq_f64(vld1q_f64(s_re + k), a));
        vst1q_f64(s_im + k, vaddq_f64(vld1q_f64(s_im + k), b));
        vst1q_f64(q_re + k, vfmaq_f64(vld1q_f64(q_re + k), a, a));
        vst1q_f64(q_im + k, vfmaq_f64(vld1q_f64(q_im + k), b, b));
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

void dot_real_complex(const double* a, const double* re, const double* im,
                      std::size_t n, double* out_re, double* out_im) {
    float64x2_t sr = vdupq_n_f64(0.0), si = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t ak = vld1q_f64(a + k);
        sr = vfmaq_f64(sr, ak, vld1q_f64(re + k));
        si = vfmaq_f64(si, ak, vld1q_f64(im + k));
    }
    double r = vaddvq_f64(sr), i = vaddvq_f64(si);
    for (; k < n; ++k) {
        r += a[k] * re[k];
        i += a[k] * im[k];
    }
    *out_re = r;
    *out_im = i;
}

}  // namespace

const KernelTable& neon_kernels() {
    static const KernelTable table{
        Isa::neon,           &pattern_row_f64,    &pattern_row_f32,
        &accumulate_weighted, &accumulate_shifted, &dot_real_complex,
    };
    return table;
}

}  // namespace homodyne::simd::detail

#endif
