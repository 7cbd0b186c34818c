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

#include "homodyne/simd.hpp"

namespace homodyne::simd {
namespace {

template <class T>
void pattern_row(T two_x, const T* u, const T* ut_next, const T* v, const T* vt_next,
                 T* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k)
        out[k] = (two_x * u[k] - ut_next[k]) * v[k] - u[k] * vt_next[k];
}

void accumulate_weighted(double wr, double wi, double qr, double qi, const double* f,
                         double* s_re, double* s_im, double* q_re, double* q_im,
                         std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f[k];
        const double f2 = fk * fk;
        s_re[k] += wr * fk;
        s_im[k] += wi * fk;
        q_re[k] += qr * f2;
        q_im[k] += qi * f2;
    }
}

void accumulate_shifted(double wr, double wi, const double* f, const double* ref_re,
                        const double* ref_im, double* s_re, double* s_im, double* q_re,
                        double* q_im, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
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
    double sr = 0.0, si = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sr += a[k] * re[k];
        si += a[k] * im[k];
    }
    *out_re = sr;
    *out_im = si;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        Isa::scalar,       &pattern_row<double>, &pattern_row<float>,
        &accumulate_weighted, &accumulate_shifted, &dot_real_complex,
    };
    return table;
}

}  // namespace homodyne::simd
