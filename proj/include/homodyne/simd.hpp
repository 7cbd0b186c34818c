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

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace homodyne::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Hot loops of the estimators and the Wigner sum. Every table entry computes
/// the same thing; variants differ only in rounding (FMA contraction).
struct KernelTable {
    Isa isa;

    /// out[k] = (two_x*u[k] - ut_next[k]) * v[k] - u[k] * vt_next[k], k < n.
    /// For diagonal d the caller passes ut+1, v+d and vt+d+1.
    void (*pattern_row_f64)(double two_x, const double* u, const double* ut_next,
                            const double* v, const double* vt_next, double* out,
                            std::size_t n);
    void (*pattern_row_f32)(float two_x, const float* u, const float* ut_next,
                            const float* v, const float* vt_next, float* out,
                            std::size_t n);

    /// s_re += wr*f, s_im += wi*f, q_re += qr*f*f, q_im += qi*f*f.
    void (*accumulate_weighted)(double wr, double wi, double qr, double qi,
                                const double* f, double* s_re, double* s_im,
                                double* q_re, double* q_im, std::size_t n);

    /// a = wr*f - ref_re, b = wi*f - ref_im; s += (a, b), q += (a*a, b*b).
    void (*accumulate_shifted)(double wr, double wi, const double* f,
                               const double* ref_re, const double* ref_im,
                               double* s_re, double* s_im, double* q_re,
                               double* q_im, std::size_t n);

    /// (sum a[k]*re[k], sum a[k]*im[k]).
    void (*dot_real_complex)(const double* a, const double* re, const double* im,
                             std::size_t n, double* out_re, double* out_im);
};

const KernelTable& scalar_kernels();

/// Variants compiled into this binary and supported by the running CPU,
/// scalar first.
std::vector<Isa> available_isas();

/// nullptr when `isa` is unavailable.
const KernelTable* kernels_for(Isa isa);

/// Best available table unless overridden with force_isa().
const KernelTable& active_kernels();

/// Test hook; throws UsageError when `isa` is unavailable.
void force_isa(Isa isa);

}  // namespace homodyne::simd
