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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "homodyne/error.hpp"
#include "homodyne/estimate.hpp"
#include "homodyne/simd.hpp"
#include "homodyne/simulate.hpp"

using namespace homodyne;
using simd::Isa;

namespace {

template <class T>
std::vector<T> random_vec(std::mt19937_64& g, std::size_t n) {
    std::uniform_real_distribution<double> u(-2, 2);
    std::vector<T> v(n);
    for (auto& e : v) e = T(u(g));
    return v;
}

bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Lengths that exercise full vectors and every tail size.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 129};

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
    const auto isas = simd::available_isas();
    REQUIRE(!isas.empty());
    CHECK(isas.front() == Isa::scalar);
    CHECK(simd::kernels_for(Isa::scalar) == &simd::scalar_kernels());
    CHECK(simd::isa_name(Isa::avx2) == "avx2");
}

TEST_CASE("forcing an unavailable ISA is a usage error") {
    for (Isa isa : {Isa::avx2, Isa::neon}) {
        if (simd::kernels_for(isa)) continue;
        CHECK_THROWS_AS(simd::force_isa(isa), UsageError);
    }
}

TEST_CASE("every variant matches the scalar kernels") {
    const auto& ref = simd::scalar_kernels();
    std::mt19937_64 g(7);
    for (Isa isa : simd::available_isas()) {
        const auto* k = simd::kernels_for(isa);
        REQUIRE(k != nullptr);
        CAPTURE(simd::isa_name(isa));
        for (std::size_t n : kLengths) {
            CAPTURE(n);
            {
                auto u = random_vec<double>(g, n), ut = random_vec<double>(g, n),
                     v = random_vec<double>(g, n), vt = random_vec<double>(g, n);
                std::vector<double> a(n), b(n);
                ref.pattern_row_f64(1.3, u.data(), ut.data(), v.data(), vt.data(), a.data(), n);
                k->pattern_row_f64(1.3, u.data(), ut.data(), v.data(), vt.data(), b.data(), n);
                for (std::size_t i = 0; i < n; ++i) CHECK(close(a[i], b[i], 1e-14));
            }
            {
                auto u = random_vec<float>(g, n), ut = random_vec<float>(g, n),
                     v = random_vec<float>(g, n), vt = random_vec<float>(g, n);
                std::vector<float> a(n), b(n);
                ref.pattern_row_f32(-0.7f, u.data(), ut.data(), v.data(), vt.data(), a.data(), n);
                k->pattern_row_f32(-0.7f, u.data(), ut.data(), v.data(), vt.data(), b.data(), n);
                for (std::size_t i = 0; i < n; ++i) CHECK(close(a[i], b[i], 1e-5));
            }
            {
                auto f = random_vec<double>(g, n);
                auto s1 = random_vec<double>(g, n), s2 = random_vec<double>(g, n),
                     q1 = random_vec<double>(g, n), q2 = random_vec<double>(g, n);
                auto t1 = s1, t2 = s2, r1 = q1, r2 = q2;
                ref.accumulate_weighted(0.3, -0.2, 0.5, 0.25, f.data(), s1.data(), s2.data(), q1.data(), q2.data(), n);
                k->accumulate_weighted(0.3, -0.2, 0.5, 0.25, f.data(), t1.data(), t2.data(), r1.data(), r2.data(), n);
                for (std::size_t i = 0; i < n; ++i) {
                    CHECK(close(s1[i], t1[i], 1e-14));
                    CHECK(close(s2[i], t2[i], 1e-14));
                    CHECK(close(q1[i], r1[i], 1e-14));
                    CHECK(close(q2[i], r2[i], 1e-14));
                }
            }
            {
                auto f = random_vec<double>(g, n), rr = random_vec<double>(g, n), ri = random_vec<double>(g, n);
                std::vector<double> s1(n, 0.1), s2(n, 0.2), q1(n, 0.3), q2(n, 0.4);
                auto t1 = s1, t2 = s2, r1 = q1, r2 = q2;
                ref.accumulate_shifted(0.6, 0.8, f.data(), rr.data(), ri.data(), s1.data(), s2.data(), q1.data(), q2.data(), n);
                k->accumulate_shifted(0.6, 0.8, f.data(), rr.data(), ri.data(), t1.data(), t2.data(), r1.data(), r2.data(), n);
                for (std::size_t i = 0; i < n; ++i) {
                    CHECK(close(s1[i], t1[i], 1e-14));
                    CHECK(close(s2[i], t2[i], 1e-14));
                    CHECK(close(q1[i], r1[i], 1e-14));
                    CHECK(close(q2[i], r2[i], 1e-14));
                }
            }
            {
                auto a = random_vec<double>(g, n), re = random_vec<double>(g, n), im = random_vec<double>(g, n);
                double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
                ref.dot_real_complex(a.data(), re.data(), im.data(), n, &x0, &y0);
                k->dot_real_complex(a.data(), re.data(), im.data(), n, &x1, &y1);
                CHECK(close(x0, x1, 1e-13 * double(n + 1)));
                CHECK(close(y0, y1, 1e-13 * double(n + 1)));
            }
        }
    }
}

TEST_CASE("identical samples give exactly zero error under every ISA") {
    QuadratureDataset ds;
    ds.n_phi = 4;
    for (std::uint32_t j = 0; j < 4; ++j)
        for (int k = 0; k < 5; ++k) ds.samples.push_back({0.0, 0.3, 0, 0});
    ds.gridded = false;
    ReconstructConfig cfg;
    cfg.pattern.cutoff = 4;
    cfg.estimator = EstimatorKind::unbinned;
    for (Isa isa : simd::available_isas()) {
        simd::force_isa(isa);
        const auto est = estimate_unbinned(ds, cfg);
        for (double e : est.err_re.values()) CHECK(e == 0.0);
        for (double e : est.err_im.values()) CHECK(e == 0.0);
    }
    simd::force_isa(simd::available_isas().back());
}

TEST_CASE("reconstruction agrees across ISAs") {
    const auto state = make_state({StateKind::coherent, {0.8, 0.4}, {}}, 12);
    SimulationPlan plan;
    plan.nsamples = 400;
    plan.n_phi = 12;
    plan.seed = 5;
    const auto ds = simulate(state, plan);
    ReconstructConfig cfg;
    cfg.pattern.cutoff = 12;
    cfg.n_bin = 64;
    std::vector<DensityMatrixEstimate> out;
    for (Isa isa : simd::available_isas()) {
        simd::force_isa(isa);
        out.push_back(reconstruct(ds, cfg));
    }
    simd::force_isa(simd::available_isas().back());
    for (std::size_t k = 1; k < out.size(); ++k)
        for (std::size_t i = 0; i < out[0].rho.size(); ++i) {
            CHECK(std::abs(out[0].rho.data()[i] - out[k].rho.data()[i]) < 1e-12);
            CHECK(close(out[0].err_re.data()[i], out[k].err_re.data()[i], 1e-9));
        }
}
