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

#include "homodyne/sinogram.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include "homodyne/error.hpp"

namespace homodyne {
namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::size_t BinGrid::locate(double x) const {
    const std::size_t n = centers.size();
    if (!(x >= edges.front() && x <= edges.back()))
        throw DataError("value " + std::to_string(x) + " outside the binning range");
    auto k = static_cast<std::ptrdiff_t>(std::floor((x - edges.front()) / width));
    k = std::clamp<std::ptrdiff_t>(k, 0, std::ptrdiff_t(n) - 1);
    // agree with the stored edges exactly
    while (k > 0 && x < edges[k]) --k;
    while (k + 1 < std::ptrdiff_t(n) && x >= edges[k + 1]) ++k;
    return std::size_t(k);
}

BinGrid make_bin_grid(const QuadratureDataset& ds, std::size_t n_bin,
                      std::optional<std::pair<double, double>> range) {
    if (n_bin < 1) throw UsageError("n_bin must be at least 1");
    double lo, hi;
    if (range) {
        std::tie(lo, hi) = *range;
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw UsageError("binning range must satisfy lo < hi");
    } else {
        double a = 0;
        for (const auto& s : ds.samples) a = std::max(a, std::abs(s.value));
        if (a == 0) a = 0.5;
        if (n_bin == 1) {
            lo = -a;
            hi = a;
        } else {
            const double h = 2 * a / double(n_bin - 1);
            lo = -a - h / 2;
            hi = a + h / 2;
        }
    }
    BinGrid g;
    g.width = (hi - lo) / double(n_bin);
    g.edges.resize(n_bin + 1);
    for (std::size_t k = 0; k <= n_bin; ++k) g.edges[k] = lo + g.width * double(k);
    g.edges.back() = hi;
    g.centers.resize(n_bin);
    for (std::size_t k = 0; k < n_bin; ++k) g.centers[k] = 0.5 * (g.edges[k] + g.edges[k + 1]);
    return g;
}

Sinogram bin(const QuadratureDataset& ds, const BinGrid& grid, std::optional<std::size_t> block) {
    if (!ds.gridded) throw DataError("binning needs equispaced phases");
    if (ds.n_phi == 0) throw DataError("dataset has no phases");
    Sinogram s;
    s.n_phi = ds.n_phi;
    s.n_bin = grid.size();
    s.freq = RealMatrix(s.n_phi, s.n_bin, 0.0);
    s.bin_edges = grid.edges;
    s.bin_centers = grid.centers;
    s.counts.assign(s.n_phi, 0);
    for (const auto& q : ds.samples) {
        if (block && q.block != *block) continue;
        if (q.phase_index >= s.n_phi) throw DataError("phase_index >= n_phi");
        s.freq(q.phase_index, grid.locate(q.value)) += 1.0;
        ++s.counts[q.phase_index];
    }
    for (std::size_t j = 0; j < s.n_phi; ++j) {
        if (s.counts[j] == 0)
            throw DataError("phase " + std::to_string(j) + " has no samples" +
                            (block ? " in block " + std::to_string(*block) : std::string()));
        const double inv = 1.0 / double(s.counts[j]);
        for (double& f : s.freq.row(j)) f *= inv;
        s.total += s.counts[j];
    }
    return s;
}

Sinogram bin(const QuadratureDataset& ds, std::size_t n_bin,
             std::optional<std::pair<double, double>> range) {
    return bin(ds, make_bin_grid(ds, n_bin, range));
}

PhaseSpectrum phase_dft(const Sinogram& s) {
    const std::size_t P = s.n_phi, B = s.n_bin, H = P / 2 + 1;
    PhaseSpectrum out;
    out.n_phi = P;
    out.n_bin = B;
    out.half = ComplexMatrix(H, B);
    out.bin_centers = s.bin_centers;
    out.bin_width = s.bin_edges.size() > 1 ? s.bin_edges[1] - s.bin_edges[0] : 0.0;
    out.total = s.total;
    if (P == 0 || B == 0) return out;

    std::unique_ptr<double, FftwFree> in(fftw_alloc_real(P * B));
    std::unique_ptr<fftw_complex, FftwFree> spec(fftw_alloc_complex(H * B));
    if (!in || !spec) throw std::bad_alloc();
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        const int n[] = {int(P)};
        plan = fftw_plan_many_dft_r2c(1, n, int(B), in.get(), nullptr, int(B), 1, spec.get(),
                                      nullptr, int(B), 1, FFTW_ESTIMATE);
    }
    if (!plan) throw NumericalError("FFTW could not plan the phase transform");
    std::copy(s.freq.data(), s.freq.data() + P * B, in.get());
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / double(P);
    for (std::size_t d = 0; d < H; ++d)
        for (std::size_t i = 0; i < B; ++i) {
            const fftw_complex& c = spec.get()[d * B + i];
            out.half(d, i) = {c[0] * scale, c[1] * scale};
        }
    // Real by symmetry; FFTW leaves rounding noise at most.
    for (std::size_t i = 0; i < B; ++i) {
        out.half(0, i).imag(0.0);
        if (P % 2 == 0) out.half(P / 2, i).imag(0.0);
    }
    return out;
}

}  // namespace homodyne
