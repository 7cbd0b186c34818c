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

#include "homodyne/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>

#include "homodyne/error.hpp"
#include "homodyne/parallel.hpp"
#include "homodyne/simd.hpp"

namespace homodyne {
namespace {

// Running sums for one diagonal, indexed by n.
struct DiagonalSums {
    std::vector<double> s_re, s_im, q_re, q_im, ref_re, ref_im;
    explicit DiagonalSums(std::size_t len)
        : s_re(len), s_im(len), q_re(len), q_im(len), ref_re(len), ref_im(len) {}
};

// How a point's value is formed: f at the point, or from the primitive g at
// the bin edges point -+ width/2 (cell average, and 2 f - average).
struct BinTaps {
    BinRule rule = BinRule::center;
    double width = 0;
    bool uses_edges() const { return rule == BinRule::average || rule == BinRule::corrected; }
};

// Visits every active point in index order for every diagonal. Workspaces for
// `chunk` points are built in parallel, then diagonals are processed in
// parallel; visit(point, d, f, sums) always sees points in increasing order.
template <class T, class Visit>
void sweep(const std::vector<double>& xs, const std::vector<std::size_t>& active,
           const PatternConfig& pc, const BinTaps& taps, std::size_t n_diag, std::size_t chunk,
           std::vector<DiagonalSums>& sums, Visit&& visit) {
    const std::size_t M = pc.cutoff;
    const bool edges = taps.uses_edges();
    const double h = 0.5 * taps.width;
    chunk = std::max<std::size_t>(chunk, 1);
    std::vector<PatternWorkspace<T>> ws;
    std::vector<double> evals;
    std::vector<std::size_t> left, right;  // edge workspaces per point
    for (std::size_t start = 0; start < active.size(); start += chunk) {
        const std::size_t len = std::min(chunk, active.size() - start);
        evals.assign(len, 0.0);
        for (std::size_t k = 0; k < len; ++k) evals[k] = xs[active[start + k]];
        left.assign(len, 0);
        right.assign(len, 0);
        if (edges) {
            for (std::size_t k = 0; k < len; ++k) {
                const std::size_t a = active[start + k];
                if (k > 0 && active[start + k - 1] + 1 == a) {
                    left[k] = right[k - 1];  // shared with the previous bin
                } else {
                    left[k] = evals.size();
                    evals.push_back(xs[a] - h);
                }
                right[k] = evals.size();
                evals.push_back(xs[a] + h);
            }
        }
        ws.resize(evals.size());
        parallel_for(evals.size(), [&](std::size_t k) { ws[k] = make_workspace<T>(evals[k], pc); });
        parallel_for(n_diag, [&](std::size_t d) {
            const std::size_t n = M - d;
            std::vector<T> rows(n * evals.size());
            std::vector<double> f(n);
            for (std::size_t e = 0; e < evals.size(); ++e) {
                const std::span<T> out(rows.data() + e * n, n);
                if (e < len) pattern_row<T>(ws[e], d, out);
                else primitive_row<T>(ws[e], d, out);
            }
            for (std::size_t k = 0; k < len; ++k) {
                const std::size_t a = active[start + k];
                const T* fc = rows.data() + k * n;
                // primitives from different branches do not share a constant
                if (!edges || ws[left[k]].region != ws[right[k]].region) {
                    for (std::size_t i = 0; i < n; ++i) f[i] = double(fc[i]);
                } else {
                    const T* ga = rows.data() + left[k] * n;
                    const T* gb = rows.data() + right[k] * n;
                    const double inv_w = 1.0 / taps.width;
                    if (taps.rule == BinRule::average)
                        for (std::size_t i = 0; i < n; ++i) f[i] = (double(gb[i]) - double(ga[i])) * inv_w;
                    else
                        for (std::size_t i = 0; i < n; ++i)
                            f[i] = 2.0 * double(fc[i]) - (double(gb[i]) - double(ga[i])) * inv_w;
                }
                for (std::size_t i = 0; i < n; ++i)
                    if (!std::isfinite(f[i]))
                        throw NumericalError("pattern function is not finite at x=" + std::to_string(xs[a]));
                visit(a, d, f.data(), sums[d]);
            }
        });
    }
}

template <class Visit>
void sweep_any(const std::vector<double>& xs, const std::vector<std::size_t>& active,
               const PatternConfig& pc, const BinTaps& taps, std::size_t n_diag, std::size_t chunk,
               std::vector<DiagonalSums>& sums, Visit&& visit) {
    if (pc.precision == Precision::float32)
        sweep<float>(xs, active, pc, taps, n_diag, chunk, sums, visit);
    else
        sweep<double>(xs, active, pc, taps, n_diag, chunk, sums, visit);
}

// e^{-2 pi i k / n}, exact at quarter turns so that weights which vanish in
// exact arithmetic vanish here too.
std::complex<double> grid_weight(std::size_t k, std::size_t n) {
    k %= n;
    if (4 * k % n == 0) {
        switch (4 * k / n) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, -1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, 1.0};
        }
    }
    return std::polar(1.0, -2 * std::numbers::pi * double(k) / double(n));
}

DensityMatrixEstimate blank(std::size_t M) {
    DensityMatrixEstimate e;
    e.M = M;
    e.rho = ComplexMatrix(M, M);
    e.err_re = RealMatrix(M, M, 0.0);
    e.err_im = RealMatrix(M, M, 0.0);
    return e;
}

// Hermitian completion, exact-zero diagonal imaginary parts, trace.
void finish(DensityMatrixEstimate& e) {
    const std::size_t M = e.M;
    for (std::size_t n = 0; n < M; ++n) {
        e.rho(n, n).imag(0.0);
        e.err_im(n, n) = 0.0;
        for (std::size_t m = n + 1; m < M; ++m) {
            e.rho(m, n) = std::conj(e.rho(n, m));
            e.err_re(m, n) = e.err_re(n, m);
            e.err_im(m, n) = e.err_im(n, m);
        }
    }
    const auto chk = check_normalization(e);
    e.trace = chk.trace;
    e.trace_err = chk.trace_err;
}

PatternConfig pattern_for(const ReconstructConfig& cfg, double beta, double bin_width) {
    PatternConfig pc = cfg.pattern;
    pc.beta = beta;
    if (bin_width > 0) pc.forward_floor = 1e-3 * bin_width;
    pc.validate();
    return pc;
}

void require_phases(std::size_t n_phi, std::size_t n_diag) {
    if (n_phi < n_diag)
        throw DataError("phase count insufficient for cutoff M: n_phi = " + std::to_string(n_phi) +
                        " < " + std::to_string(n_diag) + " estimated diagonals");
}

}  // namespace

std::string_view bin_rule_name(BinRule r) {
    switch (r) {
        case BinRule::automatic: return "auto";
        case BinRule::center: return "center";
        case BinRule::average: return "average";
        case BinRule::corrected: return "corrected";
    }
    return "?";
}

BinRule resolve_bin_rule(BinRule r, std::size_t M, double width) {
    if (r != BinRule::automatic) return r;
    // fastest oscillation of f_{n,m}, n, m < M, is about 2 sqrt(4M + 2)
    const double k_max = 2 * std::sqrt(4.0 * double(M) + 2.0);
    return width * k_max <= std::numbers::pi ? BinRule::corrected : BinRule::average;
}

std::size_t ReconstructConfig::diagonals() const {
    const std::size_t M = pattern.cutoff;
    return max_diagonal == 0 ? M : std::min(max_diagonal, M);
}

NormalizationCheck check_normalization(const DensityMatrixEstimate& est) {
    NormalizationCheck c;
    double var = 0;
    for (std::size_t n = 0; n < est.M; ++n) {
        c.trace += est.rho(n, n).real();
        var += est.err_re(n, n) * est.err_re(n, n);
    }
    c.trace_err = std::sqrt(var);
    // rounding allowance so that an exact matrix with zero errors passes
    const double slack = 8.0 * double(est.M) * std::numeric_limits<double>::epsilon();
    c.compatible = std::abs(c.trace - 1.0) <= 3.0 * c.trace_err + slack;
    return c;
}

DensityMatrixEstimate estimate_binned(const PhaseSpectrum& spec, const ReconstructConfig& cfg) {
    cfg.pattern.validate();
    const std::size_t M = cfg.pattern.cutoff;
    const std::size_t n_diag = cfg.diagonals();
    require_phases(spec.n_phi, n_diag);
    if (spec.total == 0) throw DataError("empty spectrum");
    const double beta = cfg.beta ? *cfg.beta : choose_beta(spec.bin_centers);
    const PatternConfig pc = pattern_for(cfg, beta, spec.bin_width);

    // A bin with S_hat_0 = 0 is empty at every phase.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < spec.n_bin; ++i)
        if (spec.half(0, i).real() != 0.0) active.push_back(i);

    std::vector<DiagonalSums> sums;
    for (std::size_t d = 0; d < n_diag; ++d) sums.emplace_back(M - d);
    const auto& k = simd::active_kernels();
    const BinTaps taps{resolve_bin_rule(cfg.bin_rule, M, spec.bin_width), spec.bin_width};
    sweep_any(spec.bin_centers, active, pc, taps, n_diag, cfg.chunk, sums,
              [&](std::size_t i, std::size_t d, const double* f, DiagonalSums& s) {
                  const std::complex<double> w = spec.at(d, i);
                  // phase averages of cos^2 and sin^2 (d phi_j) weighted by S
                  const double s0 = spec.half(0, i).real();
                  const double c2 = spec.at(2 * d, i).real();
                  k.accumulate_weighted(w.real(), w.imag(), 0.5 * (s0 + c2), 0.5 * (s0 - c2),
                                        f, s.s_re.data(), s.s_im.data(), s.q_re.data(),
                                        s.q_im.data(), M - d);
              });

    DensityMatrixEstimate e = blank(M);
    const double N = double(spec.total);
    const double bessel = N > 1 ? N / (N - 1) : 0.0;
    for (std::size_t d = 0; d < n_diag; ++d)
        for (std::size_t n = 0; n + d < M; ++n) {
            const auto& s = sums[d];
            e.rho(n, n + d) = {s.s_re[n], s.s_im[n]};
            const double vr = std::max(0.0, s.q_re[n] - s.s_re[n] * s.s_re[n]) * bessel;
            const double vi = std::max(0.0, s.q_im[n] - s.s_im[n] * s.s_im[n]) * bessel;
            e.err_re(n, n + d) = std::sqrt(vr / N);
            e.err_im(n, n + d) = std::sqrt(vi / N);
        }
    e.meta = {"binned", std::string(bin_rule_name(taps.rule)), "per-sample", spec.total, spec.n_bin, 1, n_diag, beta};
    finish(e);
    return e;
}

DensityMatrixEstimate estimate_unbinned(const QuadratureDataset& ds, const ReconstructConfig& cfg) {
    cfg.pattern.validate();
    ds.validate();
    if (ds.empty()) throw DataError("unbinned estimate of an empty dataset");
    const std::size_t M = cfg.pattern.cutoff;
    const std::size_t n_diag = cfg.diagonals();
    // on a phase grid, diagonals beyond n_phi alias just as in the binned path
    if (ds.gridded) require_phases(ds.n_phi, n_diag);
    const std::vector<double> xs = ds.values();
    const double beta = cfg.beta ? *cfg.beta : choose_beta(xs);
    const PatternConfig pc = pattern_for(cfg, beta, 0.0);

    std::vector<std::size_t> active(xs.size());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
    std::vector<DiagonalSums> sums;
    for (std::size_t d = 0; d < n_diag; ++d) sums.emplace_back(M - d);
    const auto& k = simd::active_kernels();
    sweep_any(xs, active, pc, BinTaps{}, n_diag, cfg.chunk, sums,
              [&](std::size_t i, std::size_t d, const double* f, DiagonalSums& s) {
                  const auto w = ds.gridded ? grid_weight(d * ds.samples[i].phase_index, ds.n_phi)
                                            : std::polar(1.0, -double(d) * ds.samples[i].phase);
                  const double wr = w.real(), wi = w.imag();
                  const std::size_t n = M - d;
                  if (i == 0)  // shift origin: exact zero variance for identical samples
                      for (std::size_t t = 0; t < n; ++t) {
                          s.ref_re[t] = wr * f[t];
                          s.ref_im[t] = wi * f[t];
                      }
                  k.accumulate_shifted(wr, wi, f, s.ref_re.data(), s.ref_im.data(),
                                       s.s_re.data(), s.s_im.data(), s.q_re.data(),
                                       s.q_im.data(), n);
              });

    DensityMatrixEstimate e = blank(M);
    const double N = double(xs.size());
    for (std::size_t d = 0; d < n_diag; ++d)
        for (std::size_t n = 0; n + d < M; ++n) {
            const auto& s = sums[d];
            e.rho(n, n + d) = {s.ref_re[n] + s.s_re[n] / N, s.ref_im[n] + s.s_im[n] / N};
            if (N > 1) {
                const double vr = std::max(0.0, s.q_re[n] - s.s_re[n] * s.s_re[n] / N) / (N - 1);
                const double vi = std::max(0.0, s.q_im[n] - s.s_im[n] * s.s_im[n] / N) / (N - 1);
                e.err_re(n, n + d) = std::sqrt(vr / N);
                e.err_im(n, n + d) = std::sqrt(vi / N);
            }
        }
    e.meta = {"unbinned", "", N > 1 ? "per-sample" : "none", xs.size(), 0, 1, n_diag, beta};
    finish(e);
    return e;
}

DensityMatrixEstimate block_statistics(const QuadratureDataset& ds, const ReconstructConfig& cfg) {
    ds.validate();
    const std::size_t B = ds.nblks;
    if (B < 2) throw DataError("block statistics need at least 2 blocks");
    const auto sizes = ds.block_sizes();
    if (std::any_of(sizes.begin(), sizes.end(), [&](std::size_t s) { return s != sizes[0]; }))
        throw DataError("blocks have unequal sizes");
    if (sizes[0] == 0) throw DataError("blocks are empty");

    const std::size_t M = cfg.pattern.cutoff;
    ReconstructConfig bc = cfg;
    if (!bc.beta) bc.beta = choose_beta(ds.values());
    std::optional<BinGrid> grid;
    if (cfg.estimator == EstimatorKind::binned) {
        require_phases(ds.n_phi, cfg.diagonals());
        grid = make_bin_grid(ds, cfg.n_bin);
    }

    // Welford over blocks; identical blocks give exactly zero spread.
    ComplexMatrix mean(M, M);
    RealMatrix m2_re(M, M, 0.0), m2_im(M, M, 0.0);
    EstimateMeta meta;
    for (std::size_t b = 0; b < B; ++b) {
        DensityMatrixEstimate e = cfg.estimator == EstimatorKind::binned
                                      ? estimate_binned(phase_dft(bin(ds, *grid, b)), bc)
                                      : estimate_unbinned(ds.block(b), bc);
        meta = e.meta;
        const double k = double(b + 1);
        for (std::size_t i = 0; i < M * M; ++i) {
            const std::complex<double> x = e.rho.data()[i];
            std::complex<double>& mu = mean.data()[i];
            const std::complex<double> delta = x - mu;
            mu += delta / k;
            m2_re.data()[i] += delta.real() * (x.real() - mu.real());
            m2_im.data()[i] += delta.imag() * (x.imag() - mu.imag());
        }
    }
    DensityMatrixEstimate out = blank(M);
    out.rho = mean;
    const double norm = 1.0 / (double(B - 1) * double(B));
    for (std::size_t i = 0; i < M * M; ++i) {
        out.err_re.data()[i] = std::sqrt(m2_re.data()[i] * norm);
        out.err_im.data()[i] = std::sqrt(m2_im.data()[i] * norm);
    }
    out.meta = meta;
    out.meta.errors = "block";
    out.meta.N = ds.size();
    out.meta.n_blocks = B;
    finish(out);
    return out;
}

DensityMatrixEstimate reconstruct(const QuadratureDataset& ds, const ReconstructConfig& cfg) {
    if (ds.nblks >= 2) return block_statistics(ds, cfg);
    if (cfg.estimator == EstimatorKind::unbinned) return estimate_unbinned(ds, cfg);
    ds.validate();
    require_phases(ds.n_phi, cfg.diagonals());
    return estimate_binned(phase_dft(bin(ds, cfg.n_bin)), cfg);
}

}  // namespace homodyne
