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

#include "homodyne/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/parallel.hpp"
#include "homodyne/simd.hpp"

namespace homodyne {

DiagonalDensityMatrix DiagonalDensityMatrix::from_matrix(const ComplexMatrix& rho) {
    if (rho.rows() != rho.cols()) throw DataError("density matrix is not square");
    DiagonalDensityMatrix out;
    out.M = rho.rows();
    out.diagonals.resize(out.M);
    for (std::size_t d = 0; d < out.M; ++d) {
        auto& diag = out.diagonals[d];
        diag.resize(out.M - d);
        for (std::size_t n = 0; n + d < out.M; ++n)
            diag[n] = (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n + d);
    }
    return out;
}

ComplexMatrix DiagonalDensityMatrix::to_matrix() const {
    ComplexMatrix rho(M, M);
    for (std::size_t d = 0; d < M; ++d)
        for (std::size_t n = 0; n + d < M; ++n) {
            const std::complex<double> v = (n % 2 == 0 ? 1.0 : -1.0) * diagonals[d][n];
            rho(n, n + d) = v;
            if (d > 0) rho(n + d, n) = std::conj(v);
        }
    return rho;
}

PolarGrid make_polar_grid(std::size_t M, std::size_t n_r, std::size_t n_theta,
                          std::optional<double> r_max) {
    if (n_r < 2 || n_theta < 1) throw UsageError("polar grid needs n_r >= 2 and n_theta >= 1");
    const double rmax = r_max ? *r_max : std::sqrt(double(M));
    if (!(rmax > 0) || !std::isfinite(rmax)) throw UsageError("r_max must be positive");
    PolarGrid g;
    g.r.resize(n_r);
    for (std::size_t k = 0; k < n_r; ++k) g.r[k] = rmax * double(k) / double(n_r - 1);
    g.theta.resize(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j)
        g.theta[j] = 2 * std::numbers::pi * double(j) / double(n_theta);
    return g;
}

WignerGrid wigner_polar(const DiagonalDensityMatrix& rho, std::span<const double> r,
                        std::span<const double> theta, LambdaMethod method,
                        const Method2Options& opt) {
    const std::size_t M = rho.M;
    if (M == 0) throw DataError("empty density matrix");
    for (double v : r)
        if (!(v >= 0) || !std::isfinite(v)) throw UsageError("Wigner grid needs finite r >= 0");

    // rho_tilde split into re/im columns for the dot kernel
    std::vector<std::vector<double>> re(M), im(M);
    for (std::size_t d = 0; d < M; ++d) {
        re[d].resize(M - d);
        im[d].resize(M - d);
        for (std::size_t n = 0; n + d < M; ++n) {
            re[d][n] = rho.diagonals[d][n].real();
            im[d][n] = rho.diagonals[d][n].imag();
        }
    }
    const std::size_t T = theta.size();
    std::vector<double> cs(T * M), sn(T * M);
    for (std::size_t j = 0; j < T; ++j)
        for (std::size_t d = 0; d < M; ++d) {
            cs[j * M + d] = std::cos(double(d) * theta[j]);
            sn[j * M + d] = std::sin(double(d) * theta[j]);
        }

    WignerGrid g;
    g.r.assign(r.begin(), r.end());
    g.theta.assign(theta.begin(), theta.end());
    g.W = RealMatrix(r.size(), T, 0.0);
    const auto& k = simd::active_kernels();
    parallel_for(r.size(), [&](std::size_t i) {
        const LambdaTable lam = lambda_table(4 * r[i] * r[i], M, method, opt);
        std::vector<double> sr(M), si(M);
        for (std::size_t d = 0; d < M; ++d) {
            const auto col = lam.column(d);
            k.dot_real_complex(col.data(), re[d].data(), im[d].data(), M - d, &sr[d], &si[d]);
        }
        sr[0] *= 0.5;
        si[0] *= 0.5;
        for (std::size_t j = 0; j < T; ++j) {
            double w = 0;
            for (std::size_t d = 0; d < M; ++d) w += cs[j * M + d] * sr[d] - sn[j * M + d] * si[d];
            if (!std::isfinite(w)) throw NumericalError("Wigner value is not finite");
            g.W(i, j) = w;
        }
    });
    return g;
}

RealMatrix cartesian_resample(const WignerGrid& g, std::span<const double> xs,
                              std::span<const double> ys) {
    const std::size_t R = g.r.size(), T = g.theta.size();
    if (R < 2 || T < 1) throw UsageError("resampling needs at least 2 radii and 1 angle");
    const double two_pi = 2 * std::numbers::pi;
    const double dtheta = two_pi / double(T);
    RealMatrix out(ys.size(), xs.size(), 0.0);
    for (std::size_t iy = 0; iy < ys.size(); ++iy)
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            const double rr = std::hypot(xs[ix], ys[iy]);
            if (rr > g.r.back()) continue;
            double th = std::atan2(ys[iy], xs[ix]);
            if (th < 0) th += two_pi;
            const std::size_t a = std::min<std::size_t>(
                R - 2, std::upper_bound(g.r.begin(), g.r.end(), rr) - g.r.begin() - 1);
            const double fr = (rr - g.r[a]) / (g.r[a + 1] - g.r[a]);
            const double pos = th / dtheta;
            const std::size_t b = std::size_t(std::floor(pos)) % T;
            const std::size_t b1 = (b + 1) % T;
            const double ft = pos - std::floor(pos);
            out(iy, ix) = (1 - fr) * ((1 - ft) * g.W(a, b) + ft * g.W(a, b1)) +
                          fr * ((1 - ft) * g.W(a + 1, b) + ft * g.W(a + 1, b1));
        }
    return out;
}

}  // namespace homodyne
