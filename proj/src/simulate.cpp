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

#include "homodyne/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "homodyne/error.hpp"
#include "homodyne/parallel.hpp"
#include "homodyne/patterns.hpp"

namespace homodyne {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t phase_seed(std::uint64_t seed, std::size_t j) {
    return splitmix64(splitmix64(seed) ^ std::uint64_t(j));
}

// Trapezoid mass of a tabulated density.
double trapezoid(std::span<const double> x, std::span<const double> p) {
    double s = 0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) s += 0.5 * (x[k + 1] - x[k]) * (p[k] + p[k + 1]);
    return s;
}

void draw(std::span<const double> x, std::span<const double> p, std::uint64_t seed,
          std::size_t count, std::size_t nsamples, std::size_t j, double phase,
          QuadratureSample* out) {
    const std::size_t n = x.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k)
        cum[k + 1] = cum[k] + 0.5 * (x[k + 1] - x[k]) * (p[k] + p[k + 1]);
    const double total = cum.back();
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < count; ++s) {
        const double u = double(rng() >> 11) * 0x1p-53;
        const double target = u * total;
        std::size_t k = std::size_t(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
        k = std::clamp<std::size_t>(k, 1, n - 1) - 1;
        const double h = x[k + 1] - x[k];
        const double r = target - cum[k];
        // density p_k + slope t on the cell: solve p_k t + slope t^2 / 2 = r
        const double slope = (p[k + 1] - p[k]) / h;
        const double disc = std::max(0.0, p[k] * p[k] + 2 * slope * r);
        const double den = p[k] + std::sqrt(disc);
        const double t = den > 0 ? std::clamp(2 * r / den, 0.0, h) : 0.0;
        out[s] = {phase, x[k] + t, std::uint32_t(j), std::uint32_t(s / nsamples)};
    }
}

}  // namespace

FockVector make_state(const StateSpec& spec, std::size_t M) {
    if (M < 1) throw UsageError("state cutoff M must be at least 1");
    FockVector s;
    s.M = M;
    s.c.assign(M, 0.0);
    switch (spec.kind) {
        case StateKind::fock_superposition: {
            if (spec.levels.empty()) throw UsageError("fock superposition needs levels");
            std::vector<std::size_t> lv = spec.levels;
            std::sort(lv.begin(), lv.end());
            if (std::adjacent_find(lv.begin(), lv.end()) != lv.end())
                throw UsageError("fock superposition levels must be distinct");
            if (lv.back() >= M) throw UsageError("fock level exceeds cutoff M");
            const double w = 1.0 / std::sqrt(double(lv.size()));
            for (std::size_t n : lv) s.c[n] = w;
            break;
        }
        case StateKind::coherent:
        case StateKind::cat: {
            const double a = std::abs(spec.alpha), arg = std::arg(spec.alpha);
            const bool cat = spec.kind == StateKind::cat;
            const double norm = cat ? std::sqrt(2 * (1 + std::exp(-2 * a * a))) : 1.0;
            for (std::size_t n = 0; n < M; ++n) {
                if (cat && n % 2 == 1) continue;
                if (a == 0) {
                    if (n == 0) s.c[0] = (cat ? 2.0 : 1.0) / norm;
                    continue;
                }
                const double logmag = -a * a / 2 + double(n) * std::log(a) - 0.5 * std::lgamma(n + 1.0);
                s.c[n] = std::polar((cat ? 2.0 : 1.0) * std::exp(logmag) / norm, double(n) * arg);
            }
            break;
        }
    }
    double n2 = 0;
    for (const auto& c : s.c) n2 += std::norm(c);
    s.deficit = std::max(0.0, 1.0 - n2);
    if (s.deficit > 1e-2) {
        std::ostringstream os;
        os << "cutoff M=" << M << " truncates the state: deficit " << s.deficit << " > 1e-2";
        throw UsageError(os.str());
    }
    if (s.deficit > 1e-6) {
        std::ostringstream os;
        os << "cutoff M=" << M << " leaves a truncation deficit of " << s.deficit;
        s.warning = os.str();
    }
    return s;
}

ComplexMatrix density_matrix(const FockVector& s) {
    ComplexMatrix rho(s.M, s.M);
    for (std::size_t n = 0; n < s.M; ++n)
        for (std::size_t m = 0; m < s.M; ++m) rho(n, m) = s.c[n] * std::conj(s.c[m]);
    return rho;
}

std::size_t support_max(const FockVector& s) {
    std::size_t top = 0;
    for (std::size_t n = 0; n < s.c.size(); ++n)
        if (s.c[n] != 0.0) top = n;
    return top;
}

RealMatrix oscillator_functions(std::span<const double> x, std::span<const std::size_t> levels) {
    RealMatrix out(x.size(), levels.size(), 0.0);
    if (levels.empty()) return out;
    const std::size_t top = *std::max_element(levels.begin(), levels.end());
    PatternConfig cfg;
    cfg.cutoff = top + 1;
    cfg.beta = 1.0;
    cfg.range = RangeMode::extended;
    const double c0 = std::pow(2 / std::numbers::pi, 0.25);
    parallel_for(x.size(), [&](std::size_t k) {
        // psi_n = (2/pi)^{1/4} e^{-x^2} u_n with u_0 = 1
        const auto r = regular_sequence<double>(x[k], cfg);
        const double y = -x[k] * x[k] / std::numbers::ln2;
        const double fl = std::floor(y);
        const double g = c0 * std::exp2(y - fl);
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const std::size_t n = levels[i];
            const int e = (r.exp.empty() ? 0 : r.exp[n]) + int(fl);
            out(k, i) = std::ldexp(r.u[n] * g, e);
        }
    });
    return out;
}

std::vector<double> default_x_grid(const FockVector& s, std::size_t min_points) {
    const double nmax = double(support_max(s));
    const double xmax = std::sqrt(nmax + 0.5) + 3.0;
    const double wavelength = std::numbers::pi / (2 * std::sqrt(nmax + 0.5));
    const std::size_t n = std::max<std::size_t>(min_points, std::size_t(std::ceil(2 * xmax / (wavelength / 64))) + 1);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = -xmax + 2 * xmax * double(k) / double(n - 1);
    return x;
}

MarginalModel::MarginalModel(const FockVector& s, std::vector<double> x) : x_(std::move(x)) {
    if (x_.size() < 2) throw UsageError("marginal grid needs at least 2 points");
    for (std::size_t k = 0; k + 1 < x_.size(); ++k)
        if (!(x_[k + 1] > x_[k])) throw UsageError("marginal grid must be increasing");
    norm2_ = 0;
    for (std::size_t n = 0; n < s.c.size(); ++n)
        if (s.c[n] != 0.0) {
            levels_.push_back(n);
            coeff_.push_back(s.c[n]);
            norm2_ += std::norm(s.c[n]);
        }
    if (levels_.empty()) throw UsageError("state has no nonzero coefficients");
    psi_ = oscillator_functions(x_, levels_);
}

void MarginalModel::row(double phase, std::span<double> out) const {
    std::vector<std::complex<double>> ph(levels_.size());
    for (std::size_t i = 0; i < levels_.size(); ++i)
        ph[i] = coeff_[i] * std::polar(1.0, -double(levels_[i]) * phase);
    for (std::size_t k = 0; k < x_.size(); ++k) {
        std::complex<double> a = 0;
        const auto prow = psi_.row(k);
        for (std::size_t i = 0; i < levels_.size(); ++i) a += ph[i] * prow[i];
        out[k] = std::norm(a);
    }
    const double mass = trapezoid(x_, out) / norm2_;
    if (mass < 0.999) {
        std::ostringstream os;
        os << "x grid too narrow: marginal mass " << mass << " at phase " << phase;
        throw DataError(os.str());
    }
    const double inv = 1.0 / trapezoid(x_, out);
    for (double& v : out) v *= inv;
}

MarginalTable marginals(const FockVector& s, std::span<const double> phases,
                        std::span<const double> x) {
    MarginalModel model(s, std::vector<double>(x.begin(), x.end()));
    MarginalTable t;
    t.phases.assign(phases.begin(), phases.end());
    t.x = model.x();
    t.p = RealMatrix(phases.size(), x.size());
    parallel_for(phases.size(), [&](std::size_t j) { model.row(phases[j], t.p.row(j)); });
    return t;
}

void SimulationPlan::validate() const {
    if (nsamples < 1 || nblks < 1 || n_phi < 1)
        throw UsageError("simulation plan needs nsamples, nblks, n_phi >= 1");
    if (n_x != 0 && n_x < 2) throw UsageError("simulation plan needs n_x >= 2");
    if (n_phi > std::size_t(UINT32_MAX) || nblks > std::size_t(UINT32_MAX))
        throw UsageError("simulation plan too large");
}

QuadratureDataset sample(const MarginalTable& table, const SimulationPlan& plan) {
    plan.validate();
    if (table.n_phi() != plan.n_phi) throw UsageError("marginal table and plan disagree on n_phi");
    const std::size_t per = plan.nsamples * plan.nblks;
    QuadratureDataset ds;
    ds.n_phi = plan.n_phi;
    ds.nblks = plan.nblks;
    ds.generator = kGeneratorName;
    ds.gridded = true;
    for (std::size_t j = 0; j < plan.n_phi; ++j)
        if (std::abs(table.phases[j] - grid_phase(j, plan.n_phi)) > 1e-9) ds.gridded = false;
    ds.samples.resize(per * plan.n_phi);
    parallel_for(plan.n_phi, [&](std::size_t j) {
        draw(table.x, table.p.row(j), phase_seed(plan.seed, j), per, plan.nsamples, j,
             table.phases[j], ds.samples.data() + j * per);
    });
    return ds;
}

QuadratureDataset simulate(const FockVector& s, const SimulationPlan& plan) {
    plan.validate();
    std::vector<double> x = default_x_grid(s, plan.n_x == 0 ? 2048 : 2);
    if (plan.n_x != 0) {
        const double xmax = x.back();
        x.resize(plan.n_x);
        for (std::size_t k = 0; k < plan.n_x; ++k)
            x[k] = -xmax + 2 * xmax * double(k) / double(plan.n_x - 1);
    }
    const MarginalModel model(s, std::move(x));
    const std::size_t per = plan.nsamples * plan.nblks;
    QuadratureDataset ds;
    ds.n_phi = plan.n_phi;
    ds.nblks = plan.nblks;
    ds.generator = kGeneratorName;
    ds.samples.resize(per * plan.n_phi);
    parallel_for(plan.n_phi, [&](std::size_t j) {
        std::vector<double> p(model.x().size());
        const double phase = grid_phase(j, plan.n_phi);
        model.row(phase, p);
        draw(model.x(), p, phase_seed(plan.seed, j), per, plan.nsamples, j, phase,
             ds.samples.data() + j * per);
    });
    return ds;
}

ExperimentDiagnostics compare_to_truth(const DensityMatrixEstimate& est, const ComplexMatrix& truth) {
    if (truth.rows() != est.M || truth.cols() != est.M)
        throw UsageError("truth matrix does not match the estimate's cutoff");
    ExperimentDiagnostics g;
    const std::size_t D = est.meta.n_diagonals == 0 ? est.M : est.meta.n_diagonals;
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t n = 0; n + d < est.M; ++n) {
            const auto diff = est.rho(n, n + d) - truth(n, n + d);
            g.max_abs_dev = std::max(g.max_abs_dev, std::abs(diff));
            double z = 0;
            if (est.err_re(n, n + d) > 0) z = std::abs(diff.real()) / est.err_re(n, n + d);
            if (est.err_im(n, n + d) > 0)
                z = std::max(z, std::abs(diff.imag()) / est.err_im(n, n + d));
            g.max_z = std::max(g.max_z, z);
            if (d == 0) {
                g.max_z_diag = std::max(g.max_z_diag, z);
                g.diag_abs_dev += std::abs(diff.real());
            }
        }
    g.normalization = check_normalization(est);
    return g;
}

ExperimentResult run_experiment(const FockVector& s, const SimulationPlan& plan,
                                const ReconstructConfig& cfg) {
    if (cfg.pattern.cutoff != s.M) throw UsageError("reconstruction cutoff differs from the state's M");
    const QuadratureDataset ds = simulate(s, plan);
    ExperimentResult r;
    r.estimate = reconstruct(ds, cfg);
    r.diagnostics = compare_to_truth(r.estimate, density_matrix(s));
    return r;
}

}  // namespace homodyne
