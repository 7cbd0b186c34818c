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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Arguments select criteria by number (default: all).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "homodyne/error.hpp"
#include "homodyne/estimate.hpp"
#include "homodyne/io.hpp"
#include "homodyne/patterns.hpp"
#include "homodyne/simulate.hpp"
#include "homodyne/wigner.hpp"
#include "oracles.hpp"

using namespace homodyne;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ReconstructConfig recon(std::size_t M, std::size_t n_bin, std::size_t max_diagonal = 0) {
    ReconstructConfig c;
    c.pattern.cutoff = M;
    c.n_bin = n_bin;
    c.max_diagonal = max_diagonal;
    return c;
}

SimulationPlan plan(std::size_t n_phi, std::size_t nsamples, std::size_t nblks, std::uint64_t seed) {
    SimulationPlan p;
    p.n_phi = n_phi;
    p.nsamples = nsamples;
    p.nblks = nblks;
    p.seed = seed;
    return p;
}

// max over diagonal elements of |rho_nn - truth_nn| / err_nn; elements with a
// zero error count only if they deviate at all.
double max_diag_z(const DensityMatrixEstimate& e, const ComplexMatrix& truth) {
    double z = 0;
    for (std::size_t n = 0; n < e.M; ++n) {
        const double diff = std::abs(e.rho(n, n).real() - truth(n, n).real());
        const double err = e.err_re(n, n);
        z = std::max(z, err > 0 ? diff / err : (diff > 0 ? INFINITY : 0.0));
    }
    return z;
}

double lambda_rel_error(const LambdaTable& a, const LambdaTable& b) {
    double diff = 0, scale = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        scale = std::max(scale, std::abs(b.values[i]));
    }
    return scale > 0 ? diff / scale : diff;
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "homodyne");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(int(argv.size()), argv.data(), out, err);
}

// 1. Biorthogonality of the pattern functions against oscillator states.
Outcome biorthogonality() {
    const auto t0 = Clock::now();
    PatternConfig c;
    c.cutoff = 64;
    const double e64 = oracle::biorthogonality_error(c, 8, 4097);
    c.cutoff = 128;
    const double e128 = oracle::biorthogonality_error(c, 8, 4097);
    return {e64 < 1e-6 && e128 < 1e-6,
            fmt("max error %.3g (M=64), %.3g (M=128), d<=8, 4097 nodes, %.1f s", e64, e128, seconds_since(t0))};
}

// 2. Cat state alpha = 5 over a phase-count sweep.
Outcome phase_sweep() {
    const auto t0 = Clock::now();
    const std::size_t M = 64;
    const auto state = make_state({StateKind::cat, 5.0, {}}, M);
    const auto truth = density_matrix(state);
    const std::size_t phis[] = {20, 50, 100, 200};
    int inversions = 0;
    double worst_z = 0;
    std::string sums;
    for (std::uint64_t seed : {1, 2, 3}) {
        std::vector<double> dev;
        for (std::size_t n_phi : phis) {
            const auto r = run_experiment(state, plan(n_phi, 1000, 100, seed), recon(M, 400, std::min(M, n_phi)));
            dev.push_back(r.diagnostics.diag_abs_dev);
            if (n_phi == 200) worst_z = std::max(worst_z, max_diag_z(r.estimate, truth));
        }
        for (std::size_t i = 1; i < dev.size(); ++i)
            if (dev[i] >= dev[i - 1]) ++inversions;
        sums += fmt(" seed %d: %.4f %.4f %.4f %.4f;", int(seed), dev[0], dev[1], dev[2], dev[3]);
    }
    return {worst_z < 5 && inversions <= 1,
            fmt("n_phi=200 max diagonal z %.2f; %d inversion(s) in summed |diag error| over n_phi 20/50/100/200;",
                worst_z, inversions) +
                sums + fmt(" %.0f s", seconds_since(t0))};
}

// 3. Cat state alpha = 5, many phases, few samples, bin-count sweep.
Outcome bin_sweep() {
    const auto t0 = Clock::now();
    const std::size_t M = 64;
    const auto state = make_state({StateKind::cat, 5.0, {}}, M);
    const auto truth = density_matrix(state);
    const auto ds = simulate(state, plan(800, 100, 10, 4));
    bool ok = true;
    std::string detail;
    for (std::size_t nb : {50, 200, 800, 3200}) {
        const auto e = reconstruct(ds, recon(M, nb));
        const auto chk = check_normalization(e);
        const double z = max_diag_z(e, truth);
        ok = ok && chk.compatible && (nb < 800 || z < 5);
        detail += fmt("n_bin %zu: trace %.4f+-%.4f, diag z %.2f; ", nb, chk.trace, chk.trace_err, z);
    }
    return {ok, detail + fmt("%.0f s", seconds_since(t0))};
}

// 4. Superposition of two high Fock states at full scale; scaled variant
// only if the full run misses its time budget.
Outcome high_fock() {
    auto attempt = [](std::size_t a, std::size_t b, std::size_t M, std::size_t n_phi, std::size_t n_bin) {
        const auto t0 = Clock::now();
        const auto state = make_state({StateKind::fock_superposition, 0, {a, b}}, M);
        const auto r = run_experiment(state, plan(n_phi, 1000, 10, 5), recon(M, n_bin));
        const double secs = seconds_since(t0);
        const auto& e = r.estimate;
        const double za = (e.rho(a, a).real() - 0.5) / e.err_re(a, a);
        const double zb = (e.rho(b, b).real() - 0.5) / e.err_re(b, b);
        const bool ok = std::abs(za) < 5 && std::abs(zb) < 5;
        return std::tuple{ok, secs,
                          fmt("|%zu>+|%zu>, M=%zu, n_phi=%zu, %zu bins: rho_%zu=%.5f+-%.5f (z %.2f), rho_%zu=%.5f+-%.5f (z %.2f), %.0f s",
                              a, b, M, n_phi, n_bin, a, e.rho(a, a).real(), e.err_re(a, a), za, b,
                              e.rho(b, b).real(), e.err_re(b, b), zb, secs)};
    };
    auto [ok, secs, detail] = attempt(600, 700, 800, 1600, 8000);
    if (secs <= 30 * 60) return {ok, "full scale " + detail};
    auto [ok2, secs2, detail2] = attempt(150, 175, 200, 400, 2000);
    return {ok2 && secs2 <= 5 * 60, "full scale over budget (" + detail + "); scaled " + detail2};
}

// 5. Lambda tables: recurrences against the direct formula and each other,
// and Wigner functions of Fock states against the closed form.
Outcome wigner_methods() {
    const auto t0 = Clock::now();
    double e24 = 0, e64 = 0, efock = 0;
    for (int k = 0; k <= 48; ++k) {
        const double x = 96.0 * k / 48;
        const auto d = lambda_direct(x, 24);
        e24 = std::max({e24, lambda_rel_error(lambda_method1(x, 24), d), lambda_rel_error(lambda_method2(x, 24), d)});
    }
    for (int k = 0; k <= 128; ++k) {
        const double x = 256.0 * k / 128;
        e64 = std::max(e64, lambda_rel_error(lambda_method2(x, 64), lambda_method1(x, 64)));
    }
    std::vector<double> r;
    for (int k = 0; k <= 40; ++k) r.push_back(0.075 * k);
    const std::vector<double> theta{0.0, 1.3, 4.0};
    for (unsigned n : {0u, 1u, 5u}) {
        ComplexMatrix rho(8, 8);
        rho(n, n) = 1.0;
        const auto dd = DiagonalDensityMatrix::from_matrix(rho);
        for (auto m : {LambdaMethod::direct, LambdaMethod::recurrence1, LambdaMethod::recurrence2}) {
            const auto g = wigner_polar(dd, r, theta, m);
            for (std::size_t i = 0; i < r.size(); ++i)
                for (std::size_t j = 0; j < theta.size(); ++j)
                    efock = std::max(efock, std::abs(g.W(i, j) - oracle::fock_wigner(n, r[i])) / (2 / std::numbers::pi));
        }
    }
    return {e24 < 1e-10 && e64 < 1e-8 && efock < 1e-8,
            fmt("M=24 vs direct %.2e, M=64 method 1 vs 2 %.2e (x in [0, 4M]), Fock n=0,1,5 %.2e, %.1f s", e24, e64,
                efock, seconds_since(t0))};
}

// 6. M = 1024 in double precision; single precision fails loudly.
Outcome stability() {
    const auto t0 = Clock::now();
    const std::size_t M = 1024;
    bool ok = true;
    std::string detail;

    PatternConfig pc;
    pc.cutoff = M;
    const double xb = safe_region_bound(M);
    std::size_t nonfinite = 0, points = 0;
    for (int k = 0; k <= 256; ++k) {
        double x = -xb + 2 * xb * k / 256;
        if (k == 256) x = std::nextafter(xb, 0.0);
        const auto ws = make_workspace<double>(x, pc);
        ++points;
        bool fin = all_finite(std::vector<double>(ws.u.begin(), ws.u.end())) &&
                   all_finite(std::vector<double>(ws.v.begin(), ws.v.end())) &&
                   all_finite(std::vector<double>(ws.u_tilde.begin(), ws.u_tilde.end())) &&
                   all_finite(std::vector<double>(ws.v_tilde.begin(), ws.v_tilde.end()));
        for (std::size_t d = 0; d < M && fin; ++d) fin = all_finite(pattern_row<double>(ws, d));
        if (!fin) ++nonfinite;
    }
    ok = ok && nonfinite == 0;
    detail += fmt("workspaces+patterns at %zu x in the safe region: %zu non-finite; ", points, nonfinite);

    // x = 4 r^2 up to the default grid edge r = sqrt(M). Recurrence 2 amplifies
    // rounding beyond what quad precision absorbs at this M; it must refuse
    // rather than return a table.
    std::size_t m1_bad = 0, m2_bad = 0, m2_refused = 0;
    for (int k = 0; k <= 32; ++k) {
        const double x = 4.0 * M * k / 32;
        if (!all_finite(lambda_method1(x, M).values)) ++m1_bad;
        try {
            if (!all_finite(lambda_method2(x, M).values)) ++m2_bad;
        } catch (const NumericalError&) {
            ++m2_refused;
        }
    }
    ok = ok && m1_bad == 0 && m2_bad == 0;
    detail += fmt("lambda x in [0, 4M], 33 points: method 1 non-finite %zu, method 2 non-finite %zu, "
                  "refused as unstable %zu; ",
                  m1_bad, m2_bad, m2_refused);

    // single precision: every workspace is finite or raises
    pc.precision = Precision::float32;
    std::size_t f_raised = 0, f_bad = 0;
    for (int k = 0; k <= 64; ++k) {
        const double x = -xb + 2 * xb * k / 64;
        try {
            const auto ws = make_workspace<float>(x, pc);
            for (std::size_t d = 0; d < M; d += 31)
                for (float f : pattern_row<float>(ws, d))
                    if (!std::isfinite(f)) {
                        ++f_bad;
                        break;
                    }
        } catch (const NumericalError&) {
            ++f_raised;
        }
    }
    ok = ok && f_bad == 0 && f_raised > 0;
    detail += fmt("single precision: %zu of 65 x raised, %zu silent non-finite; ", f_raised, f_bad);

    const fs::path dir = fs::temp_directory_path() / "homodyne_acceptance_single";
    fs::remove_all(dir);
    int sim = run_cli({"simulate", "-M", "200", "--state", "coherent", "--alpha", "12", "--n_phi", "1024",
                       "--nsamples", "2", "--seed", "6", "-o", (dir / "s").string()});
    int single = run_cli({"reconstruct", "-M", "1024", "--precision", "single", "-i", (dir / "s/samples.csv").string(),
                          "-o", (dir / "r1").string()});
    const bool no_output = !fs::exists(dir / "r1/rho_re.csv");
    int dbl = run_cli({"reconstruct", "-M", "1024", "-i", (dir / "s/samples.csv").string(), "-o", (dir / "r2").string()});
    bool dbl_finite = false;
    if (dbl == 0) {
        const auto e = io::read_density(dir / "r2");
        dbl_finite = true;
        for (const auto& z : e.rho.values()) dbl_finite = dbl_finite && std::isfinite(z.real()) && std::isfinite(z.imag());
    }
    fs::remove_all(dir);
    ok = ok && sim == 0 && single == cli::kNumerical && no_output && dbl == 0 && dbl_finite;
    detail += fmt("CLI M=1024 single exit %d (no output: %s), double exit %d finite %s; %.0f s", single,
                  no_output ? "yes" : "no", dbl, dbl_finite ? "yes" : "no", seconds_since(t0));
    return {ok, detail};
}

// 7. Fine binning reproduces the unbinned estimate; per-sample errors match
// block errors.
Outcome estimator_agreement() {
    const auto t0 = Clock::now();
    const std::size_t M = 12;
    const auto ds = simulate(make_state({StateKind::coherent, {0.9, -0.6}, {}}, M), plan(16, 2000, 1, 7));
    auto bc = recon(M, 10000);
    auto uc = bc;
    uc.estimator = EstimatorKind::unbinned;
    const auto b = reconstruct(ds, bc);
    const auto u = reconstruct(ds, uc);
    double worst = 0;
    for (std::size_t i = 0; i < M * M; ++i) {
        const auto d = b.rho.values()[i] - u.rho.values()[i];
        const double er = u.err_re.values()[i], ei = u.err_im.values()[i];
        if (er > 0) worst = std::max(worst, std::abs(d.real()) / er);
        if (ei > 0) worst = std::max(worst, std::abs(d.imag()) / ei);
    }

    // vacuum: per-sample errors on the pooled data vs 50-block errors
    const std::size_t Mv = 8;
    auto vac = simulate(make_state({}, Mv), plan(8, 400, 50, 8));
    const auto blocks = reconstruct(vac, recon(Mv, 400));
    double lo = INFINITY, hi = 0;
    for (auto kind : {EstimatorKind::binned, EstimatorKind::unbinned}) {
        QuadratureDataset pooled = vac;
        pooled.nblks = 1;
        for (auto& s : pooled.samples) s.block = 0;
        auto c = recon(Mv, 400);
        c.estimator = kind;
        const auto per = reconstruct(pooled, c);
        const auto& ref = kind == EstimatorKind::binned ? blocks : reconstruct(vac, c);
        for (std::size_t i = 0; i < Mv * Mv; ++i)
            for (auto [a, r] : {std::pair{per.err_re.values()[i], ref.err_re.values()[i]},
                                std::pair{per.err_im.values()[i], ref.err_im.values()[i]}}) {
                if (a == 0 && r == 0) continue;
                const double q = r > 0 ? a / r : INFINITY;
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
    }
    return {worst < 0.2 && lo >= 0.5 && hi <= 2.0,
            fmt("binned(1e4 bins) vs unbinned max |diff|/err %.3f; per-sample/block error ratio in [%.3f, %.3f]; %.1f s",
                worst, lo, hi, seconds_since(t0))};
}

// 8. The property suite as its own process.
Outcome property_suite() {
    const auto t0 = Clock::now();
    const std::string cmd = std::string(HOMODYNE_PROPERTY_TESTS) + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const double secs = seconds_since(t0);
    const bool ok = status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    return {ok && secs < 60, fmt("exit %d in %.2f s", WIFEXITED(status) ? WEXITSTATUS(status) : -1, secs)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"biorthogonality", biorthogonality},
        {"phase-count sweep", phase_sweep},
        {"bin-count sweep", bin_sweep},
        {"high Fock superposition", high_fock},
        {"Wigner lambda methods", wigner_methods},
        {"stability at M=1024", stability},
        {"estimator agreement", estimator_agreement},
        {"property suite", property_suite},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!pick.empty() && !pick.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %d %s: %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
