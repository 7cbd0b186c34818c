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

#include "homodyne/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <type_traits>

#include "homodyne/error.hpp"
#include "homodyne/simd.hpp"

namespace homodyne {
namespace {

using std::numbers::pi;

// Renormalisation step for the running exponent: keeps mantissas well inside
// the range of T while a recurrence may still grow by a few hundred per step.
template <class T>
constexpr int kStep = std::is_same_v<T, float> ? 32 : 256;

template <class T>
void renormalise(T& a, T& b, int& e) {
    const T m = std::max(std::abs(a), std::abs(b));
    if (m > std::ldexp(T(1), kStep<T>)) {
        a = std::ldexp(a, -kStep<T>);
        b = std::ldexp(b, -kStep<T>);
        e += kStep<T>;
    } else if (m != T(0) && m < std::ldexp(T(1), -kStep<T>)) {
        a = std::ldexp(a, kStep<T>);
        b = std::ldexp(b, kStep<T>);
        e -= kStep<T>;
    }
}

template <class T>
const char* type_name() {
    return std::is_same_v<T, float> ? "single" : "double";
}

// Forward u recursion from u_0 = m0 * 2^e0, written into len entries.
template <class T>
void regular_raw(T x, double m0, int e0, std::size_t len, T* u, T* ut, int* ex) {
    T a = T(m0);
    int e = e0;
    u[0] = a;
    ut[0] = T(0);
    ex[0] = e;
    if (len == 1) return;
    T b = T(2) * x * a;
    u[1] = b;
    ut[1] = b;
    ex[1] = e;
    for (std::size_t n = 2; n < len; ++n) {
        const T t = T(2) * x * b - std::sqrt(T(n - 1)) * a;
        const T un = t / std::sqrt(T(n));
        u[n] = un;
        ut[n] = t;
        ex[n] = e;
        a = b;
        b = un;
        renormalise(a, b, e);
    }
}

struct Seed {
    double hi, lo;  // mantissas at K and K-1
    int exp;
};

// Normalises the larger mantissa into [0.5, 1).
Seed normalised(double hi, double lo, int e) {
    int k = 0;
    std::frexp(std::max(std::abs(hi), std::abs(lo)), &k);
    return {std::ldexp(hi, -k), std::ldexp(lo, -k), e + k};
}

Seed semiclassical_pair(double x, std::size_t K, double beta) {
    // beta^{-1} e^{-x^2} = (r / m0) 2^{k - e0}
    int e0 = 0;
    const double m0 = std::frexp(beta, &e0);
    const double y = -x * x / std::numbers::ln2;
    const double k = std::floor(y);
    const double r = std::exp2(y - k);
    return normalised(semiclassical_kappa(K, x) * r / m0,
                      semiclassical_kappa(K - 1, x) * r / m0,
                      static_cast<int>(k) - e0);
}

// Solution of the backward recursion at K, K-1 that carries no admixture of
// the regular solution, scaled so that sqrt(m+1)(u_m v_{m+1} - u_{m+1} v_m) = -2.
Seed matched_pair(double x, std::size_t K, double beta) {
    std::vector<double> p(K + 1), pt(K + 1);
    std::vector<int> pe(K + 1);
    regular_raw<double>(x, 0.5, 1, K + 1, p.data(), pt.data(), pe.data());
    const double p1 = p[K];
    const double p0 = std::ldexp(p[K - 1], pe[K - 1] - pe[K]);
    const int ep = pe[K];

    auto phase = [x](std::size_t m, double& P, double& A) {
        const SemiclassicalSeed s = semiclassical_seed(m, x);
        P = 0.5 * s.alpha * s.alpha * s.chi + pi / 4;
        A = 1.0 / std::sqrt(s.alpha * std::sin(s.tau));
    };
    double P1, A1, P0, A0;
    phase(K, P1, A1);
    phase(K - 1, P0, A0);
    const double rho = A0 / A1;
    // u ~ R A cos(P + delta): match the ratio u_{K-1}/u_K.
    const double a = p0 * std::cos(P1) - rho * p1 * std::cos(P0);
    const double b = p0 * std::sin(P1) - rho * p1 * std::sin(P0);
    double delta = std::atan2(a, b);
    if (delta > pi / 2) delta -= pi;
    if (delta <= -pi / 2) delta += pi;
    const double w1 = A1 * std::sin(P1 + delta);
    const double w0 = A0 * std::sin(P0 + delta);

    int e0 = 0;
    const double m0 = std::frexp(beta, &e0);
    const double det = p0 * w1 - p1 * w0;
    if (!std::isfinite(det) || det == 0.0)
        throw NumericalError("irregular seed: degenerate Casoratian at x=" + std::to_string(x));
    const double s = -2.0 / (std::sqrt(double(K)) * m0 * det);
    // u values carry 2^{ep} (from p) and 2^{e0} (beta); v carries the inverse.
    return normalised(w1 * s, w0 * s, -ep - e0);
}

template <class T>
bool fold(std::vector<T>& a, std::vector<T>& at, const std::vector<int>& ex,
          std::size_t& bad) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ex[i] == 0) continue;
        const T va = std::ldexp(a[i], ex[i]);
        const T vt = std::ldexp(at[i], ex[i]);
        const bool ok = std::isfinite(va) && std::isfinite(vt) &&
                        (a[i] == T(0) || std::isnormal(va)) &&
                        (at[i] == T(0) || std::isnormal(vt));
        if (!ok) {
            bad = i;
            return false;
        }
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::ldexp(a[i], ex[i]);
        at[i] = std::ldexp(at[i], ex[i]);
    }
    return true;
}

template <class T>
void check_finite(const std::vector<T>& a, const std::vector<T>& at, const char* what,
                  double x) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(at[i])) {
            std::ostringstream os;
            os << what << " sequence is not finite at index " << i << " (x=" << x << ")";
            throw NumericalError(os.str());
        }
    }
}

// Settles the exponent vector: dropped if all zero, folded if representable,
// otherwise kept (extended) or reported (scaled).
template <class T>
void settle(std::vector<T>& a, std::vector<T>& at, std::vector<int>& ex, bool extended,
            bool regular, double x, double beta) {
    check_finite(a, at, regular ? "regular" : "irregular", x);
    if (std::all_of(ex.begin(), ex.end(), [](int e) { return e == 0; })) {
        ex.clear();
        return;
    }
    std::size_t bad = 0;
    if (fold(a, at, ex, bad)) {
        ex.clear();
        return;
    }
    if (extended) return;
    const double mag = std::abs(double(a[bad] != T(0) ? a[bad] : at[bad]));
    const bool overflow = std::log2(mag) + ex[bad] > 0;
    const bool larger_beta = regular ? !overflow : overflow;
    std::ostringstream os;
    os << (regular ? "regular" : "irregular") << " sequence " << (overflow ? "overflows" : "underflows")
       << " " << type_name<T>() << " precision at index " << bad << " (x=" << x
       << ", beta=" << beta << "); use a " << (larger_beta ? "larger" : "smaller") << " beta";
    throw NumericalError(os.str());
}

}  // namespace

void PatternConfig::validate() const {
    if (cutoff < 1) throw UsageError("cutoff M must be at least 1");
    if (!(beta > 0) || !std::isfinite(beta) || !std::isnormal(beta))
        throw UsageError("beta must be positive, finite and normal");
    if (seed_depth < 2) throw UsageError("seed_depth must be at least 2");
    if (!(forward_floor > 0) || !std::isfinite(forward_floor))
        throw UsageError("forward_floor must be positive");
}

std::size_t PatternConfig::seed_index() const {
    const std::size_t k = std::max(seed_depth * cutoff, cutoff + 2);
    return seed == SeedMode::matched ? std::max(k, min_seed_index) : k;
}

bool PatternConfig::extended_for(Precision p) const {
    switch (range) {
        case RangeMode::scaled: return false;
        case RangeMode::extended: return true;
        case RangeMode::automatic: return p == Precision::float64;
    }
    return false;
}

double choose_beta(std::span<const double> xs) {
    if (xs.empty()) throw UsageError("choose_beta: empty input");
    double m = 0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return std::exp(-3.0 * m);
}

double safe_region_bound(std::size_t M, std::size_t seed_depth) {
    const double a = std::sqrt(double(seed_depth * M) + 0.5);
    return a - 0.5 * std::pow(a, -1.0 / 3.0);
}

bool in_safe_region(double x, std::size_t M, std::size_t seed_depth) {
    return std::abs(x) < safe_region_bound(M, seed_depth);
}

SemiclassicalSeed semiclassical_seed(std::size_t m, double x) {
    SemiclassicalSeed s;
    s.m = m;
    s.alpha = std::sqrt(double(m) + 0.5);
    if (!(std::abs(x) < s.alpha))
        throw UsageError("semiclassical seed needs |x| < alpha_m (m=" + std::to_string(m) +
                         ", x=" + std::to_string(x) + ")");
    s.tau = std::acos(x / s.alpha);
    s.chi = std::sin(2 * s.tau) - 2 * s.tau;
    s.kappa = std::pow(8 * pi, 0.25) / std::sqrt(s.alpha * std::sin(s.tau)) *
              std::sin(0.5 * s.alpha * s.alpha * s.chi + pi / 4);
    return s;
}

double semiclassical_kappa(std::size_t m, double x) { return semiclassical_seed(m, x).kappa; }

template <class T>
RegularSequence<T> regular_sequence(double x, const PatternConfig& cfg) {
    cfg.validate();
    const std::size_t len = cfg.cutoff + 2;
    RegularSequence<T> r;
    r.u.resize(len);
    r.u_tilde.resize(len);
    r.exp.resize(len);
    int e0 = 0;
    const double m0 = std::frexp(cfg.beta, &e0);
    regular_raw<T>(T(x), m0, e0, len, r.u.data(), r.u_tilde.data(), r.exp.data());
    constexpr Precision p = std::is_same_v<T, float> ? Precision::float32 : Precision::float64;
    settle(r.u, r.u_tilde, r.exp, cfg.extended_for(p), true, x, cfg.beta);
    return r;
}

template <class T>
IrregularSequence<T> irregular_sequence(double x, const PatternConfig& cfg) {
    cfg.validate();
    const std::size_t M = cfg.cutoff;
    const std::size_t len = M + 2;
    IrregularSequence<T> s;
    s.v.resize(len);
    s.v_tilde.resize(len);
    s.exp.resize(len);
    const T xt = T(x);

    if (in_safe_region(x, M, cfg.seed_depth)) {
        s.region = Region::backward;
        const std::size_t K = cfg.seed_index();
        const Seed seed = cfg.seed == SeedMode::matched ? matched_pair(x, K, cfg.beta)
                                                        : semiclassical_pair(x, K, cfg.beta);
        T a = T(seed.hi), b = T(seed.lo);
        int e = seed.exp;
        if (K - 1 < len) {
            s.v[K - 1] = b;
            s.exp[K - 1] = e;
        }
        for (std::size_t m = K - 1; m-- > 0;) {
            const T t = (T(2) * xt * b - std::sqrt(T(m + 2)) * a) / std::sqrt(T(m + 1));
            a = b;
            b = t;
            if (m < len) {
                s.v[m] = t;
                s.exp[m] = e;
            }
            renormalise(a, b, e);
        }
    } else {
        s.region = Region::forward;
        if (std::abs(x) < cfg.forward_floor)
            throw NumericalError("forward irregular recursion at |x| below the floor (x=" +
                                 std::to_string(x) + ")");
        int e0 = 0;
        const double m0 = std::frexp(cfg.beta, &e0);
        int k = 0;
        const double v0 = std::frexp(1.0 / (m0 * x), &k);
        T b = T(v0);
        int e = k - e0;
        s.v[0] = b;
        s.exp[0] = e;
        for (std::size_t m = 1; m < len; ++m) {
            b = std::sqrt(T(m)) / (T(2) * xt) * b;
            T dummy = b;
            renormalise(dummy, b, e);
            s.v[m] = b;
            s.exp[m] = e;
        }
    }
    for (std::size_t m = 0; m < len; ++m) s.v_tilde[m] = std::sqrt(T(m)) * s.v[m];
    constexpr Precision p = std::is_same_v<T, float> ? Precision::float32 : Precision::float64;
    settle(s.v, s.v_tilde, s.exp, cfg.extended_for(p), false, x, cfg.beta);
    return s;
}

template <class T>
double PatternWorkspace<T>::u_value(std::size_t n) const {
    return u_exp.empty() ? double(u[n]) : std::ldexp(double(u[n]), u_exp[n]);
}

template <class T>
double PatternWorkspace<T>::v_value(std::size_t m) const {
    return v_exp.empty() ? double(v[m]) : std::ldexp(double(v[m]), v_exp[m]);
}

template <class T>
PatternWorkspace<T> make_workspace(double x, const PatternConfig& cfg) {
    if (!std::isfinite(x)) throw DataError("quadrature value is not finite");
    auto r = regular_sequence<T>(x, cfg);
    auto s = irregular_sequence<T>(x, cfg);
    PatternWorkspace<T> ws;
    ws.x = x;
    ws.cutoff = cfg.cutoff;
    ws.region = s.region;
    ws.u = std::move(r.u);
    ws.u_tilde = std::move(r.u_tilde);
    ws.v = std::move(s.v);
    ws.v_tilde = std::move(s.v_tilde);
    // A mixed workspace keeps both exponent vectors so the slow path can index
    // either side uniformly.
    if (!r.exp.empty() || !s.exp.empty()) {
        ws.u_exp = r.exp.empty() ? std::vector<int>(ws.u.size(), 0) : std::move(r.exp);
        ws.v_exp = s.exp.empty() ? std::vector<int>(ws.v.size(), 0) : std::move(s.exp);
    }
    return ws;
}

template <class T>
void pattern_row(const PatternWorkspace<T>& ws, std::size_t d, std::span<T> out) {
    const std::size_t M = ws.cutoff;
    if (d >= M) throw UsageError("pattern_row: diagonal index out of range");
    const std::size_t n = M - d;
    if (out.size() < n) throw UsageError("pattern_row: output span too short");
    const T two_x = T(2) * T(ws.x);
    if (ws.plain()) {
        const auto& k = simd::active_kernels();
        if constexpr (std::is_same_v<T, double>)
            k.pattern_row_f64(two_x, ws.u.data(), ws.u_tilde.data() + 1, ws.v.data() + d,
                              ws.v_tilde.data() + d + 1, out.data(), n);
        else
            k.pattern_row_f32(two_x, ws.u.data(), ws.u_tilde.data() + 1, ws.v.data() + d,
                              ws.v_tilde.data() + d + 1, out.data(), n);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = i + d;
        const int eu = ws.u_exp[i];
        const T br = two_x * ws.u[i] - std::ldexp(ws.u_tilde[i + 1], ws.u_exp[i + 1] - eu);
        const T t1 = std::ldexp(br * ws.v[m], eu + ws.v_exp[m]);
        const T t2 = std::ldexp(ws.u[i] * ws.v_tilde[m + 1], eu + ws.v_exp[m + 1]);
        out[i] = t1 - t2;
    }
}

template <class T>
std::vector<T> pattern_row(const PatternWorkspace<T>& ws, std::size_t d) {
    if (d >= ws.cutoff) throw UsageError("pattern_row: diagonal index out of range");
    std::vector<T> out(ws.cutoff - d);
    pattern_row<T>(ws, d, std::span<T>(out));
    return out;
}

template <class T>
double pattern_value(const PatternWorkspace<T>& ws, std::size_t n, std::size_t m) {
    if (n > m) std::swap(n, m);
    if (m >= ws.cutoff) throw UsageError("pattern_value: index out of range");
    const double two_x = 2.0 * ws.x;
    if (ws.plain()) {
        return (two_x * ws.u[n] - ws.u_tilde[n + 1]) * ws.v[m] -
               double(ws.u[n]) * ws.v_tilde[m + 1];
    }
    const int eu = ws.u_exp[n];
    const double br = two_x * ws.u[n] - std::ldexp(double(ws.u_tilde[n + 1]), ws.u_exp[n + 1] - eu);
    return std::ldexp(br * ws.v[m], eu + ws.v_exp[m]) -
           std::ldexp(double(ws.u[n]) * ws.v_tilde[m + 1], eu + ws.v_exp[m + 1]);
}

template <class T>
double pattern_primitive(const PatternWorkspace<T>& ws, std::size_t n, std::size_t m) {
    if (n > m || m >= ws.cutoff) throw UsageError("pattern_primitive: need n <= m < M");
    // the seeds here make the Casoratian -2, hence the 1/2
    if (ws.plain()) return 0.5 * double(ws.u[n]) * ws.v[m];
    return std::ldexp(double(ws.u[n]) * ws.v[m], ws.u_exp[n] + ws.v_exp[m] - 1);
}

template <class T>
void primitive_row(const PatternWorkspace<T>& ws, std::size_t d, std::span<T> out) {
    const std::size_t M = ws.cutoff;
    if (d >= M) throw UsageError("primitive_row: diagonal index out of range");
    const std::size_t n = M - d;
    if (out.size() < n) throw UsageError("primitive_row: output span too short");
    if (ws.plain()) {
        for (std::size_t i = 0; i < n; ++i) out[i] = T(0.5) * ws.u[i] * ws.v[i + d];
        return;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::ldexp(ws.u[i] * ws.v[i + d], ws.u_exp[i] + ws.v_exp[i + d] - 1);
}

#define HOMODYNE_INSTANTIATE(T)                                                          \
    template RegularSequence<T> regular_sequence<T>(double, const PatternConfig&);       \
    template IrregularSequence<T> irregular_sequence<T>(double, const PatternConfig&);   \
    template struct PatternWorkspace<T>;                                                 \
    template PatternWorkspace<T> make_workspace<T>(double, const PatternConfig&);        \
    template void pattern_row<T>(const PatternWorkspace<T>&, std::size_t, std::span<T>); \
    template std::vector<T> pattern_row<T>(const PatternWorkspace<T>&, std::size_t);     \
    template double pattern_value<T>(const PatternWorkspace<T>&, std::size_t, std::size_t); \
    template void primitive_row<T>(const PatternWorkspace<T>&, std::size_t, std::span<T>); \
    template double pattern_primitive<T>(const PatternWorkspace<T>&, std::size_t, std::size_t);

HOMODYNE_INSTANTIATE(float)
HOMODYNE_INSTANTIATE(double)

#undef HOMODYNE_INSTANTIATE

}  // namespace homodyne
