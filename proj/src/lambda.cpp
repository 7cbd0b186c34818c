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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "homodyne/error.hpp"
#include "homodyne/wigner.hpp"

namespace homodyne {
namespace {

namespace mp = boost::multiprecision;
using Quad = mp::cpp_bin_float_quad;

constexpr int kStep = 256;

void check_args(double x, std::size_t M) {
    if (M < 1) throw UsageError("lambda table needs M >= 1");
    if (!(x >= 0) || !std::isfinite(x)) throw UsageError("lambda table needs finite x >= 0");
}

LambdaTable empty_table(double x, std::size_t M, LambdaMethod m) {
    LambdaTable t;
    t.x = x;
    t.M = M;
    t.method = m;
    t.values.assign(LambdaTable::offset(M, M), 0.0);
    return t;
}

void require_finite(const LambdaTable& t) {
    for (double v : t.values)
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << method_name(t.method) << " lambda table is not finite at x=" << t.x;
            throw NumericalError(os.str());
        }
}

// Row 0 as mantissa/exponent pairs: lambda_{0,d} = z x^{d/2} / sqrt(d!).
void first_row(double x, std::size_t M, std::vector<double>& mant, std::vector<int>& ex) {
    mant.assign(M, 0.0);
    ex.assign(M, 0);
    const double y = -x / (2 * std::numbers::ln2);
    const double k = std::floor(y);
    int e = 0;
    double m = std::frexp(4 / std::numbers::pi * std::exp2(y - k), &e);
    e += static_cast<int>(k);
    mant[0] = m;
    ex[0] = e;
    for (std::size_t d = 1; d < M; ++d) {
        int de = 0;
        m = std::frexp(m * std::sqrt(x / double(d)), &de);
        e += de;
        mant[d] = m;
        ex[d] = e;
    }
}

// a'_{n,d} lambda_{n-1,d} - b'_{n,d} lambda_{n-2,d} down column d with a running
// exponent; seeds are lambda_{0,d}, lambda_{1,d}.
void column_recurrence(double x, std::size_t M, std::size_t d, double m0, int e,
                       double* out) {
    const std::size_t len = M - d;
    double a = m0;  // lambda_{n-2}
    out[0] = std::ldexp(a, e);
    if (len == 1) return;
    double b = (1.0 + double(d) - x) / std::sqrt(double(d) + 1.0) * m0;  // lambda_{n-1}
    out[1] = std::ldexp(b, e);
    for (std::size_t n = 2; n < len; ++n) {
        const double nn = double(n), dd = double(d);
        const double ap = (2 * nn + dd - x - 1) / std::sqrt(nn * (nn + dd));
        const double bp = std::sqrt((nn - 1) * (nn + dd - 1) / (nn * (nn + dd)));
        const double c = ap * b - bp * a;
        a = b;
        b = c;
        out[n] = std::ldexp(c, e);
        const double mag = std::max(std::abs(a), std::abs(b));
        if (mag > 0x1p256) {
            a = std::ldexp(a, -kStep);
            b = std::ldexp(b, -kStep);
            e += kStep;
        } else if (mag != 0 && mag < 0x1p-256) {
            a = std::ldexp(a, kStep);
            b = std::ldexp(b, kStep);
            e -= kStep;
        }
    }
}

// Method 2 in precision W. Returns the propagated error bound relative to
// max|lambda|.
template <class W>
double method2_pass(double x, std::size_t M, std::vector<double>& out) {
    using std::abs;
    using std::exp;
    using std::sqrt;
    const W eps = W(std::numeric_limits<W>::epsilon());
    const W xw = W(x);
    const W sx = sqrt(xw);
    std::vector<W> prev(M), cur(M), eprev(M), ecur(M);

    // Column 0 by the Laguerre recurrence.
    W zw = W(4) / boost::math::constants::pi<W>() * exp(-xw / 2);
    if constexpr (std::is_same_v<W, double>) zw = lambda_z(x);
    prev[0] = zw;
    if (M > 1) prev[1] = (W(1) - xw) * zw;
    for (std::size_t n = 2; n < M; ++n) {
        const W nn = W(n);
        prev[n] = ((2 * nn - xw - 1) * prev[n - 1] - (nn - 1) * prev[n - 2]) / nn;
    }
    W colmax = 0;
    for (std::size_t n = 0; n < M; ++n) {
        colmax = std::max<W>(colmax, abs(prev[n]));
        eprev[n] = W(4 * (n + 1)) * eps * colmax;
    }
    W tmax = colmax;
    W emax = *std::max_element(eprev.begin(), eprev.end());
    for (std::size_t n = 0; n < M; ++n) out[n] = static_cast<double>(prev[n]);

    W row0 = zw, erow0 = eps * zw;
    for (std::size_t d = 1; d < M; ++d) {
        const std::size_t len = M - d;
        row0 *= sqrt(xw / W(d));
        erow0 = erow0 * sqrt(xw / W(d)) + 2 * eps * abs(row0);
        cur[0] = row0;
        ecur[0] = erow0;
        for (std::size_t n = 1; n < len; ++n) {
            const W sn = sqrt(W(n));
            const W inv = 1 / sqrt(W(n + d));
            cur[n] = (sn * cur[n - 1] + sx * prev[n]) * inv;
            ecur[n] = (sn * ecur[n - 1] + sx * eprev[n]) * inv + 4 * eps * abs(cur[n]);
        }
        double* dst = out.data() + LambdaTable::offset(M, d);
        for (std::size_t n = 0; n < len; ++n) {
            dst[n] = static_cast<double>(cur[n]);
            tmax = std::max<W>(tmax, abs(cur[n]));
            emax = std::max<W>(emax, ecur[n]);
        }
        std::swap(prev, cur);
        std::swap(eprev, ecur);
    }
    if (tmax == 0) return 0.0;
    return static_cast<double>(emax / tmax);
}

template <class F>
void lambda_direct_impl(double x, std::size_t M, LambdaTable& t) {
    const F xf = F(x);
    const F four_pi = F(4) / boost::math::constants::pi<F>();
    const F damp = exp(-xf / 2);
    const F logx = x > 0 ? log(xf) : F(0);
    for (std::size_t d = 0; d < M; ++d)
        for (std::size_t n = 0; n + d < M; ++n) {
            if (x == 0) {
                t.at(n, d) = d == 0 ? static_cast<double>(four_pi) : 0.0;
                continue;
            }
            // sqrt(n!/(n+d)!) x^{d/2}; log(n!) - log((n+d)!) = -sum log j
            F logfac = 0;
            for (std::size_t j = n + 1; j <= n + d; ++j) logfac -= log(F(j));
            const F pre = four_pi * damp * exp(logfac / 2 + F(d) / 2 * logx);
            // L_n^d(x) = sum_k (-1)^k C(n+d, n-k) x^k / k!
            F term = 1;
            for (std::size_t j = 1; j <= n; ++j) term = term * F(d + j) / F(j);
            F sum = term;
            for (std::size_t k = 0; k < n; ++k) {
                term = -term * xf * F(n - k) / (F(k + 1) * F(d + k + 1));
                sum += term;
            }
            const double v = static_cast<double>(pre * sum);
            if (!std::isfinite(v)) throw NumericalError("direct lambda overflow");
            t.at(n, d) = v;
        }
}

}  // namespace

std::string_view method_name(LambdaMethod m) {
    switch (m) {
        case LambdaMethod::direct: return "direct";
        case LambdaMethod::recurrence1: return "recurrence1";
        case LambdaMethod::recurrence2: return "recurrence2";
    }
    return "unknown";
}

double lambda_z(double x) { return 4 / std::numbers::pi * std::exp(-x / 2); }

LambdaTable lambda_direct(double x, std::size_t M) {
    check_args(x, M);
    LambdaTable t = empty_table(x, M, LambdaMethod::direct);
    // The alternating Laguerre sum loses about x/ln(10) digits.
    if (x <= 46)
        lambda_direct_impl<mp::number<mp::cpp_bin_float<60>>>(x, M, t);
    else if (x <= 253)
        lambda_direct_impl<mp::number<mp::cpp_bin_float<150>>>(x, M, t);
    else if (x <= 598)
        lambda_direct_impl<mp::number<mp::cpp_bin_float<300>>>(x, M, t);
    else
        throw UsageError("direct lambda formula is limited to x <= 598");
    require_finite(t);
    return t;
}

LambdaTable lambda_method1(double x, std::size_t M) {
    check_args(x, M);
    LambdaTable t = empty_table(x, M, LambdaMethod::recurrence1);
    std::vector<double> mant;
    std::vector<int> ex;
    first_row(x, M, mant, ex);
    for (std::size_t d = 0; d < M; ++d)
        column_recurrence(x, M, d, mant[d], ex[d], t.values.data() + LambdaTable::offset(M, d));
    require_finite(t);
    return t;
}

LambdaTable lambda_method2(double x, std::size_t M, const Method2Options& opt) {
    check_args(x, M);
    LambdaTable t = empty_table(x, M, LambdaMethod::recurrence2);
    constexpr double kQuadEps = 1.925929944387235853e-34;  // 2^-112
    // z(x) leaves the normal double range near x = 1400; quad keeps the
    // exponent range the recurrence needs.
    double bound = std::numeric_limits<double>::infinity();
    if (x <= 1000) {
        bound = method2_pass<double>(x, M, t.values);
        if (bound <= opt.tolerance) {
            require_finite(t);
            return t;
        }
    }
    const bool quad_can = !std::isfinite(bound) ||
                          bound / std::numeric_limits<double>::epsilon() * kQuadEps <= opt.tolerance;
    if (opt.allow_quad && quad_can) {
        const double qb = method2_pass<Quad>(x, M, t.values);
        if (qb <= opt.tolerance) {
            t.extended_precision = true;
            require_finite(t);
            return t;
        }
        bound = qb;
    }
    std::ostringstream os;
    os << "lambda recurrence 2 is unstable at x=" << x << ", M=" << M
       << ": rounding error bound " << bound << " exceeds " << opt.tolerance
       << "; use recurrence 1";
    throw NumericalError(os.str());
}

LambdaTable lambda_table(double x, std::size_t M, LambdaMethod method, const Method2Options& opt) {
    switch (method) {
        case LambdaMethod::direct: return lambda_direct(x, M);
        case LambdaMethod::recurrence1: return lambda_method1(x, M);
        case LambdaMethod::recurrence2: return lambda_method2(x, M, opt);
    }
    throw UsageError("unknown lambda method");
}

}  // namespace homodyne
