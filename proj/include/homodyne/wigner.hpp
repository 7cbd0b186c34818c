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

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "homodyne/matrix.hpp"

namespace homodyne {

enum class LambdaMethod { direct, recurrence1, recurrence2 };

std::string_view method_name(LambdaMethod m);

/// z(x) = (4/pi) e^{-x/2}
double lambda_z(double x);

/// lambda_{n,d}(x), x = 4 r^2, for n <= M-d-1. Stored diagonal by diagonal so
/// that column d is contiguous.
struct LambdaTable {
    double x = 0;
    std::size_t M = 0;
    LambdaMethod method = LambdaMethod::recurrence1;
    std::vector<double> values;
    /// recurrence2 only: set when the table came from the quad-precision pass
    bool extended_precision = false;

    static std::size_t offset(std::size_t M, std::size_t d) { return d * M - d * (d - 1) / 2; }
    double operator()(std::size_t n, std::size_t d) const { return values[offset(M, d) + n]; }
    double& at(std::size_t n, std::size_t d) { return values[offset(M, d) + n]; }
    std::span<const double> column(std::size_t d) const {
        return {values.data() + offset(M, d), M - d};
    }
};

/// Closed form with log-factorial prefactor and the Laguerre sum carried in
/// multiprecision. Reference only: slow, and limited to x <= 598.
LambdaTable lambda_direct(double x, std::size_t M);

/// Rows 0 and 1 from the seeds, columns by the three-term Laguerre recurrence;
/// a running exponent per column keeps large x free of underflow.
LambdaTable lambda_method1(double x, std::size_t M);

struct Method2Options {
    /// Accepted bound on (propagated rounding error) / max|lambda|.
    double tolerance = 1e-12;
    /// Retry in quad precision when double misses the tolerance.
    bool allow_quad = true;
};

/// First row and first column as in method 1, interior by
/// lambda_{n,d} = (sqrt(n) lambda_{n-1,d} + sqrt(x) lambda_{n,d-1}) / sqrt(n+d).
/// The recurrence amplifies rounding error exponentially in M inside the
/// oscillatory region; a running error bound is propagated alongside and a
/// NumericalError raised when it cannot be met.
LambdaTable lambda_method2(double x, std::size_t M, const Method2Options& opt = {});

LambdaTable lambda_table(double x, std::size_t M, LambdaMethod method,
                         const Method2Options& opt = {});

/// rho_tilde_{n,d} = (-1)^n rho_{n,n+d}
struct DiagonalDensityMatrix {
    std::size_t M = 0;
    std::vector<std::vector<std::complex<double>>> diagonals;

    static DiagonalDensityMatrix from_matrix(const ComplexMatrix& rho);
    /// Upper triangle from the diagonals, lower by Hermitian conjugation.
    ComplexMatrix to_matrix() const;
};

struct WignerGrid {
    std::vector<double> r;
    std::vector<double> theta;
    RealMatrix W;  ///< r.size() x theta.size()
};

struct PolarGrid {
    std::vector<double> r, theta;
};

/// r_k = r_max k/(n_r-1), theta_j = 2 pi j/n_theta; r_max defaults to sqrt(M).
PolarGrid make_polar_grid(std::size_t M, std::size_t n_r, std::size_t n_theta,
                          std::optional<double> r_max = std::nullopt);

/// W(r, theta) = Re sum_d e^{i d theta}/(1 + delta_{d0}) sum_n lambda_{n,d}(4r^2) rho_tilde_{n,d}.
WignerGrid wigner_polar(const DiagonalDensityMatrix& rho, std::span<const double> r,
                        std::span<const double> theta, LambdaMethod method,
                        const Method2Options& opt = {});

/// Bilinear interpolation of a polar grid at Cartesian points (x, y), alpha =
/// x + i y. Points beyond the largest r are NaN-free zeros.
RealMatrix cartesian_resample(const WignerGrid& g, std::span<const double> xs,
                              std::span<const double> ys);

}  // namespace homodyne
