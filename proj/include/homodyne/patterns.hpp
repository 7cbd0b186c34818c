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
#include <span>
#include <vector>

namespace homodyne {

enum class Precision { float32, float64 };

/// How the backward irregular recursion is started.
///  matched       - semiclassical phase fitted against the exact regular
///                  solution at the seed index, amplitude fixed by the
///                  Casoratian; the default.
///  semiclassical - raw kappa_K, kappa_{K-1} pair.
enum class SeedMode { matched, semiclassical };

/// scaled keeps every stored value a plain floating-point number and raises
/// NumericalError when beta cannot keep it in range. extended stores a binary
/// exponent next to each value when needed. automatic = extended for double,
/// scaled for float.
enum class RangeMode { automatic, scaled, extended };

enum class Region { backward, forward };

struct PatternConfig {
    std::size_t cutoff = 1;  ///< M
    double beta = 1.0;
    Precision precision = Precision::float64;
    SeedMode seed = SeedMode::matched;
    RangeMode range = RangeMode::automatic;
    std::size_t seed_depth = 4;   ///< backward seed index K = seed_depth * M
    std::size_t min_seed_index = 256;  ///< matched seeds start no lower than this
    double forward_floor = 1e-3;  ///< forward branch refuses |x| below this

    /// Throws UsageError.
    void validate() const;
    std::size_t seed_index() const;
    bool extended_for(Precision p) const;
};

/// exp(-3 max|x|). Throws UsageError on empty input.
double choose_beta(std::span<const double> xs);

/// alpha_K - alpha_K^{-1/3}/2 with alpha_K = sqrt(K + 1/2), K = 4M.
double safe_region_bound(std::size_t M, std::size_t seed_depth = 4);
bool in_safe_region(double x, std::size_t M, std::size_t seed_depth = 4);

struct SemiclassicalSeed {
    std::size_t m = 0;
    double alpha = 0;
    double tau = 0;
    double chi = 0;
    double kappa = 0;
};

/// Throws UsageError when |x| >= alpha_m.
SemiclassicalSeed semiclassical_seed(std::size_t m, double x);
double semiclassical_kappa(std::size_t m, double x);

/// u, u_tilde for n = 0..M+1. When exp is non-empty the value at n is
/// u[n] * 2^exp[n] (u_tilde shares the exponent).
template <class T>
struct RegularSequence {
    std::vector<T> u, u_tilde;
    std::vector<int> exp;
};

template <class T>
struct IrregularSequence {
    std::vector<T> v, v_tilde;
    std::vector<int> exp;
    Region region = Region::backward;
};

template <class T>
RegularSequence<T> regular_sequence(double x, const PatternConfig& cfg);

template <class T>
IrregularSequence<T> irregular_sequence(double x, const PatternConfig& cfg);

template <class T>
struct PatternWorkspace {
    double x = 0;
    std::size_t cutoff = 0;
    Region region = Region::backward;
    std::vector<T> u, u_tilde, v, v_tilde;
    std::vector<int> u_exp, v_exp;  ///< empty when values are plain

    bool plain() const noexcept { return u_exp.empty() && v_exp.empty(); }
    /// Values with the exponent applied (may overflow to inf in extended mode).
    double u_value(std::size_t n) const;
    double v_value(std::size_t m) const;
};

/// Immutable once built; a pure function of (x, cfg).
template <class T>
PatternWorkspace<T> make_workspace(double x, const PatternConfig& cfg);

/// f_{n,n+d}(x) for n = 0..M-d-1 into out (size >= M-d).
template <class T>
void pattern_row(const PatternWorkspace<T>& ws, std::size_t d, std::span<T> out);

template <class T>
std::vector<T> pattern_row(const PatternWorkspace<T>& ws, std::size_t d);

/// f_{n,m}(x); served from f_{min,max}.
template <class T>
double pattern_value(const PatternWorkspace<T>& ws, std::size_t n, std::size_t m);

/// g_{n,m}(x) = u_n v_m / 2 with beta cancelled, n <= m, so that f = dg/dx.
/// g_{n,n+d} for n < M-d, see pattern_primitive.
template <class T>
void primitive_row(const PatternWorkspace<T>& ws, std::size_t d, std::span<T> out);

template <class T>
double pattern_primitive(const PatternWorkspace<T>& ws, std::size_t n, std::size_t m);

}  // namespace homodyne
