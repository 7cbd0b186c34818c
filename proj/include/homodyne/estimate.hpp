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
#include <optional>
#include <string>
#include <string_view>

#include "homodyne/dataset.hpp"
#include "homodyne/matrix.hpp"
#include "homodyne/patterns.hpp"
#include "homodyne/sinogram.hpp"

namespace homodyne {

enum class EstimatorKind { binned, unbinned };

/// Value the binned estimator assigns to a bin of width w around c:
///   center     f(c)
///   average    (g(c + w/2) - g(c - w/2)) / w, the exact cell average of f
///   corrected  2 f(c) - average = f(c) - w^2 f''(c)/24 + O(w^4); cancels the
///              leading displacement bias when the density is locally linear
///   automatic  corrected when w resolves the fastest pattern oscillation,
///              w * 2 sqrt(4M + 2) <= pi, average otherwise
enum class BinRule { automatic, center, average, corrected };

std::string_view bin_rule_name(BinRule r);

/// The rule actually applied for cutoff M and bin width `width`.
BinRule resolve_bin_rule(BinRule r, std::size_t M, double width);

struct ReconstructConfig {
    /// cutoff, precision, seed and range policy; pattern.beta is ignored
    /// unless `beta` below is set.
    PatternConfig pattern;
    std::optional<double> beta;     ///< default exp(-3 max|x|) over the data
    std::size_t max_diagonal = 0;   ///< diagonals d < max_diagonal are estimated; 0 = M
    EstimatorKind estimator = EstimatorKind::binned;
    std::size_t n_bin = 400;        ///< binned estimator only
    BinRule bin_rule = BinRule::automatic;
    std::size_t chunk = 256;        ///< workspaces alive at once

    std::size_t diagonals() const;
};

struct EstimateMeta {
    std::string estimator;   ///< "binned" | "unbinned"
    std::string bin_rule;    ///< rule applied by the binned estimator; empty for unbinned
    std::string errors;      ///< "per-sample" | "block"
    std::size_t N = 0;
    std::size_t n_bin = 0;   ///< 0 for unbinned
    std::size_t n_blocks = 1;
    std::size_t n_diagonals = 0;
    double beta = 0;
};

/// rho Hermitian by construction; err_* are one standard error each.
/// Diagonals d >= meta.n_diagonals are left at zero.
struct DensityMatrixEstimate {
    std::size_t M = 0;
    ComplexMatrix rho;
    RealMatrix err_re, err_im;
    double trace = 0;
    double trace_err = 0;
    EstimateMeta meta;
};

struct NormalizationCheck {
    double trace = 0;
    double trace_err = 0;
    bool compatible = false;
};

NormalizationCheck check_normalization(const DensityMatrixEstimate& est);

/// rho_{n,n+d} = sum_i S_hat_{d,i} f_{n,n+d}(x_i), f taken per cfg.bin_rule. Errors are the per-sample
/// standard errors recovered from the binned second moments.
DensityMatrixEstimate estimate_binned(const PhaseSpectrum& spec, const ReconstructConfig& cfg);

/// rho_{n,m} = (1/N) sum_k e^{-i(m-n)phi_k} f_{n,m}(x_k) with per-sample
/// standard errors sqrt(s^2/N). N = 1 gives the point estimate, zero errors.
DensityMatrixEstimate estimate_unbinned(const QuadratureDataset& ds, const ReconstructConfig& cfg);

/// Estimate per block, mean over blocks, error = sd(block estimates)/sqrt(nblks).
/// The binned estimator bins every block on one grid built from all data.
DensityMatrixEstimate block_statistics(const QuadratureDataset& ds, const ReconstructConfig& cfg);

/// Blocks when ds.nblks >= 2, otherwise a single estimate with per-sample errors.
DensityMatrixEstimate reconstruct(const QuadratureDataset& ds, const ReconstructConfig& cfg);

}  // namespace homodyne
