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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "homodyne/dataset.hpp"
#include "homodyne/estimate.hpp"
#include "homodyne/matrix.hpp"

namespace homodyne {

enum class StateKind { fock_superposition, coherent, cat };

struct StateSpec {
    StateKind kind = StateKind::fock_superposition;
    std::complex<double> alpha = 0;    ///< coherent and cat
    std::vector<std::size_t> levels{0};  ///< fock_superposition, equal weights
};

/// Pure state truncated to n < M. `deficit` = 1 - sum|c_n|^2.
struct FockVector {
    std::size_t M = 0;
    std::vector<std::complex<double>> c;
    double deficit = 0;
    std::string warning;  ///< set when 1e-6 < deficit <= 1e-2
};

/// coherent: e^{-|a|^2/2} a^n / sqrt(n!); cat: (|a> + |-a>) / sqrt(2(1 + e^{-2|a|^2}));
/// Throws UsageError when the truncation deficit exceeds 1e-2.
FockVector make_state(const StateSpec& spec, std::size_t M);

ComplexMatrix density_matrix(const FockVector& s);

/// Highest index with a nonzero coefficient.
std::size_t support_max(const FockVector& s);

struct MarginalTable {
    std::vector<double> phases;
    std::vector<double> x;
    RealMatrix p;  ///< phases.size() x x.size(), rows integrate to 1

    std::size_t n_phi() const noexcept { return phases.size(); }
};

/// psi_n(x) for n in `levels` at each x; convention psi_0 = (2/pi)^{1/4} e^{-x^2}.
/// Row k holds the values at x[k].
RealMatrix oscillator_functions(std::span<const double> x, std::span<const std::size_t> levels);

/// Symmetric grid to sqrt(n_max + 1/2) + 3 with >= min_points nodes and about
/// 64 nodes per shortest density oscillation.
std::vector<double> default_x_grid(const FockVector& s, std::size_t min_points = 2048);

/// p_phi(x) = |sum_n c_n e^{-i n phi} psi_n(x)|^2 evaluated row by row; keeps
/// only the support's psi values.
class MarginalModel {
public:
    MarginalModel(const FockVector& s, std::vector<double> x);
    const std::vector<double>& x() const noexcept { return x_; }
    /// Renormalised row; throws DataError when the raw mass is below 0.999.
    void row(double phase, std::span<double> out) const;

private:
    std::vector<double> x_;
    std::vector<std::size_t> levels_;
    std::vector<std::complex<double>> coeff_;
    RealMatrix psi_;
    double norm2_ = 1;
};

MarginalTable marginals(const FockVector& s, std::span<const double> phases,
                        std::span<const double> x);

struct SimulationPlan {
    std::size_t nsamples = 1000;  ///< per block and phase
    std::size_t nblks = 1;
    std::size_t n_phi = 1;
    std::uint64_t seed = 0;
    std::size_t n_x = 0;  ///< x grid nodes; 0 = default_x_grid

    std::size_t total() const noexcept { return nsamples * nblks * n_phi; }
    void validate() const;
};

/// RNG provenance recorded in dataset metadata.
inline constexpr const char* kGeneratorName = "mt19937_64 per phase, seeded splitmix64(seed, phase)";

/// Inverse-CDF sampling with a density linear inside each grid cell. Phase j
/// uses its own stream, so the result does not depend on the thread count.
QuadratureDataset sample(const MarginalTable& table, const SimulationPlan& plan);

/// Same as sample(marginals(...)) but streams one marginal row per phase.
QuadratureDataset simulate(const FockVector& s, const SimulationPlan& plan);

struct ExperimentDiagnostics {
    double max_z = 0;       ///< max |rho_est - rho_true| / err over estimated elements
    double max_z_diag = 0;  ///< same, diagonal only
    double max_abs_dev = 0;
    double diag_abs_dev = 0;  ///< sum_n |rho_nn - true_nn|
    NormalizationCheck normalization;
};

ExperimentDiagnostics compare_to_truth(const DensityMatrixEstimate& est, const ComplexMatrix& truth);

struct ExperimentResult {
    DensityMatrixEstimate estimate;
    ExperimentDiagnostics diagnostics;
};

/// state -> marginals -> samples -> bin -> DFT -> estimate -> diagnostics.
ExperimentResult run_experiment(const FockVector& s, const SimulationPlan& plan,
                                const ReconstructConfig& cfg);

}  // namespace homodyne
