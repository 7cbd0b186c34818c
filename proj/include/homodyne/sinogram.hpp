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
#include <utility>
#include <vector>

#include "homodyne/dataset.hpp"
#include "homodyne/matrix.hpp"

namespace homodyne {

struct BinGrid {
    std::vector<double> edges;    ///< n_bin + 1, strictly increasing
    std::vector<double> centers;  ///< midpoints
    double width = 0;

    std::size_t size() const noexcept { return centers.size(); }
    /// Bin of x; a value on an interior edge goes right. Throws DataError
    /// outside [edges.front(), edges.back()].
    std::size_t locate(double x) const;
};

/// Equal-width bins. Default range is symmetric about 0 with the outermost
/// centers at +-max|x|.
BinGrid make_bin_grid(const QuadratureDataset& ds, std::size_t n_bin,
                      std::optional<std::pair<double, double>> range = std::nullopt);

struct Sinogram {
    std::size_t n_phi = 0;
    std::size_t n_bin = 0;
    RealMatrix freq;  ///< n_phi x n_bin, row j = fraction of phase j's samples per bin
    std::vector<double> bin_edges;
    std::vector<double> bin_centers;
    std::vector<std::size_t> counts;  ///< samples per phase
    std::size_t total = 0;
};

Sinogram bin(const QuadratureDataset& ds, std::size_t n_bin,
             std::optional<std::pair<double, double>> range = std::nullopt);

/// Bins the samples of one block (or all samples) on a fixed grid.
Sinogram bin(const QuadratureDataset& ds, const BinGrid& grid,
             std::optional<std::size_t> block = std::nullopt);

/// S_hat_{d,i} = (1/n_phi) sum_j S_{j,i} e^{-2 pi i j d / n_phi}. Only rows
/// d <= n_phi/2 are stored; at() serves the rest by conjugate symmetry.
struct PhaseSpectrum {
    std::size_t n_phi = 0;
    std::size_t n_bin = 0;
    ComplexMatrix half;  ///< (n_phi/2 + 1) x n_bin
    std::vector<double> bin_centers;
    double bin_width = 0;
    std::size_t total = 0;  ///< samples behind the sinogram

    std::complex<double> at(std::size_t d, std::size_t i) const {
        d %= n_phi;
        return 2 * d <= n_phi ? half(d, i) : std::conj(half(n_phi - d, i));
    }
};

PhaseSpectrum phase_dft(const Sinogram& s);

}  // namespace homodyne
