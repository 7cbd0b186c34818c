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
#include <cstdint>
#include <string>
#include <vector>

namespace homodyne {

struct QuadratureSample {
    double phase = 0;  ///< radians in [0, 2pi)
    double value = 0;
    std::uint32_t phase_index = 0;
    std::uint32_t block = 0;

    bool operator==(const QuadratureSample&) const = default;
};

struct QuadratureDataset {
    std::vector<QuadratureSample> samples;
    std::size_t n_phi = 0;
    std::size_t nblks = 1;  ///< 1 means no block structure
    /// phase of a sample with phase_index j is 2 pi j / n_phi
    bool gridded = true;
    std::string generator;  ///< provenance note, e.g. the RNG name

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    std::vector<double> values() const;
    std::vector<std::size_t> block_sizes() const;
    /// Samples of block b, n_phi and grid flag preserved, nblks = 1.
    QuadratureDataset block(std::size_t b) const;

    /// Phase range, finite values, index bounds and (if gridded) phase/index
    /// consistency. Throws DataError naming the first offending sample.
    void validate() const;
};

/// 2 pi j / n
double grid_phase(std::size_t j, std::size_t n);

/// Each (phi, x) followed by (phi + pi, -x); needs every phase in [0, pi).
/// A gridded input (phase_index j at pi j / n_phi) stays gridded with 2 n_phi
/// phases, the mirror of index j landing at j + n_phi.
QuadratureDataset double_by_symmetry(const QuadratureDataset& ds);

}  // namespace homodyne
