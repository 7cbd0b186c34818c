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

#include "homodyne/dataset.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "homodyne/error.hpp"

namespace homodyne {
namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kPhaseTol = 1e-9;

}  // namespace

double grid_phase(std::size_t j, std::size_t n) { return kTwoPi * double(j) / double(n); }

std::vector<double> QuadratureDataset::values() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.value);
    return out;
}

std::vector<std::size_t> QuadratureDataset::block_sizes() const {
    std::vector<std::size_t> sizes(nblks, 0);
    for (const auto& s : samples)
        if (s.block < nblks) ++sizes[s.block];
    return sizes;
}

QuadratureDataset QuadratureDataset::block(std::size_t b) const {
    if (b >= nblks) throw UsageError("block index out of range");
    QuadratureDataset out;
    out.n_phi = n_phi;
    out.gridded = gridded;
    out.generator = generator;
    for (const auto& s : samples)
        if (s.block == b) {
            out.samples.push_back(s);
            out.samples.back().block = 0;
        }
    return out;
}

void QuadratureDataset::validate() const {
    if (!samples.empty() && n_phi == 0) throw DataError("dataset has samples but n_phi = 0");
    if (nblks == 0) throw DataError("nblks must be at least 1");
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        auto fail = [k](const std::string& what) {
            std::ostringstream os;
            os << "sample " << k << ": " << what;
            throw DataError(os.str());
        };
        if (!std::isfinite(s.value)) fail("value is not finite");
        if (!(s.phase >= 0 && s.phase < kTwoPi)) fail("phase outside [0, 2pi)");
        if (s.phase_index >= n_phi) fail("phase_index >= n_phi");
        if (s.block >= nblks) fail("block >= nblks");
        if (gridded && std::abs(s.phase - grid_phase(s.phase_index, n_phi)) > kPhaseTol)
            fail("phase does not match 2 pi j / n_phi");
    }
}

QuadratureDataset double_by_symmetry(const QuadratureDataset& ds) {
    QuadratureDataset out;
    out.n_phi = 2 * ds.n_phi;
    out.nblks = ds.nblks;
    out.gridded = ds.gridded;
    out.generator = ds.generator;
    out.samples.reserve(2 * ds.samples.size());
    for (std::size_t k = 0; k < ds.samples.size(); ++k) {
        const auto& s = ds.samples[k];
        if (!(s.phase >= 0 && s.phase < std::numbers::pi))
            throw DataError("double_by_symmetry: sample " + std::to_string(k) +
                            " has a phase outside [0, pi)");
        if (ds.gridded &&
            std::abs(s.phase - std::numbers::pi * s.phase_index / double(ds.n_phi)) > kPhaseTol)
            throw DataError("double_by_symmetry: sample " + std::to_string(k) +
                            " is off the half-range grid pi j / n_phi");
        out.samples.push_back(s);
        QuadratureSample m = s;
        m.phase = s.phase + std::numbers::pi;
        m.value = -s.value;
        m.phase_index = static_cast<std::uint32_t>(s.phase_index + ds.n_phi);
        if (ds.gridded) m.phase = grid_phase(m.phase_index, out.n_phi);
        out.samples.push_back(m);
    }
    return out;
}

}  // namespace homodyne
