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

// Plain CSV files, LF line endings, shortest round-trip doubles. Every file
// opens with one metadata line:
//   # homodyne-csv v1; kind=<kind>; key=value; ...

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homodyne/dataset.hpp"
#include "homodyne/estimate.hpp"
#include "homodyne/matrix.hpp"
#include "homodyne/simulate.hpp"
#include "homodyne/wigner.hpp"

namespace homodyne::io {

inline constexpr const char* kConvention = "quadrature-vacuum-variance-1/4";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
/// Throws DataError mentioning `where`.
double parse_double(std::string_view s, std::string_view where);

struct Metadata {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    const std::string* find(std::string_view key) const;
    /// Throws DataError when absent.
    const std::string& get(std::string_view key) const;
};

// Samples: columns phase_index,phase_radians,block,value.
void write_samples(std::ostream& os, const QuadratureDataset& ds);
QuadratureDataset read_samples(std::istream& is, std::string_view name = "samples");

// One real matrix per file, no header row.
void write_matrix(std::ostream& os, const RealMatrix& m, std::string_view part);
RealMatrix read_matrix(std::istream& is, std::string_view name = "matrix");

// Fock coefficients: columns n,re,im.
void write_state(std::ostream& os, const FockVector& s);
FockVector read_state(std::istream& is, std::string_view name = "state");

// First row "r/theta" then theta values; first column r.
void write_wigner(std::ostream& os, const WignerGrid& g, LambdaMethod method);
WignerGrid read_wigner(std::istream& is, std::string_view name = "wigner");

// First row "y/x" then x values; first column y.
void write_wigner_xy(std::ostream& os, std::span<const double> xs, std::span<const double> ys,
                     const RealMatrix& w);

/// rho_re.csv, rho_im.csv, err_re.csv, err_im.csv
void write_density(const std::filesystem::path& dir, const DensityMatrixEstimate& est);
/// rho and errors; meta left default.
DensityMatrixEstimate read_density(const std::filesystem::path& dir);

// File wrappers; open failures raise DataError naming the path.
void write_file(const std::filesystem::path& p, const std::string& content);
std::string read_file(const std::filesystem::path& p);

template <class Fn>
std::string to_string_with(Fn&& fn);

}  // namespace homodyne::io

#include <sstream>

template <class Fn>
std::string homodyne::io::to_string_with(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}
