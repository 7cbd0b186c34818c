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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homodyne/estimate.hpp"
#include "homodyne/patterns.hpp"
#include "homodyne/simulate.hpp"
#include "homodyne/wigner.hpp"

namespace homodyne::cli {

inline constexpr int kConfigVersion = 1;

/// Flat parameter set shared by all subcommands. Each subcommand reads the
/// keys it needs; the JSON form is
///   {"version": 1, "M": 64, "state": {"kind": "cat", "alpha": [5, 0]}, ...}
struct RunConfig {
    std::size_t M = 16;
    std::size_t n_phi = 0;  ///< 0 = M
    std::size_t nsamples = 1000;
    std::size_t nblks = 1;
    std::uint64_t seed = 0;
    std::size_t n_x = 0;
    StateSpec state;

    std::vector<std::size_t> n_bin{400};
    std::string estimator = "binned";
    std::string bin_rule = "auto";
    std::optional<double> beta;  ///< JSON "auto" or absent = data-driven
    std::size_t max_diagonal = 0;

    std::string method = "1";  ///< "1", "2" or "direct"
    std::size_t n_r = 101;
    std::size_t n_theta = 128;
    std::optional<double> r_max;
    std::size_t cartesian = 0;  ///< points per axis of the resampled grid; 0 = none

    Precision precision = Precision::float64;
    std::size_t threads = 0;
    std::string input;
    std::string output = ".";
    std::string truth;  ///< report: optional state CSV

    std::size_t phases() const { return n_phi ? n_phi : M; }
    SimulationPlan plan() const;
    ReconstructConfig reconstruct_config(std::size_t nbin) const;
    LambdaMethod lambda_method() const;
};

/// Overwrites the fields present in `json_text`. Syntax errors report the
/// line; bad or unknown keys report the field. Throws UsageError.
void apply_json(RunConfig& cfg, std::string_view json_text);

std::string to_json(const RunConfig& cfg);

StateKind parse_state_kind(std::string_view s);
std::string_view state_kind_name(StateKind k);

}  // namespace homodyne::cli
