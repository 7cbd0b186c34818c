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

#include "run_config.hpp"

#include <algorithm>
#include <set>

#include "homodyne/error.hpp"
#include "json.hpp"

namespace homodyne::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad_field(std::string_view key, std::string_view what) {
    throw UsageError("config field '" + std::string(key) + "': " + std::string(what));
}

std::size_t as_count(const json& v, std::string_view key) {
    if (!v.is_number_unsigned()) bad_field(key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

double as_number(const json& v, std::string_view key) {
    if (!v.is_number()) bad_field(key, "expected a number");
    return v.get<double>();
}

std::string as_string(const json& v, std::string_view key) {
    if (!v.is_string()) bad_field(key, "expected a string");
    return v.get<std::string>();
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + std::size_t(std::count(text.begin(), text.begin() + std::ptrdiff_t(byte), '\n'));
}

void apply_state(StateSpec& s, const json& j) {
    if (!j.is_object()) bad_field("state", "expected an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "kind") {
            s.kind = parse_state_kind(as_string(v, "state.kind"));
        } else if (k == "alpha") {
            if (v.is_number()) {
                s.alpha = v.get<double>();
            } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
                s.alpha = {v[0].get<double>(), v[1].get<double>()};
            } else {
                bad_field("state.alpha", "expected a number or [re, im]");
            }
        } else if (k == "levels") {
            if (!v.is_array() || v.empty()) bad_field("state.levels", "expected a non-empty array");
            s.levels.clear();
            for (const auto& e : v) s.levels.push_back(as_count(e, "state.levels"));
        } else {
            bad_field("state." + k, "unknown key");
        }
    }
}

}  // namespace

StateKind parse_state_kind(std::string_view s) {
    if (s == "fock") return StateKind::fock_superposition;
    if (s == "coherent") return StateKind::coherent;
    if (s == "cat") return StateKind::cat;
    throw UsageError("state kind must be fock, coherent or cat, got '" + std::string(s) + "'");
}

std::string_view state_kind_name(StateKind k) {
    switch (k) {
        case StateKind::fock_superposition: return "fock";
        case StateKind::coherent: return "coherent";
        case StateKind::cat: return "cat";
    }
    return "fock";
}

SimulationPlan RunConfig::plan() const {
    SimulationPlan p;
    p.nsamples = nsamples;
    p.nblks = nblks;
    p.n_phi = phases();
    p.seed = seed;
    p.n_x = n_x;
    return p;
}

ReconstructConfig RunConfig::reconstruct_config(std::size_t nbin) const {
    ReconstructConfig rc;
    rc.pattern.cutoff = M;
    rc.pattern.precision = precision;
    rc.beta = beta;
    rc.max_diagonal = max_diagonal;
    if (estimator == "binned")
        rc.estimator = EstimatorKind::binned;
    else if (estimator == "unbinned")
        rc.estimator = EstimatorKind::unbinned;
    else
        throw UsageError("estimator must be binned or unbinned, got '" + estimator + "'");
    if (bin_rule == "auto") rc.bin_rule = BinRule::automatic;
    else if (bin_rule == "center") rc.bin_rule = BinRule::center;
    else if (bin_rule == "average") rc.bin_rule = BinRule::average;
    else if (bin_rule == "corrected") rc.bin_rule = BinRule::corrected;
    else throw UsageError("bin_rule must be auto, center, average or corrected, got '" + bin_rule + "'");
    rc.n_bin = nbin;
    return rc;
}

LambdaMethod RunConfig::lambda_method() const {
    if (method == "1") return LambdaMethod::recurrence1;
    if (method == "2") return LambdaMethod::recurrence2;
    if (method == "direct") return LambdaMethod::direct;
    throw UsageError("method must be 1, 2 or direct, got '" + method + "'");
}

void apply_json(RunConfig& cfg, std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError("config line " + std::to_string(line_of(text, e.byte ? e.byte - 1 : 0)) +
                         ": malformed JSON");
    }
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    if (!j.contains("version")) bad_field("version", "required");
    if (j["version"] != kConfigVersion)
        bad_field("version", "unsupported, expected " + std::to_string(kConfigVersion));

    for (const auto& [k, v] : j.items()) {
        if (k == "version") continue;
        else if (k == "M") cfg.M = as_count(v, k);
        else if (k == "n_phi") cfg.n_phi = as_count(v, k);
        else if (k == "nsamples") cfg.nsamples = as_count(v, k);
        else if (k == "nblks") cfg.nblks = as_count(v, k);
        else if (k == "seed") cfg.seed = std::uint64_t(as_count(v, k));
        else if (k == "n_x") cfg.n_x = as_count(v, k);
        else if (k == "state") apply_state(cfg.state, v);
        else if (k == "n_bin") {
            cfg.n_bin.clear();
            if (v.is_array()) {
                if (v.empty()) bad_field(k, "expected a non-empty array");
                for (const auto& e : v) cfg.n_bin.push_back(as_count(e, k));
            } else {
                cfg.n_bin.push_back(as_count(v, k));
            }
        }
        else if (k == "estimator") cfg.estimator = as_string(v, k);
        else if (k == "bin_rule") cfg.bin_rule = as_string(v, k);
        else if (k == "beta") {
            if (v.is_string() && v.get<std::string>() == "auto") cfg.beta.reset();
            else cfg.beta = as_number(v, k);
        }
        else if (k == "max_diagonal") cfg.max_diagonal = as_count(v, k);
        else if (k == "method") {
            cfg.method = v.is_number_unsigned() ? std::to_string(v.get<unsigned>()) : as_string(v, k);
            cfg.lambda_method();
        }
        else if (k == "n_r") cfg.n_r = as_count(v, k);
        else if (k == "n_theta") cfg.n_theta = as_count(v, k);
        else if (k == "r_max") cfg.r_max = as_number(v, k);
        else if (k == "cartesian") cfg.cartesian = as_count(v, k);
        else if (k == "precision") {
            const auto p = as_string(v, k);
            if (p == "single") cfg.precision = Precision::float32;
            else if (p == "double") cfg.precision = Precision::float64;
            else bad_field(k, "expected single or double");
        }
        else if (k == "threads") cfg.threads = as_count(v, k);
        else if (k == "input") cfg.input = as_string(v, k);
        else if (k == "output") cfg.output = as_string(v, k);
        else if (k == "truth") cfg.truth = as_string(v, k);
        else bad_field(k, "unknown key");
    }
}

std::string to_json(const RunConfig& cfg) {
    json j;
    j["version"] = kConfigVersion;
    j["M"] = cfg.M;
    j["n_phi"] = cfg.n_phi;
    j["nsamples"] = cfg.nsamples;
    j["nblks"] = cfg.nblks;
    j["seed"] = cfg.seed;
    j["n_x"] = cfg.n_x;
    j["state"] = {{"kind", state_kind_name(cfg.state.kind)},
                  {"alpha", {cfg.state.alpha.real(), cfg.state.alpha.imag()}},
                  {"levels", cfg.state.levels}};
    j["n_bin"] = cfg.n_bin;
    j["estimator"] = cfg.estimator;
    j["bin_rule"] = cfg.bin_rule;
    if (cfg.beta) j["beta"] = *cfg.beta;
    else j["beta"] = "auto";
    j["max_diagonal"] = cfg.max_diagonal;
    j["method"] = cfg.method;
    j["n_r"] = cfg.n_r;
    j["n_theta"] = cfg.n_theta;
    if (cfg.r_max) j["r_max"] = *cfg.r_max;
    j["cartesian"] = cfg.cartesian;
    j["precision"] = cfg.precision == Precision::float32 ? "single" : "double";
    j["threads"] = cfg.threads;
    j["input"] = cfg.input;
    j["output"] = cfg.output;
    j["truth"] = cfg.truth;
    return j.dump(2) + "\n";
}

}  // namespace homodyne::cli
