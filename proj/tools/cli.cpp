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

#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "homodyne/error.hpp"
#include "homodyne/io.hpp"
#include "homodyne/parallel.hpp"
#include "json.hpp"

namespace homodyne::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

fs::path output_dir(const RunConfig& cfg) {
    const fs::path dir = cfg.output.empty() ? fs::path(".") : fs::path(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void require_input(const RunConfig& cfg, std::string_view what) {
    if (cfg.input.empty()) throw UsageError(std::string(what) + " needs --input");
    if (!fs::exists(cfg.input)) throw DataError("input not found: " + cfg.input);
}

json meta_json(const EstimateMeta& m) {
    return {{"estimator", m.estimator}, {"bin_rule", m.bin_rule}, {"errors", m.errors},   {"N", m.N},
            {"n_bin", m.n_bin},         {"n_blocks", m.n_blocks}, {"n_diagonals", m.n_diagonals},
            {"beta", m.beta}};
}

ComplexMatrix truncated_truth(const FockVector& s, std::size_t M) {
    FockVector t = s;
    t.M = M;
    t.c.resize(M, 0.0);
    return density_matrix(t);
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    const FockVector state = make_state(cfg.state, cfg.M);
    if (!state.warning.empty()) log << "warning: " << state.warning << "\n";
    const SimulationPlan plan = cfg.plan();
    const QuadratureDataset ds = simulate(state, plan);

    const fs::path dir = output_dir(cfg);
    io::write_file(dir / "samples.csv", io::to_string_with([&](std::ostream& os) { io::write_samples(os, ds); }));
    io::write_file(dir / "state.csv", io::to_string_with([&](std::ostream& os) { io::write_state(os, state); }));
    json meta = {{"version", kConfigVersion},
                 {"convention", io::kConvention},
                 {"generator", ds.generator},
                 {"seed", plan.seed},
                 {"M", cfg.M},
                 {"n_phi", plan.n_phi},
                 {"nsamples", plan.nsamples},
                 {"nblks", plan.nblks},
                 {"count", ds.size()},
                 {"state", {{"kind", state_kind_name(cfg.state.kind)},
                            {"alpha", {cfg.state.alpha.real(), cfg.state.alpha.imag()}},
                            {"levels", cfg.state.levels}}},
                 {"truncation_deficit", state.deficit}};
    io::write_file(dir / "metadata.json", dump(meta));
    log << "wrote " << ds.size() << " samples to " << (dir / "samples.csv").string() << "\n";
}

void cmd_reconstruct(const RunConfig& cfg, std::ostream& log) {
    require_input(cfg, "reconstruct");
    std::istringstream is(io::read_file(cfg.input));
    const QuadratureDataset ds = io::read_samples(is, cfg.input);
    const fs::path root = output_dir(cfg);

    std::vector<std::size_t> nbins = cfg.n_bin;
    if (nbins.empty() || cfg.estimator == "unbinned") nbins = {nbins.empty() ? 400 : nbins.front()};
    for (std::size_t nb : nbins) {
        const ReconstructConfig rc = cfg.reconstruct_config(nb);
        const auto t0 = std::chrono::steady_clock::now();
        const DensityMatrixEstimate est = reconstruct(ds, rc);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const NormalizationCheck chk = check_normalization(est);

        const fs::path dir = nbins.size() > 1 ? root / ("nbin_" + std::to_string(nb)) : root;
        io::write_density(dir, est);
        json rep = {{"version", kConfigVersion},
                    {"M", est.M},
                    {"trace", chk.trace},
                    {"trace_err", chk.trace_err},
                    {"compatible", chk.compatible},
                    {"beta", est.meta.beta},
                    {"timing_seconds", secs},
                    {"precision", cfg.precision == Precision::float32 ? "single" : "double"},
                    {"meta", meta_json(est.meta)}};
        io::write_file(dir / "report.json", dump(rep));
        log << "n_bin=" << nb << " trace=" << chk.trace << " +- " << chk.trace_err
            << (chk.compatible ? " (compatible)" : " (NOT compatible)") << "\n";
    }
}

void cmd_wigner(const RunConfig& cfg, std::ostream& log) {
    require_input(cfg, "wigner");
    const DensityMatrixEstimate est = io::read_density(cfg.input);
    const auto rho = DiagonalDensityMatrix::from_matrix(est.rho);
    const PolarGrid pg = make_polar_grid(est.M, cfg.n_r, cfg.n_theta, cfg.r_max);
    const LambdaMethod method = cfg.lambda_method();
    const WignerGrid g = wigner_polar(rho, pg.r, pg.theta, method);

    const fs::path dir = output_dir(cfg);
    io::write_file(dir / "wigner.csv", io::to_string_with([&](std::ostream& os) { io::write_wigner(os, g, method); }));
    if (cfg.cartesian > 0) {
        const std::size_t n = cfg.cartesian;
        const double rmax = pg.r.back();
        std::vector<double> axis(n);
        for (std::size_t k = 0; k < n; ++k)
            axis[k] = n == 1 ? 0.0 : -rmax + 2 * rmax * double(k) / double(n - 1);
        const RealMatrix w = cartesian_resample(g, axis, axis);
        io::write_file(dir / "wigner_xy.csv",
                       io::to_string_with([&](std::ostream& os) { io::write_wigner_xy(os, axis, axis, w); }));
    }
    log << "wrote " << g.r.size() << "x" << g.theta.size() << " Wigner grid to "
        << (dir / "wigner.csv").string() << "\n";
}

void cmd_report(const RunConfig& cfg, std::ostream& out) {
    require_input(cfg, "report");
    const DensityMatrixEstimate est = io::read_density(cfg.input);
    const NormalizationCheck chk = check_normalization(est);
    json rep = {{"M", est.M}, {"trace", chk.trace}, {"trace_err", chk.trace_err}, {"compatible", chk.compatible}};
    if (!cfg.truth.empty()) {
        std::istringstream is(io::read_file(cfg.truth));
        const FockVector state = io::read_state(is, cfg.truth);
        const ExperimentDiagnostics d = compare_to_truth(est, truncated_truth(state, est.M));
        rep["truth"] = {{"max_z", d.max_z},
                        {"max_z_diag", d.max_z_diag},
                        {"max_abs_dev", d.max_abs_dev},
                        {"diag_abs_dev", d.diag_abs_dev}};
    }
    out << dump(rep);
    if (!cfg.output.empty()) io::write_file(output_dir(cfg) / "summary.json", dump(rep));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Homodyne tomography: simulate, reconstruct, synthesize Wigner functions"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path, precision = "double", beta = "auto", state_kind = "fock";
    double alpha_re = 0, alpha_im = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON RunConfig; its keys override flags");
        sub->add_option("--threads", cfg.threads, "worker cap, 0 = hardware");
        sub->add_option("--precision", precision, "single or double")
            ->check(CLI::IsMember({"single", "double"}));
        sub->add_option("-i,--input", cfg.input, "input file or directory");
        sub->add_option("-o,--output", cfg.output, "output directory");
    };
    auto cutoff = [&](CLI::App* sub) { sub->add_option("-M,--M", cfg.M, "Fock cutoff"); };

    auto* sim = app.add_subcommand("simulate", "sample quadratures of a known state");
    common(sim);
    cutoff(sim);
    sim->add_option("--state", state_kind, "fock, coherent or cat")->check(CLI::IsMember({"fock", "coherent", "cat"}));
    sim->add_option("--alpha", alpha_re, "coherent amplitude, real part");
    sim->add_option("--alpha_im", alpha_im, "coherent amplitude, imaginary part");
    sim->add_option("--levels", cfg.state.levels, "Fock levels of an equal-weight superposition")->delimiter(',');
    sim->add_option("--n_phi", cfg.n_phi, "phases, 0 = M");
    sim->add_option("--nsamples", cfg.nsamples, "samples per phase and block");
    sim->add_option("--nblks", cfg.nblks, "statistical blocks");
    sim->add_option("--seed", cfg.seed, "RNG seed");
    sim->add_option("--n_x", cfg.n_x, "marginal grid nodes, 0 = automatic");

    auto* rec = app.add_subcommand("reconstruct", "estimate the density matrix from samples");
    common(rec);
    cutoff(rec);
    rec->add_option("--n_bin", cfg.n_bin, "bins; a list writes one nbin_<n>/ set each")->delimiter(',');
    rec->add_option("--estimator", cfg.estimator, "binned or unbinned")->check(CLI::IsMember({"binned", "unbinned"}));
    rec->add_option("--bin_rule", cfg.bin_rule, "bin value: auto, center, average or corrected")
        ->check(CLI::IsMember({"auto", "center", "average", "corrected"}));
    rec->add_option("--beta", beta, "scaling parameter or auto");
    rec->add_option("--max_diagonal", cfg.max_diagonal, "estimate diagonals d < max_diagonal, 0 = all");

    auto* wig = app.add_subcommand("wigner", "Wigner function from density matrix files");
    common(wig);
    wig->add_option("--method", cfg.method, "1, 2 or direct")->check(CLI::IsMember({"1", "2", "direct"}));
    wig->add_option("--n_r", cfg.n_r, "radial nodes");
    wig->add_option("--n_theta", cfg.n_theta, "angular nodes");
    wig->add_option("--r_max", cfg.r_max, "largest radius, default sqrt(M)");
    wig->add_option("--cartesian", cfg.cartesian, "also write an n x n Cartesian grid");

    auto* rep = app.add_subcommand("report", "trace check and optional comparison to a true state");
    common(rep);
    rep->add_option("--truth", cfg.truth, "state CSV written by simulate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (rep->parsed() && rep->count("--output") == 0) cfg.output.clear();
        cfg.precision = precision == "single" ? Precision::float32 : Precision::float64;
        cfg.state.kind = parse_state_kind(state_kind);
        cfg.state.alpha = {alpha_re, alpha_im};
        if (beta != "auto") cfg.beta = io::parse_double(beta, "--beta");
        if (!config_path.empty()) apply_json(cfg, io::read_file(config_path));
        set_thread_count(cfg.threads);

        if (sim->parsed()) cmd_simulate(cfg, err);
        else if (rec->parsed()) cmd_reconstruct(cfg, err);
        else if (wig->parsed()) cmd_wigner(cfg, err);
        else cmd_report(cfg, out);
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
}

}  // namespace homodyne::cli
