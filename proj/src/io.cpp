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

#include "homodyne/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "homodyne/error.hpp"

namespace homodyne::io {
namespace {

constexpr std::string_view kMagic = "# homodyne-csv v1";

[[noreturn]] void fail(std::string_view name, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << name << ":" << line << ": " << what;
    throw DataError(os.str());
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t k = s.find(sep, start);
        out.push_back(s.substr(start, k == std::string_view::npos ? k : k - start));
        if (k == std::string_view::npos) break;
        start = k + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Line reader that tracks the 1-based line number.
struct Lines {
    std::istream& is;
    std::string_view name;
    std::size_t line = 0;
    std::string buf;

    bool next() {
        if (!std::getline(is, buf)) return false;
        ++line;
        if (!buf.empty() && buf.back() == '\r') buf.pop_back();
        return true;
    }
    [[noreturn]] void error(const std::string& what) const { fail(name, line, what); }
    double number(std::string_view s) const {
        std::ostringstream where;
        where << name << ":" << line;
        return parse_double(trim(s), where.str());
    }
    std::size_t integer(std::string_view s) const {
        s = trim(s);
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            error("expected a non-negative integer, got '" + std::string(s) + "'");
        return v;
    }
};

void write_header(std::ostream& os, std::string_view kind,
                  const std::vector<std::pair<std::string, std::string>>& fields) {
    os << kMagic << "; kind=" << kind;
    for (const auto& [k, v] : fields) os << "; " << k << "=" << v;
    os << '\n';
}

Metadata read_header(Lines& in, std::string_view expect_kind) {
    if (!in.next()) in.error("empty file");
    std::string_view s = in.buf;
    if (s.substr(0, kMagic.size()) != kMagic) in.error("missing '# homodyne-csv v1' header");
    Metadata m;
    auto parts = split(s.substr(kMagic.size()), ';');
    for (auto part : parts) {
        part = trim(part);
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) in.error("malformed header field '" + std::string(part) + "'");
        std::string key(part.substr(0, eq)), val(part.substr(eq + 1));
        if (key == "kind")
            m.kind = val;
        else
            m.fields.emplace_back(std::move(key), std::move(val));
    }
    if (m.kind != expect_kind)
        in.error("expected kind=" + std::string(expect_kind) + ", found kind=" + m.kind);
    return m;
}

std::vector<double> number_row(const Lines& in, std::string_view s) {
    std::vector<double> out;
    for (auto cell : split(s, ',')) out.push_back(in.number(cell));
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw DataError("cannot format number");
    return std::string(buf, p);
}

double parse_double(std::string_view s, std::string_view where) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw DataError(std::string(where) + ": expected a number, got '" + std::string(s) + "'");
    return v;
}

const std::string* Metadata::find(std::string_view key) const {
    for (const auto& [k, v] : fields)
        if (k == key) return &v;
    return nullptr;
}

const std::string& Metadata::get(std::string_view key) const {
    if (const auto* v = find(key)) return *v;
    throw DataError("metadata field '" + std::string(key) + "' missing");
}

void write_samples(std::ostream& os, const QuadratureDataset& ds) {
    write_header(os, "samples",
                 {{"convention", kConvention},
                  {"n_phi", std::to_string(ds.n_phi)},
                  {"nblks", std::to_string(ds.nblks)},
                  {"gridded", ds.gridded ? "1" : "0"},
                  {"generator", ds.generator}});
    os << "phase_index,phase_radians,block,value\n";
    for (const auto& s : ds.samples)
        os << s.phase_index << ',' << format_double(s.phase) << ',' << s.block << ','
           << format_double(s.value) << '\n';
}

QuadratureDataset read_samples(std::istream& is, std::string_view name) {
    Lines in{is, name, 0, {}};
    const Metadata m = read_header(in, "samples");
    QuadratureDataset ds;
    ds.n_phi = in.integer(m.get("n_phi"));
    ds.nblks = in.integer(m.get("nblks"));
    ds.gridded = m.get("gridded") == "1";
    if (const auto* g = m.find("generator")) ds.generator = *g;
    if (!in.next() || in.buf != "phase_index,phase_radians,block,value")
        in.error("expected column header 'phase_index,phase_radians,block,value'");
    while (in.next()) {
        if (in.buf.empty()) continue;
        const auto cells = split(in.buf, ',');
        if (cells.size() != 4) in.error("expected 4 columns, found " + std::to_string(cells.size()));
        QuadratureSample s;
        const std::size_t j = in.integer(cells[0]), b = in.integer(cells[2]);
        if (j >= ds.n_phi) in.error("phase_index out of range");
        if (b >= ds.nblks) in.error("block out of range");
        s.phase_index = std::uint32_t(j);
        s.phase = in.number(cells[1]);
        s.block = std::uint32_t(b);
        s.value = in.number(cells[3]);
        ds.samples.push_back(s);
    }
    try {
        ds.validate();
    } catch (const DataError& e) {
        throw DataError(std::string(name) + ": " + e.what());
    }
    return ds;
}

void write_matrix(std::ostream& os, const RealMatrix& m, std::string_view part) {
    write_header(os, "matrix", {{"part", std::string(part)},
                                {"rows", std::to_string(m.rows())},
                                {"cols", std::to_string(m.cols())}});
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            os << format_double(m(r, c));
        }
        os << '\n';
    }
}

RealMatrix read_matrix(std::istream& is, std::string_view name) {
    Lines in{is, name, 0, {}};
    const Metadata m = read_header(in, "matrix");
    const std::size_t rows = in.integer(m.get("rows")), cols = in.integer(m.get("cols"));
    RealMatrix out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!in.next()) in.error("expected " + std::to_string(rows) + " rows");
        const auto v = number_row(in, in.buf);
        if (v.size() != cols)
            in.error("expected " + std::to_string(cols) + " columns, found " + std::to_string(v.size()));
        std::copy(v.begin(), v.end(), out.row(r).begin());
    }
    while (in.next())
        if (!in.buf.empty()) in.error("unexpected trailing data");
    return out;
}

void write_state(std::ostream& os, const FockVector& s) {
    write_header(os, "state", {{"M", std::to_string(s.M)}, {"deficit", format_double(s.deficit)}});
    os << "n,re,im\n";
    for (std::size_t n = 0; n < s.M; ++n)
        os << n << ',' << format_double(s.c[n].real()) << ',' << format_double(s.c[n].imag()) << '\n';
}

FockVector read_state(std::istream& is, std::string_view name) {
    Lines in{is, name, 0, {}};
    const Metadata m = read_header(in, "state");
    FockVector s;
    s.M = in.integer(m.get("M"));
    s.deficit = in.number(m.get("deficit"));
    s.c.assign(s.M, 0.0);
    if (!in.next() || in.buf != "n,re,im") in.error("expected column header 'n,re,im'");
    while (in.next()) {
        if (in.buf.empty()) continue;
        const auto cells = split(in.buf, ',');
        if (cells.size() != 3) in.error("expected 3 columns");
        const std::size_t n = in.integer(cells[0]);
        if (n >= s.M) in.error("level n >= M");
        s.c[n] = {in.number(cells[1]), in.number(cells[2])};
    }
    return s;
}

void write_wigner(std::ostream& os, const WignerGrid& g, LambdaMethod method) {
    write_header(os, "wigner", {{"method", std::string(method_name(method))},
                                {"n_r", std::to_string(g.r.size())},
                                {"n_theta", std::to_string(g.theta.size())}});
    os << "r/theta";
    for (double t : g.theta) os << ',' << format_double(t);
    os << '\n';
    for (std::size_t i = 0; i < g.r.size(); ++i) {
        os << format_double(g.r[i]);
        for (std::size_t j = 0; j < g.theta.size(); ++j) os << ',' << format_double(g.W(i, j));
        os << '\n';
    }
}

WignerGrid read_wigner(std::istream& is, std::string_view name) {
    Lines in{is, name, 0, {}};
    read_header(in, "wigner");
    if (!in.next()) in.error("missing theta row");
    auto head = split(in.buf, ',');
    if (head.empty() || head[0] != "r/theta") in.error("expected 'r/theta' in the first cell");
    WignerGrid g;
    for (std::size_t j = 1; j < head.size(); ++j) g.theta.push_back(in.number(head[j]));
    std::vector<double> body;
    while (in.next()) {
        if (in.buf.empty()) continue;
        const auto v = number_row(in, in.buf);
        if (v.size() != g.theta.size() + 1) in.error("row length differs from the theta row");
        g.r.push_back(v[0]);
        body.insert(body.end(), v.begin() + 1, v.end());
    }
    g.W = RealMatrix(g.r.size(), g.theta.size());
    std::copy(body.begin(), body.end(), g.W.data());
    return g;
}

void write_wigner_xy(std::ostream& os, std::span<const double> xs, std::span<const double> ys,
                     const RealMatrix& w) {
    write_header(os, "wigner_xy", {{"n_x", std::to_string(xs.size())}, {"n_y", std::to_string(ys.size())}});
    os << "y/x";
    for (double x : xs) os << ',' << format_double(x);
    os << '\n';
    for (std::size_t i = 0; i < ys.size(); ++i) {
        os << format_double(ys[i]);
        for (std::size_t j = 0; j < xs.size(); ++j) os << ',' << format_double(w(i, j));
        os << '\n';
    }
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot open " + p.string() + " for writing");
    f << content;
    if (!f) throw DataError("write failed: " + p.string());
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot open " + p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_density(const std::filesystem::path& dir, const DensityMatrixEstimate& est) {
    std::filesystem::create_directories(dir);
    RealMatrix re(est.M, est.M), im(est.M, est.M);
    for (std::size_t i = 0; i < est.M * est.M; ++i) {
        re.data()[i] = est.rho.data()[i].real();
        im.data()[i] = est.rho.data()[i].imag();
    }
    auto put = [&](const char* file, const RealMatrix& m, const char* part) {
        write_file(dir / file, to_string_with([&](std::ostream& os) { write_matrix(os, m, part); }));
    };
    put("rho_re.csv", re, "rho_re");
    put("rho_im.csv", im, "rho_im");
    put("err_re.csv", est.err_re, "err_re");
    put("err_im.csv", est.err_im, "err_im");
}

DensityMatrixEstimate read_density(const std::filesystem::path& dir) {
    auto get = [&](const char* file) {
        std::istringstream is(read_file(dir / file));
        return read_matrix(is, (dir / file).string());
    };
    const RealMatrix re = get("rho_re.csv"), im = get("rho_im.csv");
    if (re.rows() != re.cols() || im.rows() != re.rows() || im.cols() != re.cols())
        throw DataError("rho_re/rho_im shapes differ or are not square");
    DensityMatrixEstimate est;
    est.M = re.rows();
    est.rho = ComplexMatrix(est.M, est.M);
    for (std::size_t i = 0; i < est.M * est.M; ++i) est.rho.data()[i] = {re.data()[i], im.data()[i]};
    est.err_re = RealMatrix(est.M, est.M, 0.0);
    est.err_im = RealMatrix(est.M, est.M, 0.0);
    if (std::filesystem::exists(dir / "err_re.csv")) est.err_re = get("err_re.csv");
    if (std::filesystem::exists(dir / "err_im.csv")) est.err_im = get("err_im.csv");
    if (est.err_re.rows() != est.M || est.err_im.rows() != est.M)
        throw DataError("error matrices do not match rho");
    const auto chk = check_normalization(est);
    est.trace = chk.trace;
    est.trace_err = chk.trace_err;
    return est;
}

}  // namespace homodyne::io
