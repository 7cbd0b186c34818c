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

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "homodyne/error.hpp"
#include "homodyne/io.hpp"

using namespace homodyne;

TEST_CASE("shortest round-trip number formatting") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(g) * std::pow(10.0, double(i % 40) - 20);
        CHECK(io::parse_double(io::format_double(v), "t") == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(-2.0) == "-2");
    CHECK(io::parse_double(io::format_double(std::numeric_limits<double>::denorm_min()), "t") ==
          std::numeric_limits<double>::denorm_min());
    CHECK_THROWS_AS(io::parse_double("1.5x", "t"), DataError);
    CHECK_THROWS_AS(io::parse_double("", "t"), DataError);
    CHECK_THROWS_AS(io::parse_double("1,5", "t"), DataError);
}

TEST_CASE("samples CSV round trip") {
    QuadratureDataset ds;
    ds.n_phi = 3;
    ds.nblks = 2;
    ds.generator = "unit test";
    std::mt19937_64 g(1);
    std::normal_distribution<double> nd;
    for (std::uint32_t b = 0; b < 2; ++b)
        for (std::uint32_t j = 0; j < 3; ++j) ds.samples.push_back({grid_phase(j, 3), nd(g), j, b});
    const std::string a = io::to_string_with([&](std::ostream& os) { io::write_samples(os, ds); });
    std::istringstream is(a);
    const auto back = io::read_samples(is);
    CHECK(back.samples == ds.samples);
    CHECK(back.n_phi == 3);
    CHECK(back.nblks == 2);
    CHECK(back.generator == "unit test");
    const std::string b = io::to_string_with([&](std::ostream& os) { io::write_samples(os, back); });
    CHECK(a == b);
    CHECK(a.find('\r') == std::string::npos);
    CHECK(a.find("phase_index,phase_radians,block,value\n") != std::string::npos);
}

TEST_CASE("samples CSV errors carry line numbers") {
    const std::string head = "# homodyne-csv v1; kind=samples; n_phi=2; nblks=1; gridded=1\n"
                             "phase_index,phase_radians,block,value\n";
    auto fails_at = [](const std::string& text, const std::string& where) {
        std::istringstream is(text);
        try {
            io::read_samples(is, "f.csv");
            return false;
        } catch (const DataError& e) {
            return std::string(e.what()).find(where) != std::string::npos;
        }
    };
    CHECK(fails_at(head + "0,0,0,0.5\n1,3.14159,0,abc\n", "f.csv:4"));
    CHECK(fails_at(head + "0,0,0\n", "f.csv:3"));
    CHECK(fails_at(head + "5,0,0,0.1\n", "f.csv:3"));
    CHECK(fails_at("phase_index,phase_radians,block,value\n", "f.csv:1"));
    CHECK(fails_at("# homodyne-csv v1; kind=matrix; rows=1; cols=1\n1\n", "kind=samples"));
    // phase inconsistent with the grid
    CHECK(fails_at(head + "1,0.5,0,0.1\n", "f.csv"));
}

TEST_CASE("matrix CSV round trip") {
    RealMatrix m(3, 4);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = std::sin(double(i) * 1.7) * 1e-3;
    const std::string a = io::to_string_with([&](std::ostream& os) { io::write_matrix(os, m, "rho_re"); });
    std::istringstream is(a);
    const auto back = io::read_matrix(is);
    CHECK(back == m);
    CHECK(io::to_string_with([&](std::ostream& os) { io::write_matrix(os, back, "rho_re"); }) == a);

    std::istringstream bad("# homodyne-csv v1; kind=matrix; rows=2; cols=2\n1,2\n3\n");
    CHECK_THROWS_AS(io::read_matrix(bad), DataError);
}

TEST_CASE("state CSV round trip") {
    FockVector s;
    s.M = 4;
    s.c = {{0.5, 0}, {0, -0.5}, {0.5, 0.1}, {0, 0}};
    s.deficit = 1e-9;
    const std::string a = io::to_string_with([&](std::ostream& os) { io::write_state(os, s); });
    std::istringstream is(a);
    const auto back = io::read_state(is);
    CHECK(back.c == s.c);
    CHECK(back.deficit == s.deficit);
    CHECK(io::to_string_with([&](std::ostream& os) { io::write_state(os, back); }) == a);
}

TEST_CASE("Wigner CSV round trip") {
    WignerGrid g;
    g.r = {0, 0.5, 1};
    g.theta = {0, 2.0943951023931953, 4.1887902047863905};
    g.W = RealMatrix(3, 3);
    for (std::size_t i = 0; i < 9; ++i) g.W.data()[i] = 0.1 * double(i) - 0.3;
    const std::string a = io::to_string_with([&](std::ostream& os) { io::write_wigner(os, g, LambdaMethod::recurrence1); });
    CHECK(a.find("\nr/theta,0,2.0943951023931953,4.1887902047863905\n") != std::string::npos);
    std::istringstream is(a);
    const auto back = io::read_wigner(is);
    CHECK(back.r == g.r);
    CHECK(back.theta == g.theta);
    CHECK(back.W == g.W);
    CHECK(io::to_string_with([&](std::ostream& os) { io::write_wigner(os, back, LambdaMethod::recurrence1); }) == a);
}

TEST_CASE("density directory round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "homodyne_io_test";
    std::filesystem::remove_all(dir);
    DensityMatrixEstimate e;
    e.M = 2;
    e.rho = ComplexMatrix(2, 2);
    e.rho(0, 0) = 0.75;
    e.rho(1, 1) = 0.25;
    e.rho(0, 1) = {0.1, -0.2};
    e.rho(1, 0) = {0.1, 0.2};
    e.err_re = RealMatrix(2, 2, 0.01);
    e.err_im = RealMatrix(2, 2, 0.02);
    io::write_density(dir, e);
    const auto back = io::read_density(dir);
    CHECK(back.rho == e.rho);
    CHECK(back.err_re == e.err_re);
    CHECK(back.err_im == e.err_im);
    CHECK(back.trace == 1.0);
    std::filesystem::remove(dir / "rho_im.csv");
    CHECK_THROWS_AS(io::read_density(dir), DataError);
    std::filesystem::remove_all(dir);
}
