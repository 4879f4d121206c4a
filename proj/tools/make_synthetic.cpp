// Copyright 2026 The QFL-HEP Authors
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
// Writes a seeded SUSY-shaped CSV for smoke runs without the real archive.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qfl/app/checkpoint.hpp"
#include "qfl/error.hpp"
#include "qfl/testing/synthetic.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Seeded SUSY-shaped toy data (label first, 18 features)",
                 "qfl-make-synthetic"};
    std::size_t rows = 2500;
    std::uint64_t seed = 1;
    double separation = 0.6;
    std::string out;
    app.add_option("--rows", rows, "number of events")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--separation", separation, "signal shift in standard deviations");
    app.add_option("--out", out, "output CSV path")->required();
    CLI11_PARSE(app, argc, argv);
    try {
        qfl::app::write_file_atomic(
            out, qfl::synthetic::to_csv(qfl::synthetic::susy_like(rows, seed, separation)));
    } catch (const qfl::Error &e) {
        std::cerr << "qfl-make-synthetic: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
