// Copyright 2026 The semcausal Authors
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

// Writes the synthetic youth-development item data used by the example config.

#include "synthetic.hpp"

#include "semcausal/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic ordinal item data with a known factor structure"};
  semcausal::synthetic::OrdinalOptions options;
  std::string out = "synthetic_youth.csv";
  app.add_option("--out", out, "output CSV path");
  app.add_option("--rows", options.rows, "number of cases");
  app.add_option("--incomplete", options.incomplete_rows, "cases with missing cells");
  app.add_option("--seed", options.seed, "generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto data = semcausal::synthetic::youth_dataset(options);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw semcausal::Error(semcausal::ErrorKind::IoError, "cannot write " + out);
    semcausal::write_csv(f, data, {"id"});
    std::cout << "wrote " << data.rows() << " cases to " << out << "\n";
  } catch (const semcausal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return semcausal::exit_code_for(e.category());
  }
  return 0;
}
