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

#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
  const std::string command = std::string("\"") + SEMCAUSAL_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Three ordinal items; `twin` makes the third an exact copy of the first.
void write_items(const fs::path& path, bool twin) {
  std::string text = "id,a,b,c\n";
  for (int i = 0; i < 60; ++i) {
    const int a = 1 + (i * 7) % 5, b = 1 + (i * 3 + i / 5) % 5;
    const int c = twin ? a : 1 + (a + b + i % 2) % 5;
    text += "r" + std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "\n";
  }
  testing::spit(path, text);
}

std::string config_text(const std::string& data, const std::string& extra = "") {
  return "[data]\npath = \"" + data + "\"\nid_column = \"id\"\n[model]\nsyntax = \"F =~ a + b + c\"\n"
         "[discretize]\nk = 2\n[prediction]\ntarget = \"F\"\nevidence = []\n" + extra;
}

}  // namespace

TEST_CASE("exit codes") {
  const fs::path dir = testing::temp_dir("cli");
  const fs::path log = dir / "log.txt";
  write_items(dir / "items.csv", false);
  write_items(dir / "twins.csv", true);

  testing::spit(dir / "ok.toml", config_text("items.csv"));
  CHECK(run_cli("validate \"" + (dir / "ok.toml").string() + "\"", log) == 0);
  CHECK(testing::slurp(log).find("config ok") != std::string::npos);

  CHECK(run_cli("--help", log) == 0);
  CHECK(run_cli("--version", log) == 0);
  CHECK(run_cli("", log) == 2);
  CHECK(run_cli("frobnicate x.toml", log) == 2);
  CHECK(run_cli("run", log) == 2);

  testing::spit(dir / "unknown_key.toml", config_text("items.csv", "[split]\nratio = 0.5\n"));
  CHECK(run_cli("validate \"" + (dir / "unknown_key.toml").string() + "\"", log) == 2);
  CHECK(testing::slurp(log).find("ConfigError") != std::string::npos);

  testing::spit(dir / "bad_model.toml", "[data]\npath = \"items.csv\"\n[model]\nsyntax = \"F =~\"\n[prediction]\ntarget = \"F\"\n");
  CHECK(run_cli("validate \"" + (dir / "bad_model.toml").string() + "\"", log) == 2);

  testing::spit(dir / "no_data.toml", config_text("absent.csv"));
  CHECK(run_cli("validate \"" + (dir / "no_data.toml").string() + "\"", log) == 3);

  testing::spit(dir / "missing_column.toml",
                "[data]\npath = \"items.csv\"\n[model]\nsyntax = \"F =~ a + b + zz\"\n[prediction]\ntarget = \"F\"\n");
  CHECK(run_cli("validate \"" + (dir / "missing_column.toml").string() + "\"", log) == 3);
  CHECK(testing::slurp(log).find("UnknownColumn") != std::string::npos);

  testing::spit(dir / "twins.toml", config_text("twins.csv"));
  CHECK(run_cli("run \"" + (dir / "twins.toml").string() + "\" --out \"" + (dir / "twins_out").string() + "\"", log) == 4);
  CHECK_FALSE(fs::exists(dir / "twins_out" / "manifest.json"));
}

TEST_CASE("run and compare write their artifacts, --out and --seed override the config") {
  const fs::path dir = testing::temp_dir("cli_run");
  const fs::path log = dir / "log.txt";
  write_items(dir / "items.csv", false);
  testing::spit(dir / "ok.toml", config_text("items.csv"));
  const std::string config = "\"" + (dir / "ok.toml").string() + "\"";

  CHECK(run_cli("run " + config + " --out \"" + (dir / "a").string() + "\" --seed 11", log) == 0);
  CHECK(fs::exists(dir / "a" / "manifest.json"));
  CHECK(testing::slurp(dir / "a" / "manifest.json").find("\"seed\": 11") != std::string::npos);

  CHECK(run_cli("compare " + config + " --out \"" + (dir / "b").string() + "\"", log) == 0);
  CHECK(fs::exists(dir / "b" / "comparison.json"));
  CHECK(testing::slurp(log).find("em validation") != std::string::npos);
}
