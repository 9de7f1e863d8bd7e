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

// Command-line entry point: run, compare and validate pipeline configs.

#include "semcausal/error.hpp"
#include "semcausal/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using namespace semcausal;

PipelineConfig configure(const std::string& path, const std::optional<std::string>& out,
                         const std::optional<std::uint64_t>& seed) {
  PipelineConfig config = load_config(path);
  if (out) config.output_dir = *out;
  if (seed) {
    config.split_seed = *seed;
    config.em.seed = *seed;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SEM-informed Bayesian network pipeline"};
  app.set_version_flag("--version", std::string(SEMCAUSAL_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "TOML config, or manifest.json of an earlier run")->required();
    cmd->add_option("--out", out, "output directory (overrides [output] dir)");
    cmd->add_option("--seed", seed, "split and EM seed (overrides the config)");
  };
  auto* run = app.add_subcommand("run", "run the full pipeline and write all artifacts");
  auto* compare = app.add_subcommand("compare", "fit EM and BDeu on the training split and write comparison.json");
  auto* validate = app.add_subcommand("validate", "check config, model and data header without fitting");
  add_common(run);
  add_common(compare);
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const PipelineConfig config = configure(config_path, out, seed);
    if (run->parsed()) {
      const RunManifest manifest = run_pipeline(config);
      const auto& counts = manifest.document.at("counts");
      std::cout << "cases: " << counts.at("ingested") << " ingested, " << counts.at("complete") << " complete, "
                << counts.at("train") << " train / " << counts.at("validation") << " validation\n";
      std::cout << "wrote " << manifest.artifacts.size() << " artifacts to " << config.output_dir.string() << "\n";
    } else if (compare->parsed()) {
      const Json doc = compare_estimators(config);
      for (const auto& [name, entry] : doc.at("estimators").items()) {
        const auto& v = entry.at("validation");
        std::cout << name << " validation: accuracy " << v.at("accuracy").get<double>() << ", recall "
                  << v.at("recall").get<double>() << ", f1 " << v.at("f1").get<double>() << "\n";
      }
      std::cout << "wrote comparison.json to " << config.output_dir.string() << "\n";
    } else if (validate->parsed()) {
      validate_config(config);
      std::cout << "config ok: " << config_path << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: IoError: " << e.what() << "\n";
    return exit_code_for(ErrorCategory::Data);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(ErrorCategory::Numerical);
  }
  return 0;
}
