#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cbf/scenario.hpp"
#include "cbf/sim_engine.hpp"

namespace {

cbf::Scenario resolve_scenario(const std::string& scenario_file,
                               const std::string& preset_name) {
  if (!preset_name.empty()) return cbf::preset(preset_name);
  return cbf::load_scenario(scenario_file);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying soft-maximum CBF safety filter simulator"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::string preset_name;
  std::string out_dir = ".";
  long seed = -1;
  bool strict = false;
  bool lenient = false;
  bool dump_barriers = false;

  CLI::App* cmd_run = app.add_subcommand("run", "Run a scenario and write logs");
  cmd_run->add_option("--scenario", scenario_file, "Scenario JSON file");
  cmd_run->add_option("--preset", preset_name, "Named preset scenario");
  cmd_run->add_option("--out", out_dir, "Output directory");
  cmd_run->add_option("--seed", seed, "Override the scenario seed");
  cmd_run->add_flag("--strict", strict, "Abort on an infeasible safety QP");
  cmd_run->add_flag("--lenient", lenient, "Fall back to u_d on infeasibility");
  cmd_run->add_flag("--dump-barriers", dump_barriers,
                    "Write a JSON-lines dump of per-epoch barrier parameters");

  CLI::App* cmd_validate = app.add_subcommand("validate", "Check a scenario");
  cmd_validate->add_option("--scenario", scenario_file, "Scenario JSON file");
  cmd_validate->add_option("--preset", preset_name, "Named preset scenario");

  CLI::App* cmd_presets = app.add_subcommand("presets", "Preset scenarios");
  CLI::App* cmd_presets_list = cmd_presets->add_subcommand("list", "List presets");
  std::string dump_name;
  CLI::App* cmd_presets_dump =
      cmd_presets->add_subcommand("dump", "Print a preset as scenario JSON");
  cmd_presets_dump->add_option("name", dump_name, "Preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_presets_list->parsed()) {
      for (const std::string& name : cbf::preset_names()) {
        std::cout << name << "\n";
      }
      return 0;
    }
    if (cmd_presets_dump->parsed()) {
      std::cout << cbf::scenario_to_json(cbf::preset(dump_name)).dump(2) << "\n";
      return 0;
    }

    if (scenario_file.empty() && preset_name.empty()) {
      std::cerr << "error: provide --scenario or --preset\n";
      return 1;
    }
    cbf::Scenario scenario = resolve_scenario(scenario_file, preset_name);

    if (cmd_validate->parsed()) {
      const std::vector<std::string> diag = cbf::validate(scenario);
      for (const std::string& d : diag) {
        std::cout << "diagnostic: " << d << "\n";
      }
      std::cout << (diag.empty() ? "scenario OK" : "scenario has issues") << "\n";
      return diag.empty() ? 0 : 1;
    }

    // run
    if (seed >= 0) scenario.run.seed = static_cast<unsigned>(seed);
    if (strict) scenario.filter_mode = cbf::FilterMode::kStrict;
    if (lenient) scenario.filter_mode = cbf::FilterMode::kLenient;

    const cbf::RunLog log = cbf::run(scenario);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_file(dir / "log.csv", cbf::csv_log(log));
    write_file(dir / "summary.json", cbf::summary_json(log).dump(2) + "\n");
    if (dump_barriers) {
      write_file(dir / "epochs.jsonl", cbf::epochs_jsonl(log));
    }

    std::cout << "steps=" << log.summary.steps << " epochs=" << log.summary.epochs
              << " min_h=" << log.summary.min_h
              << " min_psi1=" << log.summary.min_psi1
              << " goal_dist=" << log.summary.final_goal_distance
              << " exit=" << log.summary.exit_code << "\n";
    return log.summary.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
