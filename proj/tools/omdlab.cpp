#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "omdlab/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"omdlab: inexact online mirror descent experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", preset_name;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "seed pool size");

  auto* pre = app.add_subcommand("preset", "execute a named preset scenario");
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_option("--out", out_dir, "output directory");
  pre->add_option("--jobs", jobs, "seed pool size");

  auto* lp = app.add_subcommand("list-presets", "list preset scenario names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (lp->parsed()) {
      for (const auto& name : omdlab::list_presets()) std::cout << name << "\n";
      return 0;
    }
    omdlab::Scenario s;
    if (run->parsed()) {
      s = omdlab::load_scenario_file(config_path);
    } else {
      s = omdlab::preset(preset_name);
      // keep the resolved config next to the outputs for reproducibility
      std::filesystem::create_directories(out_dir);
      std::ofstream f(std::filesystem::path(out_dir) / (s.name + ".ini"));
      f << omdlab::serialize_scenario(s);
    }
    return omdlab::run_scenario(s, out_dir, jobs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
