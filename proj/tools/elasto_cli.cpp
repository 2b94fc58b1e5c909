#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "elasto/config.hpp"
#include "elasto/io.hpp"
#include "elasto/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Expanding affine elastodynamics perturbation solver"};
  app.set_version_flag("--version", elasto::kVersionTag);
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "integrate a configured run");
  run->add_option("config", config_path, "config file")->required();

  auto* verify = app.add_subcommand("verify-identities", "check geometric identities on the initial data");
  verify->add_option("config", config_path, "config file")->required();

  std::string series_path, quantity;
  std::vector<double> window;
  auto* fit = app.add_subcommand("fit", "fit a (1+t) power law to a series column");
  fit->add_option("series", series_path, "series.csv")->required();
  fit->add_option("quantity", quantity, "column name")->required();
  fit->add_option("window", window, "t0 t1")->expected(0, 2);

  std::string checkpoint_path, times, out_dir = ".";
  auto* recon = app.add_subcommand("reconstruct", "Eulerian snapshots from a checkpoint");
  recon->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
  recon->add_option("times", times, "comma-separated times")->required();
  recon->add_option("-o,--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : elasto::kExitConfig;
  }

  return elasto::guarded(
      [&]() -> int {
        if (*run) return elasto::cmd_run(elasto::load_config(config_path), std::cout);
        if (*verify) return elasto::cmd_verify_identities(elasto::load_config(config_path), std::cout);
        if (*fit) {
          if (window.size() == 1) throw elasto::ValidationError("window", "give both t0 and t1");
          std::optional<std::pair<double, double>> w;
          if (window.size() == 2) w = std::make_pair(window[0], window[1]);
          return elasto::cmd_fit(series_path, quantity, w, std::cout);
        }
        return elasto::cmd_reconstruct(checkpoint_path, elasto::parse_time_list(times), out_dir, std::cout);
      },
      std::cerr);
}
