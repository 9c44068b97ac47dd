// Batch front-end: d2dsim CONFIG [--seed N] [--out DIR] [--quiet]

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "d2dsim/d2dsim.h"

namespace {

int report_error(d2d_status status) {
  std::fprintf(stderr, "error: %s: %s\n", d2d_status_name(status), d2d_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for D2D links underlaying an LTE uplink"};
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool quiet = false;
  app.add_option("config", config_path, "Experiment config file (key = value lines)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  auto* out_opt = app.add_option("--out", out_dir, "Override the output directory");
  app.add_flag("--quiet", quiet, "Do not print the summary");
  app.set_version_flag("--version", std::string(d2d_version()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 64;
  }

  d2d_config* cfg = nullptr;
  if (auto st = d2d_config_load(config_path.c_str(), &cfg); st != D2D_OK) return report_error(st);
  if (*seed_opt) {
    if (auto st = d2d_config_set(cfg, "seed", std::to_string(seed).c_str()); st != D2D_OK) {
      d2d_config_free(cfg);
      return report_error(st);
    }
  }
  if (*out_opt) {
    if (auto st = d2d_config_set(cfg, "out_dir", out_dir.c_str()); st != D2D_OK) {
      d2d_config_free(cfg);
      return report_error(st);
    }
  }

  d2d_report* report = nullptr;
  if (auto st = d2d_run(cfg, &report); st != D2D_OK) {
    d2d_config_free(cfg);
    return report_error(st);
  }
  const std::string target = d2d_config_out_dir(cfg);
  const d2d_status written = d2d_report_write(report, target.c_str());
  if (written == D2D_OK && !quiet) {
    std::size_t needed = 0;
    d2d_report_summary(report, nullptr, 0, &needed);
    std::vector<char> buf(needed);
    d2d_report_summary(report, buf.data(), buf.size(), nullptr);
    std::fputs(buf.data(), stdout);
    std::printf("wrote %s (%.2f s)\n", target.c_str(), d2d_report_wall_clock_s(report));
  }
  d2d_report_free(report);
  d2d_config_free(cfg);
  return written == D2D_OK ? 0 : report_error(written);
}
