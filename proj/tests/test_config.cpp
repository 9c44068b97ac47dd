#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2dsim/config.hpp"
#include "doctest.h"

using namespace d2dsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("d2dsim_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("parse every key") {
  const auto c = parse_config_text(R"(# comment line
experiment = throughput
isd_m = 500
n_rings = 1
wraparound = off
n_cellular_per_sector = 6   # trailing comment
n_d2d_tx_per_sector = 2
d2d_range_m = 75.5
min_d2d_dist_m = 4
coordination = reuse:3
alpha_list = 0.5, 1
snr_target_db_list = -3,7.5
no_power_control = no
n_drops = 12
n_subframes = 99
k_d2d = 8
seed = 18446744073709551615
carrier_ghz = 0.7
d2d_offset_db = 5
out_dir = results/run one
)");
  CHECK(c.experiment == ExperimentKind::Throughput);
  CHECK(c.isd_m == 500.0);
  CHECK(c.n_rings == 1);
  CHECK_FALSE(c.wraparound);
  CHECK(c.n_cellular_per_sector == 6);
  CHECK(c.n_d2d_tx_per_sector == 2);
  CHECK(c.d2d_range_m == 75.5);
  CHECK(c.min_d2d_dist_m == 4.0);
  CHECK(c.coordination == CoordinationMode::reuse(3));
  CHECK(c.alpha_list == std::vector<double>{0.5, 1.0});
  CHECK(c.snr_target_db_list == std::vector<double>{-3.0, 7.5});
  CHECK_FALSE(c.no_power_control);
  CHECK(c.n_drops == 12);
  CHECK(c.n_subframes == 99);
  CHECK(c.k_d2d == 8);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.channel.carrier_ghz == 0.7);
  CHECK(c.channel.d2d_offset_db == 5.0);
  CHECK(c.out_dir == "results/run one");
}

TEST_CASE("missing keys keep defaults") {
  const auto c = parse_config_text("\n# nothing\n");
  const ExperimentConfig d;
  CHECK(config_echo(c) == config_echo(d));
}

TEST_CASE("echo reparses to the same config") {
  ExperimentConfig c;
  c.isd_m = 1732.0508075688772;
  c.d2d_range_m = 100.1 + 0.2;
  c.alpha_list = {0.8, 1.0 / 3.0};
  c.coordination = CoordinationMode::tdm();
  c.channel.carrier_ghz = 0.7;
  c.seed = 123456789012345ULL;
  const auto echo = config_echo(c);
  const auto back = parse_config_text(echo);
  CHECK(config_echo(back) == echo);
  CHECK(back.isd_m == c.isd_m);
  CHECK(back.d2d_range_m == c.d2d_range_m);
  CHECK(back.alpha_list == c.alpha_list);
  CHECK(back.coordination == c.coordination);
  CHECK(back.seed == c.seed);
}

TEST_CASE("errors carry the source and line") {
  auto line_of = [](const std::string& text) {
    try {
      parse_config_text(text, "x.cfg");
    } catch (const ConfigError& e) {
      CHECK(e.source() == "x.cfg");
      CHECK(std::string(e.what()).starts_with("x.cfg"));
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("isd_m = 500\nbogus = 1\n") == 2);
  CHECK(line_of("\n\nn_rings = two\n") == 3);
  CHECK(line_of("no equals sign\n") == 1);
  CHECK(line_of(" = 4\n") == 1);
  CHECK(line_of("seed = 1\nseed = 2\n") == 2);
  CHECK(line_of("coordination = reuse:0\n") == 1);
  CHECK(line_of("coordination = sometimes\n") == 1);
  CHECK(line_of("wraparound = maybe\n") == 1);
  CHECK(line_of("alpha_list = 0.5,,1\n") == 1);
  CHECK(line_of("isd_m = 12abc\n") == 1);
  CHECK(line_of("experiment = both\n") == 1);
  // contradictions point at the key that fails validation
  CHECK(line_of("experiment = throughput\nn_cellular_per_sector = 2\nn_d2d_tx_per_sector = 0\nk_d2d = 3\n") == 4);
  CHECK(line_of("d2d_range_m = 50\n# c\nmin_d2d_dist_m = 60\n") == 3);
  CHECK(line_of("alpha_list = 0.2, 1.4\n") == 1);
  CHECK(line_of("alpha_list =\nsnr_target_db_list = 1\nno_power_control = false\n") == 3);
  // defaulted keys produce line 0
  CHECK(line_of("d2d_range_m = 2\n") == 0);
}

TEST_CASE("unknown key message") {
  try {
    parse_config_text("isd = 500\n", "a.cfg");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "a.cfg:1: unknown key 'isd'");
  }
}

TEST_CASE("unreadable config file") {
  CHECK_THROWS_AS(parse_config("/nonexistent/dir/x.cfg"), ConfigIoError);
}

TEST_CASE("config files round trip through disk") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  ExperimentConfig c;
  c.n_drops = 7;
  {
    std::ofstream(dir / "a.cfg") << config_echo(c);
  }
  CHECK(config_echo(parse_config(dir / "a.cfg")) == config_echo(c));
  fs::remove_all(dir);
}

namespace {

ExperimentConfig tiny_sinr() {
  ExperimentConfig c;
  c.isd_m = 500.0;
  c.n_rings = 1;
  c.n_d2d_tx_per_sector = 2;
  c.d2d_range_m = 100.0;
  c.alpha_list = {1.0};
  c.snr_target_db_list = {10.0};
  c.n_drops = 2;
  return c;
}

ExperimentConfig tiny_throughput() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::Throughput;
  c.isd_m = 500.0;
  c.n_rings = 0;
  c.wraparound = false;
  c.n_cellular_per_sector = 3;
  c.n_d2d_tx_per_sector = 0;
  c.d2d_range_m = 50.0;
  c.k_d2d = 1;
  c.n_drops = 2;
  c.n_subframes = 100;
  return c;
}

}  // namespace

TEST_CASE("SINR report files") {
  const auto dir = scratch("sinr");
  const auto cfg = tiny_sinr();
  const auto r = run_experiment(cfg);
  emit_reports(r, dir);
  const auto csv = slurp(dir / "sinr_samples.csv");
  CHECK(csv.starts_with("setting_id,alpha,snr_target_db,drop,sector,link,sinr_db\n"));
  CHECK(count_lines(csv) == static_cast<int>(r.sinr.sinr.size()) + 1);
  CHECK(csv.find("\n0,nan,nan,0,") != std::string::npos);
  CHECK(csv.find("\n1,1,10,0,") != std::string::npos);
  const auto summary = slurp(dir / "summary.txt");
  CHECK(summary.find("experiment: sinr") != std::string::npos);
  CHECK(summary.find("no power control") != std::string::npos);
  const auto manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.starts_with("# d2dsim "));
  // the last line is the run duration
  const auto last = manifest.substr(manifest.rfind('\n', manifest.size() - 2) + 1);
  CHECK(last.starts_with("# wall_clock_s = "));
  // the manifest is itself a config
  CHECK(config_echo(parse_config(dir / "manifest.txt")) == config_echo(cfg));
  fs::remove_all(dir);
}

TEST_CASE("throughput report files and gains") {
  const auto dir = scratch("tp");
  const auto r = run_experiment(tiny_throughput());
  emit_reports(r, dir);
  const auto csv = slurp(dir / "throughput.csv");
  CHECK(csv.starts_with("run,drop,flow,role,throughput_bps\n"));
  CHECK(count_lines(csv) == 1 + 2 * 2 * 3 * 3);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double sums[2] = {0.0, 0.0};
  int n[2] = {0, 0};
  int d2d = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() == 5);
    const int run = cols[0] == "offload" ? 1 : 0;
    sums[run] += std::stod(cols[4]);
    ++n[run];
    if (cols[3] == "d2d") {
      CHECK(run == 1);
      ++d2d;
    }
  }
  CHECK(d2d == 2 * 3);
  const auto summary = slurp(dir / "summary.txt");
  const auto pos = summary.find("mean_gain: ");
  REQUIRE(pos != std::string::npos);
  const double gain = std::stod(summary.substr(pos + 11));
  CHECK(gain == doctest::Approx((sums[1] / n[1]) / (sums[0] / n[0])).epsilon(1e-5));
  fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical except the duration line") {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  emit_reports(run_experiment(tiny_sinr()), a);
  emit_reports(run_experiment(tiny_sinr()), b);
  CHECK(slurp(a / "sinr_samples.csv") == slurp(b / "sinr_samples.csv"));
  CHECK(slurp(a / "summary.txt") == slurp(b / "summary.txt"));
  auto strip = [](std::string m) { return m.substr(0, m.find("# wall_clock_s")); };
  CHECK(strip(slurp(a / "manifest.txt")) == strip(slurp(b / "manifest.txt")));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("unwritable output directory") {
  const auto base = scratch("blocked");
  fs::create_directories(base);
  { std::ofstream(base / "file") << "x"; }
  const auto r = run_experiment(tiny_sinr());
  CHECK_THROWS_AS(emit_reports(r, base / "file" / "sub"), OutputError);
  fs::remove_all(base);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(format_number(-6.0) == "-6");
  CHECK(coordination_to_string(CoordinationMode::reuse(2)) == "reuse:2");
  CHECK(coordination_to_string(CoordinationMode::tdm()) == "tdm");
}

TEST_CASE("shipped presets parse and validate") {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(D2DSIM_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_config(entry.path()));
    ++n;
  }
  CHECK(n >= 6);
}
