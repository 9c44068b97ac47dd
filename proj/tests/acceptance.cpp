// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria (capped at 255).
//
//   acceptance               run all criteria
//   acceptance --criterion N run only criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "d2dsim/config.hpp"

using namespace d2dsim;
namespace fs = std::filesystem;

namespace {

// tolerances and bands
constexpr double kPublicSafetyUncoordinatedMax = 0.50;
constexpr double kPublicSafetyTdmMin = 0.90;
constexpr double kUrbanLongRangeMax = 0.60;
constexpr double kUrbanReuseMin = 0.90;
constexpr double kSinrRelTol = 1e-9;
constexpr double kThresholdDb = -6.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig preset(const char* name) { return parse_config(fs::path(D2DSIM_CONFIG_DIR) / name); }

std::vector<double> fractions(const ExperimentConfig& cfg) {
  std::vector<double> out;
  for (const auto& row : run_sinr_experiment(cfg).sinr_summary(kThresholdDb)) out.push_back(row.fraction_above);
  return out;
}

std::string list(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : " ") + fmt("%.3f", x);
  return s;
}

Outcome c1() {
  const auto f = fractions(preset("public_safety_uncoordinated.cfg"));
  const double worst = *std::max_element(f.begin(), f.end());
  return {worst <= kPublicSafetyUncoordinatedMax,
          "ISD 1732 m, 250 m, uncoordinated: max fraction above -6 dB over " + std::to_string(f.size()) +
              " settings = " + fmt("%.4f", worst) + " (need <= 0.50) [" + list(f) + "]"};
}

Outcome c2() {
  const auto f = fractions(preset("public_safety_tdm.cfg"));
  const double best = *std::max_element(f.begin(), f.end());
  return {best >= kPublicSafetyTdmMin,
          "ISD 1732 m, 250 m, TDM: best fraction above -6 dB = " + fmt("%.4f", best) + " (need >= 0.90) [" +
              list(f) + "]"};
}

Outcome c3() {
  const auto f = fractions(preset("urban_long_range.cfg"));
  const double worst = *std::max_element(f.begin(), f.end());
  return {worst <= kUrbanLongRangeMax,
          "ISD 500 m, 250 m, 1 TX/sector: max fraction = " + fmt("%.4f", worst) + " (need <= 0.60) [" + list(f) +
              "]"};
}

Outcome c4() {
  const auto f = fractions(preset("urban_reuse2.cfg"));
  const double best = *std::max_element(f.begin(), f.end());
  return {best >= kUrbanReuseMin,
          "ISD 500 m, 50 m, reuse:2: best fraction = " + fmt("%.4f", best) + " (need >= 0.90) [" + list(f) + "]"};
}

Outcome c5() {
  const auto cfg = preset("offload_single_site.cfg");
  const int ks[] = {1, 3, 5, 7, 9};
  std::vector<double> mean_gain;
  std::vector<double> p5_gain;
  std::string detail = "single site, 50 m, PF, " + std::to_string(cfg.n_drops) + " drops x " +
                       std::to_string(cfg.n_subframes) + " subframes:";
  for (int k : ks) {
    const auto cmp = run_throughput_experiment(cfg, k);
    const auto b = cmp.baseline.throughput_summary();
    const auto o = cmp.offload.throughput_summary();
    mean_gain.push_back(o.mean_bps / b.mean_bps);
    p5_gain.push_back(o.p5_bps / b.p5_bps);
    detail += " k=" + std::to_string(k) + " mean " + fmt("%.3f", mean_gain.back()) + " p5 " +
              fmt("%.3f", p5_gain.back()) + ";";
  }
  bool a = true;
  for (int i = 0; i < 3; ++i) a = a && mean_gain[i] >= 1.0 && p5_gain[i] >= 1.0;
  bool b = false;
  for (std::size_t i = 0; i < mean_gain.size(); ++i) b = b || p5_gain[i] > mean_gain[i];
  const bool c = mean_gain[4] < mean_gain[2];
  detail += std::string(" (a) gains >= 1 for k<=5: ") + (a ? "yes" : "NO") +
            "; (b) p5 gain > mean gain for some k: " + (b ? "yes" : "NO") +
            "; (c) mean gain k=9 < k=5: " + (c ? "yes" : "NO");
  return {a && b && c, detail};
}

Outcome c6() {
  const auto o = discovery_overhead(50, 5.0);
  return {o.capacity_fraction == 0.01 && o.sleep_fraction == 0.99,
          "50 subframes per 5 s: capacity " + fmt("%.15g", o.capacity_fraction) + ", sleep " +
              fmt("%.15g", o.sleep_fraction) + " (need exactly 0.01, 0.99)"};
}

// compute_sinr against a plain linear sum on random small instances.
bool sinr_oracle(std::string& why) {
  Rng rng(2024);
  const auto layout = build_hex_grid(500.0, 1, true);
  std::uniform_int_distribution<int> n_tx(1, 5);
  std::uniform_real_distribution<double> power(-40.0, 23.0);
  std::uniform_real_distribution<double> noise(-110.0, -90.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = n_tx(rng);
    std::vector<UeRecord> ues;
    std::uniform_int_distribution<SectorIndex> sector(0, static_cast<SectorIndex>(layout.n_sectors() - 1));
    for (int i = 0; i < n; ++i) {
      const SectorIndex s = sector(rng);
      const Point tx = sample_in_sector(layout, s, rng);
      ues.push_back({static_cast<UeId>(ues.size()), tx, UeRole::D2dTx, s, {}});
    }
    const UeId rx_id = static_cast<UeId>(ues.size());
    ues.push_back({rx_id, sample_in_sector(layout, sector(rng), rng), UeRole::D2dRx, 0, {}});
    const auto table = build_coupling_table(layout, ues, ChannelConfig{}, rng);
    PowerMap powers;
    std::vector<UeId> active;
    for (int i = 0; i < n; ++i) {
      powers[static_cast<UeId>(i)] = power(rng);
      active.push_back(static_cast<UeId>(i));
    }
    const UeId serving = static_cast<UeId>(rng() % static_cast<unsigned>(n));
    const double nz = noise(rng);
    long double s = 0.0L;
    long double i_plus_n = std::pow(10.0L, static_cast<long double>(nz) / 10.0L);
    for (UeId tx : active) {
      const long double rx_mw =
          std::pow(10.0L, static_cast<long double>(powers[tx] - table.loss_db(tx, Endpoint::ue(rx_id))) / 10.0L);
      (tx == serving ? s : i_plus_n) += rx_mw;
    }
    const double want = static_cast<double>(10.0L * std::log10(s / i_plus_n));
    const double got = compute_sinr(Endpoint::ue(rx_id), serving, active, powers, table, nz);
    if (std::abs(got - want) > kSinrRelTol * std::max(1.0, std::abs(want))) {
      why = "compute_sinr mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

bool power_properties(std::string& why) {
  for (double alpha = 0.0; alpha <= 1.0 + 1e-12; alpha += 0.1) {
    for (double snr = -10.0; snr <= 20.0; snr += 2.5) {
      PowerControlConfig pc;
      pc.alpha = alpha;
      pc.snr_target_db = snr;
      pc.noise_dbm = -104.5;
      double prev = -1e300;
      for (double pl = 40.0; pl <= 180.0; pl += 0.5) {
        const double p = open_loop_tx_power(pc, pl);
        const double unclipped = snr + pc.noise_dbm + alpha * pl;
        if (p > pc.p_max_dbm) return why = "power above cap", false;
        if (p < prev) return why = "power not monotone in pathloss", false;
        // below the cap the target is met exactly: p - alpha * PL - noise = SNR_t
        if (unclipped < pc.p_max_dbm && std::abs(p - unclipped) > 1e-9) return why = "target not attained", false;
        if (unclipped >= pc.p_max_dbm && p != pc.p_max_dbm) return why = "cap not applied", false;
        prev = p;
      }
    }
  }
  PowerControlConfig off;
  off.enabled = false;
  if (open_loop_tx_power(off, 60.0) != off.p_max_dbm) return why = "disabled control not at P_max", false;
  return true;
}

bool tdm_isolation(std::string& why) {
  for (int n = 0; n <= 12; ++n) {
    std::vector<std::vector<UeId>> by_sector(57);
    UeId id = 0;
    for (auto& s : by_sector) {
      for (int i = 0; i < n; ++i) s.push_back(id++);
    }
    for (const auto& slot : assign_d2d_slots(CoordinationMode::tdm(), by_sector, 3 * n + 7)) {
      for (const auto& active : slot.active) {
        if (active.size() > 1) return why = "TDM slot with two active transmitters in one sector", false;
      }
    }
  }
  return true;
}

bool statistics(std::string& why) {
  Rng rng(5);
  std::normal_distribution<double> sinr(0.0, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(1 + rng() % 400);
    for (auto& x : xs) x = std::round(sinr(rng) * 4.0) / 4.0;  // ties on purpose
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {0.0, 0.05, 0.1, 0.5, 0.95, 1.0}) {
      std::size_t rank = 1;
      while (rank < sorted.size() && static_cast<double>(rank) < p * static_cast<double>(sorted.size()) - 1e-9)
        ++rank;
      if (percentile(xs, p) != sorted[rank - 1]) return why = "percentile mismatch", false;
    }
    for (double thr : {-6.0, 0.0, 3.25}) {
      int above = 0;
      for (double x : xs) above += x > thr;
      if (fraction_above(xs, thr) != static_cast<double>(above) / static_cast<double>(xs.size()))
        return why = "fraction_above mismatch", false;
    }
  }
  return true;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool reruns_identical(std::string& why) {
  ExperimentConfig cfg = preset("urban_reuse2.cfg");
  cfg.n_drops = 5;
  const auto base = fs::temp_directory_path() / "d2dsim_acceptance_rerun";
  fs::remove_all(base);
  emit_reports(run_experiment(cfg), base / "a");
  emit_reports(run_experiment(cfg), base / "b");
  auto strip = [](std::string m) { return m.substr(0, m.find("# wall_clock_s")); };
  const bool same = read_file(base / "a" / "sinr_samples.csv") == read_file(base / "b" / "sinr_samples.csv") &&
                    read_file(base / "a" / "summary.txt") == read_file(base / "b" / "summary.txt") &&
                    strip(read_file(base / "a" / "manifest.txt")) == strip(read_file(base / "b" / "manifest.txt"));
  fs::remove_all(base);
  if (!same) why = "outputs of two identical runs differ";
  return same;
}

Outcome c7() {
  std::string why;
  const bool ok = sinr_oracle(why) && power_properties(why) && tdm_isolation(why) && statistics(why) &&
                  reruns_identical(why);
  return {ok, ok ? "SINR oracle (1000 instances, 1e-9), power-control sweep, TDM isolation, percentile and "
                   "fraction recomputation, byte-identical reruns"
                 : why};
}

Outcome c8() {
  RadioConfig rc;
  // scan +-0.5 dB around the threshold in 0.01 dB steps, plus the neighbours of -6
  std::vector<double> scan;
  for (int i = -50; i <= 50; ++i) scan.push_back(kThresholdDb + 0.01 * i);
  scan.push_back(std::nextafter(kThresholdDb, -1e9));
  scan.push_back(std::nextafter(kThresholdDb, 1e9));
  for (double s : scan) {
    const bool out = classify_coverage_sinr(s, rc) == Coverage::OutOfCoverage;
    if (out != (s < kThresholdDb)) return {false, "wrong class at " + fmt("%.17g", s) + " dB"};
  }
  // geometric UEs straddling the threshold along a boresight radial
  const auto layout = build_hex_grid(500.0, 0, false);
  ChannelConfig ch;
  auto sinr_at = [&](double d, Coverage& cov) {
    const double b = 30.0 * std::acos(-1.0) / 180.0;
    std::vector<UeRecord> ues{{0, {d * std::cos(b), d * std::sin(b)}, UeRole::CellularTx, 0, {}}};
    Rng rng(1);
    const auto t = build_coupling_table(layout, ues, ch, rng);
    cov = classify_coverage(ues[0], layout, t, rc.enb_tx_power_dbm, rc);
    return downlink_sinr_db(ues[0], t, rc.enb_tx_power_dbm, rc);
  };
  int inside = 0;
  int outside = 0;
  for (double d = 1000.0; d < 200000.0; d *= 1.01) {
    Coverage cov{};
    const double s = sinr_at(d, cov);
    if (std::abs(s - kThresholdDb) > 0.5) continue;
    if ((cov == Coverage::OutOfCoverage) != (s < kThresholdDb)) return {false, "geometric UE misclassified"};
    (s < kThresholdDb ? outside : inside) += 1;
  }
  const bool ok = inside > 0 && outside > 0;
  return {ok, "strict '< -6 dB' rule over " + std::to_string(scan.size()) + " scan points and " +
                  std::to_string(inside + outside) + " UEs within 0.5 dB of the threshold"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 64;
    }
  }
  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8};
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
    return 64;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s  %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return std::min(failed, 255);
}
