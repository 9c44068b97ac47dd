#pragma once

// Seeded Monte Carlo drivers for the SINR-distribution and throughput-offload
// experiments, plus summary statistics.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dsim/channel.hpp"
#include "d2dsim/layout.hpp"
#include "d2dsim/radio.hpp"
#include "d2dsim/scheduling.hpp"

namespace d2dsim {

enum class ExperimentKind { Sinr, Throughput };

/// Rejected experiment parameter; `key()` is the config-file key at fault.
class InvalidConfig : public std::invalid_argument {
 public:
  InvalidConfig(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// One power-control point of the sweep. `enabled == false` is the
/// everyone-at-P_max entry; alpha and the SNR target are then NaN.
struct PcSetting {
  int id = 0;
  bool enabled = true;
  double alpha = 0.0;
  double snr_target_db = 0.0;
};

inline bool operator==(const PcSetting& a, const PcSetting& b) {
  auto same = [](double x, double y) { return x == y || (x != x && y != y); };
  return a.id == b.id && a.enabled == b.enabled && same(a.alpha, b.alpha) && same(a.snr_target_db, b.snr_target_db);
}

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Sinr;
  double isd_m = 1732.0;
  int n_rings = 2;
  bool wraparound = true;
  int n_cellular_per_sector = 0;
  int n_d2d_tx_per_sector = 10;
  double d2d_range_m = 250.0;
  double min_d2d_dist_m = 3.0;
  CoordinationMode coordination = CoordinationMode::uncoordinated();
  std::vector<double> alpha_list{0.0, 0.8, 1.0};
  std::vector<double> snr_target_db_list{0.0, 5.0, 10.0, 15.0};
  bool no_power_control = true;
  int n_drops = 100;
  int n_subframes = 2000;
  int k_d2d = 0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  ChannelConfig channel;
  RadioConfig radio;
  double p_max_dbm = 23.0;
  int pf_time_constant = 100;

  /// Transmitting UEs per sector in the throughput experiment.
  int n_transmitters_per_sector() const { return n_cellular_per_sector + n_d2d_tx_per_sector; }

  /// No-power-control entry first (when requested), then alpha-major over
  /// the SNR targets.
  std::vector<PcSetting> pc_settings() const;

  /// Throws InvalidConfig.
  void validate() const;
};

struct SinrSample {
  int setting_id = 0;
  int drop = 0;
  SectorIndex sector = 0;
  UeId link = 0;  // transmitting UE of the D2D pair
  double sinr_db = 0.0;
};

inline bool operator==(const SinrSample& a, const SinrSample& b) {
  return a.setting_id == b.setting_id && a.drop == b.drop && a.sector == b.sector && a.link == b.link &&
         a.sinr_db == b.sinr_db;
}

struct SettingSummary {
  PcSetting setting;
  std::size_t n_samples = 0;
  double fraction_above = 0.0;  // strictly above the coverage threshold
  double mean_db = 0.0;
  double p5_db = 0.0;
};

enum class FlowRole { Cellular, D2d };

struct FlowSample {
  int drop = 0;
  UeId flow = 0;  // transmitting UE
  FlowRole role = FlowRole::Cellular;
  double throughput_bps = 0.0;
};

inline bool operator==(const FlowSample& a, const FlowSample& b) {
  return a.drop == b.drop && a.flow == b.flow && a.role == b.role && a.throughput_bps == b.throughput_bps;
}

struct ThroughputSummary {
  std::size_t n_flows = 0;
  double mean_bps = 0.0;
  double p5_bps = 0.0;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Sinr;
  std::vector<PcSetting> settings;
  std::vector<SinrSample> sinr;   // drop-major, then setting, subframe, sector
  std::vector<FlowSample> flows;  // drop-major, then sector, flow

  std::vector<SettingSummary> sinr_summary(double threshold_db) const;
  ThroughputSummary throughput_summary() const;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

struct ThroughputComparison {
  ExperimentReport baseline;
  ExperimentReport offload;
};

/// Everything one CLI run produces.
struct RunResult {
  ExperimentConfig config;
  ExperimentReport sinr;
  ThroughputComparison throughput;
  double wall_clock_s = 0.0;
};

/// Per-drop stream seed: splitmix64(seed XOR splitmix64(drop_index)).
std::uint64_t drop_stream_seed(std::uint64_t seed, std::uint64_t drop_index);
std::uint64_t splitmix64(std::uint64_t x);

/// Number of worker threads used by the experiment drivers; 0 means
/// hardware concurrency.
void set_worker_threads(unsigned n);
unsigned worker_threads();

/// Receiver noise in dBm for the configured bandwidth.
double ue_noise_dbm(const ExperimentConfig& cfg);
double enb_noise_dbm(const ExperimentConfig& cfg);

PowerControlConfig power_control_for(const ExperimentConfig& cfg, const PcSetting& setting, double noise_dbm);

/// One drop's geometry and frozen channel.
struct DropState {
  std::vector<UeRecord> ues;
  CouplingTable table;
};

/// SINR experiment drop: cellular UEs (ids first) then D2D pairs.
DropState make_sinr_drop(const ExperimentConfig& cfg, const NetworkLayout& layout, int drop_index);

/// Throughput experiment drop: n_transmitters_per_sector pairs per sector.
DropState make_throughput_drop(const ExperimentConfig& cfg, const NetworkLayout& layout, int drop_index);

ExperimentReport run_sinr_experiment(const ExperimentConfig& cfg);

/// Baseline routes every transmitter through its eNB; the offload run turns
/// the first k_d2d transmitters of each sector into D2D flows. Both runs see
/// the same drops.
ThroughputComparison run_throughput_experiment(const ExperimentConfig& cfg, int k_d2d);

RunResult run_experiment(const ExperimentConfig& cfg);

/// Nearest rank: the ceil(p n)-th smallest, p = 0 gives the minimum.
double percentile(std::span<const double> samples, double p);

/// Fraction of samples strictly above the threshold.
double fraction_above(std::span<const double> samples_db, double threshold_db);

struct DiscoveryOverhead {
  double capacity_fraction = 0.0;
  double sleep_fraction = 0.0;
};

/// Share of uplink subframes (1 ms each) reserved for discovery in a period.
DiscoveryOverhead discovery_overhead(std::uint64_t reserved_subframes, double period_s);

}  // namespace d2dsim
