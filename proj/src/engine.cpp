#include "d2dsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace d2dsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::atomic<unsigned> g_worker_threads{0};

// Runs fn(i) for i in [0, n) on the worker pool and returns the results in
// index order. The first failing index (lowest) is rethrown.
template <class Fn>
auto parallel_drops(int n, Fn&& fn) -> std::vector<decltype(fn(0))> {
  using Result = decltype(fn(0));
  std::vector<Result> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        results[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::min<unsigned>(worker_threads(), static_cast<unsigned>(std::max(n, 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw InvalidConfig(key, what);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t drop_stream_seed(std::uint64_t seed, std::uint64_t drop_index) {
  return splitmix64(seed ^ splitmix64(drop_index));
}

void set_worker_threads(unsigned n) { g_worker_threads = n; }

unsigned worker_threads() {
  const unsigned n = g_worker_threads;
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<PcSetting> ExperimentConfig::pc_settings() const {
  std::vector<PcSetting> out;
  int id = 0;
  if (no_power_control) out.push_back({id++, false, kNaN, kNaN});
  for (double a : alpha_list) {
    for (double snr : snr_target_db_list) out.push_back({id++, true, a, snr});
  }
  return out;
}

void ExperimentConfig::validate() const {
  require(std::isfinite(isd_m) && isd_m > 0.0, "isd_m", "must be positive");
  require(n_rings >= 0, "n_rings", "must be non-negative");
  require(n_cellular_per_sector >= 0, "n_cellular_per_sector", "must be non-negative");
  require(n_d2d_tx_per_sector >= 0, "n_d2d_tx_per_sector", "must be non-negative");
  require(std::isfinite(d2d_range_m) && d2d_range_m > 0.0, "d2d_range_m", "must be positive");
  require(min_d2d_dist_m > 0.0, "min_d2d_dist_m", "must be positive");
  require(min_d2d_dist_m < d2d_range_m, "min_d2d_dist_m", "must be below d2d_range_m");
  if (coordination.kind == CoordinationMode::Kind::SpatialReuse) {
    require(coordination.k >= 1, "coordination", "reuse factor must be >= 1");
  }
  for (double a : alpha_list) require(a >= 0.0 && a <= 1.0, "alpha_list", "alpha must lie in [0, 1]");
  for (double s : snr_target_db_list) require(std::isfinite(s), "snr_target_db_list", "must be finite");
  require(!pc_settings().empty(), "no_power_control",
          "power-control sweep is empty (no alpha/SNR pairs and no_power_control = false)");
  require(n_drops >= 1, "n_drops", "must be >= 1");
  require(n_subframes >= 1, "n_subframes", "must be >= 1");
  require(k_d2d >= 0 && k_d2d <= n_transmitters_per_sector(), "k_d2d",
          "must lie in [0, " + std::to_string(n_transmitters_per_sector()) +
              "] (transmitting UEs per sector)");
  require(pf_time_constant >= 1, "pf_time_constant", "must be >= 1");
  try {
    channel.validate();
  } catch (const std::invalid_argument& e) {
    throw InvalidConfig("carrier_ghz", e.what());
  }
  radio.validate();
}

std::vector<SettingSummary> ExperimentReport::sinr_summary(double threshold_db) const {
  std::vector<SettingSummary> out;
  for (const auto& setting : settings) {
    std::vector<double> xs;
    for (const auto& s : sinr) {
      if (s.setting_id == setting.id) xs.push_back(s.sinr_db);
    }
    SettingSummary row{setting, xs.size(), kNaN, kNaN, kNaN};
    if (!xs.empty()) {
      row.fraction_above = fraction_above(xs, threshold_db);
      row.mean_db = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      row.p5_db = percentile(xs, 0.05);
    }
    out.push_back(row);
  }
  return out;
}

ThroughputSummary ExperimentReport::throughput_summary() const {
  std::vector<double> xs;
  xs.reserve(flows.size());
  for (const auto& f : flows) xs.push_back(f.throughput_bps);
  if (xs.empty()) return {0, kNaN, kNaN};
  return {xs.size(), std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size()),
          percentile(xs, 0.05)};
}

double ue_noise_dbm(const ExperimentConfig& cfg) {
  return thermal_noise_dbm(cfg.radio.bandwidth_hz, cfg.radio.noise_figure_ue_db);
}

double enb_noise_dbm(const ExperimentConfig& cfg) {
  return thermal_noise_dbm(cfg.radio.bandwidth_hz, cfg.radio.noise_figure_enb_db);
}

PowerControlConfig power_control_for(const ExperimentConfig& cfg, const PcSetting& setting, double noise_dbm) {
  PowerControlConfig pc;
  pc.p_max_dbm = cfg.p_max_dbm;
  pc.noise_dbm = noise_dbm;
  pc.enabled = setting.enabled;
  pc.alpha = setting.enabled ? setting.alpha : 0.0;
  pc.snr_target_db = setting.enabled ? setting.snr_target_db : 0.0;
  return pc;
}

DropState make_sinr_drop(const ExperimentConfig& cfg, const NetworkLayout& layout, int drop_index) {
  Rng rng(drop_stream_seed(cfg.seed, static_cast<std::uint64_t>(drop_index)));
  DropState d;
  d.ues = drop_cellular_ues(layout, cfg.n_cellular_per_sector, rng);
  const auto first = static_cast<UeId>(d.ues.size());
  for (auto& [tx, rx] : drop_d2d_pairs(layout, cfg.n_d2d_tx_per_sector, cfg.d2d_range_m,
                                       cfg.min_d2d_dist_m, rng, first)) {
    d.ues.push_back(tx);
    d.ues.push_back(rx);
  }
  d.table = build_coupling_table(layout, d.ues, cfg.channel, rng);
  return d;
}

DropState make_throughput_drop(const ExperimentConfig& cfg, const NetworkLayout& layout, int drop_index) {
  Rng rng(drop_stream_seed(cfg.seed, static_cast<std::uint64_t>(drop_index)));
  DropState d;
  for (auto& [tx, rx] : drop_d2d_pairs(layout, cfg.n_transmitters_per_sector(), cfg.d2d_range_m,
                                       cfg.min_d2d_dist_m, rng)) {
    d.ues.push_back(tx);
    d.ues.push_back(rx);
  }
  d.table = build_coupling_table(layout, d.ues, cfg.channel, rng);
  return d;
}

namespace {

std::vector<SinrSample> sinr_drop_samples(const ExperimentConfig& cfg, const NetworkLayout& layout,
                                          const std::vector<PcSetting>& settings, int drop_index) {
  const DropState drop = make_sinr_drop(cfg, layout, drop_index);
  const auto& table = drop.table;

  std::vector<const UeRecord*> cellular;
  std::vector<const UeRecord*> d2d_tx;
  std::vector<const UeRecord*> d2d_rx;
  for (const auto& ue : drop.ues) {
    switch (ue.role) {
      case UeRole::CellularTx: cellular.push_back(&ue); break;
      case UeRole::D2dTx: d2d_tx.push_back(&ue); break;
      case UeRole::D2dRx: d2d_rx.push_back(&ue); break;
    }
  }
  const std::size_t n_pairs = d2d_tx.size();
  if (n_pairs == 0) return {};

  // Linear channel gains toward every D2D receiver; pair i has its
  // transmitter at d2d_tx[i] and receiver at d2d_rx[i].
  std::vector<double> cell_gain(cellular.size() * n_pairs);
  std::vector<double> d2d_gain(n_pairs * n_pairs);
  for (std::size_t c = 0; c < cellular.size(); ++c) {
    for (std::size_t r = 0; r < n_pairs; ++r) {
      cell_gain[c * n_pairs + r] = dbm_to_mw(-table.loss_db(cellular[c]->id, Endpoint::ue(d2d_rx[r]->id)));
    }
  }
  for (std::size_t t = 0; t < n_pairs; ++t) {
    for (std::size_t r = 0; r < n_pairs; ++r) {
      d2d_gain[t * n_pairs + r] = dbm_to_mw(-table.loss_db(d2d_tx[t]->id, Endpoint::ue(d2d_rx[r]->id)));
    }
  }

  std::vector<std::vector<UeId>> by_sector(layout.n_sectors());
  std::vector<std::size_t> pair_of(drop.ues.size() + 1, 0);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    by_sector[d2d_tx[i]->home_sector].push_back(d2d_tx[i]->id);
    pair_of[d2d_tx[i]->id] = i;
  }
  int period = 1;
  for (const auto& txs : by_sector) {
    period = std::lcm(period, airtime_cycle(cfg.coordination, static_cast<int>(txs.size())).period_subframes);
  }
  const auto slots = assign_d2d_slots(cfg.coordination, by_sector, period);

  const double n_ue_mw = dbm_to_mw(ue_noise_dbm(cfg));
  const double n_enb = enb_noise_dbm(cfg);
  const double n_ue = ue_noise_dbm(cfg);

  std::vector<SinrSample> out;
  std::vector<double> cell_power(cellular.size());
  std::vector<double> d2d_power(n_pairs);
  std::vector<double> cell_interference(n_pairs);
  std::vector<std::size_t> active;
  for (const auto& setting : settings) {
    const auto pc_cell = power_control_for(cfg, setting, n_enb);
    const auto pc_d2d = power_control_for(cfg, setting, n_ue);
    for (std::size_t c = 0; c < cellular.size(); ++c) {
      const double pl = table.loss_db(cellular[c]->id, Endpoint::sector(cellular[c]->home_sector));
      cell_power[c] = dbm_to_mw(open_loop_tx_power(pc_cell, pl));
    }
    for (std::size_t t = 0; t < n_pairs; ++t) {
      const double pl = table.loss_db(d2d_tx[t]->id, Endpoint::ue(d2d_rx[t]->id));
      d2d_power[t] = dbm_to_mw(open_loop_tx_power(pc_d2d, pl));
    }
    // Cellular UEs transmit in every subframe.
    std::fill(cell_interference.begin(), cell_interference.end(), 0.0);
    for (std::size_t c = 0; c < cellular.size(); ++c) {
      for (std::size_t r = 0; r < n_pairs; ++r) cell_interference[r] += cell_power[c] * cell_gain[c * n_pairs + r];
    }
    for (const auto& slot : slots) {
      active.clear();
      for (const auto& txs : slot.active) {
        for (UeId id : txs) active.push_back(pair_of[id]);
      }
      for (std::size_t a : active) {
        double interference = cell_interference[a];
        for (std::size_t b : active) {
          if (b != a) interference += d2d_power[b] * d2d_gain[b * n_pairs + a];
        }
        const double signal = d2d_power[a] * d2d_gain[a * n_pairs + a];
        out.push_back({setting.id, drop_index, d2d_tx[a]->home_sector, d2d_tx[a]->id,
                       mw_to_dbm(signal / (n_ue_mw + interference))});
      }
    }
  }
  return out;
}

struct ThroughputDrop {
  std::vector<FlowSample> baseline;
  std::vector<FlowSample> offload;
};

std::vector<FlowSample> throughput_run(const ExperimentConfig& cfg, const NetworkLayout& layout,
                                       const DropState& drop, const PcSetting& setting, int k_d2d,
                                       int drop_index) {
  const double n_enb = enb_noise_dbm(cfg);
  const double n_ue = ue_noise_dbm(cfg);
  const auto pc_cell = power_control_for(cfg, setting, n_enb);
  const auto pc_d2d = power_control_for(cfg, setting, n_ue);

  std::vector<std::vector<ScheduledFlow>> sector_flows(layout.n_sectors());
  for (const auto& ue : drop.ues) {
    if (ue.role != UeRole::D2dTx) continue;
    auto& flows = sector_flows[ue.home_sector];
    const bool d2d = static_cast<int>(flows.size()) < k_d2d;
    Flow f;
    f.id = ue.id;
    f.tx = ue.id;
    f.destination = d2d ? Destination::peer(*ue.peer) : Destination::enb(ue.home_sector);
    const double pl = drop.table.loss_db(ue.id, f.destination.endpoint());
    flows.push_back({f, open_loop_tx_power(d2d ? pc_d2d : pc_cell, pl)});
  }

  PfContext ctx;
  ctx.table = &drop.table;
  ctx.radio = cfg.radio;
  ctx.noise_enb_dbm = n_enb;
  ctx.noise_ue_dbm = n_ue;
  ctx.time_constant = cfg.pf_time_constant;
  const PfResult res = run_pf_uplink(sector_flows, ctx, cfg.n_subframes);

  std::vector<FlowSample> out;
  out.reserve(res.flows.size());
  for (const auto& f : res.flows) {
    out.push_back({drop_index, f.tx,
                   f.destination.kind == Destination::Kind::Peer ? FlowRole::D2d : FlowRole::Cellular,
                   f.throughput_bps});
  }
  return out;
}

}  // namespace

ExperimentReport run_sinr_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const NetworkLayout layout = build_hex_grid(cfg.isd_m, cfg.n_rings, cfg.wraparound);
  ExperimentReport report;
  report.kind = ExperimentKind::Sinr;
  report.settings = cfg.pc_settings();
  auto per_drop = parallel_drops(cfg.n_drops, [&](int d) { return sinr_drop_samples(cfg, layout, report.settings, d); });
  for (auto& v : per_drop) report.sinr.insert(report.sinr.end(), v.begin(), v.end());
  return report;
}

ThroughputComparison run_throughput_experiment(const ExperimentConfig& cfg, int k_d2d) {
  cfg.validate();
  if (k_d2d < 0 || k_d2d > cfg.n_transmitters_per_sector()) {
    throw InvalidConfig("k_d2d", "must lie in [0, " + std::to_string(cfg.n_transmitters_per_sector()) + "]");
  }
  const NetworkLayout layout = build_hex_grid(cfg.isd_m, cfg.n_rings, cfg.wraparound);
  const auto settings = cfg.pc_settings();
  const PcSetting setting = settings.front();

  auto per_drop = parallel_drops(cfg.n_drops, [&](int d) {
    const DropState drop = make_throughput_drop(cfg, layout, d);
    ThroughputDrop out;
    out.baseline = throughput_run(cfg, layout, drop, setting, 0, d);
    out.offload = k_d2d == 0 ? out.baseline : throughput_run(cfg, layout, drop, setting, k_d2d, d);
    return out;
  });

  ThroughputComparison cmp;
  cmp.baseline.kind = cmp.offload.kind = ExperimentKind::Throughput;
  cmp.baseline.settings = cmp.offload.settings = {setting};
  for (auto& d : per_drop) {
    cmp.baseline.flows.insert(cmp.baseline.flows.end(), d.baseline.begin(), d.baseline.end());
    cmp.offload.flows.insert(cmp.offload.flows.end(), d.offload.begin(), d.offload.end());
  }
  return cmp;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.config = cfg;
  if (cfg.experiment == ExperimentKind::Sinr) {
    result.sinr = run_sinr_experiment(cfg);
  } else {
    result.throughput = run_throughput_experiment(cfg, cfg.k_d2d);
  }
  result.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double percentile(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("percentile of an empty sample set");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile level must lie in [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  // The tolerance keeps p * n that should be integral (0.05 * 100) from rounding up.
  auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double fraction_above(std::span<const double> samples_db, double threshold_db) {
  if (samples_db.empty()) throw std::invalid_argument("fraction of an empty sample set");
  const auto above = std::count_if(samples_db.begin(), samples_db.end(), [&](double s) { return s > threshold_db; });
  return static_cast<double>(above) / static_cast<double>(samples_db.size());
}

DiscoveryOverhead discovery_overhead(std::uint64_t reserved_subframes, double period_s) {
  if (!(period_s > 0.0)) throw std::invalid_argument("discovery period must be positive");
  const double period_ms = period_s * 1000.0;
  const auto reserved = static_cast<double>(reserved_subframes);
  if (reserved > period_ms) {
    throw std::invalid_argument("reserved discovery subframes exceed the period");
  }
  return {reserved / period_ms, (period_ms - reserved) / period_ms};
}

}  // namespace d2dsim
