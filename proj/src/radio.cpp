#include "d2dsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace d2dsim {

void PowerControlConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("pathloss compensation factor must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (!std::isfinite(p_max_dbm)) throw std::invalid_argument("maximum power must be finite");
}

void RadioConfig::validate() const {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(shannon_efficiency > 0.0 && shannon_efficiency <= 1.0)) {
    throw std::invalid_argument("Shannon efficiency must lie in (0, 1]");
  }
  if (!(spectral_cap_bps_hz > 0.0)) throw std::invalid_argument("spectral efficiency cap must be positive");
}

double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double open_loop_tx_power(const PowerControlConfig& pc, double pl_db) {
  if (!pc.enabled) return pc.p_max_dbm;
  return std::min(pc.p_max_dbm, pc.snr_target_db + pc.noise_dbm + pc.alpha * pl_db);
}

namespace {

double power_of(const PowerMap& powers, UeId tx) {
  const auto it = powers.find(tx);
  if (it == powers.end()) throw std::out_of_range("no transmit power for UE " + std::to_string(tx));
  return it->second;
}

}  // namespace

double compute_sinr(Endpoint rx, UeId serving_tx, std::span<const UeId> active_txs,
                    const PowerMap& powers_dbm, const CouplingTable& table, double noise_dbm) {
  if (std::find(active_txs.begin(), active_txs.end(), serving_tx) == active_txs.end()) {
    throw std::invalid_argument("serving transmitter " + std::to_string(serving_tx) + " is not active");
  }
  const double signal = dbm_to_mw(power_of(powers_dbm, serving_tx) - table.loss_db(serving_tx, rx));
  double interference = 0.0;
  for (UeId tx : active_txs) {
    if (tx == serving_tx) continue;
    interference += dbm_to_mw(power_of(powers_dbm, tx) - table.loss_db(tx, rx));
  }
  return mw_to_dbm(signal / (dbm_to_mw(noise_dbm) + interference));
}

double rate_from_sinr(double sinr_db, double bandwidth_share_hz, const RadioConfig& rc) {
  const double se = rc.shannon_efficiency * std::log2(1.0 + std::pow(10.0, sinr_db / 10.0));
  return std::min(se, rc.spectral_cap_bps_hz) * bandwidth_share_hz;
}

double downlink_sinr_db(const UeRecord& ue, const CouplingTable& table, double enb_tx_power_dbm,
                        const RadioConfig& rc) {
  const std::size_t n = table.n_sectors();
  if (n == 0) throw std::invalid_argument("coverage needs at least one sector");
  double best = 0.0;
  double total = 0.0;
  for (SectorIndex s = 0; s < n; ++s) {
    const double rx_mw = dbm_to_mw(enb_tx_power_dbm - table.link(ue.id, Endpoint::sector(s)).mean_loss_db());
    best = std::max(best, rx_mw);
    total += rx_mw;
  }
  const double noise_mw = dbm_to_mw(thermal_noise_dbm(rc.bandwidth_hz, rc.noise_figure_ue_db));
  return mw_to_dbm(best / (noise_mw + (total - best)));
}

Coverage classify_coverage_sinr(double sinr_db, const RadioConfig& rc) {
  return sinr_db < rc.coverage_threshold_db ? Coverage::OutOfCoverage : Coverage::InCoverage;
}

Coverage classify_coverage(const UeRecord& ue, const NetworkLayout& layout, const CouplingTable& table,
                           double enb_tx_power_dbm, const RadioConfig& rc) {
  if (table.n_sectors() != layout.n_sectors()) {
    throw std::invalid_argument("coupling table does not match the layout");
  }
  return classify_coverage_sinr(downlink_sinr_db(ue, table, enb_tx_power_dbm, rc), rc);
}

}  // namespace d2dsim
