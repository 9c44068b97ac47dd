#pragma once

// Open-loop transmit power, SINR, link-to-rate mapping and coverage.

#include <span>
#include <unordered_map>

#include "d2dsim/channel.hpp"
#include "d2dsim/layout.hpp"

namespace d2dsim {

struct PowerControlConfig {
  double p_max_dbm = 23.0;
  double snr_target_db = 10.0;
  double noise_dbm = -95.0;
  double alpha = 1.0;
  bool enabled = true;

  void validate() const;
};

struct RadioConfig {
  double bandwidth_hz = 10e6;
  double noise_figure_ue_db = 9.0;
  double noise_figure_enb_db = 5.0;
  double shannon_efficiency = 0.6;
  double spectral_cap_bps_hz = 4.4;
  double coverage_threshold_db = -6.0;
  double enb_tx_power_dbm = 46.0;

  void validate() const;
};

/// Thermal noise over `bandwidth_hz` at -174 dBm/Hz plus a noise figure.
double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// min(P_max, SNR_target + P_noise + alpha * PL); P_max when disabled.
/// `pl_db` is the link loss with shadowing included.
double open_loop_tx_power(const PowerControlConfig& pc, double pl_db);

using PowerMap = std::unordered_map<UeId, double>;

/// SINR in dB at `rx` for `serving_tx`; every other member of `active_txs`
/// interferes. Missing powers or coupling entries throw std::out_of_range.
double compute_sinr(Endpoint rx, UeId serving_tx, std::span<const UeId> active_txs,
                    const PowerMap& powers_dbm, const CouplingTable& table, double noise_dbm);

/// Attenuated Shannon: min(eff * log2(1 + sinr), cap) * bandwidth.
double rate_from_sinr(double sinr_db, double bandwidth_share_hz, const RadioConfig& rc);

enum class Coverage { InCoverage, OutOfCoverage };

/// Downlink wideband SINR from the strongest sector, all sectors at the
/// same power, shadowing at its mean.
double downlink_sinr_db(const UeRecord& ue, const CouplingTable& table, double enb_tx_power_dbm,
                        const RadioConfig& rc);

/// Out of coverage iff the downlink SINR is strictly below the threshold.
Coverage classify_coverage_sinr(double sinr_db, const RadioConfig& rc);

Coverage classify_coverage(const UeRecord& ue, const NetworkLayout& layout, const CouplingTable& table,
                           double enb_tx_power_dbm, const RadioConfig& rc);

}  // namespace d2dsim
