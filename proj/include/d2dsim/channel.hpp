#pragma once

// Large-scale propagation and the per-drop coupling table.

#include <cstdint>
#include <span>
#include <vector>

#include "d2dsim/layout.hpp"

namespace d2dsim {

enum class LosModel { ItuUmi, AlwaysNlos };

struct ChannelConfig {
  double carrier_ghz = 2.0;
  double ue_height_m = 1.5;
  double enb_height_m = 25.0;
  double d2d_offset_db = -10.0;  // signed, added to UE-UE pathloss
  double shadow_std_ueue_db = 7.0;
  double shadow_std_enbue_db = 8.0;
  double min_pl_db = 30.0;
  double min_ue_distance_m = 3.0;
  LosModel los_model = LosModel::ItuUmi;

  void validate() const;
};

double los_probability(double d_m);

/// Winner+ B1 with both terminals at ue_height, plus the D2D offset.
/// Throws std::invalid_argument below cfg.min_ue_distance_m.
double ue_ue_pathloss(double d_m, bool los, const ChannelConfig& cfg);

double ue_enb_pathloss(double d_m, double min_pl_db = 30.0);

/// Boresight gain 14 dBi, 70 degree beamwidth, 25 dB front-to-back.
double sector_antenna_gain(double angle_off_boresight_deg);

/// Wraps an angle into (-180, 180].
double normalize_angle_deg(double angle_deg);

double draw_shadowing(double std_db, Rng& rng);

/// Receiving side of a coupling entry.
struct Endpoint {
  enum class Kind : std::uint8_t { Ue, Sector };
  Kind kind = Kind::Ue;
  std::uint32_t index = 0;

  static Endpoint ue(UeId id) { return {Kind::Ue, id}; }
  static Endpoint sector(SectorIndex s) { return {Kind::Sector, s}; }
};

/// One frozen link draw. Coupling loss = pathloss + shadowing - antenna gain.
struct LinkDraw {
  double pathloss_db = 0.0;
  double shadow_db = 0.0;
  double antenna_gain_db = 0.0;
  bool los = false;

  double loss_db() const { return pathloss_db + shadow_db - antenna_gain_db; }
  /// Loss with the shadowing replaced by its mean.
  double mean_loss_db() const { return pathloss_db - antenna_gain_db; }
};

class CouplingTable {
 public:
  CouplingTable() = default;

  /// Throws std::out_of_range when no entry exists for (tx, rx).
  const LinkDraw& link(UeId tx, Endpoint rx) const;
  double loss_db(UeId tx, Endpoint rx) const { return link(tx, rx).loss_db(); }
  bool contains(UeId tx, Endpoint rx) const;

  std::size_t n_sectors() const { return n_sectors_; }

  friend CouplingTable build_coupling_table(const NetworkLayout&, std::span<const UeRecord>,
                                            const ChannelConfig&, Rng&);
  friend bool operator==(const CouplingTable&, const CouplingTable&);

 private:
  static constexpr std::int32_t kAbsent = -1;

  std::vector<std::int32_t> tx_row_;   // UE id -> row among transmitters
  std::vector<std::int32_t> rx_col_;   // UE id -> column among D2D receivers
  std::vector<std::int32_t> ue_row_;   // UE id -> row in the UE->sector block
  std::size_t n_rx_ = 0;
  std::size_t n_sectors_ = 0;
  std::vector<LinkDraw> ue_ue_;
  std::vector<LinkDraw> ue_sector_;
};

bool operator==(const CouplingTable& a, const CouplingTable& b);

inline bool operator==(const LinkDraw& a, const LinkDraw& b) {
  return a.pathloss_db == b.pathloss_db && a.shadow_db == b.shadow_db &&
         a.antenna_gain_db == b.antenna_gain_db && a.los == b.los;
}

/// Entries: every transmitter (CellularTx, D2dTx) toward every D2D receiver,
/// and every UE toward every sector. LOS state and shadowing are drawn once
/// per ordered pair. Draw order is transmitter-major, then the UE->sector block.
CouplingTable build_coupling_table(const NetworkLayout& layout, std::span<const UeRecord> ues,
                                   const ChannelConfig& cfg, Rng& rng);

}  // namespace d2dsim
