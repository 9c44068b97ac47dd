#include "d2dsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace d2dsim {

void ChannelConfig::validate() const {
  if (!(carrier_ghz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
  if (!(shadow_std_ueue_db >= 0.0) || !(shadow_std_enbue_db >= 0.0)) {
    throw std::invalid_argument("shadowing standard deviations must be non-negative");
  }
  if (!(ue_height_m > 1.0)) throw std::invalid_argument("UE height must exceed 1 m (effective height h - 1)");
  if (!(min_ue_distance_m > 0.0)) throw std::invalid_argument("minimum UE-UE distance must be positive");
}

double los_probability(double d_m) {
  if (d_m <= 18.0) return 1.0;
  const double e = std::exp(-d_m / 36.0);
  return (18.0 / d_m) * (1.0 - e) + e;
}

double ue_ue_pathloss(double d_m, bool los, const ChannelConfig& cfg) {
  if (!(d_m >= cfg.min_ue_distance_m)) {
    throw std::invalid_argument("UE-UE distance " + std::to_string(d_m) + " m below minimum " +
                                std::to_string(cfg.min_ue_distance_m) + " m");
  }
  const double fc = cfg.carrier_ghz;
  const double h = cfg.ue_height_m;
  double pl = 0.0;
  if (los) {
    const double h_eff = h - 1.0;
    const double d_bp = 4.0 * h_eff * h_eff * (fc * 1e9) / 3e8;
    if (d_m < d_bp) {
      pl = 22.7 * std::log10(d_m) + 27.0 + 20.0 * std::log10(fc);
    } else {
      pl = 40.0 * std::log10(d_m) + 7.56 - 17.3 * std::log10(h_eff) - 17.3 * std::log10(h_eff) +
           2.7 * std::log10(fc);
    }
  } else {
    pl = (44.9 - 6.55 * std::log10(h)) * std::log10(d_m) + 5.83 * std::log10(h) + 14.78 +
         34.97 * std::log10(fc);
  }
  return std::max(pl + cfg.d2d_offset_db, cfg.min_pl_db);
}

double ue_enb_pathloss(double d_m, double min_pl_db) {
  return std::max(128.1 + 37.6 * std::log10(d_m / 1000.0), min_pl_db);
}

double sector_antenna_gain(double angle_off_boresight_deg) {
  const double t = angle_off_boresight_deg / 70.0;
  return 14.0 - std::min(12.0 * t * t, 25.0);
}

double normalize_angle_deg(double angle_deg) {
  double a = std::fmod(angle_deg, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double draw_shadowing(double std_db, Rng& rng) {
  // Always consume one variate so streams stay aligned when std is zero.
  std::normal_distribution<double> standard(0.0, 1.0);
  return std_db * standard(rng);
}

bool CouplingTable::contains(UeId tx, Endpoint rx) const {
  if (rx.kind == Endpoint::Kind::Sector) {
    return tx < ue_row_.size() && ue_row_[tx] != kAbsent && rx.index < n_sectors_;
  }
  return tx < tx_row_.size() && tx_row_[tx] != kAbsent && rx.index < rx_col_.size() &&
         rx_col_[rx.index] != kAbsent;
}

const LinkDraw& CouplingTable::link(UeId tx, Endpoint rx) const {
  if (!contains(tx, rx)) {
    throw std::out_of_range("no coupling entry for tx " + std::to_string(tx) +
                            (rx.kind == Endpoint::Kind::Sector ? " -> sector " : " -> ue ") +
                            std::to_string(rx.index));
  }
  if (rx.kind == Endpoint::Kind::Sector) {
    return ue_sector_[static_cast<std::size_t>(ue_row_[tx]) * n_sectors_ + rx.index];
  }
  return ue_ue_[static_cast<std::size_t>(tx_row_[tx]) * n_rx_ + static_cast<std::size_t>(rx_col_[rx.index])];
}

bool operator==(const CouplingTable& a, const CouplingTable& b) {
  return a.tx_row_ == b.tx_row_ && a.rx_col_ == b.rx_col_ && a.ue_row_ == b.ue_row_ &&
         a.n_rx_ == b.n_rx_ && a.n_sectors_ == b.n_sectors_ && a.ue_ue_ == b.ue_ue_ &&
         a.ue_sector_ == b.ue_sector_;
}

CouplingTable build_coupling_table(const NetworkLayout& layout, std::span<const UeRecord> ues,
                                   const ChannelConfig& cfg, Rng& rng) {
  cfg.validate();
  CouplingTable t;
  UeId max_id = 0;
  for (const auto& ue : ues) max_id = std::max(max_id, ue.id);
  const std::size_t id_span = ues.empty() ? 0 : static_cast<std::size_t>(max_id) + 1;
  t.tx_row_.assign(id_span, CouplingTable::kAbsent);
  t.rx_col_.assign(id_span, CouplingTable::kAbsent);
  t.ue_row_.assign(id_span, CouplingTable::kAbsent);
  t.n_sectors_ = layout.n_sectors();

  std::vector<const UeRecord*> txs;
  std::vector<const UeRecord*> rxs;
  for (const auto& ue : ues) {
    if (t.ue_row_[ue.id] != CouplingTable::kAbsent) {
      throw std::invalid_argument("duplicate UE id " + std::to_string(ue.id));
    }
    t.ue_row_[ue.id] = static_cast<std::int32_t>(&ue - ues.data());
    if (ue.role == UeRole::D2dRx) {
      t.rx_col_[ue.id] = static_cast<std::int32_t>(rxs.size());
      rxs.push_back(&ue);
    } else {
      t.tx_row_[ue.id] = static_cast<std::int32_t>(txs.size());
      txs.push_back(&ue);
    }
  }
  t.n_rx_ = rxs.size();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  t.ue_ue_.resize(txs.size() * rxs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) {
    for (std::size_t j = 0; j < rxs.size(); ++j) {
      const double d = std::max(wrap_distance(txs[i]->position, rxs[j]->position, layout),
                                cfg.min_ue_distance_m);
      LinkDraw& link = t.ue_ue_[i * rxs.size() + j];
      const double u = unit(rng);
      link.los = cfg.los_model == LosModel::ItuUmi && u < los_probability(d);
      link.pathloss_db = ue_ue_pathloss(d, link.los, cfg);
      link.shadow_db = draw_shadowing(cfg.shadow_std_ueue_db, rng);
      link.antenna_gain_db = 0.0;
    }
  }

  t.ue_sector_.resize(ues.size() * t.n_sectors_);
  for (std::size_t i = 0; i < ues.size(); ++i) {
    for (SectorIndex s = 0; s < t.n_sectors_; ++s) {
      const Sector& sec = layout.sectors()[s];
      const Point v = wrap_vector(layout.sites()[sec.site], ues[i].position, layout);
      const double bearing = std::atan2(v.y, v.x) * 180.0 / std::numbers::pi;
      LinkDraw& link = t.ue_sector_[i * t.n_sectors_ + s];
      link.pathloss_db = ue_enb_pathloss(norm(v), cfg.min_pl_db);
      link.shadow_db = draw_shadowing(cfg.shadow_std_enbue_db, rng);
      link.antenna_gain_db = sector_antenna_gain(normalize_angle_deg(bearing - sec.boresight_deg));
    }
  }
  return t;
}

}  // namespace d2dsim
