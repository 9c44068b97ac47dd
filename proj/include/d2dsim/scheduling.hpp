#pragma once

// D2D coordination patterns and the proportional-fair uplink scheduler.

#include <cstdint>
#include <span>
#include <vector>

#include "d2dsim/channel.hpp"
#include "d2dsim/radio.hpp"

namespace d2dsim {

struct CoordinationMode {
  enum class Kind { Uncoordinated, OrthogonalTdm, SpatialReuse };
  Kind kind = Kind::Uncoordinated;
  int k = 1;  // concurrent transmitters per sector under SpatialReuse

  static CoordinationMode uncoordinated() { return {Kind::Uncoordinated, 1}; }
  static CoordinationMode tdm() { return {Kind::OrthogonalTdm, 1}; }
  static CoordinationMode reuse(int k);

  /// Concurrently active transmitters in a sector holding n_tx of them.
  int concurrent(int n_tx) const;

  friend bool operator==(const CoordinationMode&, const CoordinationMode&) = default;
};

struct SlotAssignment {
  int subframe_index = 0;
  std::vector<std::vector<UeId>> active;  // indexed by sector
};

/// Length of one full rotation and the number of times each transmitter is
/// active within it.
struct AirtimeCycle {
  int period_subframes = 1;
  int slots_per_tx = 1;
};

AirtimeCycle airtime_cycle(const CoordinationMode& mode, int n_tx);

/// Subframe t activates transmitters (t*m + j) mod n, j < m, where m is the
/// concurrency of the mode; this gives every transmitter equal airtime.
std::vector<SlotAssignment> assign_d2d_slots(const CoordinationMode& mode,
                                             const std::vector<std::vector<UeId>>& d2d_txs_by_sector,
                                             int n_subframes);

using FlowId = std::uint32_t;

struct Destination {
  enum class Kind { Enb, Peer };
  Kind kind = Kind::Enb;
  std::uint32_t index = 0;  // sector for Enb, UE id for Peer

  static Destination enb(SectorIndex s) { return {Kind::Enb, s}; }
  static Destination peer(UeId ue) { return {Kind::Peer, ue}; }
  Endpoint endpoint() const {
    return kind == Kind::Enb ? Endpoint::sector(index) : Endpoint::ue(index);
  }
};

struct Flow {
  FlowId id = 0;
  UeId tx = 0;
  Destination destination;
  double avg_rate_bps = 0.0;
};

/// argmax of inst/avg over the flows, ties to the lowest flow id.
/// `inst_rate_bps` is parallel to `flows`.
FlowId pf_select(std::span<const Flow> flows, std::span<const double> inst_rate_bps);

/// Exponential moving average with time constant t_c subframes.
Flow pf_update(Flow flow, double served_rate_bps, int t_c);

struct PfContext {
  const CouplingTable* table = nullptr;
  RadioConfig radio;
  double noise_enb_dbm = -99.0;
  double noise_ue_dbm = -95.0;
  int time_constant = 100;
  double subframe_s = 1e-3;
};

struct ScheduledFlow {
  Flow flow;
  double tx_power_dbm = 0.0;
};

struct FlowThroughput {
  FlowId id = 0;
  UeId tx = 0;
  Destination destination;
  double throughput_bps = 0.0;
  int granted_subframes = 0;
};

struct PfResult {
  std::vector<FlowThroughput> flows;   // sector-major, input order
  std::vector<int> grants_per_sector;
};

/// Per subframe and sector one flow gets the whole band. Grants use the
/// previous subframe's grants as the interference snapshot (noise only at
/// subframe 0); served rates use the grants actually made.
PfResult run_pf_uplink(const std::vector<std::vector<ScheduledFlow>>& sector_flows, const PfContext& ctx,
                       int n_subframes);

}  // namespace d2dsim
