#include "d2dsim/scheduling.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace d2dsim {

CoordinationMode CoordinationMode::reuse(int k) {
  if (k < 1) throw std::invalid_argument("spatial reuse needs k >= 1, got " + std::to_string(k));
  return {Kind::SpatialReuse, k};
}

int CoordinationMode::concurrent(int n_tx) const {
  switch (kind) {
    case Kind::Uncoordinated: return n_tx;
    case Kind::OrthogonalTdm: return std::min(1, n_tx);
    case Kind::SpatialReuse: return std::min(k, n_tx);
  }
  return n_tx;
}

AirtimeCycle airtime_cycle(const CoordinationMode& mode, int n_tx) {
  if (n_tx <= 0) return {1, 0};
  const int m = mode.concurrent(n_tx);
  const int g = std::gcd(n_tx, m);
  return {n_tx / g, m / g};
}

std::vector<SlotAssignment> assign_d2d_slots(const CoordinationMode& mode,
                                             const std::vector<std::vector<UeId>>& d2d_txs_by_sector,
                                             int n_subframes) {
  if (n_subframes < 1) throw std::invalid_argument("need at least one subframe");
  std::vector<SlotAssignment> slots(static_cast<std::size_t>(n_subframes));
  for (int t = 0; t < n_subframes; ++t) {
    auto& slot = slots[static_cast<std::size_t>(t)];
    slot.subframe_index = t;
    slot.active.resize(d2d_txs_by_sector.size());
    for (std::size_t s = 0; s < d2d_txs_by_sector.size(); ++s) {
      const auto& txs = d2d_txs_by_sector[s];
      const auto n = static_cast<long long>(txs.size());
      if (n == 0) continue;
      const int m = mode.concurrent(static_cast<int>(n));
      auto& active = slot.active[s];
      active.reserve(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) {
        active.push_back(txs[static_cast<std::size_t>((static_cast<long long>(t) * m + j) % n)]);
      }
    }
  }
  return slots;
}

FlowId pf_select(std::span<const Flow> flows, std::span<const double> inst_rate_bps) {
  if (flows.empty()) throw std::invalid_argument("PF selection over an empty flow set");
  if (flows.size() != inst_rate_bps.size()) throw std::invalid_argument("PF rate list does not match flows");
  std::size_t best = 0;
  double best_metric = inst_rate_bps[0] / flows[0].avg_rate_bps;
  for (std::size_t i = 1; i < flows.size(); ++i) {
    const double metric = inst_rate_bps[i] / flows[i].avg_rate_bps;
    if (metric > best_metric || (metric == best_metric && flows[i].id < flows[best].id)) {
      best = i;
      best_metric = metric;
    }
  }
  return flows[best].id;
}

Flow pf_update(Flow flow, double served_rate_bps, int t_c) {
  if (t_c < 1) throw std::invalid_argument("PF time constant must be >= 1");
  const double w = 1.0 / t_c;
  flow.avg_rate_bps = (1.0 - w) * flow.avg_rate_bps + w * served_rate_bps;
  return flow;
}

namespace {

// Received power in mW at `rx` from `tx` transmitting at `power_dbm`.
double received_mw(const CouplingTable& table, UeId tx, double power_dbm, Endpoint rx) {
  return dbm_to_mw(power_dbm - table.loss_db(tx, rx));
}

}  // namespace

PfResult run_pf_uplink(const std::vector<std::vector<ScheduledFlow>>& sector_flows, const PfContext& ctx,
                       int n_subframes) {
  if (ctx.table == nullptr) throw std::invalid_argument("PF run needs a coupling table");
  if (n_subframes < 1) throw std::invalid_argument("need at least one subframe");
  const CouplingTable& table = *ctx.table;
  const std::size_t n_sectors = sector_flows.size();
  const double noise_enb = dbm_to_mw(ctx.noise_enb_dbm);
  const double noise_ue = dbm_to_mw(ctx.noise_ue_dbm);
  const double bw = ctx.radio.bandwidth_hz;

  struct State {
    Flow flow;
    double power_dbm;
    double signal_mw;
    double noise_mw;
    double bits = 0.0;
    int grants = 0;
  };
  std::vector<std::vector<State>> state(n_sectors);
  for (std::size_t s = 0; s < n_sectors; ++s) {
    for (const auto& sf : sector_flows[s]) {
      const Endpoint rx = sf.flow.destination.endpoint();
      const double noise = sf.flow.destination.kind == Destination::Kind::Enb ? noise_enb : noise_ue;
      State st{sf.flow, sf.tx_power_dbm, received_mw(table, sf.flow.tx, sf.tx_power_dbm, rx), noise};
      // EMA starts at the interference-free rate; floor keeps the PF metric finite.
      st.flow.avg_rate_bps = std::max(rate_from_sinr(mw_to_dbm(st.signal_mw / noise), bw, ctx.radio), 1.0);
      state[s].push_back(st);
    }
  }

  struct Grant {
    UeId tx;
    double power_dbm;
  };
  std::vector<std::optional<Grant>> previous(n_sectors);
  std::vector<std::optional<Grant>> current(n_sectors);
  std::vector<std::size_t> chosen(n_sectors, 0);
  std::vector<int> grants_per_sector(n_sectors, 0);

  auto interference_mw = [&](const std::vector<std::optional<Grant>>& grants, std::size_t own_sector,
                             Endpoint rx) {
    double total = 0.0;
    for (std::size_t o = 0; o < n_sectors; ++o) {
      if (o == own_sector || !grants[o]) continue;
      total += received_mw(table, grants[o]->tx, grants[o]->power_dbm, rx);
    }
    return total;
  };

  std::vector<Flow> flows_scratch;
  std::vector<double> rates_scratch;
  for (int t = 0; t < n_subframes; ++t) {
    for (std::size_t s = 0; s < n_sectors; ++s) {
      auto& sts = state[s];
      current[s].reset();
      if (sts.empty()) continue;
      flows_scratch.clear();
      rates_scratch.clear();
      for (const auto& st : sts) {
        const double i_mw = interference_mw(previous, s, st.flow.destination.endpoint());
        flows_scratch.push_back(st.flow);
        rates_scratch.push_back(rate_from_sinr(mw_to_dbm(st.signal_mw / (st.noise_mw + i_mw)), bw, ctx.radio));
      }
      const FlowId pick = pf_select(flows_scratch, rates_scratch);
      std::size_t idx = 0;
      while (sts[idx].flow.id != pick) ++idx;
      chosen[s] = idx;
      current[s] = Grant{sts[idx].flow.tx, sts[idx].power_dbm};
      ++grants_per_sector[s];
    }
    for (std::size_t s = 0; s < n_sectors; ++s) {
      for (std::size_t i = 0; i < state[s].size(); ++i) {
        auto& st = state[s][i];
        double served = 0.0;
        if (current[s] && chosen[s] == i) {
          const double i_mw = interference_mw(current, s, st.flow.destination.endpoint());
          served = rate_from_sinr(mw_to_dbm(st.signal_mw / (st.noise_mw + i_mw)), bw, ctx.radio);
          st.bits += served * ctx.subframe_s;
          ++st.grants;
        }
        st.flow = pf_update(st.flow, served, ctx.time_constant);
      }
    }
    std::swap(previous, current);
  }

  PfResult result;
  result.grants_per_sector = std::move(grants_per_sector);
  const double duration_s = n_subframes * ctx.subframe_s;
  for (const auto& sts : state) {
    for (const auto& st : sts) {
      result.flows.push_back({st.flow.id, st.flow.tx, st.flow.destination, st.bits / duration_s, st.grants});
    }
  }
  return result;
}

}  // namespace d2dsim
