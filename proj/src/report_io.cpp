#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "d2dsim/config.hpp"

namespace d2dsim {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

const char* role_name(FlowRole r) { return r == FlowRole::D2d ? "d2d" : "cellular"; }

std::string setting_label(const PcSetting& s) {
  if (!s.enabled) return "no power control";
  return "alpha=" + format_number(s.alpha) + " snr_target_db=" + format_number(s.snr_target_db);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw OutputError("failed writing " + path.string());
}

std::string sinr_csv(const ExperimentReport& report) {
  std::string out = "setting_id,alpha,snr_target_db,drop,sector,link,sinr_db\n";
  out.reserve(out.size() + report.sinr.size() * 48);
  for (const auto& s : report.sinr) {
    const PcSetting& pc = report.settings.at(static_cast<std::size_t>(s.setting_id));
    out += std::to_string(s.setting_id);
    out += ',';
    out += format_number(pc.alpha);
    out += ',';
    out += format_number(pc.snr_target_db);
    out += ',';
    out += std::to_string(s.drop);
    out += ',';
    out += std::to_string(s.sector);
    out += ',';
    out += std::to_string(s.link);
    out += ',';
    out += format_number(s.sinr_db);
    out += '\n';
  }
  return out;
}

void append_flows(std::string& out, const char* run, const ExperimentReport& report) {
  for (const auto& f : report.flows) {
    out += run;
    out += ',' + std::to_string(f.drop) + ',' + std::to_string(f.flow) + ',' + role_name(f.role) + ',' +
           format_number(f.throughput_bps) + '\n';
  }
}

double role_mean(const ExperimentReport& r, FlowRole role) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& f : r.flows) {
    if (f.role == role) {
      sum += f.throughput_bps;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string summary_text(const RunResult& result) {
  const auto& cfg = result.config;
  std::ostringstream os;
  if (cfg.experiment == ExperimentKind::Sinr) {
    const double thr = cfg.radio.coverage_threshold_db;
    os << "experiment: sinr\n"
       << "coordination: " << coordination_to_string(cfg.coordination) << '\n'
       << "d2d_range_m: " << format_number(cfg.d2d_range_m) << '\n'
       << "isd_m: " << format_number(cfg.isd_m) << '\n'
       << "threshold_db: " << format_number(thr) << '\n'
       << "setting_id,alpha,snr_target_db,samples,fraction_above_threshold,mean_sinr_db,p5_sinr_db,label\n";
    for (const auto& row : result.sinr.sinr_summary(thr)) {
      os << row.setting.id << ',' << format_number(row.setting.alpha) << ','
         << format_number(row.setting.snr_target_db) << ',' << row.n_samples << ','
         << format_number(row.fraction_above) << ',' << format_number(row.mean_db) << ','
         << format_number(row.p5_db) << ',' << setting_label(row.setting) << '\n';
    }
  } else {
    const auto& tp = result.throughput;
    const auto base = tp.baseline.throughput_summary();
    const auto off = tp.offload.throughput_summary();
    os << "experiment: throughput\n"
       << "k_d2d: " << cfg.k_d2d << '\n'
       << "power_control: " << setting_label(tp.baseline.settings.front()) << '\n'
       << "run,flows,mean_bps,p5_bps\n"
       << "baseline," << base.n_flows << ',' << format_number(base.mean_bps) << ','
       << format_number(base.p5_bps) << '\n'
       << "offload," << off.n_flows << ',' << format_number(off.mean_bps) << ',' << format_number(off.p5_bps)
       << '\n'
       << "mean_gain: " << format_number(off.mean_bps / base.mean_bps) << '\n'
       << "p5_gain: " << format_number(off.p5_bps / base.p5_bps) << '\n'
       << "offload_cellular_mean_bps: " << format_number(role_mean(tp.offload, FlowRole::Cellular)) << '\n'
       << "offload_d2d_mean_bps: " << format_number(role_mean(tp.offload, FlowRole::D2d)) << '\n';
  }
  return os.str();
}

std::string manifest_text(const RunResult& result) {
  const auto& cfg = result.config;
  std::ostringstream os;
  os << "# d2dsim " << D2DSIM_VERSION << '\n'
     << "# experiment " << (cfg.experiment == ExperimentKind::Sinr ? "sinr" : "throughput") << '\n'
     << config_echo(cfg)
     << "# fixed ue_height_m = " << format_number(cfg.channel.ue_height_m) << '\n'
     << "# fixed enb_height_m = " << format_number(cfg.channel.enb_height_m) << '\n'
     << "# fixed shadow_std_ueue_db = " << format_number(cfg.channel.shadow_std_ueue_db) << '\n'
     << "# fixed shadow_std_enbue_db = " << format_number(cfg.channel.shadow_std_enbue_db) << '\n'
     << "# fixed min_pl_db = " << format_number(cfg.channel.min_pl_db) << '\n'
     << "# fixed los_model = " << (cfg.channel.los_model == LosModel::ItuUmi ? "itu_umi" : "always_nlos") << '\n'
     << "# fixed p_max_dbm = " << format_number(cfg.p_max_dbm) << '\n'
     << "# fixed bandwidth_hz = " << format_number(cfg.radio.bandwidth_hz) << '\n'
     << "# fixed noise_figure_ue_db = " << format_number(cfg.radio.noise_figure_ue_db) << '\n'
     << "# fixed noise_figure_enb_db = " << format_number(cfg.radio.noise_figure_enb_db) << '\n'
     << "# fixed shannon_efficiency = " << format_number(cfg.radio.shannon_efficiency) << '\n'
     << "# fixed spectral_cap_bps_hz = " << format_number(cfg.radio.spectral_cap_bps_hz) << '\n'
     << "# fixed coverage_threshold_db = " << format_number(cfg.radio.coverage_threshold_db) << '\n'
     << "# fixed pf_time_constant = " << cfg.pf_time_constant << '\n'
     << "# wall_clock_s = " << format_number(result.wall_clock_s) << '\n';
  return os.str();
}

void emit_reports(const RunResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw OutputError("cannot create output directory " + out_dir.string() +
                      (ec ? ": " + ec.message() : std::string()));
  }
  if (result.config.experiment == ExperimentKind::Sinr) {
    write_file(out_dir / "sinr_samples.csv", sinr_csv(result.sinr));
  } else {
    std::string csv = "run,drop,flow,role,throughput_bps\n";
    append_flows(csv, "baseline", result.throughput.baseline);
    append_flows(csv, "offload", result.throughput.offload);
    write_file(out_dir / "throughput.csv", csv);
  }
  write_file(out_dir / "summary.txt", summary_text(result));
  write_file(out_dir / "manifest.txt", manifest_text(result));
}

}  // namespace d2dsim
