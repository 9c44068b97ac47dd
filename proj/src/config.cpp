#include "d2dsim/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace d2dsim {

ConfigError::ConfigError(std::string source, int line, const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError("", 0,
                    "malformed value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                        expected + ")");
}

double parse_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view v) {
  v = trim(v);
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> parse_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  v = trim(v);
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(parse_double(key, v.substr(start, comma == std::string_view::npos ? v.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

CoordinationMode parse_coordination(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "uncoordinated") return CoordinationMode::uncoordinated();
  if (v == "tdm") return CoordinationMode::tdm();
  if (v.starts_with("reuse:")) {
    const int k = parse_int<int>(key, v.substr(6));
    if (k < 1) bad_value(key, v, "reuse:k with k >= 1");
    return CoordinationMode::reuse(k);
  }
  bad_value(key, v, "uncoordinated, tdm or reuse:k");
}

std::string num(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

std::string list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += num(xs[i]);
  }
  return out;
}

}  // namespace

void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "experiment") {
    if (value == "sinr") {
      cfg.experiment = ExperimentKind::Sinr;
    } else if (value == "throughput") {
      cfg.experiment = ExperimentKind::Throughput;
    } else {
      bad_value(key, value, "sinr or throughput");
    }
  } else if (key == "isd_m") {
    cfg.isd_m = parse_double(key, value);
  } else if (key == "n_rings") {
    cfg.n_rings = parse_int<int>(key, value);
  } else if (key == "wraparound") {
    cfg.wraparound = parse_bool(key, value);
  } else if (key == "n_cellular_per_sector") {
    cfg.n_cellular_per_sector = parse_int<int>(key, value);
  } else if (key == "n_d2d_tx_per_sector") {
    cfg.n_d2d_tx_per_sector = parse_int<int>(key, value);
  } else if (key == "d2d_range_m") {
    cfg.d2d_range_m = parse_double(key, value);
  } else if (key == "min_d2d_dist_m") {
    cfg.min_d2d_dist_m = parse_double(key, value);
  } else if (key == "coordination") {
    cfg.coordination = parse_coordination(key, value);
  } else if (key == "alpha_list") {
    cfg.alpha_list = parse_list(key, value);
  } else if (key == "snr_target_db_list") {
    cfg.snr_target_db_list = parse_list(key, value);
  } else if (key == "no_power_control") {
    cfg.no_power_control = parse_bool(key, value);
  } else if (key == "n_drops") {
    cfg.n_drops = parse_int<int>(key, value);
  } else if (key == "n_subframes") {
    cfg.n_subframes = parse_int<int>(key, value);
  } else if (key == "k_d2d") {
    cfg.k_d2d = parse_int<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "carrier_ghz") {
    cfg.channel.carrier_ghz = parse_double(key, value);
  } else if (key == "d2d_offset_db") {
    cfg.channel.d2d_offset_db = parse_double(key, value);
  } else if (key == "out_dir") {
    if (value.empty()) bad_value(key, value, "a directory path");
    cfg.out_dir = std::string(value);
  } else {
    throw ConfigError("", 0, "unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config_text(std::string_view text, const std::string& source) {
  ExperimentConfig cfg;
  std::map<std::string, int, std::less<>> key_line;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source, line_no, "missing key before '='");
    if (key_line.contains(key)) {
      throw ConfigError(source, line_no, "duplicate key '" + std::string(key) + "'");
    }
    try {
      apply_config_value(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      // Strip the empty source prefix added by apply_config_value.
      std::string what = e.what();
      if (what.starts_with(": ")) what.erase(0, 2);
      throw ConfigError(source, line_no, what);
    }
    key_line.emplace(std::string(key), line_no);
  }
  try {
    cfg.validate();
  } catch (const InvalidConfig& e) {
    const auto it = key_line.find(e.key());
    throw ConfigError(source, it == key_line.end() ? 0 : it->second, e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, 0, e.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigIoError(path.string(), 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::string coordination_to_string(const CoordinationMode& mode) {
  switch (mode.kind) {
    case CoordinationMode::Kind::Uncoordinated: return "uncoordinated";
    case CoordinationMode::Kind::OrthogonalTdm: return "tdm";
    case CoordinationMode::Kind::SpatialReuse: return "reuse:" + std::to_string(mode.k);
  }
  return "uncoordinated";
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment = " << (cfg.experiment == ExperimentKind::Sinr ? "sinr" : "throughput") << '\n'
     << "isd_m = " << num(cfg.isd_m) << '\n'
     << "n_rings = " << cfg.n_rings << '\n'
     << "wraparound = " << (cfg.wraparound ? "true" : "false") << '\n'
     << "n_cellular_per_sector = " << cfg.n_cellular_per_sector << '\n'
     << "n_d2d_tx_per_sector = " << cfg.n_d2d_tx_per_sector << '\n'
     << "d2d_range_m = " << num(cfg.d2d_range_m) << '\n'
     << "min_d2d_dist_m = " << num(cfg.min_d2d_dist_m) << '\n'
     << "coordination = " << coordination_to_string(cfg.coordination) << '\n'
     << "alpha_list = " << list(cfg.alpha_list) << '\n'
     << "snr_target_db_list = " << list(cfg.snr_target_db_list) << '\n'
     << "no_power_control = " << (cfg.no_power_control ? "true" : "false") << '\n'
     << "n_drops = " << cfg.n_drops << '\n'
     << "n_subframes = " << cfg.n_subframes << '\n'
     << "k_d2d = " << cfg.k_d2d << '\n'
     << "seed = " << cfg.seed << '\n'
     << "carrier_ghz = " << num(cfg.channel.carrier_ghz) << '\n'
     << "d2d_offset_db = " << num(cfg.channel.d2d_offset_db) << '\n'
     << "out_dir = " << cfg.out_dir << '\n';
  return os.str();
}

}  // namespace d2dsim
