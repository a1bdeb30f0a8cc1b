#include "redqsim/scenario_io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace redqsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "not a number: '" + value + "'");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "not an integer: '" + value + "'");
  return out;
}

using Section = std::map<std::string, std::string>;

const std::set<std::string>& top_level_keys() {
  static const std::set<std::string> keys = {
      "schema", "name", "duration_s", "warmup_s", "seed", "tcp_variant", "red_variant",
      "w_q", "min_th", "max_th", "max_p", "M", "buffer_cap", "bottleneck_rate_mbps",
      "access_rate_mbps", "bottleneck_delay_ms", "access_delay_ms", "timer_granularity_ms",
      "min_rto_ticks", "rcv_wnd", "start_jitter_s", "bottleneck_loss"};
  return keys;
}

// Keys that define the experiment and so have no silent default.
constexpr const char* kRequired[] = {"schema", "red_variant", "tcp_variant", "w_q",
                                     "min_th", "max_th",      "max_p",       "bottleneck_delay_ms"};

}  // namespace

Scenario parse_scenario(std::string_view text, std::uint64_t default_seed) {
  Section top;
  std::vector<Section> groups;
  Section* current = &top;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[group]") {
      groups.emplace_back();
      current = &groups.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const bool known = current == &top ? top_level_keys().count(key) > 0
                                       : (key == "flows" || key == "mtu");
    if (!known) throw ConfigError(key, "unknown key");
    if (!current->emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }

  for (const char* key : kRequired) {
    if (!top.count(key)) throw ConfigError(key, "missing required key");
  }
  if (to_int("schema", top.at("schema")) != 1) throw ConfigError("schema", "unsupported version");

  Scenario s;
  s.seed = default_seed;
  auto num = [&](const char* key, double& field, double scale = 1.0) {
    if (auto it = top.find(key); it != top.end()) field = to_double(key, it->second) * scale;
  };
  auto integer = [&](const char* key, auto& field) {
    if (auto it = top.find(key); it != top.end()) {
      field = static_cast<std::remove_reference_t<decltype(field)>>(to_int(key, it->second));
    }
  };

  if (auto it = top.find("name"); it != top.end()) {
    if (it->second.empty() || it->second.find(',') != std::string::npos) {
      throw ConfigError("name", "must be non-empty and free of commas");
    }
    s.name = it->second;
  }
  if (auto it = top.find("seed"); it != top.end()) {
    s.seed = static_cast<std::uint64_t>(to_int("seed", it->second));
  }
  const auto red_variant = parse_variant(top.at("red_variant"));
  if (!red_variant) throw ConfigError("red_variant", "expected RED_1..RED_5");
  s.red.variant = *red_variant;
  const auto tcp = parse_tcp_variant(top.at("tcp_variant"));
  if (!tcp) throw ConfigError("tcp_variant", "expected Reno or Sack");
  s.tcp_variant = *tcp;

  num("duration_s", s.duration);
  num("warmup_s", s.warmup);
  num("w_q", s.red.w_q);
  num("min_th", s.red.min_th);
  num("max_th", s.red.max_th);
  num("max_p", s.red.max_p);
  integer("M", s.red.max_packet_size);
  integer("buffer_cap", s.red.buffer_cap);
  num("bottleneck_rate_mbps", s.bottleneck_rate, 1e6);
  num("access_rate_mbps", s.access_rate, 1e6);
  num("bottleneck_delay_ms", s.bottleneck_delay, 1e-3);
  num("access_delay_ms", s.access_delay, 1e-3);
  num("timer_granularity_ms", s.timer_granularity, 1e-3);
  integer("min_rto_ticks", s.min_rto_ticks);
  integer("rcv_wnd", s.rcv_wnd);
  num("start_jitter_s", s.start_jitter);
  num("bottleneck_loss", s.bottleneck_loss);

  for (const auto& g : groups) {
    if (!g.count("flows")) throw ConfigError("flows", "missing in [group]");
    if (!g.count("mtu")) throw ConfigError("mtu", "missing in [group]");
    FlowGroup fg;
    fg.flow_count = static_cast<int>(to_int("flows", g.at("flows")));
    fg.mtu = to_int("mtu", g.at("mtu"));
    s.groups.push_back(fg);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path, std::uint64_t default_seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), default_seed);
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "schema = 1\n"
      << "name = " << s.name << '\n'
      << "duration_s = " << format_number(s.duration) << '\n'
      << "warmup_s = " << format_number(s.warmup) << '\n'
      << "seed = " << s.seed << '\n'
      << "tcp_variant = " << tcp_variant_name(s.tcp_variant) << '\n'
      << "red_variant = " << variant_name(s.red.variant) << '\n'
      << "w_q = " << format_number(s.red.w_q) << '\n'
      << "min_th = " << format_number(s.red.min_th) << '\n'
      << "max_th = " << format_number(s.red.max_th) << '\n'
      << "max_p = " << format_number(s.red.max_p) << '\n'
      << "M = " << s.red.max_packet_size << '\n'
      << "buffer_cap = " << s.red.buffer_cap << '\n'
      << "bottleneck_rate_mbps = " << format_number(s.bottleneck_rate / 1e6) << '\n'
      << "access_rate_mbps = " << format_number(s.access_rate / 1e6) << '\n'
      << "bottleneck_delay_ms = " << format_number(s.bottleneck_delay * 1e3) << '\n'
      << "access_delay_ms = " << format_number(s.access_delay * 1e3) << '\n'
      << "timer_granularity_ms = " << format_number(s.timer_granularity * 1e3) << '\n'
      << "min_rto_ticks = " << s.min_rto_ticks << '\n'
      << "rcv_wnd = " << s.rcv_wnd << '\n'
      << "start_jitter_s = " << format_number(s.start_jitter) << '\n'
      << "bottleneck_loss = " << format_number(s.bottleneck_loss) << '\n';
  for (const auto& g : s.groups) {
    out << "\n[group]\nflows = " << g.flow_count << "\nmtu = " << g.mtu << '\n';
  }
  return out.str();
}

void write_csv_rows(std::ostream& out, const RunReport& r) {
  for (const auto& g : r.groups) {
    out << r.scenario_name << ',' << variant_name(r.red_variant) << ','
        << tcp_variant_name(r.tcp_variant) << ',' << format_number(r.bottleneck_delay_s * 1e3)
        << ',' << g.mtu << ',' << format_number(g.goodput_bps / 1e6) << ','
        << (g.plr ? format_number(*g.plr) : std::string("nan")) << ',' << g.counters.arrivals
        << ',' << g.counters.drops.random << ',' << g.counters.drops.forced_avg << ','
        << g.counters.drops.buffer << ',' << r.seed << '\n';
  }
}

}  // namespace redqsim
