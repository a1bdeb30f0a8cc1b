#ifndef REDQSIM_SCENARIO_IO_H
#define REDQSIM_SCENARIO_IO_H

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "redqsim/metrics.h"
#include "redqsim/scenario.h"

namespace redqsim {

// Scenario files are `key = value` lines with one `[group]` section per MTU
// group; `#` starts a comment. `schema = 1` is mandatory, unknown keys are
// rejected, and errors are reported as ConfigError naming the key.
//
//   schema = 1
//   name = standard
//   red_variant = RED_1
//   tcp_variant = Reno
//   w_q = 0.002
//   min_th = 40
//   max_th = 120
//   max_p = 0.1
//   bottleneck_delay_ms = 15
//   [group]
//   flows = 20
//   mtu = 1500
// `default_seed` applies when the file has no `seed` key.
Scenario parse_scenario(std::string_view text, std::uint64_t default_seed = 1);
Scenario load_scenario(const std::string& path, std::uint64_t default_seed = 1);
std::string format_scenario(const Scenario& scenario);

// Fixed column order, numbers with 6 significant digits.
inline constexpr std::string_view kCsvHeader =
    "scenario_name,red_variant,tcp_variant,bottleneck_delay_ms,group_mtu,goodput_mbps,plr,"
    "arrivals,drops_random,drops_forced_avg,drops_buffer,seed";

// One row per group, no header.
void write_csv_rows(std::ostream& out, const RunReport& report);
std::string format_number(double value);

}  // namespace redqsim

#endif  // REDQSIM_SCENARIO_IO_H
