#include "redqsim/cli.h"

#include <CLI11.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "redqsim/drop_law.h"
#include "redqsim/rng.h"
#include "redqsim/scenario_io.h"
#include "redqsim/simulator.h"

namespace redqsim::cli {

namespace {

// Below this many trials a 0.02 TV threshold says nothing.
constexpr std::int64_t kMeaningfulTrials = 10000;

struct CellResult {
  int code = kExitOk;
  std::string rows;
  std::string message;
};

CellResult run_cell(const Scenario& scenario) {
  CellResult res;
  try {
    const RunReport report = run(scenario);
    std::ostringstream rows;
    write_csv_rows(rows, report);
    res.rows = rows.str();
    if (report.stalled) {
      res.code = kExitStalled;
      for (const auto& d : report.diagnostics) res.message += d + '\n';
    }
  } catch (const ConfigError& e) {
    res.code = kExitConfig;
    res.message = std::string("config error: ") + e.what() + '\n';
  }
  return res;
}

int emit(const std::string& out_path, const std::string& text, std::ostream& out,
         std::ostream& err) {
  if (out_path == "-") {
    out << text;
    return kExitOk;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    err << "cannot write '" << out_path << "'\n";
    return kExitConfig;
  }
  f << text;
  return kExitOk;
}

}  // namespace

std::uint64_t default_seed_from_env() {
  if (const char* env = std::getenv("REDQSIM_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  return 1;
}

std::uint64_t sweep_cell_seed(std::uint64_t base_seed, std::size_t index) {
  return derive_seed(base_seed, index);
}

int cmd_run(const std::string& scenario_path, const std::string& out_path,
            std::optional<std::uint64_t> seed_override, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_path, default_seed_from_env());
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed_override) scenario.seed = *seed_override;

  const CellResult res = run_cell(scenario);
  err << res.message;
  if (res.code == kExitConfig) return res.code;
  std::string text(kCsvHeader);
  text += '\n';
  text += res.rows;
  if (int rc = emit(out_path, text, out, err); rc != kExitOk) return rc;
  return res.code;
}

int cmd_sweep(const SweepMatrix& matrix, const std::string& base_path,
              const std::string& out_path, std::optional<std::uint64_t> seed_override,
              unsigned jobs, std::ostream& out, std::ostream& err) {
  Scenario base;
  try {
    base = load_scenario(base_path, default_seed_from_env());
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed_override) base.seed = *seed_override;

  std::vector<Scenario> cells;
  for (auto v : matrix.variants) {
    for (auto t : matrix.tcp) {
      for (double d : matrix.delays_ms) {
        Scenario s = base;
        s.red.variant = v;
        s.tcp_variant = t;
        s.bottleneck_delay = d * 1e-3;
        s.seed = sweep_cell_seed(base.seed, cells.size());
        cells.push_back(std::move(s));
      }
    }
  }

  // Cells are independent; rows are buffered and written in cell order.
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_cell(cells[i]);
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string text(kCsvHeader);
  text += '\n';
  int code = kExitOk;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    text += results[i].rows;
    if (results[i].code != kExitOk) {
      err << "cell " << i << " (" << variant_name(cells[i].red.variant) << ", "
          << tcp_variant_name(cells[i].tcp_variant) << ", "
          << format_number(cells[i].bottleneck_delay * 1e3) << " ms) failed: "
          << results[i].message;
      if (code == kExitOk) code = results[i].code;
    }
  }
  if (int rc = emit(out_path, text, out, err); rc != kExitOk) return rc;
  return code;
}

int cmd_validate(RedVariant variant, double p_b, const std::vector<std::int64_t>& sizes,
                 std::int64_t max_size, std::int64_t trials, std::uint64_t seed,
                 std::ostream& out, std::ostream& err) {
  if (!(p_b > 0.0 && p_b <= 1.0)) {
    err << "config error: pb: must lie in (0, 1]\n";
    return kExitConfig;
  }
  if (sizes.empty() || trials <= 0) {
    err << "config error: sizes and trials must be non-empty/positive\n";
    return kExitConfig;
  }
  if (trials < kMeaningfulTrials) {
    err << "warning: " << trials
        << " trials; the TV threshold is statistically meaningless below "
        << kMeaningfulTrials << '\n';
  }

  InterdropLaw closed;
  InterdropLaw empirical;
  try {
    const auto smallest = *std::min_element(sizes.begin(), sizes.end());
    const double s_min = static_cast<double>(smallest) / static_cast<double>(max_size);
    const auto length = static_cast<std::size_t>(std::ceil(1.0 / (p_b * s_min * s_min))) + 2;
    const SizeStream stream = SizeStream::cyclic(sizes, max_size, length);
    switch (variant) {
      case RedVariant::kRed1: closed = interdrop_pmf_red1(p_b); break;
      case RedVariant::kRed4:
      case RedVariant::kRed5: closed = interdrop_pmf_weighted(p_b, stream, variant); break;
      default: closed = interdrop_pmf_product(variant, p_b, stream); break;
    }
    empirical = montecarlo_interdrop(variant, p_b, stream, trials, seed);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const double tv = total_variation(closed, empirical);
  out << "# " << variant_name(variant) << " p_b=" << format_number(p_b)
      << " trials=" << trials << " seed=" << seed << '\n';
  out << "n,closed_form,monte_carlo\n";
  const auto n_max = std::max(closed.support_max(), empirical.support_max());
  for (std::int64_t n = 1; n <= n_max; ++n) {
    out << n << ',' << format_number(closed(n)) << ',' << format_number(empirical(n)) << '\n';
  }
  out << "tv_distance," << format_number(tv) << '\n';
  const bool pass = tv < kValidateTvThreshold;
  out << (pass ? "PASS" : "FAIL") << " (threshold " << kValidateTvThreshold << ")\n";
  return pass ? kExitOk : kExitThreshold;
}

int main(int argc, char** argv) {
  CLI::App app{"RED packet-size experiments: dumbbell simulator and drop-law validator"};
  app.require_subcommand(1);

  std::string scenario_path, out_path = "-";
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "run one scenario file, write per-group CSV");
  run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  run_cmd->add_option("--out", out_path, "CSV output path ('-' for stdout)");
  run_cmd->add_option("--seed", seed, "override the scenario seed");

  std::string base_path;
  std::vector<std::string> variant_names{"RED_1", "RED_2", "RED_3", "RED_4", "RED_5"};
  std::vector<std::string> tcp_names{"Reno", "Sack"};
  std::vector<double> delays{15.0, 80.0};
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep_cmd = app.add_subcommand("sweep", "run a variants x tcp x delay grid");
  sweep_cmd->add_option("--base", base_path, "base scenario file")->required();
  sweep_cmd->add_option("--variants", variant_names, "RED variants")->delimiter(',');
  sweep_cmd->add_option("--tcp", tcp_names, "TCP variants")->delimiter(',');
  sweep_cmd->add_option("--delays-ms", delays, "bottleneck delays in ms")->delimiter(',');
  sweep_cmd->add_option("--out", out_path, "CSV output path ('-' for stdout)");
  sweep_cmd->add_option("--seed", seed, "base seed for the cell seed derivation");
  sweep_cmd->add_option("--jobs", jobs, "concurrent cells");

  std::string variant = "RED_1";
  double pb = 0.1;
  std::vector<std::int64_t> sizes{1500};
  std::int64_t max_size = 1500;
  std::int64_t trials = 1000000;
  std::uint64_t validate_seed = default_seed_from_env();
  auto* validate_cmd =
      app.add_subcommand("validate", "closed-form vs Monte Carlo inter-drop distribution");
  validate_cmd->add_option("--variant", variant, "RED_1..RED_5");
  validate_cmd->add_option("--pb", pb, "frozen temporary drop probability");
  validate_cmd->add_option("--sizes", sizes, "packet sizes in bytes, cycled")->delimiter(',');
  validate_cmd->add_option("--max-size", max_size, "M, bytes");
  validate_cmd->add_option("--trials", trials, "number of inter-drop gaps to sample");
  validate_cmd->add_option("--seed", validate_seed, "Monte Carlo seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*run_cmd) return cmd_run(scenario_path, out_path, seed, std::cout, std::cerr);

  if (*sweep_cmd) {
    SweepMatrix m;
    for (const auto& n : variant_names) {
      auto v = parse_variant(n);
      if (!v) {
        std::cerr << "config error: variants: unknown '" << n << "'\n";
        return kExitConfig;
      }
      m.variants.push_back(*v);
    }
    for (const auto& n : tcp_names) {
      auto t = parse_tcp_variant(n);
      if (!t) {
        std::cerr << "config error: tcp: unknown '" << n << "'\n";
        return kExitConfig;
      }
      m.tcp.push_back(*t);
    }
    m.delays_ms = delays;
    return cmd_sweep(m, base_path, out_path, seed, jobs, std::cout, std::cerr);
  }

  const auto v = parse_variant(variant);
  if (!v) {
    std::cerr << "config error: variant: unknown '" << variant << "'\n";
    return kExitConfig;
  }
  return cmd_validate(*v, pb, sizes, max_size, trials, validate_seed, std::cout, std::cerr);
}

}  // namespace redqsim::cli
