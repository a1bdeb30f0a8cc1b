#ifndef REDQSIM_CLI_H
#define REDQSIM_CLI_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "redqsim/red_queue.h"
#include "redqsim/tcp.h"

namespace redqsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitThreshold = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStalled = 3;

// Total-variation threshold for `validate`.
inline constexpr double kValidateTvThreshold = 0.02;

struct SweepMatrix {
  std::vector<RedVariant> variants;
  std::vector<TcpVariant> tcp;
  std::vector<double> delays_ms;

  std::size_t cells() const { return variants.size() * tcp.size() * delays_ms.size(); }
};

// REDQSIM_SEED if set and numeric, otherwise 1.
std::uint64_t default_seed_from_env();

// Seed of sweep cell `index` (cells enumerated variant-major, then tcp,
// then delay): splitmix64(base ^ splitmix64(index)).
std::uint64_t sweep_cell_seed(std::uint64_t base_seed, std::size_t index);

// `out_path` of "-" writes to `out`. Diagnostics go to `err`.
int cmd_run(const std::string& scenario_path, const std::string& out_path,
            std::optional<std::uint64_t> seed_override, std::ostream& out, std::ostream& err);

int cmd_sweep(const SweepMatrix& matrix, const std::string& base_path,
              const std::string& out_path, std::optional<std::uint64_t> seed_override,
              unsigned jobs, std::ostream& out, std::ostream& err);

int cmd_validate(RedVariant variant, double p_b, const std::vector<std::int64_t>& sizes,
                 std::int64_t max_size, std::int64_t trials, std::uint64_t seed,
                 std::ostream& out, std::ostream& err);

// Full command-line entry point (CLI11 parsing + dispatch).
int main(int argc, char** argv);

}  // namespace redqsim::cli

#endif  // REDQSIM_CLI_H
