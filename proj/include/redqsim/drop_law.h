#ifndef REDQSIM_DROP_LAW_H
#define REDQSIM_DROP_LAW_H

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "redqsim/red_queue.h"

namespace redqsim {

// Distribution of the number of arrivals after a drop up to and including
// the next drop. pmf()[n - 1] holds P[N = n].
class InterdropLaw {
 public:
  InterdropLaw() = default;
  explicit InterdropLaw(std::vector<double> pmf);

  double operator()(std::int64_t n) const;
  std::int64_t support_max() const { return static_cast<std::int64_t>(pmf_.size()); }
  const std::vector<double>& pmf() const { return pmf_; }
  double total() const;
  double mean() const;

 private:
  std::vector<double> pmf_;
};

// Packet sizes of the arrivals following a drop; sizes[i] is the (i+1)-th.
struct SizeStream {
  std::vector<std::int64_t> sizes;
  std::int64_t max_size = 1500;

  // Repeats `pattern` until `length` sizes are produced.
  static SizeStream cyclic(std::span<const std::int64_t> pattern,
                           std::int64_t max_size, std::size_t length);

  // Throws std::invalid_argument unless 0 < L_i <= M.
  void validate() const;
};

// Uniform law of the count-corrected packet-mode gatekeeper: p_b on
// 1..floor(1/p_b), any residual mass at the next index.
InterdropLaw interdrop_pmf_red1(double p_b);

// Size-weighted uniform law for RED_4 (w = L/M) and RED_5 (w = (L/M)^2):
// P[N = n] = p_b * w_n while the cumulative weight stays within 1/p_b.
InterdropLaw interdrop_pmf_weighted(double p_b, const SizeStream& stream,
                                    RedVariant variant);

// P[N = n] = p_a(n) * prod_{i<n} (1 - p_a(i)) evaluated term by term with
// the gatekeeper's probability rule. Defined for every variant; for RED_2
// and RED_3 it is the only closed form available.
InterdropLaw interdrop_pmf_product(RedVariant variant, double p_b,
                                   const SizeStream& stream);

// Drives on_packet_arrival with the average queue pinned so that p_b stays
// constant and records the gap between consecutive drops. The size stream
// restarts after every drop. Deterministic for a given seed.
InterdropLaw montecarlo_interdrop(RedVariant variant, double p_b,
                                  const SizeStream& stream,
                                  std::int64_t trials, std::uint64_t seed);

double total_variation(const InterdropLaw& a, const InterdropLaw& b);

inline const double kMathisConstant = std::sqrt(1.5);

// Upper bound on TCP goodput in bits/s: 8 * mss * C / (rtt * sqrt(p)).
double mathis_goodput_bound(double mss_bytes, double rtt_s, double p,
                            double c = kMathisConstant);

// Normalized distance from the equal-goodput condition mss1^2/p1 = mss2^2/p2.
double fairness_gap(double mss1, double p1, double mss2, double p2);

}  // namespace redqsim

#endif  // REDQSIM_DROP_LAW_H
