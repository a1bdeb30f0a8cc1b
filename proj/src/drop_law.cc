#include "redqsim/drop_law.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "redqsim/rng.h"

namespace redqsim {

namespace {

// Residuals below this are floating-point noise from the cumulative sums.
constexpr double kMassEps = 1e-12;

void check_pb(double p_b) {
  if (!(p_b > 0.0 && p_b <= 1.0)) {
    throw std::invalid_argument("p_b must lie in (0, 1], got " +
                                std::to_string(p_b));
  }
}

// Shared by the red1 and weighted laws: mass p_b * w_n while the cumulative
// weight is within 1/p_b, then whatever is left at the first index past it.
template <typename WeightAt>
InterdropLaw cumulative_law(double p_b, std::size_t limit, WeightAt weight_at) {
  std::vector<double> pmf;
  double assigned = 0.0;
  double cumulative = 0.0;
  for (std::size_t i = 0;; ++i) {
    if (i >= limit) {
      throw std::invalid_argument(
          "size stream exhausted before the inter-drop support closed; "
          "supply a longer stream");
    }
    const double w = weight_at(i);
    cumulative += w;
    if (cumulative * p_b <= 1.0 + kMassEps) {
      pmf.push_back(p_b * w);
      assigned += p_b * w;
      if (assigned >= 1.0 - kMassEps) break;
    } else {
      const double residual = 1.0 - assigned;
      if (residual > kMassEps) pmf.push_back(residual);
      break;
    }
  }
  return InterdropLaw(std::move(pmf));
}

}  // namespace

InterdropLaw::InterdropLaw(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  while (!pmf_.empty() && pmf_.back() <= 0.0) pmf_.pop_back();
}

double InterdropLaw::operator()(std::int64_t n) const {
  if (n < 1 || n > support_max()) return 0.0;
  return pmf_[static_cast<std::size_t>(n - 1)];
}

double InterdropLaw::total() const {
  return std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
}

double InterdropLaw::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    m += static_cast<double>(i + 1) * pmf_[i];
  }
  return m;
}

SizeStream SizeStream::cyclic(std::span<const std::int64_t> pattern,
                              std::int64_t max_size, std::size_t length) {
  if (pattern.empty()) throw std::invalid_argument("empty size pattern");
  SizeStream s;
  s.max_size = max_size;
  s.sizes.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    s.sizes.push_back(pattern[i % pattern.size()]);
  }
  return s;
}

void SizeStream::validate() const {
  if (max_size <= 0) throw std::invalid_argument("M must be positive");
  for (auto l : sizes) {
    if (l <= 0 || l > max_size) {
      throw std::invalid_argument("packet size " + std::to_string(l) +
                                  " outside (0, M]");
    }
  }
}

InterdropLaw interdrop_pmf_red1(double p_b) {
  check_pb(p_b);
  const auto limit = static_cast<std::size_t>(std::ceil(1.0 / p_b)) + 2;
  return cumulative_law(p_b, limit, [](std::size_t) { return 1.0; });
}

InterdropLaw interdrop_pmf_weighted(double p_b, const SizeStream& stream,
                                    RedVariant variant) {
  check_pb(p_b);
  stream.validate();
  if (variant != RedVariant::kRed4 && variant != RedVariant::kRed5) {
    throw std::invalid_argument("weighted law defined for RED_4 and RED_5 only");
  }
  return cumulative_law(p_b, stream.sizes.size(), [&](std::size_t i) {
    const double s = static_cast<double>(stream.sizes[i]) /
                     static_cast<double>(stream.max_size);
    return variant == RedVariant::kRed4 ? s : s * s;
  });
}

InterdropLaw interdrop_pmf_product(RedVariant variant, double p_b,
                                   const SizeStream& stream) {
  check_pb(p_b);
  stream.validate();
  std::vector<double> pmf;
  double survival = 1.0;
  double count = 0.0;
  for (std::size_t i = 0; survival > kMassEps; ++i) {
    if (i >= stream.sizes.size()) {
      throw std::invalid_argument(
          "size stream exhausted before the inter-drop support closed; "
          "supply a longer stream");
    }
    const auto size = stream.sizes[i];
    const double p_a = compute_pa(variant, p_b, count, size, stream.max_size);
    pmf.push_back(survival * p_a);
    survival *= 1.0 - p_a;
    count += count_increment(variant, size, stream.max_size);
  }
  return InterdropLaw(std::move(pmf));
}

InterdropLaw montecarlo_interdrop(RedVariant variant, double p_b,
                                  const SizeStream& stream,
                                  std::int64_t trials, std::uint64_t seed) {
  check_pb(p_b);
  stream.validate();
  if (trials <= 0) throw std::invalid_argument("trials must be positive");

  // avg is held at 1 packet with min_th = 0 and max_p = 1, so
  // p_b = 1 / max_th.
  RedParams params;
  params.variant = variant;
  params.w_q = 1.0;
  params.min_th = 0.0;
  params.max_p = 1.0;
  params.max_th = 1.0 / p_b;
  params.buffer_cap = static_cast<std::int64_t>(std::ceil(params.max_th)) + 2;
  params.max_packet_size = stream.max_size;

  Rng rng(seed);
  RedState state;
  state.avg = 1.0;
  std::vector<std::int64_t> histogram;
  for (std::int64_t t = 0; t < trials; ++t) {
    std::size_t gap = 0;
    for (;;) {
      if (gap >= stream.sizes.size()) {
        throw std::invalid_argument("size stream too short for Monte Carlo gap");
      }
      state.q = 1;
      const auto d = on_packet_arrival(state, params, stream.sizes[gap], rng.uniform());
      ++gap;
      if (d.dropped()) break;
    }
    if (histogram.size() < gap) histogram.resize(gap, 0);
    ++histogram[gap - 1];
  }
  std::vector<double> pmf(histogram.size());
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    pmf[i] = static_cast<double>(histogram[i]) / static_cast<double>(trials);
  }
  return InterdropLaw(std::move(pmf));
}

double total_variation(const InterdropLaw& a, const InterdropLaw& b) {
  const auto n = std::max(a.support_max(), b.support_max());
  double sum = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) sum += std::abs(a(i) - b(i));
  return 0.5 * sum;
}

double mathis_goodput_bound(double mss_bytes, double rtt_s, double p, double c) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (!(rtt_s > 0.0)) throw std::invalid_argument("rtt must be positive");
  return 8.0 * mss_bytes * c / (rtt_s * std::sqrt(p));
}

double fairness_gap(double mss1, double p1, double mss2, double p2) {
  if (!(p1 > 0.0 && p2 > 0.0)) {
    throw std::invalid_argument("drop probabilities must be positive");
  }
  const double a = mss1 * mss1 / p1;
  const double b = mss2 * mss2 / p2;
  return std::abs(a - b) / std::max(a, b);
}

}  // namespace redqsim
