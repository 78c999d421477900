// Monte Carlo bit-error-rate estimate for the OPA photon-counting receiver.
//
// Each output mode of the OPA is thermal, so the count in one mode is
// geometric (Bose-Einstein) and the total over M modes is negative binomial.
// Random numbers come from boost::random::mt19937_64 and Boost's
// distributions, whose algorithms are fixed by the library rather than by
// the platform's standard library; the seed determines every draw.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

#include "qisec/protocol.hpp"
#include "qisec/receivers.hpp"

namespace qisec {

using Rng = boost::random::mt19937_64;

inline constexpr std::int64_t kRecommendedTrials = 10'000;

struct McConfig {
  std::int64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  ProtocolParams params;
  int shards = 1;  // shard i is seeded with seed + i
};

struct McResult {
  double empirical_error = 0.0;
  double ci_lo = 0.0;  // Wilson 95%
  double ci_hi = 0.0;
  double threshold = 0.0;
  std::int64_t trials_used = 0;
  std::int64_t errors = 0;
  std::vector<std::string> warnings;
};

/// Maximum-likelihood threshold on the total count: declare bit 0 iff
/// count >= threshold. Requires n0 > n1 > 0.
double ml_threshold(const OpaReceiverModel& model, std::int64_t modes);

/// Total photon count over `modes` iid thermal modes of mean `mean_per_mode`.
std::int64_t draw_total_count(Rng& rng, double mean_per_mode, std::int64_t modes);

struct WilsonInterval {
  double lo;
  double hi;
};

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

/// Runs the receiver on a given model. When n0 == n1 there is no threshold
/// and the receiver always declares bit 0.
McResult simulate_opa(const OpaReceiverModel& model, std::int64_t modes, std::int64_t trials,
                      std::uint64_t seed, int shards = 1);

McResult run_mc(const McConfig& config);

}  // namespace qisec
