#include "qisec/monte_carlo.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include <boost/random/negative_binomial_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace qisec {

double ml_threshold(const OpaReceiverModel& model, std::int64_t modes) {
  const double n0 = model.n0;
  const double n1 = model.n1;
  if (modes < 1) throw InvalidArgument("number of modes M must be >= 1");
  if (!(n1 > 0.0) || !(n0 > n1)) {
    throw InvalidArgument("ml_threshold: requires n0 > n1 > 0 (no threshold exists otherwise)");
  }
  const double num = std::log1p(n0) - std::log1p(n1);
  const double den = std::log(n0) + std::log1p(n1) - std::log(n1) - std::log1p(n0);
  return static_cast<double>(modes) * num / den;
}

std::int64_t draw_total_count(Rng& rng, double mean_per_mode, std::int64_t modes) {
  if (mean_per_mode <= 0.0) return 0;
  // Failures before `modes` successes with success probability 1/(1+n).
  boost::random::negative_binomial_distribution<std::int64_t, double> dist(
      modes, 1.0 / (1.0 + mean_per_mode));
  return dist(rng);
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

McResult simulate_opa(const OpaReceiverModel& model, std::int64_t modes, std::int64_t trials,
                      std::uint64_t seed, int shards) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (shards < 1) throw InvalidArgument("shards must be >= 1");
  if (modes < 1) throw InvalidArgument("number of modes M must be >= 1");

  McResult result;
  const bool degenerate = !(model.n0 > model.n1);
  result.threshold = degenerate ? 0.0 : ml_threshold(model, modes);
  if (degenerate) {
    result.warnings.push_back("n0 <= n1: no likelihood-ratio threshold, always declaring bit 0");
  }

  const double threshold = result.threshold;
  auto run_shard = [&model, modes, threshold](std::uint64_t shard_seed, std::int64_t count) {
    Rng rng(shard_seed);
    boost::random::uniform_int_distribution<int> coin(0, 1);
    std::int64_t errors = 0;
    for (std::int64_t t = 0; t < count; ++t) {
      const int bit = coin(rng);
      const double mean = bit == 0 ? model.n0 : model.n1;
      const auto total = draw_total_count(rng, mean, modes);
      const int decided = static_cast<double>(total) >= threshold ? 0 : 1;
      if (decided != bit) ++errors;
    }
    return errors;
  };

  std::vector<std::future<std::int64_t>> jobs;
  const std::int64_t per_shard = trials / shards;
  const std::int64_t remainder = trials % shards;
  for (int i = 0; i < shards; ++i) {
    const std::int64_t count = per_shard + (i < remainder ? 1 : 0);
    jobs.push_back(std::async(std::launch::async, run_shard, seed + static_cast<std::uint64_t>(i),
                              count));
  }
  for (auto& job : jobs) result.errors += job.get();

  result.trials_used = trials;
  result.empirical_error = static_cast<double>(result.errors) / static_cast<double>(trials);
  const auto ci = wilson_interval(result.errors, trials);
  result.ci_lo = ci.lo;
  result.ci_hi = ci.hi;
  return result;
}

McResult run_mc(const McConfig& config) {
  config.params.validate();
  const auto model = opa_model(config.params);
  const auto bound = opa_bhattacharyya(model, config.params.modes);

  std::vector<std::string> warnings;
  if (config.trials < kRecommendedTrials) {
    std::ostringstream msg;
    msg << "low statistical power: " << config.trials << " trials (recommended >= "
        << kRecommendedTrials << ")";
    warnings.push_back(msg.str());
  }
  if (static_cast<double>(config.trials) * std::min(bound.upper, 1.0) < 10.0) {
    warnings.push_back(
        "low statistical power: fewer than 10 error events expected at the analytic bound");
  }
  auto result = simulate_opa(model, config.params.modes, config.trials, config.seed, config.shards);
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace qisec
