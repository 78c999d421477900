// Fiber link planning: transmissivity and mode count from a physical link,
// the number of mode pairs needed for a target error probability, and a
// combined Alice/Eve security report.
#pragma once

#include <cstdint>
#include <string>

#include "qisec/protocol.hpp"

namespace qisec {

struct LinkBudget {
  double length_km = 0.0;
  double loss_db_per_km = 0.0;
  double w_hz = 0.0;  // SPDC phase-matching bandwidth
  double t_s = 0.0;   // bit duration
  double kappa = 1.0;
  std::int64_t modes = 0;  // floor(W T)
  double bit_rate = 0.0;   // 1 / T

  double total_loss_db() const { return length_km * loss_db_per_km; }
};

LinkBudget budget_from_fiber(double length_km, double loss_db_per_km, double w_hz, double t_s);

/// -10 log10(kappa), i.e. the dB loss implied by a transmissivity.
double loss_db_from_kappa(double kappa);

/// Links shorter than this in transmissivity terms leave Eve with nothing to
/// intercept and are rejected by the planner.
inline constexpr double kMaxPlannerKappa = 1.0 - 1e-4;

/// Combines a budget with the source/amplifier settings. Throws
/// InvalidArgument when the budget cannot be turned into valid parameters.
ProtocolParams params_for_link(const LinkBudget& budget, double ns, double gain, double nb);

enum class Receiver { kOptimum, kOpa };

std::string to_string(Receiver r);
Receiver receiver_from_string(const std::string& name);

/// Per-mode log overlap used by the selected receiver's upper bound.
double receiver_log_overlap(const ProtocolParams& p, Receiver receiver);

/// Smallest M with the selected upper bound <= target. `p.modes` is ignored.
std::int64_t required_modes(const ProtocolParams& p, double target, Receiver receiver);
std::int64_t required_modes_from_log_overlap(double log_q, double target);

struct SecurityOptions {
  double insecure_below = 0.25;        // Eve lower bound threshold
  double alice_error_ceiling = 1e-3;   // OPA bound above this is unusable
};

struct SecurityReport {
  double alice_optimum_upper = 0.5;
  double alice_opa_upper = 0.5;
  double eve_lower = 0.5;
  double eve_upper = 0.5;
  double ratio = 1.0;       // eve_lower / alice_opa_upper
  double difference = 0.0;  // eve_lower - alice_opa_upper
  bool in_regime = false;
  bool insecure = false;
  bool unusable = false;
  bool secure() const { return !insecure && !unusable; }
};

SecurityReport security_margin(const ProtocolParams& p, const SecurityOptions& opts = {});

}  // namespace qisec
