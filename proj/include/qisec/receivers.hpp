// Error-probability bounds for the three receivers of interest: Alice's and
// Eve's optimum quantum receivers and Alice's OPA photon-counting receiver.
#pragma once

#include <cstdint>

#include "qisec/gaussian.hpp"
#include "qisec/protocol.hpp"

namespace qisec {

/// Per-mode photon statistics at the output of Alice's OPA. Each output mode
/// is thermal with mean n0 (bit 0) or n1 (bit 1).
struct OpaReceiverModel {
  double g_opa = 1.0;
  double n0 = 0.0;
  double n1 = 0.0;
};

/// Bhattacharyya bound of the OPA receiver. Only an upper bound is defined.
struct OpaBound {
  OpaReceiverModel model;
  std::int64_t modes = 0;
  double log_q = 0.0;  // per-mode ln of the Bhattacharyya coefficient
  double upper = 0.5;
};

/// Low-brightness, high-noise per-mode error exponents.
struct ApproxExponents {
  double alice_opt = 0.0;  // 4 kappa G N_S / N_B
  double eve_opt = 0.0;    // 4 kappa (1 - kappa) G N_S^2 / N_B
  double alice_opa = 0.0;  // 2 kappa G N_S / N_B
  bool in_regime = false;  // N_S < 0.01 and kappa N_B > 100
};

ErrorBounds alice_optimum_bounds(const ProtocolParams& p);
ErrorBounds eve_optimum_bounds(const ProtocolParams& p);

double opa_gain(const ProtocolParams& p);
OpaReceiverModel opa_model(const ProtocolParams& p);

/// Bhattacharyya coefficient of two Bose-Einstein count distributions,
/// 1 / [sqrt((n0+1)(n1+1)) - sqrt(n0 n1)], as a logarithm.
double log_bose_einstein_bhattacharyya(double n0, double n1);

OpaBound opa_bhattacharyya(const ProtocolParams& p);
OpaBound opa_bhattacharyya(const OpaReceiverModel& model, std::int64_t modes);

ApproxExponents approx_exponents(const ProtocolParams& p);

}  // namespace qisec
