#include "qisec/receivers.hpp"

#include <cmath>

namespace qisec {

ErrorBounds alice_optimum_bounds(const ProtocolParams& p) {
  p.validate();
  return chernoff_bound(alice_pair(p), p.modes);
}

ErrorBounds eve_optimum_bounds(const ProtocolParams& p) {
  p.validate();
  return chernoff_bound(eve_pair(p), p.modes);
}

double opa_gain(const ProtocolParams& p) {
  p.validate_per_mode();
  if (!(p.kappa * p.nb > 0.0)) {
    throw InvalidArgument("OPA gain needs kappa N_B > 0");
  }
  return 1.0 + p.ns / std::sqrt(p.kappa * p.nb);
}

OpaReceiverModel opa_model(const ProtocolParams& p) {
  const double g = opa_gain(p);
  const auto c = derived_coefficients(p);
  // a' = sqrt(g) a_I + sqrt(g-1) a_R^dagger; <a_I^dag a_I> = N_S,
  // <a_R a_R^dag> = (A+1)/2 and <a_R a_I> = (-1)^k C_a / 2.
  const double common = g * p.ns + (g - 1.0) * (c.a + 1.0) / 2.0;
  const double cross = std::sqrt(g * (g - 1.0)) * c.c_a;
  return {g, common + cross, common - cross};
}

double log_bose_einstein_bhattacharyya(double n0, double n1) {
  if (!(n0 >= 0.0) || !(n1 >= 0.0)) {
    throw InvalidArgument("mean photon numbers must be >= 0");
  }
  const double denom = std::sqrt((n0 + 1.0) * (n1 + 1.0)) - std::sqrt(n0 * n1);
  return std::min(0.0, -std::log(denom));
}

OpaBound opa_bhattacharyya(const OpaReceiverModel& model, std::int64_t modes) {
  if (modes < 1) throw InvalidArgument("number of modes M must be >= 1");
  OpaBound out;
  out.model = model;
  out.modes = modes;
  out.log_q = log_bose_einstein_bhattacharyya(model.n0, model.n1);
  out.upper = 0.5 * std::exp(static_cast<double>(modes) * out.log_q);
  return out;
}

OpaBound opa_bhattacharyya(const ProtocolParams& p) {
  p.validate();
  return opa_bhattacharyya(opa_model(p), p.modes);
}

ApproxExponents approx_exponents(const ProtocolParams& p) {
  p.validate_per_mode();
  ApproxExponents out;
  const double base = p.kappa * p.gain * p.ns / p.nb;
  out.alice_opa = 2.0 * base;
  out.alice_opt = 4.0 * base;
  out.eve_opt = 4.0 * (1.0 - p.kappa) * base * p.ns;
  out.in_regime = p.ns < 0.01 && p.kappa * p.nb > 100.0;
  return out;
}

}  // namespace qisec
