// Two-way quantum-illumination link: the per-mode-pair covariance matrices
// of the SPDC source, of Alice's return/idler pair and of Eve's intercepted
// pair, all parameterised by ProtocolParams.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qisec/gaussian.hpp"

namespace qisec {

struct ProtocolParams {
  double ns = 0.0;     // mean signal photons per mode
  double kappa = 0.0;  // one-way channel transmissivity
  double gain = 1.0;   // Bob's amplifier gain
  double nb = 0.0;     // amplifier noise photon number
  std::int64_t modes = 1;  // signal-idler mode pairs per bit

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
  /// Same checks without the M >= 1 requirement, for per-mode quantities.
  void validate_per_mode() const;
};

/// The seven scalar coefficients that populate the printed matrices.
struct DerivedCoefficients {
  double s;    // 2 N_S + 1
  double c_q;  // 2 sqrt(N_S (N_S + 1))
  double a;    // 2 kappa^2 G N_S + 2 kappa N_B + 1
  double c_a;  // kappa sqrt(G) C_q
  double d;    // 2 (1 - kappa) N_S + 1
  double e;    // 2 (1 - kappa) kappa G N_S + 2 (1 - kappa) N_B + 1
  double c_e;  // 2 (1 - kappa) sqrt(kappa G) N_S
};

DerivedCoefficients derived_coefficients(const ProtocolParams& p);

/// Signal/idler covariance matrix, quarter-vacuum convention.
CovMat source_cm(double ns);

/// Return/idler covariance matrix given Bob's bit, quarter-vacuum convention.
CovMat alice_cm(const ProtocolParams& p, int bit);

/// Eve's (lost signal, lost return) covariance matrix given Bob's bit,
/// quarter-vacuum convention.
CovMat eve_cm(const ProtocolParams& p, int bit);

/// Both hypotheses in the analysis convention, ready for overlap evaluation.
HypothesisPair alice_pair(const ProtocolParams& p);
HypothesisPair eve_pair(const ProtocolParams& p);

struct PhysicalityReport {
  std::vector<double> nu;  // analysis convention, descending
  bool physical = false;
  std::string message;
};

/// Never throws for a well-formed CovMat; converts to the analysis
/// convention first when needed.
PhysicalityReport validate_physicality(const CovMat& cm);

}  // namespace qisec
