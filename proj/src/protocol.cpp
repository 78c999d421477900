#include "qisec/protocol.hpp"

#include <cmath>
#include <sstream>

namespace qisec {

namespace {

Eigen::MatrixXd correlated_block(double diag_a, double diag_b, double corr_x, double corr_p) {
  Eigen::MatrixXd m(4, 4);
  // clang-format off
  m << diag_a, 0.0,    corr_x, 0.0,
       0.0,    diag_a, 0.0,    corr_p,
       corr_x, 0.0,    diag_b, 0.0,
       0.0,    corr_p, 0.0,    diag_b;
  // clang-format on
  return m / 4.0;
}

double bit_sign(int bit) {
  if (bit != 0 && bit != 1) throw InvalidArgument("bit must be 0 or 1");
  return bit == 0 ? 1.0 : -1.0;
}

}  // namespace

void ProtocolParams::validate_per_mode() const {
  if (!std::isfinite(ns) || !std::isfinite(kappa) || !std::isfinite(gain) || !std::isfinite(nb)) {
    throw InvalidArgument("all protocol parameters must be finite");
  }
  if (!(ns > 0.0)) throw InvalidArgument("N_S must be > 0 (got " + std::to_string(ns) + ")");
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw InvalidArgument("kappa must lie in (0,1) (got " + std::to_string(kappa) + ")");
  }
  if (!(gain >= 1.0)) throw InvalidArgument("G must be >= 1 (got " + std::to_string(gain) + ")");
  if (nb < 0.0) throw InvalidArgument("N_B must be >= 0 (got " + std::to_string(nb) + ")");
  // <a_N a_N^dagger> = N_B / (G - 1) >= 1
  if (nb < gain - 1.0) {
    std::ostringstream msg;
    msg << "N_B >= G-1 violated (N_B = " << nb << ", G-1 = " << gain - 1.0 << ")";
    throw InvalidArgument(msg.str());
  }
}

void ProtocolParams::validate() const {
  validate_per_mode();
  if (modes < 1) throw InvalidArgument("M must be >= 1 (got " + std::to_string(modes) + ")");
}

DerivedCoefficients derived_coefficients(const ProtocolParams& p) {
  const double ns = p.ns;
  const double k = p.kappa;
  const double g = p.gain;
  const double nb = p.nb;
  DerivedCoefficients c;
  c.s = 2.0 * ns + 1.0;
  c.c_q = 2.0 * std::sqrt(ns * (ns + 1.0));
  c.a = 2.0 * k * k * g * ns + 2.0 * k * nb + 1.0;
  c.c_a = k * std::sqrt(g) * c.c_q;
  c.d = 2.0 * (1.0 - k) * ns + 1.0;
  c.e = 2.0 * (1.0 - k) * k * g * ns + 2.0 * (1.0 - k) * nb + 1.0;
  c.c_e = 2.0 * (1.0 - k) * std::sqrt(k * g) * ns;
  return c;
}

CovMat source_cm(double ns) {
  if (!(ns > 0.0) || !std::isfinite(ns)) {
    throw InvalidArgument("N_S must be > 0 (got " + std::to_string(ns) + ")");
  }
  const double s = 2.0 * ns + 1.0;
  const double c_q = 2.0 * std::sqrt(ns * (ns + 1.0));
  return CovMat(correlated_block(s, s, c_q, -c_q), Convention::kPaperQuarter);
}

CovMat alice_cm(const ProtocolParams& p, int bit) {
  p.validate_per_mode();
  const auto c = derived_coefficients(p);
  const double sign = bit_sign(bit);
  return CovMat(correlated_block(c.a, c.s, sign * c.c_a, -sign * c.c_a),
                Convention::kPaperQuarter);
}

CovMat eve_cm(const ProtocolParams& p, int bit) {
  p.validate_per_mode();
  const auto c = derived_coefficients(p);
  const double sign = bit_sign(bit);
  return CovMat(correlated_block(c.d, c.e, sign * c.c_e, sign * c.c_e),
                Convention::kPaperQuarter);
}

HypothesisPair alice_pair(const ProtocolParams& p) {
  return {GaussianState(to_analysis_convention(alice_cm(p, 0))),
          GaussianState(to_analysis_convention(alice_cm(p, 1))), Observer::kAlice};
}

HypothesisPair eve_pair(const ProtocolParams& p) {
  return {GaussianState(to_analysis_convention(eve_cm(p, 0))),
          GaussianState(to_analysis_convention(eve_cm(p, 1))), Observer::kEve};
}

PhysicalityReport validate_physicality(const CovMat& cm) {
  PhysicalityReport report;
  try {
    const CovMat unit =
        cm.convention() == Convention::kPaperQuarter ? to_analysis_convention(cm) : cm;
    report.nu = symplectic_eigenvalues(unit);
  } catch (const std::exception& e) {
    report.message = e.what();
    return report;
  }
  report.physical = true;
  for (double v : report.nu) {
    if (v < 1.0 - kPhysicalTol) report.physical = false;
  }
  std::ostringstream msg;
  msg << (report.physical ? "physical" : "non-physical: symplectic eigenvalue below 1")
      << "; nu =";
  for (double v : report.nu) msg << ' ' << v;
  report.message = msg.str();
  return report;
}

}  // namespace qisec
