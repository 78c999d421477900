#include "qisec/link_planner.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qisec/receivers.hpp"

namespace qisec {

LinkBudget budget_from_fiber(double length_km, double loss_db_per_km, double w_hz, double t_s) {
  if (!std::isfinite(length_km) || length_km < 0.0) {
    throw InvalidArgument("fiber length must be >= 0 km");
  }
  if (!std::isfinite(loss_db_per_km) || loss_db_per_km < 0.0) {
    throw InvalidArgument("fiber loss must be >= 0 dB/km");
  }
  if (!(w_hz > 0.0) || !std::isfinite(w_hz)) throw InvalidArgument("bandwidth W must be > 0 Hz");
  if (!(t_s > 0.0) || !std::isfinite(t_s)) throw InvalidArgument("bit duration T must be > 0 s");

  const double wt = w_hz * t_s;
  // Absorb representation error so that e.g. 3e12 * 1e-8 counts as 30000.
  const double modes = std::floor(wt * (1.0 + 1e-12));
  if (modes < 1.0) {
    std::ostringstream msg;
    msg << "W*T = " << wt << " < 1: no complete mode pair per bit";
    throw InvalidArgument(msg.str());
  }
  if (modes > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4)) {
    throw InvalidArgument("W*T too large");
  }

  LinkBudget b;
  b.length_km = length_km;
  b.loss_db_per_km = loss_db_per_km;
  b.w_hz = w_hz;
  b.t_s = t_s;
  b.kappa = std::pow(10.0, -(length_km * loss_db_per_km) / 10.0);
  b.modes = static_cast<std::int64_t>(modes);
  b.bit_rate = 1.0 / t_s;
  return b;
}

double loss_db_from_kappa(double kappa) { return -10.0 * std::log10(kappa); }

ProtocolParams params_for_link(const LinkBudget& budget, double ns, double gain, double nb) {
  if (budget.kappa > kMaxPlannerKappa) {
    std::ostringstream msg;
    msg << "link transmissivity kappa = " << budget.kappa
        << " is ~1: Eve intercepts essentially nothing and kappa must lie in (0,1); "
           "lengthen the link or increase the loss";
    throw InvalidArgument(msg.str());
  }
  if (!(budget.kappa > 0.0)) {
    throw InvalidArgument("link transmissivity underflows to 0: kappa must lie in (0,1)");
  }
  ProtocolParams p{ns, budget.kappa, gain, nb, budget.modes};
  p.validate();
  return p;
}

std::string to_string(Receiver r) { return r == Receiver::kOpa ? "opa" : "optimum"; }

Receiver receiver_from_string(const std::string& name) {
  if (name == "opa") return Receiver::kOpa;
  if (name == "optimum") return Receiver::kOptimum;
  throw InvalidArgument("unknown receiver '" + name + "' (expected opa or optimum)");
}

double receiver_log_overlap(const ProtocolParams& p, Receiver receiver) {
  p.validate_per_mode();
  if (receiver == Receiver::kOpa) {
    const auto m = opa_model(p);
    return log_bose_einstein_bhattacharyya(m.n0, m.n1);
  }
  return per_mode_overlap(alice_pair(p)).log_q_chernoff;
}

std::int64_t required_modes_from_log_overlap(double log_q, double target) {
  if (!(target > 0.0 && target <= 0.5)) throw InvalidArgument("target must lie in (0, 0.5]");
  if (!(log_q < -1e-15)) {
    throw InvalidArgument("per-mode overlap is >= 1 - 1e-15: target unreachable");
  }
  const double log_target = std::log(target);
  auto meets = [&](std::int64_t m) {
    return std::log(0.5) + static_cast<double>(m) * log_q <= log_target;
  };

  constexpr std::int64_t kCap = std::int64_t{1} << 62;
  std::int64_t hi = 1;
  while (!meets(hi)) {
    if (hi >= kCap) throw InvalidArgument("target unreachable within 2^62 modes");
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // fails (or 0)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (meets(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::int64_t required_modes(const ProtocolParams& p, double target, Receiver receiver) {
  return required_modes_from_log_overlap(receiver_log_overlap(p, receiver), target);
}

SecurityReport security_margin(const ProtocolParams& p, const SecurityOptions& opts) {
  p.validate();
  SecurityReport r;
  const auto alice = alice_optimum_bounds(p);
  const auto eve = eve_optimum_bounds(p);
  const auto opa = opa_bhattacharyya(p);
  r.alice_optimum_upper = alice.chernoff_upper;
  r.alice_opa_upper = opa.upper;
  r.eve_lower = eve.lower;
  r.eve_upper = eve.chernoff_upper;
  r.difference = r.eve_lower - r.alice_opa_upper;
  r.ratio = r.alice_opa_upper > 0.0 ? r.eve_lower / r.alice_opa_upper
                                    : std::numeric_limits<double>::infinity();
  r.in_regime = approx_exponents(p).in_regime;
  r.insecure = r.eve_lower < opts.insecure_below;
  r.unusable = r.alice_opa_upper > opts.alice_error_ceiling;
  return r;
}

}  // namespace qisec
