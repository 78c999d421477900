#include "qisec/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

namespace qisec {

namespace {

// Symplectic eigenvalues at most this far above 1 are treated as pure.
constexpr double kPureEps = 1e-12;

void require_analysis(const CovMat& cm, const char* where) {
  if (cm.convention() != Convention::kAnalysisUnit) {
    throw InvalidArgument(std::string(where) +
                          ": covariance matrix must be in the analysis (unit-vacuum) convention");
  }
}

void require_open_unit(double s, const char* where) {
  if (!(s > 0.0 && s < 1.0)) {
    throw InvalidArgument(std::string(where) + ": s must lie in (0, 1)");
  }
}

void require_nu(double nu, const char* where) {
  if (!std::isfinite(nu) || nu < 1.0 - kPhysicalTol) {
    throw InvalidArgument(std::string(where) + ": symplectic eigenvalue must be >= 1");
  }
}

// expm1(s * ln r) with r = (nu-1)/(nu+1), i.e. r^s - 1, in (-1, 0).
double ratio_power_m1(double nu, double s) {
  return std::expm1(s * std::log1p(-2.0 / (nu + 1.0)));
}

// Values in [1 - kPhysicalTol, 1 + kPureEps] use the nu = 1 closed forms
// Lambda_s = G_s = 1 instead of evaluating (nu - 1)^s.
bool is_pure(double nu) { return nu <= 1.0 + kPureEps; }

// ln G_s(nu) = s ln 2 - ln[(nu+1)^s - (nu-1)^s].
double log_g_s(double nu, double s) {
  if (is_pure(nu)) return 0.0;
  return s * std::numbers::ln2 - s * std::log(nu + 1.0) - std::log(-ratio_power_m1(nu, s));
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

std::string to_string(Convention c) {
  return c == Convention::kPaperQuarter ? "paper-quarter" : "analysis-unit";
}

std::string to_string(Observer o) {
  switch (o) {
    case Observer::kAlice:
      return "alice";
    case Observer::kEve:
      return "eve";
    case Observer::kOther:
      break;
  }
  return "other";
}

CovMat::CovMat(Eigen::MatrixXd entries, Convention convention)
    : entries_(std::move(entries)), convention_(convention) {
  const auto n = entries_.rows();
  if (n == 0 || n != entries_.cols() || n % 2 != 0) {
    throw InvalidArgument("covariance matrix must be square with even dimension");
  }
  if (!entries_.allFinite()) {
    throw InvalidArgument("covariance matrix has non-finite entries");
  }
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw InvalidArgument("covariance matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(entries_);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("covariance matrix is not positive definite");
  }
}

GaussianState::GaussianState(CovMat cm)
    : cm_(std::move(cm)), mean_(Eigen::VectorXd::Zero(cm_.entries().rows())) {}

Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

CovMat to_analysis_convention(const CovMat& cm) {
  if (cm.convention() == Convention::kAnalysisUnit) {
    throw InvalidArgument("to_analysis_convention: matrix is already in the analysis convention");
  }
  return CovMat(4.0 * cm.entries(), Convention::kAnalysisUnit);
}

std::vector<double> symplectic_eigenvalues(const CovMat& cm) {
  require_analysis(cm, "symplectic_eigenvalues");
  const int n = cm.modes();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(symplectic_form(n) * cm.entries(), false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symplectic_eigenvalues: eigen-solver did not converge");
  }
  std::vector<double> moduli;
  moduli.reserve(2 * n);
  for (const auto& ev : solver.eigenvalues()) moduli.push_back(std::abs(ev));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());

  std::vector<double> nu;
  nu.reserve(n);
  for (int k = 0; k < n; ++k) {
    double v = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
    if (v < 1.0 && v >= 1.0 - kPhysicalTol) v = 1.0;
    nu.push_back(v);
  }
  return nu;
}

WilliamsonDecomposition williamson(const CovMat& cm) {
  require_analysis(cm, "williamson");
  const int n = cm.modes();
  const int dim = 2 * n;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> vsolver(cm.entries());
  if (vsolver.info() != Eigen::Success) {
    throw NumericalError("williamson: eigen-solver did not converge");
  }
  const auto& evals = vsolver.eigenvalues();
  if (evals.maxCoeff() / evals.minCoeff() > kMaxCondition) {
    throw IllConditioned("williamson: covariance matrix condition number exceeds 1e12");
  }
  const Eigen::MatrixXd root = vsolver.operatorSqrt();
  const Eigen::MatrixXd skew = root * symplectic_form(n) * root;

  // -skew^2 = skew^T skew has each nu_k^2 twice; every eigenvector u pairs
  // with -skew u / nu to span a 2-d invariant subspace.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ssolver(-skew * skew);
  if (ssolver.info() != Eigen::Success) {
    throw NumericalError("williamson: eigen-solver did not converge");
  }
  const Eigen::MatrixXd& candidates = ssolver.eigenvectors();  // ascending

  Eigen::MatrixXd basis(dim, dim);
  std::vector<double> nu;
  std::vector<bool> used(dim, false);
  for (int k = 0; k < n; ++k) {
    // Largest remaining eigenvalue whose eigenvector is not (numerically) in
    // the span of the pairs already taken.
    int best = -1;
    double best_norm = 0.0;
    Eigen::VectorXd best_vec;
    for (int j = dim - 1; j >= 0; --j) {
      if (used[j]) continue;
      Eigen::VectorXd u = candidates.col(j);
      for (int c = 0; c < 2 * k; ++c) u -= basis.col(c).dot(u) * basis.col(c);
      const double norm = u.norm();
      if (norm > 0.5) {
        best = j;
        best_norm = norm;
        best_vec = std::move(u);
        break;
      }
    }
    if (best < 0) throw NumericalError("williamson: failed to build a symplectic basis");
    used[best] = true;
    Eigen::VectorXd u = best_vec / best_norm;
    Eigen::VectorXd au = skew * u;
    const double nu_k = au.norm();
    Eigen::VectorXd v = -au / nu_k;
    for (int c = 0; c < 2 * k; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    v -= u.dot(v) * u;
    v.normalize();
    basis.col(2 * k) = u;
    basis.col(2 * k + 1) = v;
    nu.push_back(nu_k);
  }

  Eigen::VectorXd inv_sqrt(dim);
  for (int k = 0; k < n; ++k) {
    inv_sqrt(2 * k) = inv_sqrt(2 * k + 1) = 1.0 / std::sqrt(nu[k]);
  }
  WilliamsonDecomposition out;
  out.symplectic = root * basis * inv_sqrt.asDiagonal();
  for (double& v : nu) {
    if (v < 1.0 && v >= 1.0 - kPhysicalTol) v = 1.0;
  }
  out.nu = std::move(nu);
  return out;
}

double lambda_s(double nu, double s) {
  require_nu(nu, "lambda_s");
  require_open_unit(s, "lambda_s");
  if (is_pure(nu)) return 1.0;
  const double em1 = ratio_power_m1(nu, s);
  return (2.0 + em1) / (-em1);
}

double g_s(double nu, double s) {
  require_nu(nu, "g_s");
  require_open_unit(s, "g_s");
  return std::exp(log_g_s(nu, s));
}

Eigen::MatrixXd symplectic_power(const WilliamsonDecomposition& w, double s) {
  require_open_unit(s, "symplectic_power");
  const int n = static_cast<int>(w.nu.size());
  Eigen::VectorXd diag(2 * n);
  for (int k = 0; k < n; ++k) diag(2 * k) = diag(2 * k + 1) = lambda_s(w.nu[k], s);
  return symmetrized(w.symplectic * diag.asDiagonal() * w.symplectic.transpose());
}

double log_q_s_overlap(const GaussianState& state0, const GaussianState& state1, double s) {
  require_open_unit(s, "q_s_overlap");
  require_analysis(state0.cm(), "q_s_overlap");
  require_analysis(state1.cm(), "q_s_overlap");
  if (state0.modes() != state1.modes()) {
    throw InvalidArgument("q_s_overlap: states have different mode counts");
  }
  const auto w0 = williamson(state0.cm());
  const auto w1 = williamson(state1.cm());
  for (const auto* w : {&w0, &w1}) {
    if (w->nu.back() < 1.0 - kPhysicalTol) {
      throw InvalidArgument("q_s_overlap: non-physical state (symplectic eigenvalue < 1)");
    }
  }

  double log_q = state0.modes() * std::numbers::ln2;
  for (double a : w0.nu) log_q += log_g_s(a, s);
  for (double b : w1.nu) log_q += log_g_s(b, 1.0 - s);

  const Eigen::MatrixXd sum = symplectic_power(w0, s) + symplectic_power(w1, 1.0 - s);
  Eigen::LLT<Eigen::MatrixXd> llt(sum);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("q_s_overlap: V0(s) + V1(1-s) is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  log_q -= l.diagonal().array().log().sum();
  return std::min(log_q, 0.0);
}

double q_s_overlap(const GaussianState& state0, const GaussianState& state1, double s) {
  return std::exp(log_q_s_overlap(state0, state1, s));
}

OverlapResult minimize_overlap(const GaussianState& state0, const GaussianState& state1,
                               const GoldenSectionOptions& opts) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double s) { return log_q_s_overlap(state0, state1, s); };

  double a = opts.lo;
  double b = opts.hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > opts.tol) {
    if (++it > opts.max_iterations) {
      throw NumericalError("minimize_overlap: golden-section search did not converge");
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double s = 0.5 * (a + b);
  return {std::exp(f(s)), s};
}

PerModeOverlap per_mode_overlap(const HypothesisPair& pair) {
  PerModeOverlap out;
  out.log_q_bhattacharyya = log_q_s_overlap(pair.state_bit0, pair.state_bit1, 0.5);
  const auto best = minimize_overlap(pair.state_bit0, pair.state_bit1);
  const double log_best = std::log(best.q_s);
  if (log_best < out.log_q_bhattacharyya) {
    out.s_opt = best.s;
    out.log_q_chernoff = log_best;
  } else {
    out.s_opt = 0.5;
    out.log_q_chernoff = out.log_q_bhattacharyya;
  }
  return out;
}

ErrorBounds bounds_from_overlap(const PerModeOverlap& overlap, std::int64_t modes) {
  if (modes < 1) throw InvalidArgument("number of modes M must be >= 1");
  const double m = static_cast<double>(modes);
  ErrorBounds out;
  out.modes = modes;
  out.s_opt = overlap.s_opt;
  out.log_q_chernoff = overlap.log_q_chernoff;
  out.log_q_bhattacharyya = overlap.log_q_bhattacharyya;
  out.chernoff_upper = 0.5 * std::exp(m * overlap.log_q_chernoff);
  out.bhattacharyya_upper = 0.5 * std::exp(m * overlap.log_q_bhattacharyya);
  // 1 - sqrt(1 - x) written as x / (1 + sqrt(1 - x)) to keep precision for small x.
  const double x = std::exp(2.0 * m * overlap.log_q_bhattacharyya);
  out.lower = 0.5 * x / (1.0 + std::sqrt(std::max(0.0, 1.0 - x)));
  return out;
}

ErrorBounds chernoff_bound(const HypothesisPair& pair, std::int64_t modes) {
  if (modes < 1) throw InvalidArgument("number of modes M must be >= 1");
  return bounds_from_overlap(per_mode_overlap(pair), modes);
}

}  // namespace qisec
