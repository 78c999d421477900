// Zero-mean Gaussian states: covariance-matrix algebra, Williamson
// decomposition and the quantum Chernoff overlap Q_s = tr(rho0^s rho1^(1-s)).
//
// Quadratures are ordered (x1, p1, x2, p2, ...). Two normalisations are in
// use: the "quarter" one, where the vacuum has variance 1/4, and the
// "analysis" one, where the vacuum covariance is the identity. Every
// numerical routine below works in the analysis convention only.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qisec {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a covariance matrix is too badly conditioned to decompose.
class IllConditioned : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class Convention { kPaperQuarter, kAnalysisUnit };

std::string to_string(Convention c);

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPhysicalTol = 1e-9;
inline constexpr double kMaxCondition = 1e12;

/// Real symmetric positive-definite 2n x 2n covariance matrix with its
/// normalisation tag. Physicality (symplectic eigenvalues >= 1) is not
/// enforced here so that diagnostics can be run on sub-vacuum matrices.
class CovMat {
 public:
  CovMat(Eigen::MatrixXd entries, Convention convention);

  const Eigen::MatrixXd& entries() const { return entries_; }
  Convention convention() const { return convention_; }
  int modes() const { return static_cast<int>(entries_.rows() / 2); }
  double operator()(int r, int c) const { return entries_(r, c); }

 private:
  Eigen::MatrixXd entries_;
  Convention convention_;
};

/// Zero-mean Gaussian state. The mean vector is kept for completeness and is
/// always zero.
class GaussianState {
 public:
  explicit GaussianState(CovMat cm);

  const CovMat& cm() const { return cm_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  int modes() const { return cm_.modes(); }

 private:
  CovMat cm_;
  Eigen::VectorXd mean_;
};

/// V = S diag(nu_1, nu_1, ..., nu_n, nu_n) S^T with S symplectic.
struct WilliamsonDecomposition {
  std::vector<double> nu;  // descending
  Eigen::MatrixXd symplectic;
};

struct OverlapResult {
  double q_s;
  double s;
};

enum class Observer { kAlice, kEve, kOther };

std::string to_string(Observer o);

/// The two hypotheses (bit 0, bit 1) seen by one observer.
struct HypothesisPair {
  GaussianState state_bit0;
  GaussianState state_bit1;
  Observer observer = Observer::kOther;
};

/// Error-probability bounds for M iid copies of a hypothesis pair with equal
/// priors.
struct ErrorBounds {
  std::int64_t modes = 0;
  double chernoff_upper = 0.5;       // 1/2 min_s Q_s^M
  double bhattacharyya_upper = 0.5;  // 1/2 Q_{1/2}^M
  double lower = 0.5;                // 1/2 [1 - sqrt(1 - Q_{1/2}^{2M})]
  double s_opt = 0.5;
  double log_q_chernoff = 0.0;       // ln Q_{s_opt}, per mode
  double log_q_bhattacharyya = 0.0;  // ln Q_{1/2}, per mode
};

/// Per-mode part of the Chernoff computation; independent of M.
struct PerModeOverlap {
  double s_opt = 0.5;
  double log_q_chernoff = 0.0;
  double log_q_bhattacharyya = 0.0;
};

/// Block-diagonal symplectic form with blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int modes);

CovMat to_analysis_convention(const CovMat& cm);

/// Symplectic spectrum (|eigenvalues of i Omega V|, one per mode), sorted
/// descending. Values within kPhysicalTol below 1 are clamped to 1.
std::vector<double> symplectic_eigenvalues(const CovMat& cm);

WilliamsonDecomposition williamson(const CovMat& cm);

double lambda_s(double nu, double s);
double g_s(double nu, double s);

/// S diag(Lambda_s(nu_k)) S^T, i.e. the covariance matrix of rho^s / tr rho^s.
Eigen::MatrixXd symplectic_power(const WilliamsonDecomposition& w, double s);

double log_q_s_overlap(const GaussianState& state0, const GaussianState& state1,
                       double s);
double q_s_overlap(const GaussianState& state0, const GaussianState& state1,
                   double s);

struct GoldenSectionOptions {
  double lo = 1e-6;
  double hi = 1.0 - 1e-6;
  double tol = 1e-6;
  int max_iterations = 200;
};

/// Minimises ln Q_s over s. Throws NumericalError on non-convergence.
OverlapResult minimize_overlap(const GaussianState& state0,
                               const GaussianState& state1,
                               const GoldenSectionOptions& opts = {});

PerModeOverlap per_mode_overlap(const HypothesisPair& pair);

/// Bounds for M copies from a per-mode overlap. All powers in log domain.
ErrorBounds bounds_from_overlap(const PerModeOverlap& overlap, std::int64_t modes);

ErrorBounds chernoff_bound(const HypothesisPair& pair, std::int64_t modes);

}  // namespace qisec
