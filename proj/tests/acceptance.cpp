// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qisec/cli.hpp"
#include "qisec/link_planner.hpp"
#include "qisec/monte_carlo.hpp"
#include "qisec/receivers.hpp"

using namespace qisec;
using qisec::testing::rel_err;

namespace {

const ProtocolParams kFig1{0.004, 0.1, 1e4, 1e4, 20000};

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double max_seconds,
               const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.note(std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (max_seconds > 0.0) o.require(secs < max_seconds, "runtime < " + fmt("%g", max_seconds) + " s");
  if (!o.ok) ++failures;
  std::printf("%s %2d %s [%.3f s] %s\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), secs,
              o.detail.c_str());
  std::fflush(stdout);
}

GaussianState single_mode(double n) {
  return GaussianState(CovMat(qisec::testing::thermal_cm(n), Convention::kAnalysisUnit));
}

}  // namespace

int main() {
  criterion(1, "OPA bound at the 50 km point", 1.0, [](Outcome& o) {
    const double v = opa_bhattacharyya(kFig1).upper;
    o.note("Pr(e)_OPA <= " + fmt("%.6e", v));
    o.require(rel_err(v, 5.09e-7) <= 0.05, "within 5% of 5.09e-7");
  });

  criterion(2, "Eve's error interval", 1.0, [](Outcome& o) {
    const auto eve = eve_optimum_bounds(kFig1);
    o.note(fmt("%.6f", eve.lower) + " <= Pr(e)_Eve <= " + fmt("%.6f", eve.chernoff_upper));
    o.require(eve.chernoff_upper >= 0.442 && eve.chernoff_upper <= 0.460, "upper in [0.442, 0.460]");
    o.require(eve.lower >= 0.279 && eve.lower <= 0.291, "lower in [0.279, 0.291]");
  });

  criterion(3, "Alice reliable while Eve guesses", 0.0, [](Outcome& o) {
    const double alice = alice_optimum_bounds(kFig1).chernoff_upper;
    const double opa = opa_bhattacharyya(kFig1).upper;
    const double eve = eve_optimum_bounds(kFig1).lower;
    o.note("alice " + fmt("%.3e", alice) + ", alice_opa " + fmt("%.3e", opa) + ", eve_lower " +
           fmt("%.4f", eve));
    o.require(alice < 1e-6, "alice optimum < 1e-6");
    o.require(opa < 1e-6, "alice OPA < 1e-6");
    o.require(eve > 0.28, "eve lower > 0.28");
  });

  criterion(4, "OPA exponent within 3 dB of optimum", 0.0, [](Outcome& o) {
    const double ratio =
        alice_optimum_bounds(kFig1).log_q_chernoff / opa_bhattacharyya(kFig1).log_q;
    o.note("ratio " + fmt("%.4f", ratio));
    o.require(ratio >= 1.8 && ratio <= 2.2, "ratio in [1.8, 2.2]");
  });

  criterion(5, "closed-form exponents", 0.0, [](Outcome& o) {
    double prev[3] = {1.0, 1.0, 1.0};
    bool monotone = true;
    for (int i = 0; i <= 8; ++i) {
      ProtocolParams p = kFig1;
      p.ns = i == 0 ? 0.004 : std::pow(10.0, -2.0 - 0.25 * i);
      const auto approx = approx_exponents(p);
      const double err[3] = {
          rel_err(-alice_optimum_bounds(p).log_q_chernoff, approx.alice_opt),
          rel_err(-eve_optimum_bounds(p).log_q_chernoff, approx.eve_opt),
          rel_err(-opa_bhattacharyya(p).log_q, approx.alice_opa),
      };
      if (i == 0) {
        o.note("rel err " + fmt("%.4f", err[0]) + "/" + fmt("%.4f", err[1]) + "/" +
               fmt("%.4f", err[2]));
        for (double e : err) o.require(e < 0.25, "within 25% at N_S = 0.004");
        continue;
      }
      for (int k = 0; k < 3; ++k) {
        if (err[k] > prev[k]) monotone = false;
        prev[k] = err[k];
      }
    }
    o.note("down to N_S = 1e-4 err " + fmt("%.2e", prev[0]) + "/" + fmt("%.2e", prev[1]) + "/" +
           fmt("%.2e", prev[2]));
    o.require(monotone, "error shrinks monotonically as N_S -> 1e-4");
  });

  criterion(6, "overlap against truncated Fock sums", 10.0, [](Outcome& o) {
    double worst = 0.0;
    const auto check = [&](double n0, double n1, double s) {
      const double got = q_s_overlap(single_mode(n0), single_mode(n1), s);
      worst = std::max(worst, rel_err(got, qisec::testing::fock_overlap(n0, n1, s)));
    };
    for (double s : {0.3, 0.5, 0.7}) {
      for (double n : {0.5, 1.0, 3.0}) {
        check(0.0, n, s);
        check(n, 0.0, s);
      }
      for (double a : {0.2, 1.0, 4.0}) {
        for (double b : {0.2, 1.0, 4.0}) {
          if (a != b) check(a, b, s);
        }
      }
    }
    for (double n : {0.5, 1.0, 3.0}) {
      const double q = q_s_overlap(single_mode(0.0), single_mode(n), 0.5);
      worst = std::max(worst, rel_err(q, 1.0 / std::sqrt(n + 1.0)));
    }
    o.note("worst rel err " + fmt("%.2e", worst));
    o.require(worst <= 1e-6, "within 1e-6");
  });

  criterion(7, "random parameters give physical states", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto log_uniform = [&](double lo, double hi) {
      return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u(rng));
    };
    int draws = 0;
    double min_nu = 1e300;
    bool all_physical = true;
    while (draws < 1000) {
      ProtocolParams p;
      p.ns = log_uniform(1e-4, 1.0);
      p.kappa = 0.01 + 0.98 * u(rng);
      p.gain = log_uniform(1.0, 1e6);
      p.nb = log_uniform(std::max(p.gain - 1.0, 1e-6), 1e6);
      if (p.nb < p.gain - 1.0) continue;
      ++draws;
      for (const auto& cm :
           {source_cm(p.ns), alice_cm(p, 0), alice_cm(p, 1), eve_cm(p, 0), eve_cm(p, 1)}) {
        const auto r = validate_physicality(cm);
        all_physical = all_physical && r.physical;
        for (double nu : r.nu) min_nu = std::min(min_nu, nu);
      }
    }
    o.note(std::to_string(draws) + " draws, min nu " + fmt("%.12f", min_nu));
    o.require(all_physical && min_nu >= 1.0 - 1e-9, "all nu >= 1 - 1e-9");
  });

  criterion(8, "Monte Carlo against the Bhattacharyya bound", 60.0, [](Outcome& o) {
    McConfig cfg;
    cfg.params = kFig1;
    cfg.params.modes = 2000;
    cfg.trials = 1'000'000;
    cfg.seed = 1;
    cfg.shards = 4;
    const double bound = opa_bhattacharyya(cfg.params).upper;
    const auto a = run_mc(cfg);
    const auto b = run_mc(cfg);
    o.note("empirical " + fmt("%.5f", a.empirical_error) + " CI [" + fmt("%.5f", a.ci_lo) + ", " +
           fmt("%.5f", a.ci_hi) + "], bound " + fmt("%.5f", bound));
    o.require(a.empirical_error <= bound, "empirical <= bound");
    o.require(a.empirical_error >= bound / 20.0, "empirical >= bound/20");
    o.require(a.errors == b.errors, "deterministic under fixed seed");
  });

  criterion(9, "fiber link budget", 0.0, [](Outcome& o) {
    const auto b = budget_from_fiber(50, 0.2, 1e12, 20e-9);
    o.note("kappa " + fmt("%.17g", b.kappa) + ", M " + std::to_string(b.modes) + ", rate " +
           fmt("%.6g", b.bit_rate));
    o.require(b.kappa == 0.1, "kappa == 0.1 exactly");
    o.require(b.modes == 20000, "M == 20000");
    o.require(rel_err(b.bit_rate, 5e7) < 1e-12, "rate 5e7 bit/s");
    o.require(security_margin(params_for_link(b, 0.004, 1e4, 1e4)).secure(), "link is secure");
  });

  criterion(10, "error-curve sweep", 0.0, [](Outcome& o) {
    SweepSpec spec;
    spec.params = kFig1;
    const auto rows = compute_sweep(spec);
    o.require(rows.size() == 50, "50 points");
    o.require(rows.front().m == 1000 && rows.back().m == 100000, "M spans [1e3, 1e5]");
    bool monotone = true;
    bool ordered = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      ordered = ordered && r.alice_qcb <= r.alice_opa_bhatt && r.eve_lower_bound <= r.eve_qcb_upper;
      if (i == 0) continue;
      const auto& q = rows[i - 1];
      monotone = monotone && r.m > q.m && r.alice_qcb <= q.alice_qcb &&
                 r.alice_opa_bhatt <= q.alice_opa_bhatt && r.eve_qcb_upper <= q.eve_qcb_upper &&
                 r.eve_lower_bound <= q.eve_lower_bound;
    }
    o.require(monotone, "four monotone curves");
    o.require(ordered, "alice_qcb <= alice_opa and eve_lower <= eve_upper");

    std::ostringstream first, second;
    write_sweep_csv(first, rows);
    write_sweep_csv(second, compute_sweep(spec));
    o.require(first.str() == second.str(), "CSV byte-deterministic");
    o.note(std::to_string(rows.size()) + " rows, " + std::to_string(first.str().size()) + " bytes");
  });

  std::printf("%s: %d failure(s)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
