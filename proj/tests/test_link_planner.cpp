#include <doctest.h>

#include <cmath>
#include <random>

#include "qisec/link_planner.hpp"
#include "qisec/receivers.hpp"

using namespace qisec;

namespace {

ProtocolParams at_km(double km) {
  const auto b = budget_from_fiber(km, 0.2, 1e12, 20e-9);
  return params_for_link(b, 0.004, 1e4, 1e4);
}

}  // namespace

TEST_CASE("fiber budget for the 50 km link") {
  const auto b = budget_from_fiber(50, 0.2, 1e12, 2e-8);
  CHECK(b.kappa == 0.1);
  CHECK(b.modes == 20000);
  CHECK(b.bit_rate == doctest::Approx(5e7).epsilon(1e-12));
  CHECK(b.bit_rate * b.t_s == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.total_loss_db() == doctest::Approx(10.0));

  CHECK(budget_from_fiber(100, 0.2, 1e12, 2e-8).kappa == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(budget_from_fiber(0, 0.2, 1e12, 2e-8).kappa == 1.0);
  CHECK(budget_from_fiber(10, 0.2, 3e12, 1e-8).modes == 30000);
  CHECK(budget_from_fiber(10, 0.2, 1e12, 1.5e-12).modes == 1);
}

TEST_CASE("fiber budget errors") {
  CHECK_THROWS_WITH_AS(budget_from_fiber(50, 0.2, 1e12, 1e-13), doctest::Contains("W*T"),
                       InvalidArgument);
  CHECK_THROWS_AS(budget_from_fiber(-1, 0.2, 1e12, 2e-8), InvalidArgument);
  CHECK_THROWS_AS(budget_from_fiber(50, -0.2, 1e12, 2e-8), InvalidArgument);
  CHECK_THROWS_AS(budget_from_fiber(50, 0.2, 0, 2e-8), InvalidArgument);
  CHECK_THROWS_AS(budget_from_fiber(50, 0.2, 1e12, 0), InvalidArgument);
}

TEST_CASE("planner rejects links with transmissivity ~1") {
  const auto zero = budget_from_fiber(0, 0.2, 1e12, 2e-8);
  CHECK_THROWS_AS(params_for_link(zero, 0.004, 1e4, 1e4), InvalidArgument);
  const auto short_link = budget_from_fiber(0.0001, 0.2, 1e12, 2e-8);
  CHECK_THROWS_WITH_AS(params_for_link(short_link, 0.004, 1e4, 1e4),
                       doctest::Contains("kappa"), InvalidArgument);
  const auto huge = budget_from_fiber(1e6, 0.2, 1e12, 2e-8);
  CHECK_THROWS_AS(params_for_link(huge, 0.004, 1e4, 1e4), InvalidArgument);
}

TEST_CASE("dB round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> km(0.1, 300.0);
  std::uniform_real_distribution<double> loss(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto b = budget_from_fiber(km(rng), loss(rng), 1e12, 2e-8);
    CHECK(loss_db_from_kappa(b.kappa) == doctest::Approx(b.total_loss_db()).epsilon(1e-9));
  }
}

TEST_CASE("required modes") {
  const auto p = at_km(50);
  const auto m = required_modes(p, 1e-6, Receiver::kOpa);
  CHECK(m <= 20000);
  const double log_q = receiver_log_overlap(p, Receiver::kOpa);
  CHECK(0.5 * std::exp(m * log_q) <= 1e-6);
  CHECK(0.5 * std::exp((m - 1) * log_q) > 1e-6);

  CHECK(required_modes(p, 0.5, Receiver::kOpa) == 1);
  CHECK(required_modes(p, 0.5, Receiver::kOptimum) == 1);
  CHECK(required_modes(p, 1e-6, Receiver::kOptimum) < m);

  // Tighter targets and longer links need more modes.
  std::int64_t prev = 0;
  for (double target : {1e-2, 1e-4, 1e-6, 1e-9}) {
    const auto mm = required_modes(p, target, Receiver::kOpa);
    CHECK(mm >= prev);
    prev = mm;
  }
  prev = 0;
  for (double km : {30.0, 50.0, 60.0, 80.0}) {
    const auto mm = required_modes(at_km(km), 1e-6, Receiver::kOpa);
    CHECK(mm > prev);
    prev = mm;
  }

  CHECK_THROWS_AS(required_modes_from_log_overlap(0.0, 1e-6), InvalidArgument);
  CHECK_THROWS_AS(required_modes_from_log_overlap(-1e-16, 1e-6), InvalidArgument);
  CHECK_THROWS_AS(required_modes(p, 0.0, Receiver::kOpa), InvalidArgument);
  CHECK_THROWS_AS(required_modes(p, 0.6, Receiver::kOpa), InvalidArgument);
  CHECK(required_modes_from_log_overlap(std::log(0.5), 0.125) == 2);
}

TEST_CASE("receiver names") {
  CHECK(receiver_from_string("opa") == Receiver::kOpa);
  CHECK(receiver_from_string("optimum") == Receiver::kOptimum);
  CHECK(to_string(Receiver::kOpa) == "opa");
  CHECK_THROWS_AS(receiver_from_string("homodyne"), InvalidArgument);
}

TEST_CASE("security margin") {
  const auto r = security_margin(at_km(50));
  CHECK(r.alice_opa_upper <= 5.09e-7 * 1.05);
  CHECK(r.eve_lower == doctest::Approx(0.285).epsilon(0.01));
  CHECK(r.in_regime);
  CHECK_FALSE(r.insecure);
  CHECK_FALSE(r.unusable);
  CHECK(r.secure());
  CHECK(r.ratio > 1e5);

  // A bright source leaves the low-brightness regime and helps Eve.
  ProtocolParams bright = at_km(50);
  bright.ns = 0.5;
  const auto rb = security_margin(bright);
  CHECK_FALSE(rb.in_regime);
  CHECK(rb.eve_lower < r.eve_lower);

  ProtocolParams one = at_km(50);
  one.modes = 1;
  const auto r1 = security_margin(one);
  CHECK(r1.alice_opa_upper == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(r1.unusable);
  CHECK_FALSE(r1.secure());

  SecurityOptions strict;
  strict.insecure_below = 0.3;
  CHECK(security_margin(at_km(50), strict).insecure);
}
