#include "doctest.h"

#include <cmath>

#include "dotchain/evolution.hpp"
#include "dotchain/fidelity.hpp"
#include "dotchain/units.hpp"

using namespace dotchain;

namespace {

QubitState random_state(unsigned seed) {
  std::srand(seed);
  QubitState s;
  s.amps = StateVector::Random();
  s.amps /= s.amps.norm();
  return s;
}

ScheduleSegment test_ramp(double duration_ps) {
  return ScheduleSegment::ramp(DetuningVector(-1, -1, -8), DetuningVector(-8, -1, -1), duration_ps);
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("triplet block matches the closed-form three-level oracle") {
  // At eps = 0 the triplet block is a symmetric chain: ends at E = K - J_e,
  // middle at 0, hopping -t. The antisymmetric end state decouples, the
  // symmetric one Rabi-oscillates with the middle at coupling sqrt(2) t.
  const DeviceParams p = pulse_gated_device();
  const double e = p.k - p.j_e;
  const double omega = std::sqrt(0.25 * e * e + 2 * p.t * p.t);
  for (double tau : {0.0, 13.0, 250.0, 1234.5}) {
    QubitState s;
    s[basis::T12] = 1.0;
    const auto out = propagate_constant(s, p, DetuningVector::Zero(), tau);
    const double x = tau / kHbar;
    const Complex sym = std::exp(Complex(0, -0.5 * e * x)) *
                        Complex(std::cos(omega * x), -0.5 * e / omega * std::sin(omega * x));
    const Complex expected = 0.5 * (sym - std::exp(Complex(0, -e * x)));
    CHECK(std::abs(out[basis::T23] - expected) < 1e-11);
  }
}

TEST_CASE("zero tunneling only accumulates phases") {
  DeviceParams p = pulse_gated_device();
  p.t = 0.0;
  QubitState s;
  s[basis::S12] = 1.0;
  const auto out = propagate_constant(s, p, DetuningVector(2, 1, 0), 100.0);
  const double energy = p.j_e + p.k - 2 - 1;
  CHECK(std::abs(out[basis::S12] - std::exp(Complex(0, -energy * 100.0 / kHbar))) < 1e-12);
}

TEST_CASE("propagation is unitary and conserves each sector") {
  const DeviceParams p = pulse_gated_device();
  auto s = random_state(7);
  const double ws = s.singlet().squaredNorm();
  for (double tau : {0.1, 577.99, 1e4}) {
    const auto out = propagate_constant(s, p, DetuningVector(5, 0, 5), tau);
    CHECK(std::abs(out.norm() - 1.0) < 1e-10);
    CHECK(std::abs(out.singlet().squaredNorm() - ws) < 1e-10);
  }
  QubitState sing;
  sing[basis::S12] = 1.0;
  const auto ramped = propagate_ramp_fixed(sing, p, test_ramp(500.0), 256);
  CHECK(ramped.triplet().norm() == 0.0);
  CHECK(std::abs(ramped.norm() - 1.0) < 1e-10);
}

TEST_CASE("composition and time reversal") {
  const DeviceParams p = pulse_gated_device();
  const auto s = random_state(11);
  const DetuningVector eps(5, 0, 5);
  const auto once = propagate_constant(s, p, eps, 300.0);
  const auto twice = propagate_constant(propagate_constant(s, p, eps, 120.0), p, eps, 180.0);
  CHECK((once.amps - twice.amps).norm() < 1e-12);

  const BlockPropagator<Complex> prop(build_hamiltonian(p, eps));
  StateVector v = s.amps;
  prop.apply(v, 300.0);
  prop.apply(v, -300.0);
  CHECK((v - s.amps).norm() < 1e-12);
}

TEST_CASE("real and complex block propagators agree") {
  const DeviceParams p = pulse_gated_device();
  const DetuningVector eps(3, -1, 4);
  const BlockPropagator<Complex> c(build_hamiltonian<Complex>(p, eps));
  const BlockPropagator<double> r(build_hamiltonian<double>(p, eps));
  StateVector a = random_state(3).amps, b = a;
  c.apply(a, 42.0);
  r.apply(b, 42.0);
  CHECK((a - b).norm() < 1e-12);
}

TEST_CASE("a uniform detuning shift is a pure gauge") {
  const DeviceParams p = pulse_gated_device();
  const LogicalState logical{0.7, 0.3};
  DetuningSchedule a, b;
  a.append(ScheduleSegment::constant(DetuningVector(5, 0, 5), 578.0));
  a.append(test_ramp(300.0));
  const DetuningVector shift = DetuningVector::Constant(0.83);
  b.append(ScheduleSegment::constant(DetuningVector(5, 0, 5) + shift, 578.0));
  b.append(ScheduleSegment::ramp(DetuningVector(-1, -1, -8) + shift, DetuningVector(-8, -1, -1) + shift,
                                 300.0));
  const auto fa = fidelity(propagate_schedule(logical.initial(), p, a), logical.target());
  const auto fb = fidelity(propagate_schedule(logical.initial(), p, b), logical.target());
  CHECK(std::abs(fa - fb) < 1e-12);
}

TEST_CASE("a flat ramp equals a constant hold") {
  const DeviceParams p = pulse_gated_device();
  const auto s = random_state(5);
  const DetuningVector eps(1, 2, 3);
  const auto ramp = ScheduleSegment::ramp(eps, eps, 200.0);
  const auto a = propagate_ramp_fixed(s, p, ramp, 3);
  const auto b = propagate_constant(s, p, eps, 200.0);
  CHECK((a.amps - b.amps).norm() < 1e-12);
}

TEST_CASE("exponential midpoint rule converges at second order") {
  const DeviceParams p = pulse_gated_device();
  QubitState s;
  s[basis::S12] = 1.0;
  const auto seg = test_ramp(200.0);
  const auto ref = propagate_ramp_fixed(s, p, seg, 1u << 17);
  double prev = 0.0;
  for (std::uint64_t n : {2048u, 4096u, 8192u}) {
    const double err = (propagate_ramp_fixed(s, p, seg, n).amps - ref.amps).norm();
    if (prev > 0.0) {
      CHECK(prev / err > 3.5);
      CHECK(prev / err < 4.5);
    }
    prev = err;
  }
}

TEST_CASE("adaptive ramp reports its refinement") {
  const DeviceParams p = pulse_gated_device();
  QubitState s;
  s[basis::S12] = 1.0;
  RampReport report;
  const auto out = propagate_ramp(s, p, test_ramp(500.0), 1e-8, &report);
  CHECK(report.last_change < 1e-8);
  CHECK(report.substeps >= 2);
  const auto fine = propagate_ramp_fixed(s, p, test_ramp(500.0), report.substeps * 4);
  CHECK((out.amps - fine.amps).norm() < 1e-8);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(ScheduleSegment::constant(DetuningVector::Zero(), -1.0), InvalidArgument);
  CHECK_THROWS_AS(test_ramp(0.0), InvalidArgument);
  CHECK_NOTHROW(ScheduleSegment::constant(DetuningVector::Zero(), 0.0));
  DetuningSchedule s;
  s.append(ScheduleSegment::constant(DetuningVector(1, 0, 0), 5.0));
  s.append(test_ramp(7.5));
  CHECK(s.total_duration_ps() == 12.5);
  CHECK(s.final_detuning() == DetuningVector(-8, -1, -1));
  const auto mid = test_ramp(10.0).at(0.5);
  CHECK(mid(0) == doctest::Approx(-4.5));
  CHECK(mid(2) == doctest::Approx(-4.5));
}

TEST_CASE("logical states") {
  const LogicalState l{0.4, 1.1};
  const auto in = l.initial();
  CHECK(in[basis::S12] == Complex(std::cos(0.4), 0));
  CHECK(std::abs(in[basis::T12] - std::polar(std::sin(0.4), 1.1)) < 1e-15);
  CHECK(std::abs(in.norm() - 1.0) < 1e-15);
  CHECK(fidelity(l.target(), l.target()) == doctest::Approx(1.0));
  CHECK(fidelity(l.initial(), l.target()) == 0.0);
  CHECK_THROWS_AS((LogicalState{-0.1, 0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((LogicalState{0.1, std::nan("")}.validate()), InvalidArgument);
}

}  // TEST_SUITE
