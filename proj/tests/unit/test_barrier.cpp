#include <cmath>
#include <random>

#include "doctest.h"
#include "stsdelay/barrier.hpp"

using namespace stsdelay;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("wavenumbers inside and outside the barrier") {
  const BarrierSpec barrier{1.0, 3.0, {}};
  const auto w = wavenumbers(0.5, barrier);
  CHECK(w.k == doctest::Approx(1.0));
  CHECK(w.k1.real() == 0.0);
  CHECK(w.k1.imag() == doctest::Approx(1.0));

  CHECK(wavenumbers(1.0, barrier).k1 == cplx{});
  const auto free = wavenumbers(0.7, BarrierSpec{0.0, 3.0, {}});
  CHECK(free.k1.real() == free.k);
  CHECK(free.k1.imag() == 0.0);

  CHECK_THROWS_AS(wavenumbers(0.0, barrier), DomainError);
  CHECK_THROWS_AS(wavenumbers(-1.0, barrier), DomainError);

  // hbar and m enter as k = sqrt(2 m E)/hbar.
  const BarrierSpec scaled{1.0, 3.0, {0.5, 2.0}};
  CHECK(wavenumbers(0.5, scaled).k == doctest::Approx(std::sqrt(2.0 * 2.0 * 0.5) / 0.5));
}

TEST_CASE("transmission coefficient examples") {
  // No barrier.
  CHECK(transmission_coefficient(1.3, cplx{1.3, 0.0}, 2.0) == cplx{1.0, 0.0});

  // Resonance k1 L = pi above the barrier.
  const double length = 3.0;
  const double k1 = kPi / length;
  const double k = std::sqrt(k1 * k1 + 2.0);  // V0 = 1, hbar = m = 1
  CHECK(std::abs(transmission_coefficient(k, k1, length)) == doctest::Approx(1.0).epsilon(1e-12));

  // E = 0.5, V0 = 1, L = 3 against the transfer-matrix oracle.
  const BarrierSpec barrier{1.0, 3.0, {}};
  const auto w = wavenumbers(0.5, barrier);
  const cplx t = transmission_coefficient(w.k, w.k1, barrier.length);
  CHECK(rel(t, transfer_matrix_transmission(0.5, barrier)) < 1e-10);
  CHECK(std::abs(t) < 1.0);

  CHECK_THROWS_AS(transmission_coefficient(std::nan(""), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(transmission_coefficient(1.0, cplx{INFINITY, 0.0}, 1.0), DomainError);
}

TEST_CASE("closed-form transmission agrees with the transfer-matrix oracle on random barriers") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> energy(0.01, 4.0);
  std::uniform_real_distribution<double> height(0.0, 3.0);
  std::uniform_real_distribution<double> length(0.1, 6.0);
  int checked = 0;
  while (checked < 100) {
    const double e = energy(rng);
    const BarrierSpec b{height(rng), length(rng), {}};
    if (std::abs(e - b.height) <= 1e-3) continue;
    const auto w = wavenumbers(e, b);
    const cplx t = transmission_coefficient(w.k, w.k1, b.length);
    CAPTURE(e);
    CAPTURE(b.height);
    CAPTURE(b.length);
    CHECK(rel(t, transfer_matrix_transmission(e, b)) < 1e-10);
    ++checked;
  }
}

TEST_CASE("|T| <= 1 on an (E, L) lattice with equality only at resonances") {
  const double v0 = 1.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double e = 0.05 + 0.15 * i;
      const BarrierSpec b{v0, 0.5 + 0.6 * j, {}};
      if (e == v0) continue;
      const auto w = wavenumbers(e, b);
      const double mag = std::abs(transmission_coefficient(w.k, w.k1, b.length));
      CHECK(mag <= 1.0 + 1e-14);
      const bool resonant = e > v0 && std::abs(std::sin(w.k1.real() * b.length)) < 1e-9;
      if (!resonant) CHECK(mag < 1.0 - 1e-9);
    }
  }
}

TEST_CASE("threshold k1 -> 0 is continuous across the series guard") {
  const double k = 1.4;
  const double length = 3.0;
  const cplx limit = std::exp(cplx{0.0, -k * length}) / cplx{1.0, -k * length / 2.0};
  CHECK(rel(transmission_coefficient(k, 0.0, length), limit) < 1e-14);
  for (double z : {0.5 * kTransmissionSeriesGuard, 2.0 * kTransmissionSeriesGuard}) {
    for (cplx k1 : {cplx{z / length, 0.0}, cplx{0.0, z / length}}) {
      const cplx t = transmission_coefficient(k, k1, length);
      CHECK(rel(t, limit) < 1e-5);
    }
  }
  // Both evaluation routes agree just above the guard.
  const double q = std::pow(3.0 * kTransmissionSeriesGuard / length, 2);
  const cplx direct = transmission_coefficient(k, std::sqrt(q), length);
  const cplx entire = transmission_response(k, k * k - q, length).value;
  CHECK(rel(direct, entire) < 1e-10);
}

TEST_CASE("transmission response matches the closed form and its finite-difference derivative") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> kk(0.05, 4.0);
  const double length = 3.0;
  const double k0_sq = 2.0;
  for (int i = 0; i < 50; ++i) {
    const double k = kk(rng);
    const auto r = transmission_response(k, k0_sq, length);
    const cplx k1 = evanescent_sqrt(k * k - k0_sq);
    CHECK(rel(r.value, transmission_coefficient(k, k1, length)) < 1e-10);
    auto t_of = [&](double q) { return transmission_response(q, k0_sq, length).value; };
    const cplx fd = differentiate_central(t_of, k, 6, 1e-3);
    CAPTURE(k);
    CHECK(rel(r.derivative, fd) < 1e-6);
  }
  // Derivative stays regular exactly at the threshold k = k0.
  const auto at = transmission_response(std::sqrt(k0_sq), k0_sq, length);
  auto t_of = [&](double q) { return transmission_response(q, k0_sq, length).value; };
  CHECK(rel(at.derivative, differentiate_central(t_of, std::sqrt(k0_sq), 6, 1e-4)) < 1e-6);

  // Deep tunnelling neither overflows nor loses the log-derivative.
  const auto deep = transmission_response(0.5, 1e4, 50.0);
  CHECK(std::abs(deep.value) == 0.0);
  CHECK(std::isfinite(deep.log_derivative.real()));
}

TEST_CASE("transfer-matrix oracle limits") {
  CHECK(rel(transfer_matrix_transmission(0.8, BarrierSpec{0.0, 2.0, {}}), cplx{1.0, 0.0}) < 1e-14);
  CHECK_THROWS_AS(transfer_matrix_transmission(1.0, BarrierSpec{1.0, 2.0, {}}), DomainError);
  // Classical limit: the envelope 1 - |T| shrinks as E grows.
  const BarrierSpec b{1.0, 2.0, {}};
  double previous_gap = 1.0;
  for (double e : {5.0, 20.0, 80.0, 320.0}) {
    // Envelope of 1 - |T|^2 is bounded by V0^2 / (4 E (E - V0)).
    const double gap = 1.0 - std::norm(transfer_matrix_transmission(e, b));
    CHECK(gap <= b.height * b.height / (4.0 * e * (e - b.height)) + 1e-14);
    CHECK(gap <= previous_gap);
    previous_gap = b.height * b.height / (4.0 * e * (e - b.height));
  }
}
