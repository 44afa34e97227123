#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "stsdelay/time_expectation.hpp"

using namespace stsdelay;

TEST_CASE("rho(t|x) is non-negative and flat for a quasi-monochromatic packet") {
  const auto narrow = MomentumSpectrum::gaussian(5.0, 0.001);
  const double r0 = rho_t_given_x(narrow, 0.0, 0.0).value;
  CHECK(r0 > 0.0);
  for (double t : {-1.0, -0.3, 0.4, 1.0}) {
    const double r = rho_t_given_x(narrow, 0.0, t).value;
    CHECK(r >= 0.0);
    CHECK(std::abs(r / r0 - 1.0) < 1e-3);
  }
  const auto packet = MomentumSpectrum::gaussian(3.0, 0.2);
  for (double t = -20.0; t <= 20.0; t += 2.5) CHECK(rho_t_given_x(packet, 4.0, t).value >= 0.0);
}

TEST_CASE("the arrival-time density is normalized to the momentum norm") {
  const auto packet = MomentumSpectrum::gaussian(5.0, 0.2);
  const double norm = packet.norm().value.real();
  for (double x : {0.0, 5.0, 10.0}) {
    CAPTURE(x);
    const auto direct = expected_time_direct(packet, x);
    CHECK(std::abs(direct.mass / norm - 1.0) < 1e-4);
    CHECK(direct.captured_fraction >= 1.0 - 1e-9);
  }
  // Independent route: adaptive quadrature of rho over t.
  QuadratureSpec loose;
  loose.rel_tol = 1e-7;
  auto mass = integrate_adaptive<cplx>(
      [&](double t) { return cplx{rho_t_given_x(packet, 0.0, t, {}, loose).value, 0.0}; }, -12.0, 12.0,
      std::vector<double>{-3.0, -1.0, 0.0, 1.0, 3.0}, loose);
  CHECK(std::abs(mass.value.real() / norm - 1.0) < 1e-4);
}

TEST_CASE("FFT-sampled density agrees with pointwise quadrature") {
  const auto packet = MomentumSpectrum::gaussian(4.0, 0.25).time_shifted(0.7);
  const double x = 3.0;
  DirectTimeGrid grid;
  grid.keep_density = true;
  const auto direct = expected_time_direct(packet, x, {}, grid);
  REQUIRE(direct.density.size() == direct.samples);
  const double peak = *std::max_element(direct.density.begin(), direct.density.end());
  const std::size_t stride = direct.samples / 37;
  for (std::size_t j = stride / 2; j < direct.samples; j += stride) {
    const double t = direct.window_start + static_cast<double>(j) * direct.step;
    CAPTURE(t);
    CHECK(std::abs(direct.density[j] - rho_t_given_x(packet, x, t).value) < 1e-8 * peak);
  }
}

TEST_CASE("closed form and direct oracle on a Gaussian packet") {
  const auto packet = MomentumSpectrum::gaussian(5.0, 0.2);
  const auto at0 = expected_time_closed(packet, 0.0);
  CHECK(std::abs(at0.value) < 1e-10);
  CHECK(std::abs(expected_time_direct(packet, 0.0).value) < 1e-8);
  CHECK(at0.relative_residue < 1e-8);

  const auto closed = expected_time_closed(packet, 10.0);
  const auto direct = expected_time_direct(packet, 10.0);
  CHECK(std::abs(closed.value - direct.value) <= 1e-4 * std::max(1.0, std::abs(direct.value)));
  // Group-velocity estimate x / (hbar k0 / m), corrected by <1/k> for the spread.
  CHECK((closed.value - at0.value) == doctest::Approx(10.0 / 5.0).epsilon(0.02));
}

TEST_CASE("closed form and direct oracle on a squared-Lorentzian packet") {
  const auto packet = MomentumSpectrum::lorentzian(4.0, 0.15);
  for (double x : {0.0, 6.0}) {
    CAPTURE(x);
    const auto closed = expected_time_closed(packet, x);
    const auto direct = expected_time_direct(packet, x);
    CHECK(closed.relative_residue < 1e-8);
    CHECK(std::abs(closed.value - direct.value) <= 1e-4 * std::max(1.0, std::abs(direct.value)));
    CHECK(closed.value > 0.0);
  }
}

TEST_CASE("time translation of the amplitude shifts the expectation by -t0") {
  const auto packet = MomentumSpectrum::gaussian(4.0, 0.2);
  const double base = expected_time_closed(packet, 5.0).value;
  for (double t0 : {0.5, -1.25, 3.0}) {
    CAPTURE(t0);
    const double shifted = expected_time_closed(packet.time_shifted(t0), 5.0).value;
    CHECK((shifted - base) == doctest::Approx(-t0).epsilon(1e-9));
  }
}

TEST_CASE("position shift and branch mirroring") {
  const auto packet = MomentumSpectrum::gaussian(4.0, 0.2);
  const double at3 = expected_time_closed(packet, 3.0).value;
  CHECK(expected_time_closed(packet.position_shifted(2.0), 5.0).value == doctest::Approx(at3).epsilon(1e-10));
  CHECK(expected_time_closed(packet.mirrored(), -3.0).value == doctest::Approx(at3).epsilon(1e-10));

  // Both branches populated: closed form against the direct oracle.
  auto other = MomentumSpectrum::gaussian(3.0, 0.2, cplx{0.0, 0.5}).time_shifted(1.0);
  const auto both = packet.with_minus(other.plus_branch());
  const auto closed = expected_time_closed(both, 2.0);
  const auto direct = expected_time_direct(both, 2.0);
  CHECK(std::abs(closed.value - direct.value) <= 1e-4 * std::max(1.0, std::abs(direct.value)));
}

TEST_CASE("sampled spectra reproduce the analytic Gaussian") {
  const double k0 = 5.0;
  const double sigma = 0.2;
  std::vector<double> k;
  std::vector<cplx> c;
  for (int i = 0; i <= 2400; ++i) {
    const double q = k0 - 12.0 * sigma + 24.0 * sigma * i / 2400.0;
    k.push_back(q);
    c.push_back(std::exp(-(q - k0) * (q - k0) / (4.0 * sigma * sigma)) * std::polar(1.0, -0.5 * q * q * 0.8));
  }
  const auto sampled = MomentumSpectrum::sampled(k, c);
  const auto analytic = MomentumSpectrum::gaussian(k0, sigma).time_shifted(0.8);
  const double a = expected_time_closed(analytic, 4.0).value;
  const double s = expected_time_closed(sampled, 4.0).value;
  CHECK(std::abs(a - s) < 1e-5);
  CHECK_THROWS_AS(MomentumSpectrum::sampled({1.0, 2.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(MomentumSpectrum::sampled({1.0, 3.0, 2.0}, {1.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("analytic Gamma derivative against sixth-order differences") {
  const BarrierSpec barrier{1.0, 3.0, {}};
  const auto gauss = MomentumSpectrum::gaussian(1.6, 0.1).time_shifted(0.3);
  const std::vector<MomentumSpectrum> spectra{gauss, MomentumSpectrum::lorentzian(2.0, 0.2),
                                              post_barrier_spectrum(gauss, barrier)};
  std::mt19937_64 rng(3);
  for (const auto& s : spectra) {
    std::uniform_real_distribution<double> kk(s.center() - 3.0 * s.width(), s.center() + 3.0 * s.width());
    for (int i = 0; i < 50; ++i) {
      const double k = kk(rng);
      const cplx fd = differentiate_central([&](double q) { return s.plus(q).value; }, k, 6, 1e-4);
      const cplx exact = s.plus(k).derivative;
      CAPTURE(k);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), std::abs(s.plus(k).value)));
    }
  }
}

TEST_CASE("post-barrier spectrum") {
  const auto packet = MomentumSpectrum::gaussian(1.2 * std::sqrt(2.0), 0.03);
  const auto free = post_barrier_spectrum(packet, BarrierSpec{0.0, 3.0, {}});
  for (double k : {1.6, 1.7, 1.75}) CHECK(std::abs(free.plus(k).value - packet.plus(k).value) < 1e-12);

  // Output norm against pointwise transfer-matrix weighting.
  const BarrierSpec barrier{1.0, 3.0, {}};
  const auto out = post_barrier_spectrum(packet, barrier);
  const double norm = out.norm().value.real();
  auto weighted = integrate_adaptive<cplx>(
      [&](double k) {
        const double e = 0.5 * k * k;
        return cplx{std::norm(packet.plus(k).value) * std::norm(transfer_matrix_transmission(e, barrier)), 0.0};
      },
      packet.k_min(), packet.k_max(), packet.breakpoints(), QuadratureSpec{});
  CHECK(norm == doctest::Approx(weighted.value.real()).epsilon(1e-9));

  const auto below = MomentumSpectrum::gaussian(0.8, 0.02);
  CHECK(post_barrier_spectrum(below, barrier).norm().value.real() < 0.05 * below.norm().value.real());
}

TEST_CASE("expectation just past the barrier") {
  const BarrierSpec barrier{1.0, 3.0, {}};
  const auto packet = MomentumSpectrum::gaussian(1.05 * std::sqrt(2.0), 0.02);
  const auto via_post = expected_time_closed(post_barrier_spectrum(packet, barrier), barrier.length);
  const auto after = expected_time_after_barrier(packet, barrier);
  CHECK(after.value == doctest::Approx(via_post.value).epsilon(1e-12));
  const auto direct = expected_time_direct(post_barrier_spectrum(packet, barrier), barrier.length);
  CHECK(std::abs(after.value - direct.value) <= 1e-3 * std::max(1.0, std::abs(direct.value)));

  const auto buried = MomentumSpectrum::gaussian(0.5, 0.02);
  CHECK_THROWS_AS(expected_time_after_barrier(buried, BarrierSpec{1.0, 1000.0, {}}), DegenerateInputError);
}

TEST_CASE("delay limits") {
  const auto packet = MomentumSpectrum::gaussian(3.0, 0.01);
  const auto free = delay_time(packet, BarrierSpec{0.0, 4.0, {}});
  CHECK(free.delay == doctest::Approx(4.0 / 3.0).epsilon(0.01));

  const auto thin = delay_time(MomentumSpectrum::gaussian(1.0, 0.02), BarrierSpec{1.0, 1e-6, {}});
  CHECK(std::abs(thin.delay) < 1e-5);
}

TEST_CASE("tunnelling delay saturates with barrier length") {
  const auto packet = MomentumSpectrum::gaussian(0.8 * std::sqrt(2.0), 0.02);
  std::vector<double> lengths{2.0, 3.0, 4.0, 6.0};
  std::vector<double> delays;
  for (double length : lengths) {
    delays.push_back(delay_time(packet, BarrierSpec{1.0, length, {}}).delay);
    MESSAGE("L = " << length << "  delay = " << delays.back());
  }
  const double s1 = delays[1] - delays[0];
  const double s2 = delays[2] - delays[1];
  const double s3 = (delays[3] - delays[2]) / 2.0;
  CHECK(std::abs(s1) > std::abs(s2));
  CHECK(std::abs(s2) > std::abs(s3));
  // Far slower growth than free flight over the same length.
  CHECK(std::abs(s3) < 0.5 / packet.center());
}
