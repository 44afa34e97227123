#pragma once

#include <limits>

#include "stsdelay/barrier.hpp"
#include "stsdelay/numerics.hpp"
#include "stsdelay/spectrum.hpp"

namespace stsdelay {

/// Mean detection time at a fixed position, with the diagnostics of the
/// integrals that produced it.
struct TimeExpectation {
  double value = 0.0;
  /// |imaginary part| of the ratio, in the same time units as `value`.
  double imaginary_residue = 0.0;
  /// Imaginary residue relative to the integral of the integrand modulus.
  double relative_residue = 0.0;
  /// Integral of |C^+|^2 + |C^-|^2.
  double norm = 0.0;
  NumericsReport report;
};

struct Density {
  double value = 0.0;
  NumericsReport report;
};

/// rho(t|x) = (hbar / 2 pi m) sum_{r=+-} |int sqrt(k) C_k^r e^{r i k x - i E_k t / hbar} dk|^2.
Density rho_t_given_x(const MomentumSpectrum& spectrum, double x, double t, const ParticleUnits& units = {},
                      const QuadratureSpec& quad = {});

/// Time grid for the brute-force expectation. NaN fields are chosen
/// automatically: the window is centred on the stationary-phase arrival
/// x m / (hbar k_c), the step keeps the fastest relative phase below pi/8 per
/// sample, and the window doubles until the outer 5% on each side carry less
/// than `tail_tolerance` of the mass.
struct DirectTimeGrid {
  double center = std::numeric_limits<double>::quiet_NaN();
  double half_width = std::numeric_limits<double>::quiet_NaN();
  double step = std::numeric_limits<double>::quiet_NaN();
  double tail_tolerance = 1e-9;
  std::size_t max_samples = std::size_t{1} << 24;
  /// Keep rho on the final grid in DirectTimeResult::density.
  bool keep_density = false;
};

struct DirectTimeResult {
  double value = 0.0;
  /// Integral of rho over the window.
  double mass = 0.0;
  /// Integral of |C|^2 over k, by separate quadrature.
  double norm = 0.0;
  /// One minus the fraction of the mass in the outer 5% bands of the window.
  double captured_fraction = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  double step = 0.0;
  std::size_t samples = 0;
  /// rho at window_start + j * step, when requested.
  std::vector<double> density;
};

/// int t rho(t|x) dt / int rho(t|x) dt on a uniform time grid. rho is
/// sampled on the whole grid at once: the k-integral is rewritten over
/// omega = E_k / hbar with a uniform trapezoid and evaluated for every grid
/// time with one FFT per branch.
DirectTimeResult expected_time_direct(const MomentumSpectrum& spectrum, double x, const ParticleUnits& units = {},
                                      const DirectTimeGrid& grid = {}, const QuadratureSpec& quad = {});

/// Closed form
///   <T>(x) = (m / i hbar) int [Gamma+^* dGamma+/dk + Gamma-^* dGamma-/dk] dk / int (|C+|^2 + |C-|^2) dk
/// with Gamma^{+-}_k(x) = C^{+-}_k e^{+-ikx} / sqrt(k). The real part of the
/// numerator integral equals the boundary term |Gamma|^2/2 at the support
/// edges; that term is removed before the reality check.
TimeExpectation expected_time_closed(const MomentumSpectrum& spectrum, double x, const ParticleUnits& units = {},
                                     const QuadratureSpec& quad = {});

/// C^+ = A_k T(k), C^- = 0 just past the barrier.
MomentumSpectrum post_barrier_spectrum(const MomentumSpectrum& incident, const BarrierSpec& barrier);

/// Mean detection time just past the barrier, from the incident amplitude A_k:
///   (m / i hbar) int (A T e^{ikL} / sqrt k)^* d/dk (A T e^{ikL} / sqrt k) dk / int |A T|^2 dk.
TimeExpectation expected_time_after_barrier(const MomentumSpectrum& incident, const BarrierSpec& barrier,
                                            const QuadratureSpec& quad = {});

struct DelayResult {
  double delay = 0.0;
  TimeExpectation exit;
  TimeExpectation entry;
};

/// <T>(L) - <T>(0).
DelayResult delay_time(const MomentumSpectrum& incident, const BarrierSpec& barrier, const QuadratureSpec& quad = {});

}  // namespace stsdelay
