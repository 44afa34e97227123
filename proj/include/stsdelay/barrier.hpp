#pragma once

#include "stsdelay/numerics.hpp"

namespace stsdelay {

/// hbar and particle mass. Natural units by default; the waveguide analog
/// swaps in hbar/m = c^2 / (2 pi nu) instead of rewriting the formulas.
struct ParticleUnits {
  double hbar = 1.0;
  double mass = 1.0;
};

/// Rectangular barrier of height V0 occupying 0 < x < L.
struct BarrierSpec {
  double height = 0.0;
  double length = 1.0;
  ParticleUnits units{};

  void validate() const;
  /// k0^2 = 2 m V0 / hbar^2.
  double threshold_wavenumber_sq() const;
};

/// Wavenumber outside (real) and inside (complex, Im >= 0) the barrier.
struct Wavenumbers {
  double k = 0.0;
  cplx k1{};
};

/// k = sqrt(2mE)/hbar, k1 = principal sqrt(2m(E - V0))/hbar with Im(k1) >= 0.
Wavenumbers wavenumbers(double energy, const BarrierSpec& barrier);

/// In-barrier wavenumber for k1^2 = q on the decaying branch: real for q >= 0,
/// +i sqrt(-q) otherwise.
cplx evanescent_sqrt(double q);

/// Transmission amplitude
///   T = 4 k k1 e^{-iL(k-k1)} / [(k+k1)^2 - e^{2iLk1} (k-k1)^2].
/// Below |k1| L = kTransmissionSeriesGuard the removable 0/0 is evaluated
/// through the entire-function form, which tends to e^{-ikL}/(1 - ikL/2).
cplx transmission_coefficient(double k, cplx k1, double length);

inline constexpr double kTransmissionSeriesGuard = 1e-3;

/// T and dT/dk with k1^2 = k^2 - k0_sq held on the decaying branch. Uses
/// T = e^{-ikL} / [cos(k1 L) - i (k^2 + k1^2)/(2k) sin(k1 L)/k1], whose
/// cos and sin(z)/z factors are entire in k1^2, so the derivative stays
/// regular through k1 = 0. Everything is scaled by e^{i k1 L} so deep
/// tunnelling never overflows.
struct TransmissionResponse {
  cplx value{};
  cplx derivative{};
  /// d log T / dk; finite whenever k > 0, even if T underflows.
  cplx log_derivative{};
};

TransmissionResponse transmission_response(double k, double k0_sq, double length);

/// Independent oracle: match value and slope of plane waves at x = 0 and
/// x = L with 2x2 matrices and read off the transmitted amplitude.
/// E == V0 is rejected.
cplx transfer_matrix_transmission(double energy, const BarrierSpec& barrier);

}  // namespace stsdelay
