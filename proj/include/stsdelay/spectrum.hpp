#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "stsdelay/barrier.hpp"
#include "stsdelay/numerics.hpp"

namespace stsdelay {

/// Amplitude and its k-derivative at one wavenumber.
struct SpectralSample {
  cplx value{};
  cplx derivative{};
};

/// Momentum amplitudes C_k^+ (right movers) and C_k^- (left movers) on
/// k >= 0, restricted to an effective support [k_min, k_max] outside which
/// the amplitude is negligible. Every representation carries an exact
/// k-derivative: closed-form families analytically, sampled grids through
/// the derivative of their monotone cubic interpolant.
class MomentumSpectrum {
 public:
  using Branch = std::function<SpectralSample(double k)>;

  MomentumSpectrum(Branch plus, Branch minus, double k_min, double k_max, double center, double width);

  /// C(k) = a exp(-(k - k0)^2 / (4 sigma^2)); |C|^2 has standard deviation
  /// sigma. Requires k0 > 12 sigma so that |C|^2/k vanishes at k = 0.
  static MomentumSpectrum gaussian(double k0, double sigma, cplx amplitude = 1.0);

  /// C(k) = a (k/k0) [gamma / (gamma - i(k - k0))]^2: a causal Lorentzian
  /// line (squared, so that sqrt(k) C stays integrable) with a threshold
  /// factor k that makes |C|^2/k vanish at k = 0. Support [0, k0 + 300 gamma].
  static MomentumSpectrum lorentzian(double k0, double gamma, cplx amplitude = 1.0);

  /// Tabulated amplitudes on a strictly increasing grid, interpolated with
  /// Fritsch-Carlson monotone cubics (real and imaginary parts separately).
  /// `minus` may be empty.
  static MomentumSpectrum sampled(std::vector<double> k, std::vector<cplx> plus, std::vector<cplx> minus = {});

  /// Multiplies both branches by exp(-i E_k t0 / hbar).
  MomentumSpectrum time_shifted(double t0, const ParticleUnits& units = {}) const;
  /// Multiplies C^+ by exp(-i k x0) and C^- by exp(+i k x0).
  MomentumSpectrum position_shifted(double x0) const;
  /// Multiplies both branches by exp(i phi(k)) given phi and phi'.
  MomentumSpectrum phase_modulated(std::function<double(double)> phase,
                                   std::function<double(double)> phase_derivative) const;
  /// Exchanges the roles of C^+ and C^-.
  MomentumSpectrum mirrored() const;
  /// Same branches with C^- set to `minus`.
  MomentumSpectrum with_minus(Branch minus) const;

  bool has_plus() const { return static_cast<bool>(plus_); }
  bool has_minus() const { return static_cast<bool>(minus_); }
  SpectralSample plus(double k) const;
  SpectralSample minus(double k) const;
  const Branch& plus_branch() const { return plus_; }
  const Branch& minus_branch() const { return minus_; }

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  /// Peak wavenumber and width scale; used to seed quadrature breakpoints.
  double center() const { return center_; }
  double width() const { return width_; }
  std::vector<double> breakpoints() const;

  /// Integral of |C^+|^2 + |C^-|^2 over the support.
  QuadratureResult<cplx> norm(const QuadratureSpec& quad = {}) const;

 private:
  Branch plus_;
  Branch minus_;
  double k_min_;
  double k_max_;
  double center_;
  double width_;
};

}  // namespace stsdelay
