#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stsdelay/barrier.hpp"
#include "stsdelay/numerics.hpp"
#include "stsdelay/spectrum.hpp"

namespace stsdelay {

inline constexpr double kSpeedOfLight = 2.998e8;

/// Rectangular guide narrowed over a length L. SI units throughout. Only the
/// heights b and b' set the TE01 cutoffs; the widths are carried as metadata.
struct GuideGeometry {
  double b = 0.02286;
  double b_prime = 0.0158;
  double a = 0.01016;
  double a_prime = 0.0079;
  double length = 0.15;
  double c = kSpeedOfLight;

  /// 0 < b' <= b, L > 0. b' == b is the degenerate guide with T = 1.
  void validate() const;
};

struct Cutoffs {
  double nu_in = 0.0;
  double nu_out = 0.0;
  double c = kSpeedOfLight;
};

/// nu_in = c / 2b', nu_out = c / 2b.
Cutoffs cutoff_frequencies(const GuideGeometry& g);

/// k = (2pi/c) sqrt(nu^2 - nu_out^2), k1 = (2pi/c) sqrt(nu^2 - nu_in^2) with
/// Im k1 >= 0. Throws DomainError for nu <= nu_out.
Wavenumbers guide_wavenumbers(double nu, const Cutoffs& cut);

/// dk/dnu = (2pi/c)^2 nu / k.
double guide_wavenumber_derivative(double nu, const Cutoffs& cut);

/// Barrier-equivalent threshold k0 = (2pi/c) sqrt(nu_in^2 - nu_out^2), so that
/// k^2 - k1^2 = k0^2 at every frequency.
double equivalent_potential(const Cutoffs& cut);

struct Velocities {
  double phase = 0.0;
  double group = 0.0;
};

Velocities velocities(double nu, const Cutoffs& cut);

/// Lorentzian source centred on nu_mu with scale Lambda, emitted a path
/// length ell before the narrowing.
struct SourceSpec {
  double nu_mu = 0.0;
  double lambda = 0.0;
  double ell = 0.0;

  void validate(const Cutoffs& cut) const;
};

/// t_mu = ell / v_phase(nu_mu).
double source_delay(const SourceSpec& src, const Cutoffs& cut);

/// P(nu) = 1/[i(nu + nu_mu) + Lambda/2] - 1/[i(nu - nu_mu) - Lambda/2] and dP/dnu.
SpectralSample lorentzian_poles(double nu, double nu_mu, double lambda);

/// A_nu = sqrt(Lambda / 2pi) e^{-i 2pi nu t_mu} P(nu), with its derivative.
SpectralSample lorentzian_amplitude(double nu, const SourceSpec& src, const Cutoffs& cut);

/// T(nu) e^{ik(nu)L} and its nu-derivative.
struct GuideResponse {
  cplx transmission{};
  /// T e^{ikL}
  cplx value{};
  /// d(T e^{ikL}) / dnu
  cplx derivative{};
  /// d log(T e^{ikL}) / dnu; finite even where T underflows.
  cplx log_derivative{};
};

GuideResponse guide_response(double nu, const GuideGeometry& g, const Cutoffs& cut);

struct OpticalTime {
  /// raw_expected_time - lineshape_time: the transit time referenced to the
  /// emission time of the line shape itself.
  double delay = 0.0;
  /// int F^* dF/dnu dnu / (2 pi i int |F|^2 dnu), F = T A e^{ikL}.
  double raw_expected_time = 0.0;
  /// |F|^2-weighted mean of (1/2pi) d arg P / dnu: the mean emission delay
  /// carried by the pole structure of the line shape.
  double lineshape_time = 0.0;
  /// |imaginary part| of the ratio, seconds.
  double imaginary_residue = 0.0;
  /// Imaginary part relative to int |F^* dF/dnu| / (2 pi int |F|^2).
  double relative_residue = 0.0;
  /// int |F|^2 dnu over [nu_out, nu_max].
  double denominator = 0.0;
  double nu_max = 0.0;
  NumericsReport report;
};

/// Integrates over [nu_out, nu_max] with nu_max from the Lorentzian tail
/// bound. Throws DegenerateInputError when nothing is transmitted and
/// NumericError when the reality check fails.
OpticalTime optical_expected_time(const SourceSpec& src, const GuideGeometry& g, const QuadratureSpec& quad = {});

/// int w fn dnu / int w dnu with w = |T A|^2 (or |A|^2 when
/// `include_transmission` is false), over the same support and breakpoints
/// as optical_expected_time. The upper limit comes from the same tail rule
/// unless `nu_max` is given.
double weighted_mean(const SourceSpec& src, const GuideGeometry& g, const std::function<double(double nu)>& fn,
                     const QuadratureSpec& quad = {}, bool include_transmission = true,
                     double nu_max = std::numeric_limits<double>::quiet_NaN());

// Curves ----------------------------------------------------------------------

enum class Model { sts, pt, bl };

const char* model_name(Model m);

enum class PointStatus { ok, infinite, failed };

struct CurvePoint {
  double nu = 0.0;
  double value = std::numeric_limits<double>::quiet_NaN();
  PointStatus status = PointStatus::failed;
  std::string message;
};

struct DelayCurve {
  Model model = Model::sts;
  std::vector<CurvePoint> points;
};

struct SweepSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  /// start + i * step for i = 0.. while <= stop (with a 1e-9 step slack).
  std::vector<double> points() const;
};

/// Evaluates `fn` at each frequency on up to `workers` threads (0: hardware
/// concurrency). Results are stored by index, so order and values do not
/// depend on scheduling. Exceptions become `failed` points; infinite values
/// become `infinite` points.
DelayCurve evaluate_curve(Model model, const std::vector<double>& nus, const std::function<double(double)>& fn,
                          unsigned workers = 0);

/// optical_expected_time(...).delay at each sweep point.
DelayCurve delay_curve(const SweepSpec& sweep, const GuideGeometry& g, double lambda, double ell,
                       const QuadratureSpec& quad = {}, unsigned workers = 0);

}  // namespace stsdelay
