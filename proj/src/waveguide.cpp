#include "stsdelay/waveguide.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace stsdelay {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kDegenerateWeight = 1e-300;

double require_above_outer(double nu, const Cutoffs& cut) {
  if (!std::isfinite(nu) || !(nu > cut.nu_out)) {
    throw DomainError("frequency " + std::to_string(nu) + " Hz is at or below the outer cutoff " +
                      std::to_string(cut.nu_out) + " Hz");
  }
  return nu;
}

// |P|^2 <= (a^2 + Lambda^2) / (x^2 (x + a)^2) at a distance x above nu_mu,
// a = 2 nu_mu. Its integral from d is (a^2 + Lambda^2) h(a/d) / (a^2 d) with
// h(r) = 1 + 1/(1 + r) - 2 log1p(r) / r, which bounds the weight
// |T A|^2 <= |A|^2 left beyond d.
double two_pole_shape(double r) {
  if (r < 0.1) {
    // h(r) = sum_{n>=2} (-1)^n r^n (n - 1) / (n + 1)
    double sum = 0.0;
    double term = r;
    for (int n = 2; n <= 16; ++n) {
      term *= -r;
      sum += term * (n - 1) / (n + 1);
    }
    return -sum;
  }
  return 1.0 + 1.0 / (1.0 + r) - 2.0 * std::log1p(r) / r;
}

TailEnvelope two_pole_envelope(const SourceSpec& src) {
  TailEnvelope env;
  env.center = src.nu_mu;
  env.scale = src.lambda;
  const double s2 = src.lambda / kTwoPi;
  const double a = 2.0 * src.nu_mu;
  const double numerator = 1.0 + (src.lambda / a) * (src.lambda / a);
  env.tail_bound = [s2, a, numerator](double d) { return s2 * numerator * two_pole_shape(a / d) / d; };
  return env;
}

// Frequencies in units of Lambda from nu_mu: u = (nu - nu_mu) / Lambda.
struct Frame {
  double nu_mu;
  double lambda;
  double nu(double u) const { return nu_mu + lambda * u; }
  double u(double nu) const { return (nu - nu_mu) / lambda; }
};

std::vector<double> frame_breakpoints(const Frame& f, const Cutoffs& cut, double length) {
  std::vector<double> pts{-50.0, -5.0, -1.0, 0.0, 1.0, 5.0, 50.0};
  if (cut.nu_in > cut.nu_out) {
    pts.push_back(f.u(cut.nu_in));
    // Transmission resonances k1 L = n pi above the inner cutoff.
    const double spacing = cut.c / (2.0 * length);
    for (int n = 1; n <= 64; ++n) pts.push_back(f.u(std::hypot(cut.nu_in, n * spacing)));
  }
  for (double u = 100.0; u < 2.0e6; u *= 2.0) pts.push_back(u);
  std::sort(pts.begin(), pts.end());
  return pts;
}

template <std::size_t N>
struct Truncated {
  std::array<cplx, N> value{};
  double u_upper = 0.0;
  double nu_max = 0.0;
  NumericsReport report;
};

// Integrates a stack of integrands of u over [u(nu_out), M] with M doubling
// from the configured multiplier. Component `weight` must be the transmitted
// weight in frequency units; it drives the stopping rule. Segments are
// integrated once and summed in order.
template <std::size_t N, typename F>
Truncated<N> integrate_truncated(F&& f, const SourceSpec& src, const Cutoffs& cut, double length,
                                 std::size_t weight, const QuadratureSpec& quad, double nu_max) {
  const Frame frame{src.nu_mu, src.lambda};
  const double u_out = frame.u(cut.nu_out);
  const auto pts = frame_breakpoints(frame, cut, length);
  Truncated<N> out;
  double u_done = u_out;
  auto extend = [&](double u_to) {
    if (!(u_to > u_done)) return;
    auto seg = integrate_adaptive<std::array<cplx, N>>(f, u_done, u_to, pts, quad);
    for (std::size_t i = 0; i < N; ++i) out.value[i] += seg.value[i];
    out.report.merge(seg.report);
    u_done = u_to;
  };

  if (!std::isnan(nu_max)) {
    extend(frame.u(nu_max));
    out.u_upper = u_done;
    out.nu_max = nu_max;
    return out;
  }
  const auto env = two_pole_envelope(src);
  const auto cut_at = truncate_semi_infinite(
      env,
      [&](double upper) {
        extend(frame.u(upper));
        return out.value[weight].real();
      },
      quad);
  out.u_upper = u_done;
  out.nu_max = cut_at.upper_limit;
  out.report.truncation_point = cut_at.upper_limit;
  return out;
}

// g(u) = sqrt(Lambda) T A e^{ikL} and dg/du; zero at or below the outer cutoff.
struct Field {
  cplx g{};
  cplx g_u{};
  SpectralSample poles{};
};

Field field_at(double u, const SourceSpec& src, const GuideGeometry& g, const Cutoffs& cut, double t_mu,
               bool with_transmission) {
  Field out;
  const double nu = src.nu_mu + src.lambda * u;
  if (!(nu > cut.nu_out)) return out;
  const double k = (kTwoPi / cut.c) * std::sqrt((nu - cut.nu_out) * (nu + cut.nu_out));
  if (!(k > 0.0)) return out;
  out.poles = lorentzian_poles(nu, src.nu_mu, src.lambda);
  const double s = std::sqrt(src.lambda / kTwoPi);
  const cplx emission = std::polar(s, -kTwoPi * nu * t_mu);
  const cplx a = emission * out.poles.value;
  const cplx a_nu = emission * (out.poles.derivative - kI * kTwoPi * t_mu * out.poles.value);
  cplx r{1.0, 0.0};
  cplx r_nu{};
  if (with_transmission) {
    const auto resp = guide_response(nu, g, cut);
    r = resp.value;
    r_nu = resp.derivative;
  }
  const double root = std::sqrt(src.lambda);
  out.g = root * r * a;
  out.g_u = root * src.lambda * (r_nu * a + r * a_nu);
  return out;
}

// |g(u_out)|^2: zero unless the guide is degenerate, where T = 1.
double lower_edge_weight(const SourceSpec& src, const Cutoffs& cut, bool with_transmission) {
  if (with_transmission && cut.nu_in > cut.nu_out) return 0.0;
  const auto p = lorentzian_poles(cut.nu_out, src.nu_mu, src.lambda);
  return src.lambda * (src.lambda / kTwoPi) * std::norm(p.value);
}

}  // namespace

void GuideGeometry::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(b) || !positive(b_prime)) throw DomainError("guide heights must be positive");
  if (b_prime > b) throw DomainError("narrowed height b' must not exceed b");
  if (!positive(length)) throw DomainError("narrowing length must be positive");
  if (!positive(c)) throw DomainError("speed of light must be positive");
  if (!(a >= 0.0) || !(a_prime >= 0.0)) throw DomainError("guide widths must be non-negative");
}

Cutoffs cutoff_frequencies(const GuideGeometry& g) {
  g.validate();
  return {g.c / (2.0 * g.b_prime), g.c / (2.0 * g.b), g.c};
}

Wavenumbers guide_wavenumbers(double nu, const Cutoffs& cut) {
  require_above_outer(nu, cut);
  const double scale = kTwoPi / cut.c;
  Wavenumbers w;
  w.k = scale * std::sqrt((nu - cut.nu_out) * (nu + cut.nu_out));
  const double q = (nu - cut.nu_in) * (nu + cut.nu_in);
  w.k1 = scale * evanescent_sqrt(q);
  return w;
}

double guide_wavenumber_derivative(double nu, const Cutoffs& cut) {
  const double k = guide_wavenumbers(nu, cut).k;
  const double scale = kTwoPi / cut.c;
  return scale * scale * nu / k;
}

double equivalent_potential(const Cutoffs& cut) {
  return kTwoPi / cut.c * std::sqrt(std::max(0.0, (cut.nu_in - cut.nu_out) * (cut.nu_in + cut.nu_out)));
}

Velocities velocities(double nu, const Cutoffs& cut) {
  require_above_outer(nu, cut);
  const double root = std::sqrt((nu - cut.nu_out) * (nu + cut.nu_out));
  return {cut.c * nu / root, cut.c * root / nu};
}

void SourceSpec::validate(const Cutoffs& cut) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("source linewidth must be positive");
  if (!(ell >= 0.0) || !std::isfinite(ell)) throw DomainError("source path length must be non-negative");
  require_above_outer(nu_mu, cut);
}

double source_delay(const SourceSpec& src, const Cutoffs& cut) {
  if (src.ell == 0.0) return 0.0;
  return src.ell / velocities(src.nu_mu, cut).phase;
}

SpectralSample lorentzian_poles(double nu, double nu_mu, double lambda) {
  const cplx upper = 1.0 / cplx{0.5 * lambda, nu + nu_mu};
  const cplx lower = 1.0 / cplx{-0.5 * lambda, nu - nu_mu};
  return {upper - lower, -kI * upper * upper + kI * lower * lower};
}

SpectralSample lorentzian_amplitude(double nu, const SourceSpec& src, const Cutoffs& cut) {
  if (!(src.lambda > 0.0)) throw DomainError("source linewidth must be positive");
  const double t_mu = source_delay(src, cut);
  const auto p = lorentzian_poles(nu, src.nu_mu, src.lambda);
  const cplx emission = std::polar(std::sqrt(src.lambda / kTwoPi), -kTwoPi * nu * t_mu);
  return {emission * p.value, emission * (p.derivative - kI * kTwoPi * t_mu * p.value)};
}

GuideResponse guide_response(double nu, const GuideGeometry& g, const Cutoffs& cut) {
  const auto w = guide_wavenumbers(nu, cut);
  const double k0 = equivalent_potential(cut);
  const double dk = guide_wavenumber_derivative(nu, cut);
  const auto t = transmission_response(w.k, k0 * k0, g.length);
  const cplx phase = std::polar(1.0, w.k * g.length);
  GuideResponse out;
  out.transmission = t.value;
  out.value = t.value * phase;
  out.derivative = (t.derivative + kI * g.length * t.value) * phase * dk;
  out.log_derivative = (t.log_derivative + kI * g.length) * dk;
  return out;
}

OpticalTime optical_expected_time(const SourceSpec& src, const GuideGeometry& g, const QuadratureSpec& quad) {
  quad.validate();
  const Cutoffs cut = cutoff_frequencies(g);
  src.validate(cut);
  const double t_mu = source_delay(src, cut);

  auto integrand = [&](double u) {
    const Field f = field_at(u, src, g, cut, t_mu, true);
    const cplx flux = std::conj(f.g) * f.g_u;
    const double w = std::norm(f.g);
    const double line = w == 0.0 ? 0.0 : w * (f.poles.derivative / f.poles.value).imag();
    return std::array<cplx, 4>{flux, cplx{w, 0.0}, cplx{line, 0.0}, cplx{std::abs(flux), 0.0}};
  };
  auto res = integrate_truncated<4>(integrand, src, cut, g.length, 1, quad, std::numeric_limits<double>::quiet_NaN());

  OpticalTime out;
  out.denominator = res.value[1].real();
  out.nu_max = res.nu_max;
  out.report = res.report;
  if (!(out.denominator > kDegenerateWeight)) {
    throw DegenerateInputError("transmitted weight " + std::to_string(out.denominator) +
                               " is below the degeneracy threshold");
  }
  const double upper_edge = std::norm(field_at(res.u_upper, src, g, cut, t_mu, true).g);
  const double lower_edge = lower_edge_weight(src, cut, true);
  const double boundary = 0.5 * (upper_edge - lower_edge);
  const double scale = kTwoPi * src.lambda * out.denominator;
  const double residue = res.value[0].real() - boundary;
  out.raw_expected_time = res.value[0].imag() / scale;
  out.lineshape_time = res.value[2].real() / (kTwoPi * out.denominator);
  out.delay = out.raw_expected_time - out.lineshape_time;
  out.imaginary_residue = std::abs(residue) / scale;
  out.relative_residue = std::abs(residue) / std::max(res.value[3].real(), kDegenerateWeight);
  if (out.relative_residue > quad.reality_tol) {
    out.report.warnings.push_back("reality residue " + std::to_string(out.relative_residue));
    throw NumericError("expected time is not real: relative imaginary residue " +
                       std::to_string(out.relative_residue) + " exceeds " + std::to_string(quad.reality_tol) +
                       " at nu_mu = " + std::to_string(src.nu_mu) + " Hz");
  }
  return out;
}

double weighted_mean(const SourceSpec& src, const GuideGeometry& g, const std::function<double(double nu)>& fn,
                     const QuadratureSpec& quad, bool include_transmission, double nu_max) {
  quad.validate();
  const Cutoffs cut = cutoff_frequencies(g);
  src.validate(cut);
  const double t_mu = source_delay(src, cut);
  auto integrand = [&](double u) {
    const Field f = field_at(u, src, g, cut, t_mu, include_transmission);
    const double w = std::norm(f.g);
    const double value = w == 0.0 ? 0.0 : w * fn(src.nu_mu + src.lambda * u);
    return std::array<cplx, 2>{cplx{value, 0.0}, cplx{w, 0.0}};
  };
  auto res = integrate_truncated<2>(integrand, src, cut, g.length, 1, quad, nu_max);
  const double den = res.value[1].real();
  if (!(den > kDegenerateWeight)) throw DegenerateInputError("weight vanishes over the source line");
  return res.value[0].real() / den;
}

const char* model_name(Model m) {
  switch (m) {
    case Model::sts:
      return "sts";
    case Model::pt:
      return "pt";
    case Model::bl:
      return "bl";
  }
  return "?";
}

std::vector<double> SweepSpec::points() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("sweep step must be positive");
  if (!std::isfinite(start) || !std::isfinite(stop) || stop < start) {
    throw DomainError("sweep stop must not precede start");
  }
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

DelayCurve evaluate_curve(Model model, const std::vector<double>& nus, const std::function<double(double)>& fn,
                          unsigned workers) {
  DelayCurve curve;
  curve.model = model;
  curve.points.resize(nus.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < nus.size(); i = next++) {
      CurvePoint& p = curve.points[i];
      p.nu = nus[i];
      try {
        p.value = fn(nus[i]);
        if (std::isinf(p.value)) {
          p.status = PointStatus::infinite;
          p.message = "diverges";
        } else if (std::isnan(p.value)) {
          p.status = PointStatus::failed;
          p.message = "not a number";
        } else {
          p.status = PointStatus::ok;
        }
      } catch (const std::exception& e) {
        p.value = std::numeric_limits<double>::quiet_NaN();
        p.status = PointStatus::failed;
        p.message = e.what();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(nus.size(), 1)));
  if (workers <= 1) {
    work();
    return curve;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return curve;
}

DelayCurve delay_curve(const SweepSpec& sweep, const GuideGeometry& g, double lambda, double ell,
                       const QuadratureSpec& quad, unsigned workers) {
  const Cutoffs cut = cutoff_frequencies(g);
  const auto nus = sweep.points();
  if (!nus.empty() && !(nus.front() > cut.nu_out)) {
    throw DomainError("sweep starts at or below the outer cutoff " + std::to_string(cut.nu_out) + " Hz");
  }
  return evaluate_curve(
      Model::sts, nus,
      [&](double nu) { return optical_expected_time(SourceSpec{nu, lambda, ell}, g, quad).delay; }, workers);
}

}  // namespace stsdelay
