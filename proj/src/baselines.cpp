#include "stsdelay/baselines.hpp"

#include <limits>

namespace stsdelay {

namespace {

constexpr int kMaxBisection = 40;

// Unwrapped phase change from a to b, given the principal phases and the
// phase times at both ends.
double unwrap_step(double a, double b, double phi_a, double phi_b, double tau_a, double tau_b,
                   const GuideGeometry& g, int depth) {
  const double predicted = kPi * (tau_a + tau_b) * (b - a);
  if (std::abs(predicted) < kPi) {
    double step = phi_b - phi_a;
    step -= kTwoPi * std::round((step - predicted) / kTwoPi);
    if (std::abs(step) < kPi) return step;
  }
  if (depth >= kMaxBisection) {
    throw NumericError("phase unwrapping failed between " + std::to_string(a) + " and " + std::to_string(b) +
                       " Hz: branch cannot be resolved");
  }
  const double mid = 0.5 * (a + b);
  const double phi_m = transmitted_phase(mid, g);
  const double tau_m = phase_time(mid, g);
  return unwrap_step(a, mid, phi_a, phi_m, tau_a, tau_m, g, depth + 1) +
         unwrap_step(mid, b, phi_m, phi_b, tau_m, tau_b, g, depth + 1);
}

}  // namespace

double transmitted_phase(double nu, const GuideGeometry& g) {
  const Cutoffs cut = cutoff_frequencies(g);
  const auto w = guide_wavenumbers(nu, cut);
  const double k0 = equivalent_potential(cut);
  const auto t = transmission_response(w.k, k0 * k0, g.length);
  const cplx scaled = t.value * std::polar(1.0, w.k * g.length);
  if (scaled == cplx{}) {
    throw NumericError("transmission underflows at " + std::to_string(nu) + " Hz; phase undefined");
  }
  return std::arg(scaled);
}

double phase_time(double nu, const GuideGeometry& g) {
  const Cutoffs cut = cutoff_frequencies(g);
  return guide_response(nu, g, cut).log_derivative.imag() / kTwoPi;
}

std::vector<double> unwrapped_phase(const std::vector<double>& nus, const GuideGeometry& g) {
  std::vector<double> out(nus.size());
  if (nus.empty()) return out;
  double phi_prev = transmitted_phase(nus[0], g);
  double tau_prev = phase_time(nus[0], g);
  out[0] = phi_prev;
  for (std::size_t i = 1; i < nus.size(); ++i) {
    if (!(nus[i] > nus[i - 1])) throw DomainError("phase grid must be strictly increasing");
    const double phi = transmitted_phase(nus[i], g);
    const double tau = phase_time(nus[i], g);
    out[i] = out[i - 1] + unwrap_step(nus[i - 1], nus[i], phi_prev, phi, tau_prev, tau, g, 0);
    phi_prev = phi;
    tau_prev = tau;
  }
  return out;
}

double buttiker_landauer_time(double nu, const GuideGeometry& g) {
  const Cutoffs cut = cutoff_frequencies(g);
  if (!std::isfinite(nu) || !(nu > cut.nu_out)) {
    throw DomainError("frequency " + std::to_string(nu) + " Hz is at or below the outer cutoff");
  }
  const double gap = std::abs((cut.nu_in - nu) * (cut.nu_in + nu));
  if (gap == 0.0) return std::numeric_limits<double>::infinity();
  return g.length * nu / (g.c * std::sqrt(gap));
}

double averaged_phase_time(const SourceSpec& src, const GuideGeometry& g, const QuadratureSpec& quad) {
  return weighted_mean(src, g, [&](double nu) { return phase_time(nu, g); }, quad, false);
}

double averaged_buttiker_landauer_time(const SourceSpec& src, const GuideGeometry& g,
                                       const QuadratureSpec& quad) {
  return weighted_mean(
      src, g,
      [&](double nu) {
        const double t = buttiker_landauer_time(nu, g);
        return std::isinf(t) ? 0.0 : t;
      },
      quad, false);
}

}  // namespace stsdelay
