#include "stsdelay/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace stsdelay {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ValidationError("rel_tol must lie in (0, 1)");
  if (!(abs_tol > 0.0)) throw ValidationError("abs_tol must be positive");
  if (max_subdivisions == 0) throw ValidationError("max_subdivisions must be positive");
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) throw ValidationError("tail_fraction must lie in (0, 1)");
  if (!(truncation_multiplier > 0.0)) throw ValidationError("truncation_multiplier must be positive");
  if (!(reality_tol > 0.0)) throw ValidationError("reality_tol must be positive");
}

void NumericsReport::merge(const NumericsReport& other) {
  error_estimate += other.error_estimate;
  subdivisions += other.subdivisions;
  evaluations += other.evaluations;
  if (std::isnan(truncation_point)) truncation_point = other.truncation_point;
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

namespace detail {

const std::array<double, 11>& GaussKronrod21::abscissa() {
  return boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
}

const std::array<double, 11>& GaussKronrod21::kronrod_weights() {
  return boost::math::quadrature::gauss_kronrod<double, 21>::weights();
}

const std::array<double, 5>& GaussKronrod21::gauss_weights() {
  return boost::math::quadrature::gauss<double, 10>::weights();
}

}  // namespace detail

QuadratureResult<cplx> integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                          const QuadratureSpec& spec) {
  return integrate_adaptive<cplx>(f, a, b, std::span<const double>{}, spec);
}

std::vector<double> oscillation_breakpoints(double a, double b, double max_phase_rate,
                                            double max_phase_per_panel, std::size_t max_panels) {
  std::vector<double> cuts;
  if (!(b > a) || !(max_phase_rate > 0.0)) return cuts;
  const double total = max_phase_rate * (b - a);
  auto n = static_cast<std::size_t>(std::ceil(total / max_phase_per_panel));
  n = std::clamp<std::size_t>(n, 1, max_panels);
  cuts.reserve(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    cuts.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
  }
  return cuts;
}

TailEnvelope TailEnvelope::lorentzian(double center, double scale) {
  TailEnvelope env;
  env.center = center;
  env.scale = scale;
  env.tail_bound = [scale](double d) { return scale / (kTwoPi * d); };
  return env;
}

TruncationResult truncate_semi_infinite(const TailEnvelope& envelope,
                                        const std::function<double(double upper)>& denominator,
                                        const QuadratureSpec& spec) {
  if (!envelope.tail_bound) throw DomainError("tail envelope without a bound");
  if (!(envelope.scale > 0.0)) throw DomainError("tail envelope scale must be positive");
  constexpr double kMaxMultiplier = 1048576.0;  // 2^20
  double m = spec.truncation_multiplier;
  while (true) {
    const double upper = envelope.center + m * envelope.scale;
    const double bound = envelope.sup_factor * envelope.tail_bound(m * envelope.scale);
    const double weight = denominator(upper);
    if (bound < spec.tail_fraction * weight) return {upper, m, bound, weight};
    if (m * 2.0 > kMaxMultiplier) {
      throw NumericError("semi-infinite tail bound " + std::to_string(bound) +
                         " still exceeds tail_fraction x weight " +
                         std::to_string(spec.tail_fraction * weight) + " at 2^20 scale lengths");
    }
    m *= 2.0;
  }
}

namespace {

cplx central_stencil(const std::function<cplx(double)>& f, double x, int order, double h) {
  auto sample = [&](double at) {
    const cplx v = f(at);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericError("non-finite sample at " + std::to_string(at) + " in central difference");
    }
    return v;
  };
  switch (order) {
    case 2:
      return (sample(x + h) - sample(x - h)) / (2.0 * h);
    case 4:
      return (-sample(x + 2 * h) + 8.0 * sample(x + h) - 8.0 * sample(x - h) + sample(x - 2 * h)) /
             (12.0 * h);
    case 6:
      return (sample(x + 3 * h) - 9.0 * sample(x + 2 * h) + 45.0 * sample(x + h) -
              45.0 * sample(x - h) + 9.0 * sample(x - 2 * h) - sample(x - 3 * h)) /
             (60.0 * h);
    default:
      throw DomainError("central difference order must be 2, 4 or 6");
  }
}

}  // namespace

cplx differentiate_central(const std::function<cplx(double)>& f, double x, int order, double h0) {
  if (!(h0 > 0.0)) throw DomainError("finite-difference step must be positive");
  const double h = h0 * std::max(1.0, std::abs(x));
  const cplx coarse = central_stencil(f, x, order, h);
  const cplx fine = central_stencil(f, x, order, 0.5 * h);
  const double gain = std::pow(2.0, order);
  return (gain * fine - coarse) / (gain - 1.0);
}

}  // namespace stsdelay
