#include "stsdelay/barrier.hpp"

#include <array>
#include <string>

namespace stsdelay {

namespace {

constexpr cplx kI{0.0, 1.0};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Taylor data of the entire functions cos(sqrt(q) L), sin(sqrt(q) L)/sqrt(q)
// and d/dq of the latter, for small |q| L^2.
struct SmallArgument {
  double cosine;
  double sinc;
  double sinc_dq;
};

SmallArgument small_argument_series(double q, double length) {
  const double w = q * length * length;
  double cosine = 0.0;
  double sinc = 0.0;
  double sinc_dq = 0.0;
  double term_even = 1.0;  // (-w)^n / (2n)!
  double term_odd = 1.0;   // (-w)^n / (2n+1)!
  for (int n = 0; n < 12; ++n) {
    cosine += term_even;
    sinc += term_odd;
    term_even *= -w / static_cast<double>((2 * n + 1) * (2 * n + 2));
    term_odd *= -w / static_cast<double>((2 * n + 2) * (2 * n + 3));
  }
  // sinc_dq = sum_{n>=1} (-1)^n n L^{2n+1} q^{n-1} / (2n+1)!
  double coeff = -length * length * length / 6.0;  // n = 1 term
  for (int n = 1; n < 12; ++n) {
    sinc_dq += static_cast<double>(n) * coeff;
    coeff *= -w / static_cast<double>((2 * n + 2) * (2 * n + 3));
  }
  return {cosine, length * sinc, sinc_dq};
}

}  // namespace

void BarrierSpec::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("barrier length must be positive");
  if (!(height >= 0.0) || !std::isfinite(height)) throw DomainError("barrier height must be non-negative");
  if (!(units.hbar > 0.0) || !(units.mass > 0.0)) throw DomainError("hbar and mass must be positive");
}

double BarrierSpec::threshold_wavenumber_sq() const {
  return 2.0 * units.mass * height / (units.hbar * units.hbar);
}

cplx evanescent_sqrt(double q) {
  return q >= 0.0 ? cplx{std::sqrt(q), 0.0} : cplx{0.0, std::sqrt(-q)};
}

Wavenumbers wavenumbers(double energy, const BarrierSpec& barrier) {
  barrier.validate();
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw DomainError("energy must be positive and finite, got " + std::to_string(energy));
  }
  const double scale = 2.0 * barrier.units.mass / (barrier.units.hbar * barrier.units.hbar);
  Wavenumbers w;
  w.k = std::sqrt(scale * energy);
  w.k1 = energy == barrier.height ? cplx{} : evanescent_sqrt(scale * (energy - barrier.height));
  return w;
}

TransmissionResponse transmission_response(double k, double k0_sq, double length) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("transmission needs k > 0");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("barrier length must be positive");
  const double q = k * k - k0_sq;
  const cplx k1 = evanescent_sqrt(q);
  const cplx z = k1 * length;
  const cplx phase = std::exp(kI * z);  // |phase| <= 1 on the decaying branch

  // Ec = e^{iz} cos z, ES = e^{iz} S, ESq = e^{iz} dS/dq with S = sin(z)/k1.
  cplx ec;
  cplx es;
  cplx esq;
  if (std::abs(z) >= 0.1) {
    ec = 0.5 * (phase * phase + 1.0);
    es = (phase * phase - 1.0) / (2.0 * kI * k1);
    esq = (length * ec - es) / (2.0 * q);
  } else {
    const SmallArgument s = small_argument_series(q, length);
    ec = phase * s.cosine;
    es = phase * s.sinc;
    esq = phase * s.sinc_dq;
  }

  const double mix = (k * k + q) / (2.0 * k);
  const cplx denom = ec - kI * mix * es;
  const cplx d_dk = -kI * es * (k * k - q) / (2.0 * k * k);
  const cplx d_dq = -0.5 * length * es - kI * es / (2.0 * k) - kI * mix * esq;
  const cplx d_total = d_dk + 2.0 * k * d_dq;

  TransmissionResponse r;
  r.value = std::exp(-kI * (k * length)) * phase / denom;
  r.log_derivative = -kI * length - d_total / denom;
  r.derivative = r.value * r.log_derivative;
  if (!finite(r.value) || !finite(r.log_derivative)) {
    throw NumericError("non-finite transmission at k = " + std::to_string(k));
  }
  return r;
}

cplx transmission_coefficient(double k, cplx k1, double length) {
  if (!std::isfinite(k) || !finite(k1) || !std::isfinite(length)) {
    throw DomainError("transmission_coefficient: non-finite input");
  }
  if (!(k > 0.0)) throw DomainError("transmission_coefficient: k must be positive");
  if (!(length > 0.0)) throw DomainError("transmission_coefficient: L must be positive");
  if (std::abs(k1) * length < kTransmissionSeriesGuard) {
    const double q = (k1 * k1).real();
    return transmission_response(k, k * k - q, length).value;
  }
  const cplx num = 4.0 * k * k1 * std::exp(-kI * length * (k - k1));
  const cplx den = (k + k1) * (k + k1) - std::exp(2.0 * kI * length * k1) * (k - k1) * (k - k1);
  return num / den;
}

cplx transfer_matrix_transmission(double energy, const BarrierSpec& barrier) {
  const Wavenumbers w = wavenumbers(energy, barrier);
  if (energy == barrier.height) {
    throw DomainError("transfer-matrix oracle does not handle E == V0");
  }
  using Mat = std::array<std::array<cplx, 2>, 2>;
  // Columns: right- and left-moving plane waves; rows: value and slope at x.
  auto waves = [](cplx kappa, double x) {
    const cplx e = std::exp(kI * kappa * x);
    const cplx einv = std::exp(-kI * kappa * x);
    return Mat{{{e, einv}, {kI * kappa * e, -kI * kappa * einv}}};
  };
  auto inverse = [](const Mat& m) {
    const cplx det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return Mat{{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
  };
  auto mul = [](const Mat& a, const Mat& b) {
    Mat c{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
  };
  const cplx k{w.k, 0.0};
  const double length = barrier.length;
  // Outgoing side carries (t, 0); propagate back to the incident side.
  const Mat chain = mul(mul(mul(inverse(waves(k, 0.0)), waves(w.k1, 0.0)), inverse(waves(w.k1, length))),
                        waves(k, length));
  // Incident amplitude for unit transmitted amplitude is chain[0][0].
  return 1.0 / chain[0][0];
}

}  // namespace stsdelay
