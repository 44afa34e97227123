#include "stsdelay/spectrum.hpp"

#include <algorithm>
#include <string>

namespace stsdelay {

namespace {

constexpr cplx kI{0.0, 1.0};

// Fritsch-Carlson monotone cubic Hermite interpolant of one real sequence.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    slope_.assign(n, 0.0);
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    if (n == 2) {
      slope_[0] = slope_[1] = secant[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double s0 = secant[i - 1];
      const double s1 = secant[i];
      if (s0 * s1 <= 0.0) {
        slope_[i] = 0.0;
      } else {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        const double w0 = 2.0 * h1 + h0;
        const double w1 = h1 + 2.0 * h0;
        slope_[i] = (w0 + w1) / (w0 / s0 + w1 / s1);
      }
    }
    slope_[0] = end_slope(x_[1] - x_[0], x_[2] - x_[1], secant[0], secant[1]);
    slope_[n - 1] = end_slope(x_[n - 1] - x_[n - 2], x_[n - 2] - x_[n - 3], secant[n - 2], secant[n - 3]);
  }

  // Value and derivative of the interpolant at t inside [x_front, x_back].
  std::pair<double, double> operator()(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    const double value = h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
    const double d00 = (6 * s2 - 6 * s) / h;
    const double d10 = 3 * s2 - 4 * s + 1;
    const double d01 = (-6 * s2 + 6 * s) / h;
    const double d11 = 3 * s2 - 2 * s;
    const double deriv = d00 * y_[i] + d10 * slope_[i] + d01 * y_[i + 1] + d11 * slope_[i + 1];
    return {value, deriv};
  }

 private:
  static double end_slope(double h0, double h1, double s0, double s1) {
    double d = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0.0) {
      d = 0.0;
    } else if (s0 * s1 <= 0.0 && std::abs(d) > std::abs(3 * s0)) {
      d = 3 * s0;
    }
    return d;
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

MomentumSpectrum::Branch sampled_branch(const std::vector<double>& k, const std::vector<cplx>& c) {
  std::vector<double> re(c.size());
  std::vector<double> im(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    re[i] = c[i].real();
    im[i] = c[i].imag();
  }
  auto real_part = std::make_shared<MonotoneCubic>(k, std::move(re));
  auto imag_part = std::make_shared<MonotoneCubic>(k, std::move(im));
  const double lo = k.front();
  const double hi = k.back();
  return [real_part, imag_part, lo, hi](double q) -> SpectralSample {
    if (q < lo || q > hi) return {};
    const auto [vr, dr] = (*real_part)(q);
    const auto [vi, di] = (*imag_part)(q);
    return {{vr, vi}, {dr, di}};
  };
}

}  // namespace

MomentumSpectrum::MomentumSpectrum(Branch plus, Branch minus, double k_min, double k_max, double center,
                                   double width)
    : plus_(std::move(plus)), minus_(std::move(minus)), k_min_(k_min), k_max_(k_max), center_(center),
      width_(width) {
  if (!plus_ && !minus_) throw DomainError("spectrum needs at least one branch");
  if (!(k_min_ >= 0.0) || !(k_max_ > k_min_) || !std::isfinite(k_max_)) {
    throw DomainError("spectrum support must satisfy 0 <= k_min < k_max < inf");
  }
  if (!(width_ > 0.0)) throw DomainError("spectrum width scale must be positive");
}

MomentumSpectrum MomentumSpectrum::gaussian(double k0, double sigma, cplx amplitude) {
  if (!(sigma > 0.0) || !(k0 > 12.0 * sigma)) {
    throw DomainError("gaussian spectrum needs sigma > 0 and k0 > 12 sigma");
  }
  auto branch = [k0, sigma, amplitude](double k) -> SpectralSample {
    const double d = k - k0;
    const cplx v = amplitude * std::exp(-d * d / (4.0 * sigma * sigma));
    return {v, v * (-d / (2.0 * sigma * sigma))};
  };
  return MomentumSpectrum(branch, nullptr, k0 - 12.0 * sigma, k0 + 12.0 * sigma, k0, sigma);
}

MomentumSpectrum MomentumSpectrum::lorentzian(double k0, double gamma, cplx amplitude) {
  if (!(gamma > 0.0) || !(k0 > 0.0)) throw DomainError("lorentzian spectrum needs k0 > 0 and gamma > 0");
  auto branch = [k0, gamma, amplitude](double k) -> SpectralSample {
    const cplx line = gamma / (gamma - kI * (k - k0));
    const cplx v = amplitude * (k / k0) * line * line;
    const cplx d = amplitude / k0 * line * line * (1.0 + 2.0 * kI * k * line / gamma);
    return {v, d};
  };
  return MomentumSpectrum(branch, nullptr, 0.0, k0 + 300.0 * gamma, k0, gamma);
}

MomentumSpectrum MomentumSpectrum::sampled(std::vector<double> k, std::vector<cplx> plus, std::vector<cplx> minus) {
  if (k.size() < 3) throw DomainError("sampled spectrum needs at least three points");
  if (plus.size() != k.size() || (!minus.empty() && minus.size() != k.size())) {
    throw DomainError("sampled spectrum: amplitude and grid sizes differ");
  }
  if (k.front() < 0.0) throw DomainError("sampled spectrum: grid must start at k >= 0");
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (!(k[i] > k[i - 1])) throw DomainError("sampled spectrum: grid must be strictly increasing");
  }
  Branch p = sampled_branch(k, plus);
  Branch m = minus.empty() ? Branch{} : sampled_branch(k, minus);
  double peak = k.front();
  double best = -1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double w = std::norm(plus[i]) + (minus.empty() ? 0.0 : std::norm(minus[i]));
    if (w > best) {
      best = w;
      peak = k[i];
    }
  }
  const double spacing = (k.back() - k.front()) / static_cast<double>(k.size() - 1);
  return MomentumSpectrum(p, m, k.front(), k.back(), peak, 10.0 * spacing);
}

MomentumSpectrum MomentumSpectrum::phase_modulated(std::function<double(double)> phase,
                                                   std::function<double(double)> phase_derivative) const {
  auto wrap = [phase, phase_derivative](const Branch& b) -> Branch {
    if (!b) return {};
    return [b, phase, phase_derivative](double k) -> SpectralSample {
      const SpectralSample s = b(k);
      const cplx factor = std::polar(1.0, phase(k));
      return {s.value * factor, (s.derivative + kI * phase_derivative(k) * s.value) * factor};
    };
  };
  return MomentumSpectrum(wrap(plus_), wrap(minus_), k_min_, k_max_, center_, width_);
}

MomentumSpectrum MomentumSpectrum::time_shifted(double t0, const ParticleUnits& units) const {
  const double rate = units.hbar / (2.0 * units.mass);
  return phase_modulated([rate, t0](double k) { return -rate * k * k * t0; },
                         [rate, t0](double k) { return -2.0 * rate * k * t0; });
}

MomentumSpectrum MomentumSpectrum::position_shifted(double x0) const {
  auto shift = [](const Branch& b, double sign, double x0) -> Branch {
    if (!b) return {};
    return [b, sign, x0](double k) -> SpectralSample {
      const SpectralSample s = b(k);
      const cplx factor = std::polar(1.0, -sign * k * x0);
      return {s.value * factor, (s.derivative - kI * sign * x0 * s.value) * factor};
    };
  };
  return MomentumSpectrum(shift(plus_, 1.0, x0), shift(minus_, -1.0, x0), k_min_, k_max_, center_, width_);
}

MomentumSpectrum MomentumSpectrum::mirrored() const {
  return MomentumSpectrum(minus_, plus_, k_min_, k_max_, center_, width_);
}

MomentumSpectrum MomentumSpectrum::with_minus(Branch minus) const {
  return MomentumSpectrum(plus_, std::move(minus), k_min_, k_max_, center_, width_);
}

SpectralSample MomentumSpectrum::plus(double k) const { return plus_ ? plus_(k) : SpectralSample{}; }

SpectralSample MomentumSpectrum::minus(double k) const { return minus_ ? minus_(k) : SpectralSample{}; }

std::vector<double> MomentumSpectrum::breakpoints() const {
  std::vector<double> pts;
  for (double m : {-30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0, 100.0}) {
    const double p = center_ + m * width_;
    if (p > k_min_ && p < k_max_) pts.push_back(p);
  }
  return pts;
}

QuadratureResult<cplx> MomentumSpectrum::norm(const QuadratureSpec& quad) const {
  const auto pts = breakpoints();
  return integrate_adaptive<cplx>(
      [this](double k) { return cplx{std::norm(plus(k).value) + std::norm(minus(k).value), 0.0}; }, k_min_,
      k_max_, pts, quad);
}

}  // namespace stsdelay
