#include "stsdelay/time_expectation.hpp"

#include <fftw3.h>

#include <array>
#include <memory>
#include <mutex>
#include <string>

namespace stsdelay {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kDegenerateNorm = 1e-300;

// Integrand stack for the closed form: [sum_r Gamma_r^* Gamma_r', sum_r |C_r|^2, sum_r |Gamma_r^* Gamma_r'|].
using ClosedStack = std::array<cplx, 3>;

// Gamma^* dGamma/dk for Gamma = C e^{r i k x} / sqrt(k); the plane-wave phase cancels.
cplx gamma_product(const SpectralSample& c, double k, double x, double r) {
  return (std::conj(c.value) * c.derivative + std::norm(c.value) * cplx{-0.5 / k, r * x}) / k;
}

struct BranchEval {
  std::function<SpectralSample(double)> fn;
  double direction;  // +1 right movers, -1 left movers
};

TimeExpectation assemble_time(const std::vector<BranchEval>& branches, double x, double k_lo, double k_hi,
                              const std::vector<double>& breakpoints, const ParticleUnits& units,
                              const QuadratureSpec& quad) {
  quad.validate();
  auto integrand = [&](double k) {
    ClosedStack s{};
    for (const auto& b : branches) {
      const SpectralSample c = b.fn(k);
      const cplx g = gamma_product(c, k, x, b.direction);
      s[0] += g;
      s[1] += std::norm(c.value);
      s[2] += std::abs(g);
    }
    return s;
  };
  auto res = integrate_adaptive<ClosedStack>(integrand, k_lo, k_hi, breakpoints, quad);

  const double norm = res.value[1].real();
  if (!(norm > kDegenerateNorm)) {
    throw DegenerateInputError("spectrum norm " + std::to_string(norm) + " is degenerate");
  }
  // Re int Gamma^* Gamma' = |Gamma|^2 / 2 evaluated at the support edges.
  double boundary = 0.0;
  for (const auto& b : branches) {
    boundary += 0.5 * std::norm(b.fn(k_hi).value) / k_hi;
    if (k_lo > 0.0) boundary -= 0.5 * std::norm(b.fn(k_lo).value) / k_lo;
  }
  const cplx numerator = res.value[0] - boundary;
  const double scale = units.mass / units.hbar;

  TimeExpectation out;
  out.value = scale * numerator.imag() / norm;
  out.imaginary_residue = scale * std::abs(numerator.real()) / norm;
  out.relative_residue = std::abs(numerator.real()) / std::max(res.value[2].real(), kDegenerateNorm);
  out.norm = norm;
  out.report = res.report;
  if (out.relative_residue > quad.reality_tol) {
    throw NumericError("time expectation is not real: relative imaginary residue " +
                       std::to_string(out.relative_residue) + " exceeds " + std::to_string(quad.reality_tol));
  }
  return out;
}

std::vector<BranchEval> branches_of(const MomentumSpectrum& s) {
  std::vector<BranchEval> out;
  if (s.has_plus()) out.push_back({s.plus_branch(), 1.0});
  if (s.has_minus()) out.push_back({s.minus_branch(), -1.0});
  return out;
}

// RAII wrappers around FFTW buffers; the planner itself is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

class ForwardFft {
 public:
  explicit ForwardFft(std::size_t n)
      : n_(n), in_(fftw_alloc_complex(n)), out_(fftw_alloc_complex(n)) {
    if (!in_ || !out_) throw NumericError("FFT buffer allocation failed for " + std::to_string(n) + " samples");
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~ForwardFft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ForwardFft(const ForwardFft&) = delete;
  ForwardFft& operator=(const ForwardFft&) = delete;

  cplx* input() { return reinterpret_cast<cplx*>(in_.get()); }
  const cplx* output() const { return reinterpret_cast<const cplx*>(out_.get()); }
  void execute() { fftw_execute(plan_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  FftwBuffer in_;
  FftwBuffer out_;
  fftw_plan plan_{};
};

}  // namespace

Density rho_t_given_x(const MomentumSpectrum& spectrum, double x, double t, const ParticleUnits& units,
                      const QuadratureSpec& quad) {
  const double rate = units.hbar / (2.0 * units.mass);
  std::vector<double> pts = spectrum.breakpoints();
  const double phase_rate = std::abs(x) + 2.0 * rate * spectrum.k_max() * std::abs(t);
  const auto osc = oscillation_breakpoints(spectrum.k_min(), spectrum.k_max(), phase_rate);
  pts.insert(pts.end(), osc.begin(), osc.end());

  Density out;
  double total = 0.0;
  for (const auto& b : branches_of(spectrum)) {
    auto amplitude = [&](double k) {
      const cplx c = b.fn(k).value;
      return std::sqrt(k) * c * std::exp(kI * (b.direction * k * x - rate * k * k * t));
    };
    auto res = integrate_adaptive<cplx>(amplitude, spectrum.k_min(), spectrum.k_max(), pts, quad);
    total += std::norm(res.value);
    out.report.merge(res.report);
  }
  out.value = units.hbar / (kTwoPi * units.mass) * total;
  return out;
}

DirectTimeResult expected_time_direct(const MomentumSpectrum& spectrum, double x, const ParticleUnits& units,
                                      const DirectTimeGrid& grid, const QuadratureSpec& quad) {
  const double hbar_over_m = units.hbar / units.mass;
  const double omega_lo = 0.5 * hbar_over_m * spectrum.k_min() * spectrum.k_min();
  const double omega_hi = 0.5 * hbar_over_m * spectrum.k_max() * spectrum.k_max();
  const double band = omega_hi - omega_lo;

  double step = std::isnan(grid.step) ? kPi / (8.0 * band) : grid.step;
  if (!(step > 0.0) || step * band > kPi) {
    throw DomainError("time step " + std::to_string(step) + " aliases the energy band of width " +
                      std::to_string(band));
  }
  const double kc = spectrum.center();
  double center = grid.center;
  if (std::isnan(center)) {
    const double direction = spectrum.has_plus() ? 1.0 : -1.0;
    center = direction * x / (hbar_over_m * kc);
  }
  double half_width = grid.half_width;
  if (std::isnan(half_width)) {
    const double spread = hbar_over_m * kc * spectrum.width();
    half_width = std::max(10.0 / spread, 5.0 * std::abs(center));
    half_width = std::max(half_width, 64.0 * step);
  }
  const bool fixed_window = !std::isnan(grid.half_width);

  DirectTimeResult out;
  out.norm = spectrum.norm(quad).value.real();
  const auto branches = branches_of(spectrum);

  while (true) {
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * half_width / step));
    n += n % 2;
    if (n > grid.max_samples) {
      throw NumericError("time window coverage failed: captured mass fraction " +
                         std::to_string(out.captured_fraction) + " with " + std::to_string(n) +
                         " samples required");
    }
    const double d_omega = kTwoPi / (static_cast<double>(n) * step);
    const auto n_omega = static_cast<std::size_t>(std::floor(band / d_omega)) + 1;
    const double t0 = center - 0.5 * static_cast<double>(n) * step;

    std::vector<double> rho(n, 0.0);
    ForwardFft fft(n);
    for (const auto& b : branches) {
      cplx* in = fft.input();
      for (std::size_t j = 0; j < n; ++j) in[j] = 0.0;
      for (std::size_t j = 0; j < std::min(n_omega, n); ++j) {
        const double omega = omega_lo + static_cast<double>(j) * d_omega;
        const double k = std::sqrt(2.0 * omega / hbar_over_m);
        if (k <= 0.0) continue;
        const cplx c = b.fn(k).value;
        const cplx g = c * std::exp(kI * (b.direction * k * x)) / (hbar_over_m * std::sqrt(k));
        // Shift to the window start so that the DFT index maps onto t0 + j*step.
        const double phase = -static_cast<double>(j) * d_omega * t0;
        in[j] = g * std::polar(d_omega, phase);
      }
      fft.execute();
      const cplx* f = fft.output();
      for (std::size_t j = 0; j < n; ++j) rho[j] += std::norm(f[j]);
    }

    const double prefactor = units.hbar / (kTwoPi * units.mass);
    double mass = 0.0;
    double first = 0.0;
    double tails = 0.0;
    const std::size_t band_edge = n / 20;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = t0 + static_cast<double>(j) * step;
      const double w = prefactor * rho[j] * step;
      mass += w;
      first += t * w;
      if (j < band_edge || j >= n - band_edge) tails += w;
    }
    if (!(mass > kDegenerateNorm)) throw DegenerateInputError("time density carries no mass");
    out.captured_fraction = 1.0 - tails / mass;
    out.mass = mass;
    out.value = first / mass;
    out.window_start = t0;
    out.window_end = t0 + static_cast<double>(n) * step;
    out.step = step;
    out.samples = n;
    if (tails / mass <= grid.tail_tolerance) {
      if (grid.keep_density) {
        for (double& r : rho) r *= prefactor;
        out.density = std::move(rho);
      }
      return out;
    }
    if (fixed_window) {
      throw NumericError("time window coverage failed: outer bands carry " + std::to_string(tails / mass) +
                         " of the mass (captured fraction " + std::to_string(out.captured_fraction) + ")");
    }
    center = out.value;
    half_width *= 2.0;
  }
}

TimeExpectation expected_time_closed(const MomentumSpectrum& spectrum, double x, const ParticleUnits& units,
                                     const QuadratureSpec& quad) {
  return assemble_time(branches_of(spectrum), x, spectrum.k_min(), spectrum.k_max(), spectrum.breakpoints(), units,
                       quad);
}

MomentumSpectrum post_barrier_spectrum(const MomentumSpectrum& incident, const BarrierSpec& barrier) {
  barrier.validate();
  if (incident.has_minus()) throw DomainError("incident spectrum must not carry left movers");
  const double k0_sq = barrier.threshold_wavenumber_sq();
  const double length = barrier.length;
  auto a = incident.plus_branch();
  MomentumSpectrum::Branch plus = [a, k0_sq, length](double k) -> SpectralSample {
    if (k <= 0.0) return {};
    const SpectralSample s = a(k);
    const TransmissionResponse t = transmission_response(k, k0_sq, length);
    return {s.value * t.value, s.derivative * t.value + s.value * t.derivative};
  };
  return MomentumSpectrum(plus, nullptr, incident.k_min(), incident.k_max(), incident.center(), incident.width());
}

TimeExpectation expected_time_after_barrier(const MomentumSpectrum& incident, const BarrierSpec& barrier,
                                            const QuadratureSpec& quad) {
  barrier.validate();
  if (incident.has_minus()) throw DomainError("incident spectrum must not carry left movers");
  const double k0_sq = barrier.threshold_wavenumber_sq();
  const double length = barrier.length;
  auto a = incident.plus_branch();
  // A_k T(k): the e^{ikL}/sqrt(k) factor is applied by the shared assembly at x = L.
  BranchEval transmitted{[a, k0_sq, length](double k) -> SpectralSample {
                           if (k <= 0.0) return {};
                           const SpectralSample s = a(k);
                           const TransmissionResponse t = transmission_response(k, k0_sq, length);
                           return {s.value * t.value, s.derivative * t.value + s.value * t.derivative};
                         },
                         1.0};
  std::vector<double> pts = incident.breakpoints();
  const double k0 = std::sqrt(k0_sq);
  if (k0 > incident.k_min() && k0 < incident.k_max()) pts.push_back(k0);
  return assemble_time({transmitted}, length, incident.k_min(), incident.k_max(), pts, barrier.units, quad);
}

DelayResult delay_time(const MomentumSpectrum& incident, const BarrierSpec& barrier, const QuadratureSpec& quad) {
  DelayResult r;
  r.exit = expected_time_after_barrier(incident, barrier, quad);
  r.entry = expected_time_closed(incident, 0.0, barrier.units, quad);
  r.delay = r.exit.value - r.entry.value;
  return r;
}

}  // namespace stsdelay
