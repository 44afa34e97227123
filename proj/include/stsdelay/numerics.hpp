#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "stsdelay/errors.hpp"

namespace stsdelay {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Tolerances shared by every integral in the library.
struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  std::size_t max_subdivisions = 10'000;
  /// Fraction of the accumulated weight a truncated semi-infinite tail may carry.
  double tail_fraction = 1e-3;
  /// Initial truncation distance in units of the envelope scale.
  double truncation_multiplier = 200.0;
  /// Allowed |imaginary residue| of a time expectation, relative to the
  /// integral of the integrand modulus.
  double reality_tol = 1e-8;

  void validate() const;
};

struct NumericsReport {
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
  std::size_t evaluations = 0;
  /// Upper limit used for a truncated semi-infinite integral; NaN if none.
  double truncation_point = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;

  void merge(const NumericsReport& other);
};

/// Raised when the subdivision budget runs out; carries the partial report.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, NumericsReport partial)
      : NumericError(what), report_(std::move(partial)) {}
  const NumericsReport& report() const noexcept { return report_; }

 private:
  NumericsReport report_;
};

template <typename V>
struct QuadratureResult {
  V value{};
  NumericsReport report;
};

namespace detail {

// Value-type helpers so one adaptive driver serves scalar and stacked integrands.
inline void accumulate(cplx& acc, const cplx& v, double w) { acc += w * v; }
inline double component_abs(const cplx& v, std::size_t) { return std::abs(v); }
inline constexpr std::size_t component_count(const cplx*) { return 1; }

template <std::size_t N>
void accumulate(std::array<cplx, N>& acc, const std::array<cplx, N>& v, double w) {
  for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
}
template <std::size_t N>
double component_abs(const std::array<cplx, N>& v, std::size_t i) {
  return std::abs(v[i]);
}
template <std::size_t N>
constexpr std::size_t component_count(const std::array<cplx, N>*) {
  return N;
}

template <typename V>
V subtract(const V& a, const V& b) {
  V out = a;
  accumulate(out, b, -1.0);
  return out;
}

struct GaussKronrod21 {
  static const std::array<double, 11>& abscissa();
  static const std::array<double, 11>& kronrod_weights();
  static const std::array<double, 5>& gauss_weights();
};

template <typename V>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  V value{};
  std::vector<double> error;
  // Kronrod rule applied to |f|, per component; sets the round-off floor.
  std::vector<double> magnitude;
  double priority = 0.0;
};

template <typename V, typename F>
Panel<V> gk21_panel(F& f, double a, double b, std::size_t& evaluations) {
  constexpr std::size_t ncomp = component_count(static_cast<V*>(nullptr));
  const auto& x = GaussKronrod21::abscissa();
  const auto& wk = GaussKronrod21::kronrod_weights();
  const auto& wg = GaussKronrod21::gauss_weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  V kron{};
  V gauss{};
  std::vector<double> mag(ncomp, 0.0);
  auto add_mag = [&](const V& v, double w) {
    for (std::size_t c = 0; c < ncomp; ++c) mag[c] += w * component_abs(v, c);
  };
  const V centre = f(mid);
  accumulate(kron, centre, wk[0]);
  add_mag(centre, wk[0]);
  evaluations += 1;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const V lo = f(mid - half * x[i]);
    const V hi = f(mid + half * x[i]);
    evaluations += 2;
    accumulate(kron, lo, wk[i]);
    accumulate(kron, hi, wk[i]);
    add_mag(lo, wk[i]);
    add_mag(hi, wk[i]);
    if (i % 2 == 1) {
      accumulate(gauss, lo, wg[i / 2]);
      accumulate(gauss, hi, wg[i / 2]);
    }
  }
  Panel<V> p;
  p.a = a;
  p.b = b;
  p.value = V{};
  accumulate(p.value, kron, half);
  const V diff = subtract(kron, gauss);
  p.error.resize(ncomp);
  for (std::size_t c = 0; c < ncomp; ++c) {
    const double e = half * component_abs(diff, c);
    if (!std::isfinite(e) || !std::isfinite(component_abs(p.value, c))) {
      throw NumericError("non-finite integrand on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
    }
    p.error[c] = e;
  }
  p.magnitude.resize(ncomp);
  for (std::size_t c = 0; c < ncomp; ++c) p.magnitude[c] = half * mag[c];
  return p;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of a complex scalar or a
/// stack of complex integrands over [a, b]. `breakpoints` seed the initial
/// partition; points outside (a, b) are ignored.
///
/// Every component i must satisfy
///   err_i <= max(abs_tol, rel_tol * |I_i|, 50 eps int |f_i|),
/// the last term being the round-off floor for cancelling integrands.
/// The subdivision order and the final summation (left to right) depend only
/// on the integrand, so repeated evaluation is bit-identical.
template <typename V, typename F>
QuadratureResult<V> integrate_adaptive(F&& f, double a, double b, std::span<const double> breakpoints,
                                       const QuadratureSpec& spec) {
  using detail::Panel;
  constexpr std::size_t ncomp = detail::component_count(static_cast<V*>(nullptr));
  if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integration limits must be finite");
  QuadratureResult<V> out;
  if (a == b) return out;
  if (b < a) {
    auto flipped = integrate_adaptive<V>(f, b, a, breakpoints, spec);
    V neg{};
    detail::accumulate(neg, flipped.value, -1.0);
    flipped.value = neg;
    return flipped;
  }

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::size_t evaluations = 0;
  std::vector<Panel<V>> panels;
  panels.reserve(cuts.size() + 64);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push_back(detail::gk21_panel<V>(f, cuts[i], cuts[i + 1], evaluations));
  }

  std::vector<double> magnitude;
  auto totals = [&](V& value, std::vector<double>& error) {
    // Left-to-right summation keeps the result independent of refinement history.
    std::vector<const Panel<V>*> order;
    order.reserve(panels.size());
    for (const auto& p : panels) order.push_back(&p);
    std::sort(order.begin(), order.end(), [](auto* l, auto* r) { return l->a < r->a; });
    value = V{};
    error.assign(ncomp, 0.0);
    magnitude.assign(ncomp, 0.0);
    for (const auto* p : order) {
      detail::accumulate(value, p->value, 1.0);
      for (std::size_t c = 0; c < ncomp; ++c) {
        error[c] += p->error[c];
        magnitude[c] += p->magnitude[c];
      }
    }
  };

  auto converged = [&](const V& value, const std::vector<double>& error, std::vector<double>& tol) {
    bool ok = true;
    tol.resize(ncomp);
    for (std::size_t c = 0; c < ncomp; ++c) {
      tol[c] = std::max({spec.abs_tol, spec.rel_tol * detail::component_abs(value, c),
                         50.0 * std::numeric_limits<double>::epsilon() * magnitude[c]});
      if (error[c] > tol[c]) ok = false;
    }
    return ok;
  };

  V value{};
  std::vector<double> error;
  std::vector<double> tol;
  totals(value, error);

  auto cmp = [](const Panel<V>& l, const Panel<V>& r) {
    if (l.priority != r.priority) return l.priority < r.priority;
    return l.a > r.a;
  };
  while (!converged(value, error, tol)) {
    if (panels.size() >= spec.max_subdivisions) {
      NumericsReport partial;
      partial.subdivisions = panels.size();
      partial.evaluations = evaluations;
      partial.error_estimate = *std::max_element(error.begin(), error.end());
      throw QuadratureError("adaptive quadrature exhausted its subdivision budget of " +
                                std::to_string(spec.max_subdivisions) + " panels on [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]",
                            partial);
    }
    for (auto& p : panels) {
      double pr = 0.0;
      for (std::size_t c = 0; c < ncomp; ++c) pr = std::max(pr, p.error[c] / tol[c]);
      p.priority = pr;
    }
    // Split the worst panels: everything within a factor 4 of the worst one,
    // which keeps the number of tolerance re-evaluations small.
    std::make_heap(panels.begin(), panels.end(), cmp);
    const double worst = panels.front().priority;
    std::vector<Panel<V>> fresh;
    while (!panels.empty() && panels.front().priority >= 0.25 * worst &&
           panels.size() + fresh.size() < spec.max_subdivisions) {
      std::pop_heap(panels.begin(), panels.end(), cmp);
      Panel<V> p = std::move(panels.back());
      panels.pop_back();
      const double mid = 0.5 * (p.a + p.b);
      if (!(mid > p.a && mid < p.b)) {
        NumericsReport partial;
        partial.subdivisions = panels.size() + fresh.size();
        partial.evaluations = evaluations;
        partial.error_estimate = *std::max_element(error.begin(), error.end());
        throw QuadratureError("panel at " + std::to_string(p.a) +
                                  " cannot be split further in double precision",
                              partial);
      }
      fresh.push_back(detail::gk21_panel<V>(f, p.a, mid, evaluations));
      fresh.push_back(detail::gk21_panel<V>(f, mid, p.b, evaluations));
      if (fresh.size() > 256) break;
    }
    for (auto& p : fresh) panels.push_back(std::move(p));
    totals(value, error);
  }

  out.value = value;
  out.report.subdivisions = panels.size();
  out.report.evaluations = evaluations;
  out.report.error_estimate = *std::max_element(error.begin(), error.end());
  return out;
}

template <typename V, typename F>
QuadratureResult<V> integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_adaptive<V>(std::forward<F>(f), a, b, std::span<const double>{}, spec);
}

/// Complex scalar convenience overload.
QuadratureResult<cplx> integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                          const QuadratureSpec& spec);

/// Breakpoints splitting [a, b] so that a phase advancing at most
/// `max_phase_rate` rad per unit moves less than `max_phase_per_panel` within
/// each initial panel. At most `max_panels` panels are produced.
std::vector<double> oscillation_breakpoints(double a, double b, double max_phase_rate,
                                            double max_phase_per_panel = kPi / 4.0,
                                            std::size_t max_panels = 4096);

/// Tail of a semi-infinite integrand beyond some distance from its centre.
struct TailEnvelope {
  double center = 0.0;
  /// Width scale; truncation distances are multiples of it.
  double scale = 1.0;
  /// Upper bound of the integrand weight beyond `distance` from the centre.
  std::function<double(double distance)> tail_bound;
  /// Supremum of any multiplicative factor applied on top of the envelope
  /// (|T|^2 <= 1 for a passive barrier).
  double sup_factor = 1.0;

  /// Unit-normalised Lorentzian of half-width scale/2: integral of
  /// (scale/2pi) / (d^2 + scale^2/4) beyond d, bounded by scale / (2 pi d).
  static TailEnvelope lorentzian(double center, double scale);
};

struct TruncationResult {
  double upper_limit = 0.0;
  double multiplier = 0.0;
  double tail_bound = 0.0;
  double denominator = 0.0;
};

/// Smallest upper limit center + M*scale, with M doubling from
/// spec.truncation_multiplier, whose tail bound falls below
/// spec.tail_fraction times the weight accumulated up to that limit.
/// `denominator(upper)` returns the weight integrated up to `upper`.
TruncationResult truncate_semi_infinite(const TailEnvelope& envelope,
                                        const std::function<double(double upper)>& denominator,
                                        const QuadratureSpec& spec);

/// Central difference of the requested order (2, 4 or 6) with one Richardson
/// refinement. The step is h0 * max(1, |x|).
cplx differentiate_central(const std::function<cplx(double)>& f, double x, int order, double h0);

}  // namespace stsdelay
