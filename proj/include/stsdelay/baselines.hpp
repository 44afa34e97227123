#pragma once

#include <vector>

#include "stsdelay/waveguide.hpp"

namespace stsdelay {

/// Principal value of arg[T(nu) e^{ik(nu)L}].
double transmitted_phase(double nu, const GuideGeometry& g);

/// Stationary-phase delay (1/2pi) dPhi/dnu of the total transmitted phase,
/// from the analytic log-derivative of T e^{ikL}. Finite through nu_in.
double phase_time(double nu, const GuideGeometry& g);

/// Transmitted phase on an increasing grid, continuous along nu. Each step is
/// unwrapped against the increment predicted by the phase time; intervals
/// whose increment is ambiguous (more than pi) are bisected until every
/// sub-step is below pi. Throws NumericError when bisection cannot resolve
/// the branch.
std::vector<double> unwrapped_phase(const std::vector<double>& nus, const GuideGeometry& g);

/// Semiclassical traversal time L / (in-guide speed): L nu / (c sqrt|nu_in^2 - nu^2|)
/// on both sides of the inner cutoff; +infinity at nu == nu_in.
double buttiker_landauer_time(double nu, const GuideGeometry& g);

/// Line-averaged baselines: the |A|^2-weighted mean over the source line of
/// src.nu_mu and src.lambda.
double averaged_phase_time(const SourceSpec& src, const GuideGeometry& g, const QuadratureSpec& quad = {});
double averaged_buttiker_landauer_time(const SourceSpec& src, const GuideGeometry& g,
                                       const QuadratureSpec& quad = {});

}  // namespace stsdelay
