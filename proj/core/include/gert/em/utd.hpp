// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace gert::em {

/// Field component relative to the edge-fixed planes.
enum class Polarization {
    soft, // incident E parallel to the edge (vanishes on a perfect conductor)
    hard, // incident H parallel to the edge
};

/// Uniform wedge diffraction coefficient (four cotangent terms with Fresnel
/// transition functions), with heuristic face reflection coefficients for
/// penetrable materials.
///
/// Geometry: the wedge exterior spans azimuths (0, n*pi) measured from the
/// "o" face; `n_index` = exterior angle / pi, in (1, 2] for building edges
/// (2 = half plane). `phi_in` and `phi_out` are the azimuths of the incident
/// and diffracted rays, both in (0, n*pi). `beta0` is the angle between the
/// incident ray and the edge tangent (the diffracted ray lies on the same
/// cone); `s1`, `s2` are the leg lengths used in the distance parameter
/// L = s1 s2 / (s1 + s2) * sin^2(beta0). `k` is the wavenumber.
///
/// The face reflection coefficients are evaluated at the grazing angle of
/// whichever ray lies nearer each face; this symmetrization makes the
/// coefficient exactly reciprocal (swapping the two rays, including the leg
/// lengths, returns bit-identical values).
///
/// The returned coefficient multiplies the incident field at the edge point
/// together with the two-leg spreading factor sqrt(s1 / (s2 (s1 + s2)))
/// and the propagation phase of the second leg.
std::complex<double> utd_coefficient(double n_index,
                                     std::complex<double> eps_o,
                                     std::complex<double> eps_n,
                                     double phi_in, double phi_out,
                                     double beta0, double s1, double s2,
                                     double k, Polarization pol);

/// Same coefficient with caller-supplied face reflection coefficients
/// (`r_o` for the phi = 0 face, `r_n` for the phi = n*pi face). Use
/// r = -1 for a perfectly conducting soft case and r = +1 for hard.
std::complex<double> utd_coefficient_with_reflections(double n_index,
                                                      std::complex<double> r_o,
                                                      std::complex<double> r_n,
                                                      double phi_in, double phi_out,
                                                      double beta0, double s1, double s2,
                                                      double k);

} // namespace gert::em
