// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace gert::em {

/// Fresnel reflection coefficients of a vacuum / half-space boundary.
struct ReflectionCoefficients {
    std::complex<double> te; // E perpendicular to the plane of incidence
    std::complex<double> tm; // E in the plane of incidence
};

/// Half-space reflection coefficients for complex relative permittivity
/// `eps` (imaginary part <= 0 under the e^{+j omega t} convention) and
/// incidence angle `theta_i` measured from the surface normal,
/// 0 <= theta_i < pi/2.
///
/// Sign convention: both coefficients equal (1 - sqrt(eps))/(1 + sqrt(eps))
/// at normal incidence, and |tm| -> 1 with tm -> +1 at grazing. The TM
/// coefficient in the "reflected H keeps its sign" convention (classic
/// r_p, +1 for a perfect conductor) is -tm.
ReflectionCoefficients fresnel_reflection(std::complex<double> eps, double theta_i);

} // namespace gert::em
