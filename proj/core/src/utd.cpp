// SPDX-License-Identifier: Apache-2.0
#include "gert/em/utd.hpp"

#include "gert/em/fresnel.hpp"
#include "gert/em/fresnel_integral.hpp"
#include "gert/error.hpp"

#include <algorithm>
#include <cmath>

namespace gert::em {
namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

// One cotangent/transition term:
//   T_pm(beta) = cot((pi + pm*beta)/(2n)) * F(kL * a_pm(beta)),
//   a_pm(beta) = 2 cos^2((2 n pi N - beta)/2),
// where N is the integer nearest (beta + pm*pi)/(2 n pi). Near the shadow/
// reflection boundaries the cotangent pole and the vanishing transition
// function cancel; the finite limit (with offset d from the boundary) is
//   pm * n * e^{j pi/4} (sqrt(2 pi k L) sgn d - 2 k L d e^{j pi/4}).
cplx boundary_term(double beta, int pm, double n, double kl) {
    const double nn = std::round((beta + pm * kPi) / (2.0 * n * kPi));
    const double beta_star = 2.0 * n * kPi * nn - pm * kPi;
    const double d = beta - beta_star;
    if (std::abs(d) < 1e-4) {
        const double sgn = (d >= 0.0) ? 1.0 : -1.0;
        const cplx e4{std::sqrt(0.5), std::sqrt(0.5)}; // e^{j pi/4}
        return static_cast<double>(pm) * n * e4 *
               (std::sqrt(2.0 * kPi * kl) * sgn - 2.0 * kl * d * e4);
    }
    const double cosha = std::cos(0.5 * (2.0 * n * kPi * nn - beta));
    const double a = 2.0 * cosha * cosha;
    const double arg = (kPi + pm * beta) / (2.0 * n);
    const double cot = std::cos(arg) / std::sin(arg);
    return cot * transition_function(kl * a);
}

// Incidence angle from the face normal for a ray at grazing angle psi
// above the face plane (psi may exceed pi/2). Clamped strictly below
// pi/2: acos rounds to the pi/2 double itself at grazing, which is
// outside the Fresnel domain.
double incidence_from_grazing(double psi) {
    static const double kMaxTheta = std::nextafter(kPi / 2.0, 0.0);
    const double s = std::min(1.0, std::abs(std::sin(psi)));
    return std::min(std::acos(s), kMaxTheta);
}

} // namespace

std::complex<double> utd_coefficient_with_reflections(double n_index, cplx r_o, cplx r_n,
                                                      double phi_in, double phi_out,
                                                      double beta0, double s1, double s2,
                                                      double k) {
    if (!(n_index > 0.0) || n_index > 2.0) {
        throw GeometryError("wedge index must lie in (0, 2]");
    }
    const double npi = n_index * kPi;
    if (!(phi_in > 0.0) || phi_in >= npi || !(phi_out > 0.0) || phi_out >= npi) {
        throw GeometryError("ray azimuths must lie strictly inside the wedge exterior");
    }
    if (!(beta0 > 0.0) || beta0 >= kPi) {
        throw GeometryError("edge incidence angle must lie in (0, pi)");
    }
    if (!(s1 > 0.0) || !(s2 > 0.0) || !(k > 0.0)) {
        throw GeometryError("leg lengths and wavenumber must be positive");
    }
    // Reciprocity: the four cotangent terms depend only on |phi_out - phi_in|
    // and phi_out + phi_in, so ordering the azimuths fixes the reflection
    // angles symmetrically in the two rays.
    const double phi_lo = std::min(phi_in, phi_out);
    const double phi_hi = std::max(phi_in, phi_out);
    const double sb = std::sin(beta0);
    const double kl = k * (s1 * s2 / (s1 + s2)) * sb * sb;

    const cplx t1 = boundary_term(phi_hi - phi_lo, +1, n_index, kl);
    const cplx t2 = boundary_term(phi_hi - phi_lo, -1, n_index, kl);
    const cplx t3 = boundary_term(phi_hi + phi_lo, +1, n_index, kl);
    const cplx t4 = boundary_term(phi_hi + phi_lo, -1, n_index, kl);

    const cplx e4c{std::sqrt(0.5), -std::sqrt(0.5)}; // e^{-j pi/4}
    const cplx amp = -e4c / (2.0 * n_index * std::sqrt(2.0 * kPi * k) * sb);
    return amp * (t1 + t2 + r_o * t3 + r_n * t4);
}

std::complex<double> utd_coefficient(double n_index, cplx eps_o, cplx eps_n,
                                     double phi_in, double phi_out,
                                     double beta0, double s1, double s2,
                                     double k, Polarization pol) {
    const double npi = n_index * kPi;
    const double phi_lo = std::min(phi_in, phi_out);
    const double phi_hi = std::max(phi_in, phi_out);
    // Grazing angles of the ray nearest each face.
    const double theta_o = incidence_from_grazing(phi_lo);
    const double theta_n = incidence_from_grazing(npi - phi_hi);
    const ReflectionCoefficients ro = fresnel_reflection(eps_o, theta_o);
    const ReflectionCoefficients rn = fresnel_reflection(eps_n, theta_n);
    cplx r_o, r_n;
    if (pol == Polarization::soft) {
        r_o = ro.te;
        r_n = rn.te;
    } else {
        // Hard polarization uses the convention in which a perfect
        // conductor reflects with +1.
        r_o = -ro.tm;
        r_n = -rn.tm;
    }
    return utd_coefficient_with_reflections(n_index, r_o, r_n, phi_in, phi_out,
                                            beta0, s1, s2, k);
}

} // namespace gert::em
