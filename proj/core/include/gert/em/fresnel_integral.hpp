// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace gert::em {

/// Values of the Fresnel cosine and sine integrals
///   C(x) = int_0^x cos(pi t^2 / 2) dt,   S(x) = int_0^x sin(pi t^2 / 2) dt.
struct FresnelCS {
    double c;
    double s;
};

/// Fresnel integrals C(x), S(x). Both are odd functions of x; the
/// implementation is accurate to roughly 1e-13 absolute over the real line.
FresnelCS fresnel_cs(double x);

/// Complement integral E(x) = int_x^inf exp(+j pi t^2 / 2) dt for x >= 0.
/// C(x) = 1/2 - Re E(x), S(x) = 1/2 - Im E(x).
std::complex<double> fresnel_complement(double x);

/// Fresnel transition function of the uniform diffraction coefficient,
///   F(X) = 2 j sqrt(X) e^{jX} int_{sqrt(X)}^inf e^{-j tau^2} d tau,
/// for X >= 0. F(0) = 0 and F(X) -> 1 as X -> inf; |F| <= 1.
std::complex<double> transition_function(double x);

} // namespace gert::em
