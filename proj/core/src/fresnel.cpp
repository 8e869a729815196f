// SPDX-License-Identifier: Apache-2.0
#include "gert/em/fresnel.hpp"

#include "gert/error.hpp"

#include <cmath>

namespace gert::em {

ReflectionCoefficients fresnel_reflection(std::complex<double> eps, double theta_i) {
    if (!(theta_i >= 0.0) || theta_i >= 1.5707963267948966) {
        throw GeometryError("incidence angle must lie in [0, pi/2)");
    }
    const double ct = std::cos(theta_i);
    const double st = std::sin(theta_i);
    // Principal square root: for Im(eps) <= 0 the root lands in the fourth
    // quadrant, so the transmitted wave decays into the half-space.
    const std::complex<double> root = std::sqrt(eps - st * st);
    ReflectionCoefficients r;
    r.te = (ct - root) / (ct + root);
    r.tm = (root - eps * ct) / (root + eps * ct);
    return r;
}

} // namespace gert::em
