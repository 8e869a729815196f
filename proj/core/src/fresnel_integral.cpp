// SPDX-License-Identifier: Apache-2.0
#include "gert/em/fresnel_integral.hpp"

#include "gert/error.hpp"

#include <cmath>

namespace gert::em {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
using cplx = std::complex<double>;

// Power-series evaluation of C(x), S(x); used for |x| <= 2.5 where the
// largest term stays below ~2e3 and round-off is negligible.
FresnelCS series_cs(double x) {
    const double x4 = x * x * x * x;
    double c = 0.0;
    double s = 0.0;
    // u_n = (-1)^n (pi/2)^{2n} x^{4n} / (2n)!
    // v_n = (-1)^n (pi/2)^{2n+1} x^{4n+2} / (2n+1)!
    double u = 1.0;
    double v = kHalfPi * x * x;
    for (int n = 0; n < 64; ++n) {
        const double dc = u * x / (4 * n + 1);
        const double ds = v * x / (4 * n + 3);
        c += dc;
        s += ds;
        if (std::abs(dc) < 1e-18 && std::abs(ds) < 1e-18) break;
        const double k = 2.0 * n;
        u *= -kHalfPi * kHalfPi * x4 / ((k + 1.0) * (k + 2.0));
        v *= -kHalfPi * kHalfPi * x4 / ((k + 2.0) * (k + 3.0));
    }
    return {c, s};
}

// 16-point Gauss-Legendre rule on [-1, 1], computed once by Newton
// iteration on the Legendre polynomial.
struct GaussRule {
    double node[16];
    double weight[16];
};

const GaussRule& gl16() {
    static const GaussRule rule = [] {
        GaussRule r{};
        constexpr int n = 16;
        for (int i = 0; i < n / 2; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            r.node[i] = -z;
            r.node[n - 1 - i] = z;
            r.weight[i] = r.weight[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        return r;
    }();
    return rule;
}

// Mid-range complement integral by rotating the contour through the saddle:
// with t = x + e^{j pi/4} u the integrand becomes a decaying Gaussian,
//   E(x) = e^{j pi/4} e^{j pi x^2/2} int_0^inf e^{-pi(u^2/2 + x u/sqrt 2)}
//          e^{+j pi x u /sqrt 2} du .
cplx contour_complement(double x) {
    // Truncate where the real exponent reaches ~45.
    const double b = kPi * x / std::sqrt(2.0);
    const double upper = (-b + std::sqrt(b * b + 2.0 * kPi * 45.0)) / kPi;
    const GaussRule& gl = gl16();
    const int panels = 12;
    const double h = upper / panels;
    cplx acc{0.0, 0.0};
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int i = 0; i < 16; ++i) {
            const double u = mid + 0.5 * h * gl.node[i];
            const double decay = std::exp(-kPi * (0.5 * u * u) - b * u);
            const double phase = b * u;
            acc += gl.weight[i] * decay * cplx{std::cos(phase), std::sin(phase)};
        }
    }
    acc *= 0.5 * h;
    const double ph = kHalfPi * x * x + kPi / 4.0;
    return acc * cplx{std::cos(ph), std::sin(ph)};
}

// Large-argument complement integral by repeated integration by parts:
//   E(x) = e^{j pi x^2/2} [ t_0 + t_1 + ... ],  t_0 = -1/(j pi x),
//   t_m = t_{m-1} (2m - 1)/(j pi x^2).
cplx asymptotic_complement(double x) {
    const cplx jpix{0.0, kPi * x};
    cplx term = -1.0 / jpix;
    cplx sum = term;
    double prev = std::abs(term);
    for (int m = 1; m < 40; ++m) {
        term *= (2.0 * m - 1.0) / cplx{0.0, kPi * x * x};
        const double mag = std::abs(term);
        if (mag >= prev) break; // asymptotic tail started diverging
        sum += term;
        if (mag < 1e-18) break;
        prev = mag;
    }
    const double ph = kHalfPi * x * x;
    return sum * cplx{std::cos(ph), std::sin(ph)};
}

} // namespace

std::complex<double> fresnel_complement(double x) {
    if (!(x >= 0.0)) throw GeometryError("fresnel_complement requires x >= 0");
    if (x < 2.5) {
        const FresnelCS cs = series_cs(x);
        return {0.5 - cs.c, 0.5 - cs.s};
    }
    if (x < 5.0) return contour_complement(x);
    return asymptotic_complement(x);
}

FresnelCS fresnel_cs(double x) {
    const double ax = std::abs(x);
    FresnelCS out;
    if (ax < 2.5) {
        out = series_cs(ax);
    } else {
        const cplx e = (ax < 5.0) ? contour_complement(ax) : asymptotic_complement(ax);
        out = {0.5 - e.real(), 0.5 - e.imag()};
    }
    if (x < 0.0) {
        out.c = -out.c;
        out.s = -out.s;
    }
    return out;
}

std::complex<double> transition_function(double x) {
    if (!(x >= 0.0)) throw GeometryError("transition function requires a non-negative argument");
    if (x == 0.0) return {0.0, 0.0};
    // int_{sqrt X}^inf e^{-j tau^2} d tau = sqrt(pi/2) conj(E(sqrt(2X/pi)))
    const double u = std::sqrt(2.0 * x / kPi);
    const cplx tail = std::sqrt(kHalfPi) * std::conj(fresnel_complement(u));
    const cplx jexp{std::cos(x), std::sin(x)};
    return 2.0 * cplx{0.0, 1.0} * std::sqrt(x) * jexp * tail;
}

} // namespace gert::em
