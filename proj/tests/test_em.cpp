// SPDX-License-Identifier: Apache-2.0
#include "gert/em/fresnel.hpp"
#include "gert/em/fresnel_integral.hpp"
#include "gert/em/material.hpp"
#include "gert/em/utd.hpp"
#include "gert/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

using namespace gert;
using namespace gert::em;

TEST_CASE("built-in material set and frequency-law resolution") {
    const MaterialTable& table = MaterialTable::builtin();
    for (const char* name : {"itu_concrete", "itu_brick", "itu_wood", "itu_glass",
                             "itu_medium_dry_ground", "metal"}) {
        CHECK(table.has(name));
    }
    CHECK_FALSE(table.has("unobtainium"));
    CHECK_THROWS_AS(table.resolve("unobtainium", 3.5e9), ParseError);

    const Material concrete = table.resolve("itu_concrete", 3.5e9);
    CHECK(concrete.eps_r == doctest::Approx(5.24));
    CHECK(concrete.sigma_s_per_m == doctest::Approx(0.12308694702706031).epsilon(1e-13));
    CHECK(concrete.law.has_value());

    const Material ground = table.resolve("itu_medium_dry_ground", 3.5e9);
    CHECK(ground.eps_r == doctest::Approx(13.233796577287013).epsilon(1e-13));
    CHECK(ground.sigma_s_per_m == doctest::Approx(0.2697111846885339).epsilon(1e-13));
}

TEST_CASE("complex permittivity under the e^{+j omega t} convention") {
    Material lossless{"x", 4.0, 0.0, std::nullopt};
    CHECK(complex_permittivity(lossless, 1e9).imag() == 0.0);
    CHECK(complex_permittivity(lossless, 1e9).real() == doctest::Approx(4.0));

    // concrete-like parameters: the loss term lands near -0.633
    Material concrete{"c", 5.24, 0.1232, std::nullopt};
    const auto eps = complex_permittivity(concrete, 3.5e9);
    CHECK(eps.real() == doctest::Approx(5.24));
    CHECK(eps.imag() == doctest::Approx(-0.6327236461751865).epsilon(1e-12));
    CHECK(eps.imag() == doctest::Approx(-0.633).epsilon(1e-3));

    // halving the frequency doubles the magnitude of the imaginary part
    const auto eps_half = complex_permittivity(concrete, 1.75e9);
    CHECK(eps_half.imag() == doctest::Approx(2.0 * eps.imag()).epsilon(1e-12));

    // a material carrying a law re-evaluates it at the call frequency
    Material living = MaterialTable::builtin().resolve("itu_medium_dry_ground", 3.5e9);
    const auto at7 = complex_permittivity(living, 7.0e9);
    CHECK(at7.real() == doctest::Approx(15.0 * std::pow(7.0, -0.1)).epsilon(1e-12));
    // without the law, the resolved values stay frozen
    living.law.reset();
    CHECK(complex_permittivity(living, 7.0e9).real() == doctest::Approx(living.eps_r));
}

TEST_CASE("frequency laws are positive and continuous over 0.5-100 GHz") {
    const MaterialTable& table = MaterialTable::builtin();
    for (const std::string& name : table.names()) {
        double prev_eps = 0.0, prev_sigma = 0.0;
        bool first = true;
        for (int i = 0; i <= 400; ++i) {
            const double f = 0.5e9 * std::pow(200.0, i / 400.0); // 0.5 -> 100 GHz
            const Material m = table.resolve(name, f);
            CHECK(m.eps_r >= 1.0);
            CHECK(m.sigma_s_per_m >= 0.0);
            if (!first) {
                CHECK(std::abs(m.eps_r - prev_eps) <= 0.05 * prev_eps);
                if (prev_sigma > 0) {
                    CHECK(std::abs(m.sigma_s_per_m - prev_sigma) <= 0.05 * prev_sigma);
                }
            }
            prev_eps = m.eps_r;
            prev_sigma = m.sigma_s_per_m;
            first = false;
        }
    }
}

TEST_CASE("shipped material table matches the built-in rows") {
    std::ifstream in(std::string(GERT_DATA_DIR) + "/material_frequency_laws.csv");
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    const MaterialTable shipped = MaterialTable::from_csv(buf.str());
    const MaterialTable& builtin = MaterialTable::builtin();

    REQUIRE(shipped.names() == builtin.names());
    for (const std::string& name : builtin.names()) {
        for (const double f : {0.5e9, 3.5e9, 28e9, 100e9}) {
            const Material a = shipped.resolve(name, f);
            const Material b = builtin.resolve(name, f);
            CHECK(a.eps_r == b.eps_r);
            CHECK(a.sigma_s_per_m == b.sigma_s_per_m);
        }
    }
}

TEST_CASE("material table parser rejects malformed rows") {
    CHECK_THROWS_AS(MaterialTable::from_csv("brick,1.0,2.0"), ParseError);
    CHECK_THROWS_AS(MaterialTable::from_csv("brick,1.0,x,3,4"), ParseError);
    const MaterialTable empty_ok = MaterialTable::from_csv("# just a comment\n\n");
    CHECK(empty_ok.names().empty());
}

// --------------------------------------------------------------------------
// Fresnel reflection coefficients

TEST_CASE("fresnel reflection: closed-form anchor points") {
    const std::complex<double> eps4{4.0, 0.0};

    // normal incidence: both coefficients collapse to (1 - sqrt(eps))/(1 + sqrt(eps))
    const auto normal = fresnel_reflection(eps4, 0.0);
    CHECK(normal.te.real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(normal.te.imag() == doctest::Approx(0.0));
    CHECK(normal.tm.real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(normal.tm.imag() == doctest::Approx(0.0));

    // grazing: both magnitudes approach 1, TE -> -1, TM -> +1
    const auto grazing = fresnel_reflection(eps4, 1.5707);
    CHECK(std::abs(grazing.te) > 0.999);
    CHECK(std::abs(grazing.tm) > 0.999);
    CHECK(grazing.te.real() < -0.999);
    CHECK(grazing.tm.real() > 0.999);

    // Brewster angle atan(sqrt(eps)) kills the TM reflection
    const auto brewster = fresnel_reflection(eps4, std::atan(2.0));
    CHECK(std::abs(brewster.tm) < 1e-10);
    CHECK(std::abs(brewster.te) > 0.1);

    CHECK_THROWS_AS(fresnel_reflection(eps4, 1.5707963267948966), GeometryError);
    CHECK_THROWS_AS(fresnel_reflection(eps4, -0.1), GeometryError);
}

TEST_CASE("fresnel reflection: passivity over random lossy half-spaces") {
    std::mt19937 rng(20260814);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double eps_r = 1.0 + 79.0 * u01(rng);
        const double sigma = 10.0 * u01(rng);
        const double f = 5e8 + 1e11 * u01(rng);
        Material m{"m", eps_r, sigma, std::nullopt};
        const auto eps = complex_permittivity(m, f);
        const double theta = 1.5707 * u01(rng);
        const auto r = fresnel_reflection(eps, theta);
        CHECK(std::abs(r.te) <= 1.0 + 1e-12);
        CHECK(std::abs(r.tm) <= 1.0 + 1e-12);
    }
}

// --------------------------------------------------------------------------
// Fresnel integrals and the transition function

namespace {

// adaptive Simpson quadrature, used as an oracle independent of the library
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
    // integrate unit chunks so oscillatory tails cannot fool the estimator
    double total = 0.0;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, lo + 1.0);
        const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(f, lo, hi, fa, fm, fb, whole, tol, 40);
        lo = hi;
    }
    return total;
}

double oracle_c(double x) {
    return integrate([](double t) { return std::cos(1.5707963267948966 * t * t); }, 0.0, x, 1e-13);
}
double oracle_s(double x) {
    return integrate([](double t) { return std::sin(1.5707963267948966 * t * t); }, 0.0, x, 1e-13);
}

} // namespace

TEST_CASE("fresnel integrals match an adaptive-quadrature oracle") {
    // classic table values
    CHECK(fresnel_cs(1.0).c == doctest::Approx(0.7798934003768228).epsilon(1e-12));
    CHECK(fresnel_cs(1.0).s == doctest::Approx(0.4382591473903548).epsilon(1e-12));

    for (double x : {0.05, 0.3, 0.9, 1.7, 2.3, 2.49, 2.51, 3.0, 3.7, 4.4,
                     4.99, 5.01, 6.5, 9.0, 15.0, 40.0}) {
        const FresnelCS got = fresnel_cs(x);
        CHECK(got.c == doctest::Approx(oracle_c(x)).epsilon(1e-10));
        CHECK(got.s == doctest::Approx(oracle_s(x)).epsilon(1e-10));
        // odd functions
        CHECK(fresnel_cs(-x).c == doctest::Approx(-got.c).epsilon(1e-14));
        CHECK(fresnel_cs(-x).s == doctest::Approx(-got.s).epsilon(1e-14));
    }

    // asymptotic limit C, S -> 1/2
    CHECK(fresnel_cs(1e6).c == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(fresnel_cs(1e6).s == doctest::Approx(0.5).epsilon(1e-5));

    // branch seams are continuous (|C'|, |S'| <= 1, so the 2e-9 interval
    // itself moves the value by up to 2e-9)
    for (double x : {2.5, 5.0}) {
        const FresnelCS lo = fresnel_cs(x - 1e-9);
        const FresnelCS hi = fresnel_cs(x + 1e-9);
        CHECK(std::abs(hi.c - lo.c) < 3e-9);
        CHECK(std::abs(hi.s - lo.s) < 3e-9);
    }
}

TEST_CASE("transition function limits and bounds") {
    CHECK(transition_function(0.0) == std::complex<double>{0.0, 0.0});

    // small argument: F ~ sqrt(pi X) e^{j(pi/4 + X)} (next-order term ~ 2 sqrt(X/pi))
    const auto small = transition_function(1e-8);
    CHECK(std::abs(small) == doctest::Approx(std::sqrt(3.14159265358979 * 1e-8)).epsilon(3e-4));
    CHECK(std::arg(small) == doctest::Approx(3.14159265358979 / 4.0).epsilon(1e-3));

    double prev = 0.0;
    for (double lx = -8.0; lx <= 6.0; lx += 0.05) {
        const double x = std::pow(10.0, lx);
        const double mag = std::abs(transition_function(x));
        CHECK(mag <= 1.0 + 1e-9);
        CHECK(mag >= prev - 1e-9); // |F| grows monotonically from 0 to 1
        prev = mag;
    }
    CHECK(std::abs(transition_function(10.0) - 1.0) < 0.05);
    CHECK(std::abs(transition_function(1e6) - 1.0) < 1e-5);
}

// --------------------------------------------------------------------------
// UTD wedge diffraction

namespace {

constexpr double kPi = 3.14159265358979323846;

// Exact half-plane solution (Sommerfeld) for a unit plane wave incident at
// azimuth phi0, evaluated at (rho, phi); e^{+j omega t} convention. The
// kernel integral G(a) = int_{-a}^{inf} e^{-j tau^2} d tau is evaluated with
// the quadrature oracle above, keeping it independent of the library.
std::complex<double> halfplane_kernel(double a) {
    const double qc = integrate([](double t) { return std::cos(t * t); }, 0.0, std::abs(a), 1e-13);
    const double qs = integrate([](double t) { return std::sin(t * t); }, 0.0, std::abs(a), 1e-13);
    const double sgn = (a >= 0.0) ? 1.0 : -1.0;
    const std::complex<double> half{std::sqrt(kPi / 8.0), -std::sqrt(kPi / 8.0)};
    return half + sgn * std::complex<double>{qc, -qs};
}

std::complex<double> sommerfeld_halfplane(double k, double rho, double phi, double phi0,
                                          bool soft) {
    const double a1 = std::sqrt(2.0 * k * rho) * std::cos(0.5 * (phi - phi0));
    const double a2 = std::sqrt(2.0 * k * rho) * std::cos(0.5 * (phi + phi0));
    const std::complex<double> pref =
        std::complex<double>{std::cos(kPi / 4.0), std::sin(kPi / 4.0)} / std::sqrt(kPi);
    // inward plane wave: phase +k rho cos(angle) under e^{+j omega t}
    const auto phase = [&](double ang) {
        const double p = k * rho * std::cos(ang);
        return std::complex<double>{std::cos(p), std::sin(p)};
    };
    const std::complex<double> term1 = phase(phi - phi0) * halfplane_kernel(a1);
    const std::complex<double> term2 = phase(phi + phi0) * halfplane_kernel(a2);
    return soft ? pref * (term1 - term2) : pref * (term1 + term2);
}

// Spherical-wave total field near a PEC wedge: incident + reflected + diffracted.
std::complex<double> pec_wedge_total(double n_index, double k, double s1, double rho,
                                     double phi0, double phi, bool soft) {
    const double refl = soft ? -1.0 : 1.0;
    std::complex<double> total{0.0, 0.0};
    const auto spherical = [&](double dx, double dy) {
        const double r = std::hypot(dx, dy);
        const double p = -k * r;
        return std::complex<double>{std::cos(p), std::sin(p)} / r;
    };
    const double ox = rho * std::cos(phi), oy = rho * std::sin(phi);
    if (phi < phi0 + kPi) { // incident side of the shadow boundary
        total += spherical(ox - s1 * std::cos(phi0), oy - s1 * std::sin(phi0));
    }
    if (phi < kPi - phi0) { // o-face reflection zone (image source below the face)
        total += refl * spherical(ox - s1 * std::cos(phi0), oy + s1 * std::sin(phi0));
    }
    const std::complex<double> d = utd_coefficient_with_reflections(
        n_index, refl, refl, phi0, phi, kPi / 2.0, s1, rho, k);
    const double p1 = -k * (s1 + rho);
    total += std::complex<double>{std::cos(p1), std::sin(p1)} / s1 * d *
             std::sqrt(s1 / (rho * (s1 + rho)));
    return total;
}

// Scan the total field across a boundary at 0.1 degree steps. Jumps are
// measured against the field scale in the window: the geometric-optics
// interference pattern is itself steep near its nulls, and only an
// uncompensated boundary discontinuity shows up on this scale.
void scan_for_jumps(double n_index, double k, double s1, double rho, double phi0,
                    double center, double max_jump) {
    for (bool soft : {true, false}) {
        std::vector<double> mags;
        for (int i = -15; i <= 15; ++i) {
            const double phi = center + i * (0.1 * kPi / 180.0);
            mags.push_back(std::abs(pec_wedge_total(n_index, k, s1, rho, phi0, phi, soft)));
        }
        const double scale = *std::max_element(mags.begin(), mags.end());
        for (size_t i = 1; i < mags.size(); ++i) {
            CHECK(std::abs(mags[i] - mags[i - 1]) <= max_jump * scale);
        }
    }
}

} // namespace

TEST_CASE("utd: pec half-plane amplitude matches the exact solution") {
    const double k = 2.0 * kPi;     // unit wavelength
    const double rho = 5.0;         // five wavelengths from the edge
    const double phi0 = kPi / 3.0;  // 60 degree incidence
    const double phi = phi0 + kPi + kPi / 6.0; // 30 degrees into the shadow
    const double s1 = 1e8;          // effectively plane-wave incidence

    for (bool soft : {true, false}) {
        const double refl = soft ? -1.0 : 1.0;
        const std::complex<double> d = utd_coefficient_with_reflections(
            2.0, refl, refl, phi0, phi, kPi / 2.0, s1, rho, k);
        // normalize to unit incident amplitude at the edge
        const double utd_mag = std::abs(d) * s1 * std::sqrt(1.0 / (s1 * rho * (s1 + rho)));
        const double exact = std::abs(sommerfeld_halfplane(k, rho, phi, phi0, soft));
        CHECK(utd_mag == doctest::Approx(exact).epsilon(0.05));
    }
}

TEST_CASE("utd: total field is continuous across shadow and reflection boundaries") {
    const double k = 2.0 * kPi;
    const double s1 = 1e4;
    const double rho = 1.5;

    // half plane (interior 0): one-sided limits straddling the ISB agree
    // within 1% (incident + diffracted only; no reflected wave at the ISB)
    {
        const double phi0 = 55.0 * kPi / 180.0;
        const double h = 0.05 * kPi / 180.0;
        for (bool soft : {true, false}) {
            const double lit = std::abs(pec_wedge_total(2.0, k, s1, rho, phi0,
                                                        phi0 + kPi - h, soft));
            const double shadow = std::abs(pec_wedge_total(2.0, k, s1, rho, phi0,
                                                           phi0 + kPi + h, soft));
            CHECK(std::abs(lit - shadow) <= 0.01 * std::max(lit, shadow));
        }
    }

    // interior angles 0, 30, 90 degrees: ISB and o-face RSB, 2% budget
    struct Config { double interior_deg, phi0_deg; };
    for (const Config& c : {Config{0.0, 55.0}, Config{30.0, 50.0}, Config{90.0, 40.0}}) {
        const double n_index = 2.0 - c.interior_deg / 180.0;
        const double phi0 = c.phi0_deg * kPi / 180.0;
        scan_for_jumps(n_index, k, s1, rho, phi0, phi0 + kPi, 0.02);        // ISB
        scan_for_jumps(n_index, k, s1, rho, phi0, kPi - phi0, 0.02);        // RSB
    }
}

TEST_CASE("utd: reciprocity and symmetry") {
    std::mt19937 rng(4711);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const MaterialTable& table = MaterialTable::builtin();
    const auto eps_c = complex_permittivity(table.resolve("itu_concrete", 3.5e9), 3.5e9);
    const auto eps_g = complex_permittivity(table.resolve("itu_glass", 3.5e9), 3.5e9);
    const double k = 2.0 * kPi / 0.0857;

    for (int i = 0; i < 300; ++i) {
        const double n_index = 1.05 + 0.95 * u01(rng);
        const double span = n_index * kPi;
        const double phi_in = 0.02 + (span - 0.04) * u01(rng);
        const double phi_out = 0.02 + (span - 0.04) * u01(rng);
        const double beta0 = 0.2 + (kPi - 0.4) * u01(rng);
        const double s1 = 1.0 + 99.0 * u01(rng);
        const double s2 = 1.0 + 99.0 * u01(rng);
        for (auto pol : {Polarization::soft, Polarization::hard}) {
            const auto fwd = utd_coefficient(n_index, eps_c, eps_g, phi_in, phi_out,
                                             beta0, s1, s2, k, pol);
            // reversed path: swap legs; the edge angle flips to its supplement
            const auto rev = utd_coefficient(n_index, eps_c, eps_g, phi_out, phi_in,
                                             kPi - beta0, s2, s1, k, pol);
            CHECK(std::abs(fwd) == doctest::Approx(std::abs(rev)).epsilon(1e-9));
        }
    }

    // mirroring source and observer about the wedge bisector with equal face
    // materials leaves the coefficient unchanged
    for (int i = 0; i < 50; ++i) {
        const double n_index = 1.05 + 0.95 * u01(rng);
        const double span = n_index * kPi;
        const double phi_in = 0.05 + (span - 0.1) * u01(rng);
        const double phi_out = 0.05 + (span - 0.1) * u01(rng);
        const auto a = utd_coefficient(n_index, eps_c, eps_c, phi_in, phi_out,
                                       kPi / 2.0, 30.0, 40.0, k, Polarization::hard);
        const auto b = utd_coefficient(n_index, eps_c, eps_c, span - phi_in, span - phi_out,
                                       kPi / 2.0, 30.0, 40.0, k, Polarization::hard);
        CHECK(std::abs(a) == doctest::Approx(std::abs(b)).epsilon(1e-8));
    }
}

TEST_CASE("utd: domain validation") {
    const std::complex<double> eps{5.0, -0.5};
    const double k = 100.0;
    CHECK_THROWS_AS(utd_coefficient(2.5, eps, eps, 0.3, 1.0, kPi / 2, 1, 1, k,
                                    Polarization::soft), GeometryError);
    CHECK_THROWS_AS(utd_coefficient(1.5, eps, eps, 0.0, 1.0, kPi / 2, 1, 1, k,
                                    Polarization::soft), GeometryError);
    CHECK_THROWS_AS(utd_coefficient(1.5, eps, eps, 0.3, 1.5 * kPi, kPi / 2, 1, 1, k,
                                    Polarization::soft), GeometryError);
    CHECK_THROWS_AS(utd_coefficient(1.5, eps, eps, 0.3, 1.0, 0.0, 1, 1, k,
                                    Polarization::soft), GeometryError);
    CHECK_THROWS_AS(utd_coefficient(1.5, eps, eps, 0.3, 1.0, kPi / 2, -1, 1, k,
                                    Polarization::soft), GeometryError);
}
