// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gert::em {

inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m

/// Frequency power law for dielectric parameters:
///   eps_r = a * f_GHz^b,  sigma = c * f_GHz^d
struct FrequencyLaw {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

/// Electromagnetic material. When `law` is set, eps_r/sigma_s_per_m are the
/// values resolved at some reference frequency; complex_permittivity()
/// re-evaluates the law at the requested frequency instead.
struct Material {
    std::string name;
    double eps_r = 1.0;        // relative permittivity, >= 1
    double sigma_s_per_m = 0.0; // conductivity, >= 0
    std::optional<FrequencyLaw> law;
};

/// eps = eps_r - j sigma/(2 pi f eps0), under the e^{+j omega t} convention
/// (so the imaginary part is <= 0 for passive media). If the material
/// carries a frequency law it is evaluated at f_hz first.
std::complex<double> complex_permittivity(const Material& m, double f_hz);

/// Named table of frequency laws. The built-in set covers the common urban
/// surface types; the same rows ship as a data file so the coefficients
/// can be audited, and the loader accepts extended tables.
class MaterialTable {
public:
    /// Compiled-in default table.
    static const MaterialTable& builtin();

    /// Parse a table from CSV text: `name,a,b,c,d` per row, `#` comments.
    static MaterialTable from_csv(std::string_view csv);

    bool has(std::string_view name) const;

    /// Material with the law attached and eps_r/sigma resolved at f_hz.
    Material resolve(std::string_view name, double f_hz) const;

    std::vector<std::string> names() const;

private:
    std::map<std::string, FrequencyLaw, std::less<>> laws_;
};

} // namespace gert::em
