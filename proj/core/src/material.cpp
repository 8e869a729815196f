// SPDX-License-Identifier: Apache-2.0
#include "gert/em/material.hpp"

#include "gert/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gert::em {

namespace {

// Same rows as core/data/material_frequency_laws.csv; the unit test asserts
// the two stay in sync.
struct BuiltinRow {
    const char* name;
    FrequencyLaw law;
};

constexpr BuiltinRow kBuiltinRows[] = {
    {"itu_concrete", {5.24, 0.0, 0.0462, 0.7822}},
    {"itu_brick", {3.91, 0.0, 0.0238, 0.16}},
    {"itu_wood", {1.99, 0.0, 0.0047, 1.0718}},
    {"itu_glass", {6.31, 0.0, 0.0036, 1.3394}},
    {"itu_medium_dry_ground", {15.0, -0.1, 0.035, 1.63}},
    // Near-perfect conductor stand-in for oracle tests and metal roofs.
    {"metal", {1.0, 0.0, 1.0e7, 0.0}},
};

} // namespace

std::complex<double> complex_permittivity(const Material& m, double f_hz) {
    double eps_r = m.eps_r;
    double sigma = m.sigma_s_per_m;
    if (m.law) {
        const double f_ghz = f_hz / 1.0e9;
        eps_r = m.law->a * std::pow(f_ghz, m.law->b);
        sigma = m.law->c * std::pow(f_ghz, m.law->d);
    }
    const double im = sigma / (2.0 * std::numbers::pi * f_hz * kVacuumPermittivity);
    return {eps_r, -im};
}

const MaterialTable& MaterialTable::builtin() {
    static const MaterialTable table = [] {
        MaterialTable t;
        for (const BuiltinRow& row : kBuiltinRows) t.laws_[row.name] = row.law;
        return t;
    }();
    return table;
}

MaterialTable MaterialTable::from_csv(std::string_view csv) {
    MaterialTable t;
    std::istringstream in{std::string(csv)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);

        std::istringstream row(line);
        std::string name, field;
        double v[4];
        if (!std::getline(row, name, ',')) continue;
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(row, field, ',')) {
                throw ParseError("material table line " + std::to_string(lineno) +
                                 ": expected name,a,b,c,d");
            }
            try {
                v[i] = std::stod(field);
            } catch (const std::exception&) {
                throw ParseError("material table line " + std::to_string(lineno) +
                                 ": bad number '" + field + "'");
            }
        }
        t.laws_[name] = FrequencyLaw{v[0], v[1], v[2], v[3]};
    }
    return t;
}

bool MaterialTable::has(std::string_view name) const {
    return laws_.find(name) != laws_.end();
}

Material MaterialTable::resolve(std::string_view name, double f_hz) const {
    const auto it = laws_.find(name);
    if (it == laws_.end()) {
        throw ParseError("unknown material: " + std::string(name));
    }
    if (!(f_hz > 0)) throw ParseError("material resolution needs a positive frequency");
    const FrequencyLaw& law = it->second;
    const double f_ghz = f_hz / 1.0e9;
    Material m;
    m.name = it->first;
    m.eps_r = law.a * std::pow(f_ghz, law.b);
    m.sigma_s_per_m = law.c * std::pow(f_ghz, law.d);
    m.law = law;
    return m;
}

std::vector<std::string> MaterialTable::names() const {
    std::vector<std::string> out;
    out.reserve(laws_.size());
    for (const auto& [name, law] : laws_) out.push_back(name);
    return out;
}

} // namespace gert::em
