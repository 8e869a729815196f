// SPDX-License-Identifier: Apache-2.0
#include "gert/sweep/sweep_io.hpp"

#include "gert/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace gert::sweep {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& tok, const std::string& where) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + tok.size() || tok.empty())
        throw ParseError(where + ": invalid number '" + tok + "'");
    return v;
}

long long parse_int(const std::string& tok, const std::string& where) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(begin, &end, 10);
    if (end != begin + tok.size() || tok.empty())
        throw ParseError(where + ": invalid integer '" + tok + "'");
    return v;
}

bool parse_bool01(const std::string& tok, const std::string& where) {
    if (tok == "0") return false;
    if (tok == "1") return true;
    throw ParseError(where + ": invalid flag '" + tok + "' (expected 0 or 1)");
}

std::string next_line(std::istream& in, const std::string& where) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(where + ": unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

constexpr const char* kGridMetaHeader = "nx,ny,spacing_m,clearance_m";
constexpr const char* kGridCellHeader = "x,y,z";
constexpr const char* kRawHeader =
    "draw,cell,connected,has_paths,pg_db,med_ns,ds_ns,k_db,k_finite";

fs::path raw_file_name(std::uint64_t tx_id, perturb::PerturbKind kind) {
    return "raw_" + std::to_string(tx_id) + "_" + perturb::to_string(kind) +
           ".csv";
}

} // namespace

void write_grid_csv(const RxGrid& grid, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write grid file: " + file.string());
    out << kGridMetaHeader << '\n'
        << grid.nx << ',' << grid.ny << ',' << fmt(grid.spacing_m) << ','
        << fmt(grid.clearance_m) << '\n'
        << kGridCellHeader << '\n';
    for (const Vec3& c : grid.cells)
        out << fmt(c.x) << ',' << fmt(c.y) << ',' << fmt(c.z) << '\n';
    if (!out) throw IoError("failed writing grid file: " + file.string());
}

RxGrid read_grid_csv(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("grid file not found: " + file.string());
    const std::string where = file.string();

    if (next_line(in, where) != kGridMetaHeader)
        throw ParseError(where + ": missing grid meta header");
    const auto meta = split_csv(next_line(in, where));
    if (meta.size() != 4) throw ParseError(where + ": malformed grid meta row");

    RxGrid grid;
    grid.nx = static_cast<int>(parse_int(meta[0], where));
    grid.ny = static_cast<int>(parse_int(meta[1], where));
    grid.spacing_m = parse_double(meta[2], where);
    grid.clearance_m = parse_double(meta[3], where);
    if (grid.nx <= 0 || grid.ny <= 0)
        throw ParseError(where + ": grid dimensions must be positive");

    if (next_line(in, where) != kGridCellHeader)
        throw ParseError(where + ": missing cell header");
    const size_t n_cells =
        static_cast<size_t>(grid.nx) * static_cast<size_t>(grid.ny);
    grid.cells.reserve(n_cells);
    for (size_t i = 0; i < n_cells; ++i) {
        const auto row = split_csv(next_line(in, where));
        if (row.size() != 3)
            throw ParseError(where + ": malformed cell row " + std::to_string(i));
        grid.cells.push_back({parse_double(row[0], where),
                              parse_double(row[1], where),
                              parse_double(row[2], where)});
    }
    std::string extra;
    if (std::getline(in, extra) && !extra.empty())
        throw ParseError(where + ": trailing content after the cell rows");
    return grid;
}

void write_raw_samples(const SweepResult& result, const fs::path& dir) {
    const fs::path raw_dir = dir / "raw";
    std::error_code ec;
    fs::create_directories(raw_dir, ec);
    if (ec) throw IoError("cannot create raw sample directory: " + raw_dir.string());

    for (const TxKindResult& tk : result.results) {
        if (tk.raw.empty())
            throw Error("raw samples were not retained for tx " +
                        std::to_string(tk.tx_id) + " kind " +
                        perturb::to_string(tk.kind));
        const fs::path file = raw_dir / raw_file_name(tk.tx_id, tk.kind);
        std::ofstream out(file, std::ios::binary);
        if (!out) throw IoError("cannot write raw sample file: " + file.string());
        out << kRawHeader << '\n';
        for (size_t k = 0; k < tk.raw.size(); ++k) {
            for (size_t c = 0; c < tk.raw[k].size(); ++c) {
                const CellSample& s = tk.raw[k][c];
                out << k << ',' << c << ',' << (s.connected ? 1 : 0) << ','
                    << (s.has_paths ? 1 : 0) << ',' << fmt(s.pg_db) << ','
                    << fmt(s.med_ns) << ',' << fmt(s.ds_ns) << ','
                    << fmt(s.k_db) << ',' << (s.k_finite ? 1 : 0) << '\n';
            }
        }
        if (!out) throw IoError("failed writing raw sample file: " + file.string());
    }
}

std::vector<std::vector<std::vector<CellSample>>> read_raw_samples(
    const fs::path& dir, const std::vector<TxSite>& tx_sites,
    const std::vector<perturb::PerturbationSpec>& specs, std::size_t n_cells) {
    std::vector<std::vector<std::vector<CellSample>>> raw;
    raw.reserve(tx_sites.size() * specs.size());

    for (const TxSite& tx : tx_sites) {
        for (const perturb::PerturbationSpec& spec : specs) {
            const fs::path file = dir / "raw" / raw_file_name(tx.id, spec.kind);
            std::ifstream in(file, std::ios::binary);
            if (!in) throw IoError("raw sample file not found: " + file.string());
            const std::string where = file.string();

            if (next_line(in, where) != kRawHeader)
                throw ParseError(where + ": missing raw sample header");

            const auto k_draws = static_cast<size_t>(spec.count);
            std::vector<std::vector<CellSample>> samples(
                k_draws, std::vector<CellSample>(n_cells));
            for (size_t k = 0; k < k_draws; ++k) {
                for (size_t c = 0; c < n_cells; ++c) {
                    const auto row = split_csv(next_line(in, where));
                    if (row.size() != 9)
                        throw ParseError(where + ": malformed sample row");
                    if (parse_int(row[0], where) != static_cast<long long>(k) ||
                        parse_int(row[1], where) != static_cast<long long>(c))
                        throw ParseError(where +
                                         ": sample rows out of draw-major order");
                    CellSample& s = samples[k][c];
                    s.connected = parse_bool01(row[2], where);
                    s.has_paths = parse_bool01(row[3], where);
                    s.pg_db = parse_double(row[4], where);
                    s.med_ns = parse_double(row[5], where);
                    s.ds_ns = parse_double(row[6], where);
                    s.k_db = parse_double(row[7], where);
                    s.k_finite = parse_bool01(row[8], where);
                }
            }
            std::string extra;
            if (std::getline(in, extra) && !extra.empty())
                throw ParseError(where + ": trailing content after the samples");
            raw.push_back(std::move(samples));
        }
    }
    return raw;
}

} // namespace gert::sweep
