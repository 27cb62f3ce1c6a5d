#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slwave/errors.hpp"
#include "slwave/green.hpp"
#include "slwave/grid.hpp"
#include "slwave/inverse.hpp"
#include "slwave/mat2.hpp"
#include "slwave/spectrum.hpp"
#include "slwave/wave.hpp"

namespace slwave {

using json = nlohmann::ordered_json;

/// 17 significant digits: doubles round-trip bit-exactly, so identical inputs
/// give byte-identical files.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline std::vector<std::vector<double>> read_csv(const std::string& path,
                                                 const std::string& header) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw io_error("'" + path + "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw io_error("'" + path + "': expected header '" + header + "', got '" + line + "'");
    const size_t cols = static_cast<size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                size_t pos = 0;
                row.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw io_error("'" + path + "': bad number '" + tok + "'");
            }
        }
        if (row.size() != cols) throw io_error("'" + path + "': wrong column count");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw io_error("'" + path + "': need at least 2 rows");
    return rows;
}

inline Grid grid_from_abscissae(const std::vector<std::vector<double>>& rows,
                                const std::string& path) {
    const int n = static_cast<int>(rows.size());
    const double l = rows.back()[0];
    if (!(l > 0.0) || rows.front()[0] != 0.0)
        throw io_error("'" + path + "': abscissae must run from 0 to a positive length");
    Grid g{l, n};
    const double h = g.spacing();
    for (int i = 0; i < n; ++i)
        if (std::fabs(rows[static_cast<size_t>(i)][0] - g.node(i)) > 1e-9 * std::max(1.0, l))
            throw io_error("'" + path + "': abscissae are not a uniform grid");
    (void)h;
    return g;
}

} // namespace detail

inline void write_grid_function_csv(const std::string& path, const GridFunction& f,
                                    const std::string& value_name = "value") {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "x," << value_name << "\n";
    for (int i = 0; i < f.size(); ++i)
        out << format_double(f.grid().node(i)) << ',' << format_double(f[i]) << "\n";
}

inline GridFunction read_grid_function_csv(const std::string& path,
                                           const std::string& value_name = "value") {
    auto rows = detail::read_csv(path, "x," + value_name);
    Grid g = detail::grid_from_abscissae(rows, path);
    std::vector<double> v(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) v[i] = rows[i][1];
    return GridFunction(g, std::move(v));
}

inline void write_matrix2_csv(const std::string& path, const Matrix2Field& f) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "x,m11,m12,m21,m22\n";
    for (int i = 0; i < f.size(); ++i) {
        const Mat2& m = f[i];
        out << format_double(f.grid().node(i)) << ',' << format_double(m.m11) << ','
            << format_double(m.m12) << ',' << format_double(m.m21) << ',' << format_double(m.m22)
            << "\n";
    }
}

inline Matrix2Field read_matrix2_csv(const std::string& path) {
    auto rows = detail::read_csv(path, "x,m11,m12,m21,m22");
    Grid g = detail::grid_from_abscissae(rows, path);
    std::vector<Mat2> v(rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        v[i] = Mat2{rows[i][1], rows[i][2], rows[i][3], rows[i][4]};
    return Matrix2Field(g, std::move(v));
}

inline void write_control_csv(const std::string& path, const BoundaryControl& c) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "t,f0,fl\n";
    for (size_t k = 0; k < c.f0.size(); ++k)
        out << format_double(static_cast<double>(k) * c.dt) << ',' << format_double(c.f0[k]) << ','
            << format_double(c.fl[k]) << "\n";
}

inline BoundaryControl read_control_csv(const std::string& path) {
    auto rows = detail::read_csv(path, "t,f0,fl");
    const size_t n = rows.size();
    const double dt = rows[1][0] - rows[0][0];
    if (!(dt > 0.0) || rows[0][0] != 0.0)
        throw io_error("'" + path + "': time column must start at 0 and increase");
    for (size_t k = 0; k < n; ++k)
        if (std::fabs(rows[k][0] - static_cast<double>(k) * dt) > 1e-9 * std::max(1.0, rows.back()[0]))
            throw io_error("'" + path + "': time column is not uniform");
    std::vector<double> f0(n), fl(n);
    for (size_t k = 0; k < n; ++k) {
        f0[k] = rows[k][1];
        fl[k] = rows[k][2];
    }
    return BoundaryControl(dt, std::move(f0), std::move(fl));
}

/// Binary field dump: magic "SLWF1", two little-endian uint64 (time samples,
/// space nodes), two float64 (length, dt), then row-major float64 samples.
inline void write_wave_field_binary(const std::string& path, const WaveField& w) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    out.write("SLWF1", 5);
    std::uint64_t rows = static_cast<std::uint64_t>(w.steps()) + 1;
    std::uint64_t cols = static_cast<std::uint64_t>(w.grid().count);
    double l = w.grid().length, dt = w.dt();
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    out.write(reinterpret_cast<const char*>(&l), 8);
    out.write(reinterpret_cast<const char*>(&dt), 8);
    out.write(reinterpret_cast<const char*>(w.data().data()),
              static_cast<std::streamsize>(w.data().size() * 8));
    if (!out) throw io_error("write failed for '" + path + "'");
}

inline void to_json(json& j, const KernelElement& k) { j = json{{"c0", k.c0}, {"cl", k.cl}}; }

inline KernelElement kernel_element_from_json(const json& j) {
    if (!j.contains("c0") || !j.contains("cl"))
        throw io_error("kernel element JSON needs fields c0, cl");
    return {j.at("c0").get<double>(), j.at("cl").get<double>()};
}

inline json elementary_set_to_json(const ElementarySet& e) {
    json iv = json::array();
    for (const Interval& i : e.intervals()) iv.push_back(json::array({i.a, i.b}));
    return json{{"l", e.length()}, {"intervals", iv}};
}

inline ElementarySet elementary_set_from_json(const json& j) {
    if (!j.contains("l") || !j.contains("intervals"))
        throw io_error("elementary set JSON needs fields l, intervals");
    std::vector<Interval> iv;
    for (const auto& e : j.at("intervals")) {
        if (!e.is_array() || e.size() != 2) throw io_error("interval must be a pair [a, b]");
        iv.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return ElementarySet(j.at("l").get<double>(), std::move(iv));
}

inline json diagnostics_to_json(const RecoveryDiagnostics& d) {
    return json{{"max_offdiag_residual", d.max_offdiag_residual},
                {"min_discriminant", d.min_discriminant},
                {"branch_swaps", d.branch_swaps},
                {"kept_nodes", d.kept_nodes},
                {"delta", d.delta}};
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw io_error("'" + path + "': invalid JSON");
    return j;
}

} // namespace slwave
