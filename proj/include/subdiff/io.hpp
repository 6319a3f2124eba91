#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "subdiff/array.hpp"
#include "subdiff/grids.hpp"
#include "subdiff/inverse.hpp"
#include "subdiff/mms.hpp"
#include "subdiff/spectral.hpp"

namespace subdiff::io {

using nlohmann::json;

/// Full-precision decimal rendering; round-trips any double.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep \n on every platform
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

} // namespace detail

/// CSV `t,value` for a single time series.
inline void write_series_csv(const std::string& path, const std::string& value_name,
                             const TimeGrid& tg, std::span<const double> values) {
    if (static_cast<int>(values.size()) != tg.nt)
        throw std::invalid_argument("write_series_csv: length mismatch");
    std::ofstream out = detail::open_out(path);
    out << "t," << value_name << "\n";
    for (int i = 0; i < tg.nt; ++i)
        out << format_g17(tg.t(i)) << ',' << format_g17(values[static_cast<std::size_t>(i)]) << "\n";
}

/// CSV `t,x,<name>` for an nt x nx field, row-major in t then x.
inline void write_field_csv(const std::string& path, const std::string& value_name,
                            const TimeGrid& tg, const SpaceGrid& sg, const Array2D& field) {
    if (static_cast<int>(field.rows()) != tg.nt || static_cast<int>(field.cols()) != sg.nx)
        throw std::invalid_argument("write_field_csv: field shape mismatch");
    std::ofstream out = detail::open_out(path);
    out << "t,x," << value_name << "\n";
    for (int i = 0; i < tg.nt; ++i)
        for (int j = 0; j < sg.nx; ++j)
            out << format_g17(tg.t(i)) << ',' << format_g17(sg.x(j)) << ','
                << format_g17(field(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) << "\n";
}

/// CSV `t,x,y,u` for a fully assembled field (large; gate behind a flag).
inline void write_full_csv(const std::string& path, const TimeGrid& tg, const SpaceGrid& sg,
                           const YGrid& yg, const Array3D& u) {
    if (static_cast<int>(u.ni()) != tg.nt || static_cast<int>(u.nj()) != sg.nx ||
        static_cast<int>(u.nk()) != yg.ny)
        throw std::invalid_argument("write_full_csv: field shape mismatch");
    std::ofstream out = detail::open_out(path);
    out << "t,x,y,u\n";
    for (int i = 0; i < tg.nt; ++i)
        for (int j = 0; j < sg.nx; ++j)
            for (int q = 0; q < yg.ny; ++q)
                out << format_g17(tg.t(i)) << ',' << format_g17(sg.x(j)) << ','
                    << format_g17(yg.y(q)) << ','
                    << format_g17(u(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                    static_cast<std::size_t>(q)))
                    << "\n";
}

/// CSV `k,lambda_k,coef` for a sine-coefficient vector (k starts at 1).
inline void write_coeffs_csv(const std::string& path, std::span<const double> coeffs) {
    std::ofstream out = detail::open_out(path);
    out << "k,lambda_k,coef\n";
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        out << (k + 1) << ',' << (k + 1) * (k + 1) << ',' << format_g17(coeffs[k]) << "\n";
}

/// Read a `t,x,<value>` CSV back onto the given grids.
///
/// The file must hold exactly nt * nx data rows in t-major order and its
/// coordinates must match the grid nodes to within 1e-9 absolute; anything
/// else throws std::runtime_error naming the offending row. This is the
/// inverse of write_field_csv, used to feed measured traces into the solver.
inline Array2D read_field_csv(const std::string& path, const TimeGrid& tg, const SpaceGrid& sg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

    Array2D field(static_cast<std::size_t>(tg.nt), static_cast<std::size_t>(sg.nx), 0.0);
    long row = 0;
    const long total = static_cast<long>(tg.nt) * sg.nx;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= total)
            throw std::runtime_error(path + ": more data rows than grid nodes (" +
                                     std::to_string(total) + " expected)");
        double t = 0.0, x = 0.0, v = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(line);
        if (!(ss >> t >> c1 >> x >> c2 >> v) || c1 != ',' || c2 != ',')
            throw std::runtime_error(path + ": malformed row " + std::to_string(row + 2));
        const int i = static_cast<int>(row / sg.nx);
        const int j = static_cast<int>(row % sg.nx);
        if (std::fabs(t - tg.t(i)) > 1e-9 || std::fabs(x - sg.x(j)) > 1e-9)
            throw std::runtime_error(path + ": row " + std::to_string(row + 2) +
                                     " does not match the configured grid");
        field(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        ++row;
    }
    if (row != total)
        throw std::runtime_error(path + ": " + std::to_string(row) + " data rows, expected " +
                                 std::to_string(total));
    return field;
}

inline json convergence_json(const ConvergenceReport& rep) {
    json j;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["tol"] = rep.tol;
    j["threshold"] = rep.threshold;
    j["terminal_increment"] = rep.terminal_increment;
    j["condition_L"] = rep.condition_L;
    j["within_proven_regime"] = rep.within_proven_regime;
    j["increments"] = rep.increments;
    j["ratios"] = rep.ratios;
    j["max_norms"] = rep.max_norms;
    return j;
}

inline json study_json(const ConvergenceStudy& study) {
    json j;
    j["case"] = study.case_id;
    j["target"] = study.target == StudyTarget::forward ? "forward" : "inverse";
    j["step_kind"] = study.step_kind;
    j["observed_order"] = study.observed_order;
    j["aborted"] = study.aborted;
    j["levels"] = json::array();
    for (const StudyLevel& l : study.levels)
        j["levels"].push_back(
            {{"nt", l.nt}, {"nx", l.nx}, {"error", l.error}, {"rel_error", l.rel_error}});
    return j;
}

/// Write pretty-printed JSON with a trailing newline.
inline void write_json(const std::string& path, const json& j) {
    std::ofstream out = detail::open_out(path);
    out << j.dump(2) << "\n";
}

/// FNV-1a 64-bit digest of a file's bytes.
inline std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for checksum: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace subdiff::io
