#pragma once

#include "flipmesh/error.hpp"
#include "flipmesh/mesh.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace flipmesh {

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

inline double parse_real(const std::string& tok, std::size_t line)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected a number, got '" + tok + "'");
    return v;
}

inline long long parse_integer(const std::string& tok, std::size_t line)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected an integer, got '" + tok + "'");
    return v;
}

// 17 significant digits: enough for any double to round-trip.
inline std::string format_real(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

/// Writes through a sibling temp file and renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out.flush())
            throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace detail

inline SurfaceMesh parse_off(std::istream& in)
{
    std::size_t line_no = 0;
    std::string line;
    // next non-empty, non-comment record
    auto next_record = [&](const char* expecting) {
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            auto toks = detail::split_tokens(line);
            if (!toks.empty())
                return toks;
        }
        throw ParseError(line_no + 1, std::string("unexpected end of file, expecting ") + expecting);
    };

    auto header = next_record("OFF header");
    std::size_t header_line = line_no;
    std::vector<std::string> counts;
    if (header[0] == "OFF") {
        counts.assign(header.begin() + 1, header.end());
        if (counts.empty())
            counts = next_record("counts line");
    } else if (header[0].rfind("OFF", 0) == 0) {
        throw ParseError(header_line, "unsupported OFF variant '" + header[0] + "'");
    } else {
        throw ParseError(header_line, "missing OFF header");
    }
    if (counts.size() < 2)
        throw ParseError(line_no, "counts line must be 'V F E'");
    const long long nv = detail::parse_integer(counts[0], line_no);
    const long long nf = detail::parse_integer(counts[1], line_no);
    if (nv < 0 || nf < 0)
        throw ParseError(line_no, "negative element count");

    std::vector<Point3> vertices;
    vertices.reserve(static_cast<std::size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        auto toks = next_record("vertex");
        if (toks.size() < 3)
            throw ParseError(line_no, "vertex needs 3 coordinates");
        Point3 p{detail::parse_real(toks[0], line_no), detail::parse_real(toks[1], line_no),
                 detail::parse_real(toks[2], line_no)};
        if (!is_finite(p))
            throw ParseError(line_no, "non-finite coordinate");
        vertices.push_back(p);
    }

    std::vector<std::array<VertexId, 3>> faces;
    faces.reserve(static_cast<std::size_t>(nf));
    for (long long i = 0; i < nf; ++i) {
        auto toks = next_record("face");
        const long long arity = detail::parse_integer(toks[0], line_no);
        if (arity != 3)
            throw NonTriangularFace(line_no, "face with " + std::to_string(arity) + " vertices");
        if (toks.size() < 4)
            throw ParseError(line_no, "face needs 3 indices");
        std::array<VertexId, 3> f{};
        for (int k = 0; k < 3; ++k) {
            const long long idx = detail::parse_integer(toks[static_cast<std::size_t>(k + 1)], line_no);
            if (idx < 0 || idx >= nv)
                throw ParseError(line_no, "vertex index " + std::to_string(idx) + " out of range");
            f[static_cast<std::size_t>(k)] = static_cast<VertexId>(idx);
        }
        faces.push_back(f);
    }
    return SurfaceMesh::from_triangles(std::move(vertices), faces);
}

inline SurfaceMesh load_off(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return parse_off(in);
}

inline std::string format_off(const SurfaceMesh& m)
{
    std::string out = "OFF\n";
    out += std::to_string(m.num_vertices()) + ' ' + std::to_string(m.num_faces()) + ' ' +
           std::to_string(m.num_edges()) + '\n';
    for (const Point3& p : m.positions())
        out += detail::format_real(p.x) + ' ' + detail::format_real(p.y) + ' ' + detail::format_real(p.z) + '\n';
    for (FaceId f = 0; f < static_cast<FaceId>(m.num_faces()); ++f) {
        const auto v = m.face_vertices(f);
        out += "3 " + std::to_string(v[0]) + ' ' + std::to_string(v[1]) + ' ' + std::to_string(v[2]) + '\n';
    }
    return out;
}

inline void save_off(const SurfaceMesh& m, const std::filesystem::path& path)
{
    detail::write_atomically(path, format_off(m));
}

/// OBJ import: "v x y z" and "f i j k" records only; everything else is ignored.
/// Face tokens may carry "/vt/vn" suffixes and negative (relative) indices.
inline SurfaceMesh parse_obj(std::istream& in)
{
    std::vector<Point3> vertices;
    std::vector<std::array<VertexId, 3>> faces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto toks = detail::split_tokens(line);
        if (toks.empty())
            continue;
        if (toks[0] == "v") {
            if (toks.size() < 4)
                throw ParseError(line_no, "vertex needs 3 coordinates");
            vertices.push_back({detail::parse_real(toks[1], line_no), detail::parse_real(toks[2], line_no),
                                detail::parse_real(toks[3], line_no)});
        } else if (toks[0] == "f") {
            if (toks.size() != 4)
                throw NonTriangularFace(line_no, "face with " + std::to_string(toks.size() - 1) + " vertices");
            std::array<VertexId, 3> f{};
            for (int k = 0; k < 3; ++k) {
                std::string tok = toks[static_cast<std::size_t>(k + 1)];
                tok = tok.substr(0, tok.find('/'));
                long long idx = detail::parse_integer(tok, line_no);
                const auto nv = static_cast<long long>(vertices.size());
                idx = idx < 0 ? nv + idx : idx - 1;
                if (idx < 0 || idx >= nv)
                    throw ParseError(line_no, "vertex index out of range");
                f[static_cast<std::size_t>(k)] = static_cast<VertexId>(idx);
            }
            faces.push_back(f);
        }
    }
    return SurfaceMesh::from_triangles(std::move(vertices), faces);
}

inline SurfaceMesh load_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return parse_obj(in);
}

} // namespace flipmesh
