#pragma once

#include "flipmesh/flipper.hpp"
#include "flipmesh/genex.hpp"
#include "flipmesh/verify.hpp"

#include <json.hpp>

#include <string>

namespace flipmesh {

using Json = nlohmann::ordered_json;

inline Json to_json(const Point3& p)
{
    return Json::array({p.x, p.y, p.z});
}

inline Json to_json(const Potential& p)
{
    return Json::array({p.area, p.volume});
}

inline Json to_json(const FlipRecord& r)
{
    Json j;
    j["step"] = r.step;
    j["before"] = Json::array({r.before[0], r.before[1]});
    j["after"] = Json::array({r.after[0], r.after[1]});
    j["area_delta"] = r.area_delta;
    j["volume_delta"] = r.volume_delta;
    return j;
}

inline Json to_json(const RoundDiagnostics& d)
{
    Json j;
    j["round"] = d.round;
    j["disks"] = d.disks;
    j["flips"] = d.flips;
    j["max_inner_edge"] = d.max_inner_edge;
    j["inner_bound"] = d.inner_bound;
    j["max_ring_edge"] = d.max_ring_edge;
    j["ring_bound"] = d.ring_bound;
    j["ring_bound_exceeded"] = d.ring_bound_exceeded;
    return j;
}

/// Report document. The wall time is the only non-deterministic field and is opt-in.
inline Json to_json(const RunReport& r, bool include_timing = false)
{
    Json j;
    j["status"] = std::string(to_string(r.status));
    Json flips = Json::array();
    for (const FlipRecord& f : r.flips)
        flips.push_back(to_json(f));
    j["flips"] = std::move(flips);
    Json trace = Json::array();
    for (const Potential& p : r.potential_trace)
        trace.push_back(to_json(p));
    j["potential_trace"] = std::move(trace);
    Json remaining = Json::array();
    for (const VertexPair& e : r.remaining_violations)
        remaining.push_back(Json::array({e[0], e[1]}));
    j["remaining_violations"] = std::move(remaining);
    Json rounds = Json::array();
    for (const RoundDiagnostics& d : r.rounds)
        rounds.push_back(to_json(d));
    j["rounds"] = std::move(rounds);
    Json skipped = Json::array();
    for (const VertexPair& e : r.skipped_edges)
        skipped.push_back(Json::array({e[0], e[1]}));
    j["skipped_edges"] = std::move(skipped);
    j["descent_violations"] = r.descent_violations;
    j["initial_potential"] = to_json(r.initial_potential);
    j["final_potential"] = to_json(r.final_potential);
    j["diagnostics"] = r.diagnostics;
    if (include_timing)
        j["wall_time_seconds"] = r.wall_time_seconds;
    return j;
}

inline Json to_json(const DelaunayCheck& d, const SurfaceMesh& m)
{
    Json j;
    j["ok"] = d.ok;
    j["strict"] = d.strict;
    j["non_strict_edges"] = d.non_strict_edges;
    Json v = Json::array();
    for (EdgeRef e : d.violations) {
        const auto p = m.edge_vertices(e);
        v.push_back(Json::array({p[0], p[1]}));
    }
    j["violations"] = std::move(v);
    return j;
}

inline Json to_json(const EmbeddingCheck& e)
{
    Json j;
    j["ok"] = e.ok;
    Json pairs = Json::array();
    for (const auto& [f, g] : e.offending_pairs)
        pairs.push_back(Json::array({f, g}));
    j["offending_pairs"] = std::move(pairs);
    return j;
}

inline Json to_json(const DensityResult& d)
{
    Json j;
    j["dense"] = d.dense;
    j["worst_center"] = to_json(d.worst_center);
    j["worst_distance"] = d.worst_distance;
    j["samples"] = d.samples;
    return j;
}

inline Json to_json(const FlatnessResult& f)
{
    Json j;
    j["flat"] = f.flat;
    j["non_strict"] = f.non_strict;
    j["worst_point"] = f.worst_point;
    j["worst_triple"] = Json::array({f.worst_triple[0], f.worst_triple[1], f.worst_triple[2]});
    j["worst_angle"] = f.worst_angle;
    j["plane_normal"] = to_json(f.worst_plane.unit_normal);
    j["sampled"] = f.sampled;
    return j;
}

inline Json to_json(const Pi8Result& p)
{
    Json j;
    j["ok"] = p.ok;
    j["worst_angle"] = p.worst_angle;
    j["worst_triple"] = Json::array({p.worst_triple[0], p.worst_triple[1], p.worst_triple[2]});
    j["plane_normal"] = to_json(p.plane.unit_normal);
    j["sampled"] = p.sampled;
    return j;
}

inline Json to_json(const ConditionReport& c)
{
    Json j = Json::object();
    if (c.density)
        j["dense"] = to_json(*c.density);
    if (c.flatness)
        j["flat"] = to_json(*c.flatness);
    if (c.pi8)
        j["pi8"] = to_json(*c.pi8);
    return j;
}

inline Json to_json(const ThinExampleReport& r)
{
    Json j;
    j["faces"] = r.faces;
    j["thin_faces"] = r.thin_faces;
    j["thin_fraction"] = r.thin_fraction;
    j["min_angle"] = r.min_angle;
    j["delaunay"] = r.delaunay;
    j["strict"] = r.strict;
    j["non_strict_edges"] = r.non_strict_edges;
    j["embedded"] = r.embedded;
    j["flips"] = r.flips;
    j["tangency_hausdorff"] = r.tangency_hausdorff;
    return j;
}

inline Json to_json(const Measurement& m)
{
    Json j;
    j["delta"] = m.delta;
    j["theta"] = m.theta;
    j["r"] = m.r;
    return j;
}

inline Json to_json(const SurfaceSpec& s)
{
    Json j;
    j["kind"] = std::string(to_string(s.kind));
    switch (s.kind) {
    case SurfaceKind::Monge:
        j["function"] = std::string(to_string(s.function));
        j["amplitude"] = s.amplitude;
        j["frequency"] = s.frequency;
        j["grid"] = s.grid;
        j["extent"] = s.extent;
        break;
    case SurfaceKind::Sphere:
        j["radius"] = s.radius;
        j["level"] = s.level;
        break;
    case SurfaceKind::Torus:
        j["radius"] = s.radius;
        j["minor_radius"] = s.minor_radius;
        j["grid"] = s.grid;
        j["grid_minor"] = s.grid_minor;
        break;
    }
    j["jitter"] = s.jitter;
    j["tangential_jitter"] = s.tangential_jitter;
    j["seed"] = s.seed;
    return j;
}

/// Parses a surface spec; unknown keys are rejected so typos do not pass silently.
inline SurfaceSpec surface_spec_from_json(const Json& j)
{
    SurfaceSpec s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "monge")
        s.kind = SurfaceKind::Monge;
    else if (kind == "sphere")
        s.kind = SurfaceKind::Sphere;
    else if (kind == "torus")
        s.kind = SurfaceKind::Torus;
    else
        throw PreconditionViolated("unknown surface kind '" + kind + "'");

    for (const auto& [key, value] : j.items()) {
        if (key == "kind")
            continue;
        else if (key == "function") {
            const std::string f = value.get<std::string>();
            if (f == "zero")
                s.function = MongeFunction::Zero;
            else if (f == "sincos")
                s.function = MongeFunction::SinCos;
            else if (f == "paraboloid")
                s.function = MongeFunction::Paraboloid;
            else
                throw PreconditionViolated("unknown monge function '" + f + "'");
        } else if (key == "amplitude")
            s.amplitude = value.get<double>();
        else if (key == "frequency")
            s.frequency = value.get<double>();
        else if (key == "grid")
            s.grid = value.get<int>();
        else if (key == "extent")
            s.extent = value.get<double>();
        else if (key == "radius")
            s.radius = value.get<double>();
        else if (key == "level")
            s.level = value.get<int>();
        else if (key == "minor_radius")
            s.minor_radius = value.get<double>();
        else if (key == "grid_minor")
            s.grid_minor = value.get<int>();
        else if (key == "jitter")
            s.jitter = value.get<double>();
        else if (key == "tangential_jitter")
            s.tangential_jitter = value.get<double>();
        else if (key == "seed")
            s.seed = value.get<std::uint64_t>();
        else
            throw PreconditionViolated("unknown spec key '" + key + "'");
    }
    return s;
}

} // namespace flipmesh
