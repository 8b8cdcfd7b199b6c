#pragma once

#include "flipmesh/geom.hpp"
#include "flipmesh/mesh.hpp"
#include "flipmesh/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flipmesh {

enum class Strategy
{
    GreedyMaxViolation,
    Fifo
};

constexpr std::string_view to_string(Strategy s) noexcept
{
    return s == Strategy::Fifo ? "fifo" : "greedy";
}

struct FlipConfig
{
    Strategy strategy = Strategy::GreedyMaxViolation;
    /// Also switch non-coplanar NonStrict edges, aiming for an all-Strict result.
    bool strict_mode = false;
    /// Defaults to 100 * (edge count).
    std::optional<std::size_t> max_steps;
    Tolerances tol;
    /// Nonzero seeds shuffle the initial Fifo order; greedy order is fully determined by the mesh.
    std::uint64_t seed = 0;
};

enum class RunStatus
{
    Delaunay,
    StrictDelaunay,
    StepLimit,
    /// Violated edges remain, none of which can be switched (would duplicate an edge).
    Blocked
};

constexpr std::string_view to_string(RunStatus s) noexcept
{
    switch (s) {
    case RunStatus::Delaunay: return "Delaunay";
    case RunStatus::StrictDelaunay: return "StrictDelaunay";
    case RunStatus::StepLimit: return "StepLimit";
    case RunStatus::Blocked: return "Blocked";
    }
    return "?";
}

/// Edge-length bookkeeping of one scheduling round.
struct RoundDiagnostics
{
    std::size_t round = 0;
    std::size_t disks = 0;
    std::size_t flips = 0;
    double max_inner_edge = 0.0; ///< longest edge with both ends deep inside some disk
    double max_ring_edge = 0.0;  ///< longest edge touching the ring around some disk boundary
    double inner_bound = 0.0;
    double ring_bound = 0.0;
    bool ring_bound_exceeded = false;
};

struct RunReport
{
    RunStatus status = RunStatus::Delaunay;
    std::vector<FlipRecord> flips;
    std::vector<Potential> potential_trace; ///< initial potential followed by one entry per flip
    Potential initial_potential;
    Potential final_potential;
    std::vector<VertexPair> remaining_violations;
    std::vector<VertexPair> skipped_edges; ///< violated edges met but not switchable
    std::size_t descent_violations = 0;
    std::vector<RoundDiagnostics> rounds;
    std::vector<std::string> diagnostics;
    double wall_time_seconds = 0.0;
};

/// An edge waiting to be switched.
struct Candidate
{
    EdgeRef edge;
    double excess = 0.0; ///< opposite angle sum minus pi
    std::uint64_t enqueue_order = 0;
};

namespace detail {

// Greedy: larger excess first, then smaller canonical index.
inline bool greedy_before(const Candidate& l, const Candidate& r) noexcept
{
    if (l.excess != r.excess)
        return l.excess > r.excess;
    return l.edge.index < r.edge.index;
}

} // namespace detail

/// Picks the next edge to switch. Candidates must be nonempty.
inline EdgeRef select_edge(const FlipConfig& cfg, std::span<const Candidate> candidates)
{
    if (candidates.empty())
        throw PreconditionViolated("select_edge: no candidates");
    if (cfg.strategy == Strategy::Fifo)
        return std::min_element(candidates.begin(), candidates.end(),
                                [](const Candidate& l, const Candidate& r) {
                                    return l.enqueue_order < r.enqueue_order;
                                })
            ->edge;
    return std::min_element(candidates.begin(), candidates.end(), detail::greedy_before)->edge;
}

/// Opposite angle sum across an interior edge, without the degeneracy gate.
inline double opposite_angle_sum(const SurfaceMesh& m, EdgeRef e)
{
    const EdgeQuad q = m.quad(e);
    return detail::interior_angle(q.a, q.b, q.d) + detail::interior_angle(q.c, q.b, q.d);
}

inline DelaunayKind classify_mesh_edge(const SurfaceMesh& m, EdgeRef e, const Tolerances& tol = {})
{
    return classify_angle_sum(opposite_angle_sum(m, e), tol);
}

namespace detail {

// Would switching e make progress under cfg? Violated edges always qualify; in strict mode a
// NonStrict edge qualifies when its quad is clearly non-coplanar and the area drops measurably.
inline bool wants_flip(const SurfaceMesh& m, EdgeRef e, double sum, const FlipConfig& cfg)
{
    const DelaunayKind kind = classify_angle_sum(sum, cfg.tol);
    if (kind == DelaunayKind::Violated)
        return true;
    if (!cfg.strict_mode || kind != DelaunayKind::NonStrict)
        return false;
    const EdgeQuad q = m.quad(e);
    if (coplanarity_residual(q) <= 10.0 * cfg.tol.plane)
        return false;
    const double before = triangle_area(q.a, q.b, q.d) + triangle_area(q.b, q.c, q.d);
    const double after = triangle_area(q.a, q.b, q.c) + triangle_area(q.a, q.c, q.d);
    const double diag = bbox_diagonal({q.a, q.b, q.c, q.d});
    return before - after > cfg.tol.area * diag * diag;
}

inline std::array<EdgeRef, 4> quad_sides(const SurfaceMesh& m, EdgeRef e)
{
    const HalfEdgeId h = e.index;
    const HalfEdgeId t = m.twin(h);
    return {m.edge_of(m.next(h)), m.edge_of(m.next(m.next(h))), m.edge_of(m.next(t)), m.edge_of(m.next(m.next(t)))};
}

inline std::size_t default_max_steps(const SurfaceMesh& m)
{
    return std::max<std::size_t>(1, 100 * m.num_edges());
}

/// Running (area, volume) kept in step with the mesh; recomputed from scratch periodically.
class PotentialTracker
{
public:
    explicit PotentialTracker(const SurfaceMesh& m)
        : current_(potential(m))
    {}

    void apply(const SurfaceMesh& m, const FlipRecord& r)
    {
        area_.add(r.area_delta);
        volume_.add(r.volume_delta);
        if (++since_refresh_ == kRefreshInterval) {
            current_ = potential(m);
            area_ = {};
            volume_ = {};
            since_refresh_ = 0;
        }
    }

    Potential value() const noexcept
    {
        return {current_.area + area_.value(), current_.volume + volume_.value()};
    }

private:
    static constexpr std::size_t kRefreshInterval = 1024;
    Potential current_;
    CompensatedSum area_;
    CompensatedSum volume_;
    std::size_t since_refresh_ = 0;
};

// Shared state for one run of the switching loop.
struct FlipSession
{
    SurfaceMesh& mesh;
    const FlipConfig& cfg;
    RunReport& report;
    PotentialTracker& tracker;
    std::size_t max_steps;

    bool exhausted() const noexcept { return report.flips.size() >= max_steps; }

    void perform(EdgeRef e)
    {
        FlipRecord rec = flip(mesh, e, report.flips.size());
        if (!satisfies_descent(rec, cfg.tol.area)) {
            ++report.descent_violations;
            report.diagnostics.push_back("descent violated at step " + std::to_string(rec.step));
        }
        tracker.apply(mesh, rec);
        report.potential_trace.push_back(tracker.value());
        report.flips.push_back(rec);
    }

    void skip(EdgeRef e)
    {
        const VertexPair v = mesh.edge_vertices(e);
        const VertexPair key{std::min(v[0], v[1]), std::max(v[0], v[1])};
        if (std::find(report.skipped_edges.begin(), report.skipped_edges.end(), key) == report.skipped_edges.end())
            report.skipped_edges.push_back(key);
    }
};

// Switches edges accepted by `allowed` until none qualifies or the step budget runs out.
// Returns the number of switches performed.
inline std::size_t run_flips(FlipSession& s, const std::function<bool(EdgeRef)>& allowed)
{
    SurfaceMesh& m = s.mesh;
    const std::size_t start = s.report.flips.size();
    const auto nh = m.num_half_edges();

    auto eligible = [&](EdgeRef e) { return !m.is_boundary_edge(e) && allowed(e); };

    std::vector<EdgeRef> initial;
    for (EdgeRef e : m.edges())
        if (eligible(e))
            initial.push_back(e);

    if (s.cfg.strategy == Strategy::Fifo) {
        if (s.cfg.seed != 0) {
            // Fisher-Yates driven by the counter generator
            const CounterRng rng(s.cfg.seed, 1);
            for (std::size_t i = initial.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(rng.bits(i) % i);
                std::swap(initial[i - 1], initial[j]);
            }
        }
        std::deque<EdgeRef> queue;
        std::vector<char> queued(nh, 0);
        for (EdgeRef e : initial) {
            queue.push_back(e);
            queued[static_cast<std::size_t>(e.index)] = 1;
        }
        bool progress = true;
        while (progress) {
            progress = false;
            while (!queue.empty() && !s.exhausted()) {
                const EdgeRef e = queue.front();
                queue.pop_front();
                queued[static_cast<std::size_t>(e.index)] = 0;
                if (!wants_flip(m, e, opposite_angle_sum(m, e), s.cfg))
                    continue;
                if (!flippable(m, e)) {
                    s.skip(e);
                    continue;
                }
                s.perform(e);
                progress = true;
                for (EdgeRef side : quad_sides(m, e))
                    if (eligible(side) && !queued[static_cast<std::size_t>(side.index)]) {
                        queue.push_back(side);
                        queued[static_cast<std::size_t>(side.index)] = 1;
                    }
            }
            if (s.exhausted())
                break;
            // drained: rescan in case a skipped edge became switchable
            for (EdgeRef e : m.edges())
                if (eligible(e) && wants_flip(m, e, opposite_angle_sum(m, e), s.cfg) && flippable(m, e)) {
                    queue.push_back(e);
                    queued[static_cast<std::size_t>(e.index)] = 1;
                    progress = true;
                }
        }
        return s.report.flips.size() - start;
    }

    struct Entry
    {
        Candidate c;
        std::uint32_t version;
    };
    // std::priority_queue pops the "largest"; invert the greedy order
    auto cmp = [](const Entry& l, const Entry& r) { return greedy_before(r.c, l.c); };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    std::vector<std::uint32_t> version(nh, 0);
    std::uint64_t order = 0;

    auto push = [&](EdgeRef e) {
        const double sum = opposite_angle_sum(m, e);
        if (wants_flip(m, e, sum, s.cfg))
            heap.push({{e, sum - std::numbers::pi, order++}, version[static_cast<std::size_t>(e.index)]});
    };
    for (EdgeRef e : initial)
        push(e);

    bool progress = true;
    while (progress) {
        progress = false;
        while (!heap.empty() && !s.exhausted()) {
            const Entry top = heap.top();
            heap.pop();
            const EdgeRef e = top.c.edge;
            if (top.version != version[static_cast<std::size_t>(e.index)])
                continue;
            if (!flippable(m, e)) {
                s.skip(e);
                continue;
            }
            s.perform(e);
            progress = true;
            ++version[static_cast<std::size_t>(e.index)];
            const auto sides = quad_sides(m, e);
            for (EdgeRef side : sides)
                ++version[static_cast<std::size_t>(side.index)];
            push(e);
            for (EdgeRef side : sides)
                if (eligible(side))
                    push(side);
        }
        if (s.exhausted())
            break;
        for (EdgeRef e : m.edges())
            if (eligible(e) && wants_flip(m, e, opposite_angle_sum(m, e), s.cfg) && flippable(m, e)) {
                ++version[static_cast<std::size_t>(e.index)];
                push(e);
                progress = true;
            }
    }
    return s.report.flips.size() - start;
}

inline bool any_pending(const SurfaceMesh& m, const FlipConfig& cfg, const std::function<bool(EdgeRef)>& allowed)
{
    for (EdgeRef e : m.edges())
        if (!m.is_boundary_edge(e) && allowed(e) && wants_flip(m, e, opposite_angle_sum(m, e), cfg) && flippable(m, e))
            return true;
    return false;
}

// Independent final scan: fills remaining violations and decides the status.
inline void finish_report(const SurfaceMesh& m, const FlipConfig& cfg, const PotentialTracker& tracker,
                          std::size_t max_steps, RunReport& report,
                          const std::function<bool(EdgeRef)>& allowed = [](EdgeRef) { return true; })
{
    report.final_potential = tracker.value();
    report.remaining_violations.clear();
    bool all_strict = true;
    for (EdgeRef e : m.edges()) {
        if (m.is_boundary_edge(e) || !allowed(e))
            continue;
        const DelaunayKind kind = classify_mesh_edge(m, e, cfg.tol);
        if (kind == DelaunayKind::Violated)
            report.remaining_violations.push_back(m.edge_vertices(e));
        if (kind != DelaunayKind::Strict)
            all_strict = false;
    }
    if (report.flips.size() >= max_steps && any_pending(m, cfg, allowed))
        report.status = RunStatus::StepLimit;
    else if (!report.remaining_violations.empty())
        report.status = RunStatus::Blocked;
    else if (cfg.strict_mode && all_strict)
        report.status = RunStatus::StrictDelaunay;
    else
        report.status = RunStatus::Delaunay;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Switches Delaunay-violating edges until none is left. Every switch strictly decreases
/// (area, -ideal volume) lexicographically, so the loop terminates; `max_steps` is a safety net.
inline RunReport delaunayify(SurfaceMesh& m, const FlipConfig& cfg = {})
{
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    detail::PotentialTracker tracker(m);
    report.initial_potential = tracker.value();
    report.potential_trace.push_back(report.initial_potential);
    const std::size_t max_steps = cfg.max_steps.value_or(detail::default_max_steps(m));
    detail::FlipSession session{m, cfg, report, tracker, max_steps};
    detail::run_flips(session, [](EdgeRef) { return true; });
    detail::finish_report(m, cfg, tracker, max_steps, report);
    report.wall_time_seconds = detail::seconds_since(t0);
    return report;
}

namespace detail {

inline double point_triangle_distance(const Point3& p, const Triangle3& t)
{
    // Ericson, closest point on triangle
    const Vec3 ab = t.b - t.a, ac = t.c - t.a, ap = p - t.a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0)
        return distance(p, t.a);
    const Vec3 bp = p - t.b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3)
        return distance(p, t.b);
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0)
        return distance(p, t.a + (d1 / (d1 - d3)) * ab);
    const Vec3 cp = p - t.c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6)
        return distance(p, t.c);
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0)
        return distance(p, t.a + (d2 / (d2 - d6)) * ac);
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return distance(p, t.b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (t.c - t.b));
    const double denom = 1.0 / (va + vb + vc);
    return distance(p, t.a + (vb * denom) * ab + (vc * denom) * ac);
}

/// Face membership of the patch around (center, r): faces meeting the closed r-ball, plus the
/// complementary components that are enclosed by them (within 2r, away from the mesh boundary).
inline std::vector<char> patch_faces(const SurfaceMesh& m, const Point3& center, double r)
{
    const auto nf = static_cast<FaceId>(m.num_faces());
    std::vector<char> in_patch(static_cast<std::size_t>(nf), 0);
    bool any = false;
    for (FaceId f = 0; f < nf; ++f)
        if (point_triangle_distance(center, m.face_triangle(f)) <= r) {
            in_patch[static_cast<std::size_t>(f)] = 1;
            any = true;
        }
    if (!any)
        return in_patch;

    std::vector<char> seen(in_patch);
    std::vector<FaceId> component;
    for (FaceId f0 = 0; f0 < nf; ++f0) {
        if (seen[static_cast<std::size_t>(f0)])
            continue;
        component.clear();
        component.push_back(f0);
        seen[static_cast<std::size_t>(f0)] = 1;
        bool enclosed = true;
        for (std::size_t i = 0; i < component.size(); ++i) {
            const FaceId f = component[i];
            HalfEdgeId h = m.face_half_edge(f);
            for (int k = 0; k < 3; ++k, h = m.next(h)) {
                if (distance(m.position(m.origin(h)), center) > 2.0 * r)
                    enclosed = false;
                const FaceId g = m.face(m.twin(h));
                if (g == kBoundaryFace) {
                    enclosed = false;
                    continue;
                }
                if (!seen[static_cast<std::size_t>(g)]) {
                    seen[static_cast<std::size_t>(g)] = 1;
                    component.push_back(g);
                }
            }
        }
        if (enclosed)
            for (FaceId f : component)
                in_patch[static_cast<std::size_t>(f)] = 1;
    }
    return in_patch;
}

} // namespace detail

/// Runs the switching loop restricted to the patch around `center`: only edges with both
/// faces in the patch may switch, so the patch boundary is never touched. Throws EmptyPatch
/// when no face meets the ball.
inline RunReport local_delaunayify(SurfaceMesh& m, const Point3& center, double r, const FlipConfig& cfg = {})
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<char> in_patch = detail::patch_faces(m, center, r);
    if (std::find(in_patch.begin(), in_patch.end(), 1) == in_patch.end())
        throw EmptyPatch("no face within distance " + std::to_string(r) + " of the center");

    RunReport report;
    detail::PotentialTracker tracker(m);
    report.initial_potential = tracker.value();
    report.potential_trace.push_back(report.initial_potential);
    const std::size_t max_steps = cfg.max_steps.value_or(detail::default_max_steps(m));
    detail::FlipSession session{m, cfg, report, tracker, max_steps};
    // switches keep the two face ids of an edge, so membership by face id stays valid
    const auto inside = [&](EdgeRef e) {
        return in_patch[static_cast<std::size_t>(m.face(e.index))] &&
               in_patch[static_cast<std::size_t>(m.face(m.twin(e.index)))];
    };
    detail::run_flips(session, inside);
    detail::finish_report(m, cfg, tracker, max_steps, report, inside);
    report.wall_time_seconds = detail::seconds_since(t0);
    return report;
}

namespace detail {

inline Point3 face_barycenter(const SurfaceMesh& m, FaceId f)
{
    const Triangle3 t = m.face_triangle(f);
    return (t.a + t.b + t.c) / 3.0;
}

// Greedy maximal family of seeds with pairwise center distance >= 2r. Faces next to a
// switchable violated edge are considered first so every round makes progress.
inline std::vector<Point3> disk_family(const SurfaceMesh& m, double r, const FlipConfig& cfg)
{
    const auto nf = static_cast<FaceId>(m.num_faces());
    std::vector<char> urgent(static_cast<std::size_t>(nf), 0);
    for (EdgeRef e : m.edges()) {
        if (m.is_boundary_edge(e) || !wants_flip(m, e, opposite_angle_sum(m, e), cfg) || !flippable(m, e))
            continue;
        urgent[static_cast<std::size_t>(m.face(e.index))] = 1;
        urgent[static_cast<std::size_t>(m.face(m.twin(e.index)))] = 1;
    }
    std::vector<FaceId> order;
    order.reserve(static_cast<std::size_t>(nf));
    for (FaceId f = 0; f < nf; ++f)
        if (urgent[static_cast<std::size_t>(f)])
            order.push_back(f);
    for (FaceId f = 0; f < nf; ++f)
        if (!urgent[static_cast<std::size_t>(f)])
            order.push_back(f);

    std::vector<Point3> centers;
    for (FaceId f : order) {
        const Point3 c = face_barycenter(m, f);
        const bool disjoint = std::all_of(centers.begin(), centers.end(),
                                          [&](const Point3& o) { return distance(o, c) >= 2.0 * r; });
        if (disjoint)
            centers.push_back(c);
    }
    return centers;
}

inline void measure_rings(const SurfaceMesh& m, std::span<const Point3> centers, double r, double eps,
                          RoundDiagnostics& d)
{
    d.inner_bound = eps;
    d.ring_bound = (d.round <= 1 ? 2.0 : 4.0) * eps;
    for (EdgeRef e : m.edges()) {
        const auto v = m.edge_vertices(e);
        const Point3& p = m.position(v[0]);
        const Point3& q = m.position(v[1]);
        const double len = distance(p, q);
        for (const Point3& c : centers) {
            const double dp = distance(p, c);
            const double dq = distance(q, c);
            if (dp <= r - eps && dq <= r - eps)
                d.max_inner_edge = std::max(d.max_inner_edge, len);
            auto in_ring = [&](double x) { return x >= r - 3.0 * eps && x <= r + eps; };
            if (in_ring(dp) || in_ring(dq))
                d.max_ring_edge = std::max(d.max_ring_edge, len);
        }
    }
    d.ring_bound_exceeded = d.max_inner_edge > d.inner_bound || d.max_ring_edge > d.ring_bound;
}

} // namespace detail

/// Local-to-global driver: each round picks a maximal family of disjoint r-disks and makes each
/// patch Delaunay; stops after a round without switches. Edge lengths inside and around the disks
/// are measured against the eps / 2eps / 4eps bounds and reported, never enforced.
inline RunReport global_schedule(SurfaceMesh& m, double r, double eps, const FlipConfig& cfg = {})
{
    if (!(r > 0.0) || !(eps > 0.0))
        throw PreconditionViolated("global_schedule: r and eps must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    detail::PotentialTracker tracker(m);
    report.initial_potential = tracker.value();
    report.potential_trace.push_back(report.initial_potential);
    const std::size_t max_steps = cfg.max_steps.value_or(detail::default_max_steps(m));

    const EdgeLengthStats lengths = edge_lengths(m, 1);
    if (lengths.max >= eps)
        report.diagnostics.push_back("initial edge length " + std::to_string(lengths.max) + " is not below eps");

    detail::FlipSession session{m, cfg, report, tracker, max_steps};
    for (std::size_t round = 1;; ++round) {
        const std::vector<Point3> centers = detail::disk_family(m, r, cfg);
        RoundDiagnostics diag;
        diag.round = round;
        diag.disks = centers.size();
        for (const Point3& c : centers) {
            if (session.exhausted())
                break;
            const std::vector<char> in_patch = detail::patch_faces(m, c, r);
            diag.flips += detail::run_flips(session, [&](EdgeRef e) {
                return in_patch[static_cast<std::size_t>(m.face(e.index))] &&
                       in_patch[static_cast<std::size_t>(m.face(m.twin(e.index)))];
            });
        }
        detail::measure_rings(m, centers, r, eps, diag);
        if (diag.ring_bound_exceeded)
            report.diagnostics.push_back("RingBoundExceeded in round " + std::to_string(round));
        report.rounds.push_back(diag);
        if (diag.flips == 0 || session.exhausted())
            break;
    }
    detail::finish_report(m, cfg, tracker, max_steps, report);
    report.wall_time_seconds = detail::seconds_since(t0);
    return report;
}

} // namespace flipmesh
