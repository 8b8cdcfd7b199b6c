// Acceptance run: one [PASS]/[FAIL] line per criterion.
// Exit status is the number of failures not fully explained by the known causes below.

#include "flipmesh/flipmesh.hpp"
#include "flipmesh/report_json.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <CLI11.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace flipmesh;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

// 3: near-equality in the area inequality is second order in the out-of-plane offset (a planar
//    convex quad has equal areas for both diagonals), so a 1e-9 gap allows residuals near 1e-5.
// 8: the corner quads of the equilateral construction are isosceles trapezoids, hence exactly
//    cyclic, so the output is Delaunay but not strict.
struct Outcome
{
    bool pass = true;
    std::string detail;
    bool known = false; ///< failed only on its known cause; every other clause holds
};

struct Criterion
{
    int id;
    std::string title;
    double budget_seconds; ///< 0: no budget
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- 1, 2: descent and termination on generated surfaces

struct SurfaceRun
{
    std::string label;
    std::size_t vertices = 0;
    std::size_t edges = 0;
    RunReport report;
    bool rescan_ok = false;
    std::size_t descent_failures = 0;
};

std::vector<SurfaceRun> surface_runs;

void ensure_surface_runs()
{
    if (!surface_runs.empty())
        return;
    for (std::uint64_t i = 0; i < 50; ++i) {
        SurfaceSpec s;
        s.seed = 1000 + i;
        if (i % 2 == 0) {
            s.kind = SurfaceKind::Monge;
            s.function = i % 4 == 0 ? MongeFunction::SinCos : MongeFunction::Paraboloid;
            s.amplitude = 0.3;
            s.grid = 15 + static_cast<int>(i % 17); // 225 .. 961 vertices
            s.jitter = 0.3;
        } else {
            s.kind = SurfaceKind::Sphere;
            s.level = 3; // 642 vertices
            s.jitter = 0.05;
            s.tangential_jitter = 0.3;
        }
        SurfaceMesh m = generate(s, false).mesh;
        SurfaceRun run;
        run.label = std::string(to_string(s.kind)) + " seed " + std::to_string(s.seed);
        run.vertices = m.num_vertices();
        run.edges = m.num_edges();
        FlipConfig cfg;
        cfg.strategy = i % 3 == 0 ? Strategy::Fifo : Strategy::GreedyMaxViolation;
        cfg.seed = i;
        run.report = delaunayify(m, cfg);
        for (const FlipRecord& r : run.report.flips)
            run.descent_failures += satisfies_descent(r, 1e-12) ? 0 : 1;
        Tolerances strict_angle;
        strict_angle.angle = 1e-9;
        run.rescan_ok = is_delaunay(m, strict_angle).ok;
        surface_runs.push_back(std::move(run));
    }
}

Outcome descent()
{
    ensure_surface_runs();
    std::size_t flips = 0, failures = 0, reported = 0, vmin = ~std::size_t{0}, vmax = 0;
    for (const SurfaceRun& r : surface_runs) {
        flips += r.report.flips.size();
        failures += r.descent_failures;
        reported += r.report.descent_violations;
        vmin = std::min(vmin, r.vertices);
        vmax = std::max(vmax, r.vertices);
    }
    return {failures == 0 && reported == 0,
            fmt("%zu runs, %zu-%zu vertices, %zu flips, %zu descent violations", surface_runs.size(), vmin, vmax,
                flips, failures)};
}

Outcome termination()
{
    ensure_surface_runs();
    Outcome out;
    std::size_t reached = 0, rescanned = 0;
    double worst_ratio = 0.0;
    for (const SurfaceRun& r : surface_runs) {
        const bool done = r.report.status == RunStatus::Delaunay || r.report.status == RunStatus::StrictDelaunay;
        reached += done ? 1 : 0;
        rescanned += r.rescan_ok ? 1 : 0;
        worst_ratio = std::max(worst_ratio, static_cast<double>(r.report.flips.size()) / static_cast<double>(r.edges));
        if (!done || !r.rescan_ok) {
            out.pass = false;
            out.detail += r.label + " ended " + std::string(to_string(r.report.status)) + "; ";
        }
    }
    out.detail += fmt("%zu/%zu Delaunay, %zu/%zu clean re-scans, max flips/edges %.3f", reached, surface_runs.size(),
                      rescanned, surface_runs.size(), worst_ratio);
    if (worst_ratio > 10.0) {
        out.pass = false;
        out.detail += " (above 10)";
    }
    return out;
}

// ---- 3, 4: quad properties

Outcome area_inequality()
{
    const CounterRng rng(3);
    std::uint64_t k = 0;
    Tolerances tol;
    tol.area = 1e-12;
    std::size_t violations = 0, near_equal = 0, bad_near_equal = 0, oracle_disagree = 0;
    double worst_excess = -1e300, worst_residual = 0.0, min_quadratic = 1e300;
    for (int i = 0; i < 100000; ++i) {
        const EdgeQuad q = fixture::quad_with_sum_at_least_pi(rng, k);
        const AreaComparison c = area_pair_inequality(q, tol);
        violations += c.holds ? 0 : 1;
        const double lhs = oracle::heron_area(q.a, q.b, q.c) + oracle::heron_area(q.a, q.d, q.c);
        const double rhs = oracle::heron_area(q.a, q.b, q.d) + oracle::heron_area(q.b, q.c, q.d);
        oracle_disagree += std::abs((lhs - rhs) - (c.lhs - c.rhs)) <= 1e-12 * c.scale ? 0 : 1;
        worst_excess = std::max(worst_excess, (c.lhs - c.rhs) / c.scale);
        const double res = coplanarity_residual(q);
        if (res > 1e-6)
            min_quadratic = std::min(min_quadratic, (c.rhs - c.lhs) / c.scale / (res * res));
        if (c.lhs >= c.rhs - 1e-9 * c.scale) {
            ++near_equal;
            worst_residual = std::max(worst_residual, res);
            bad_near_equal += res <= 1e-6 ? 0 : 1;
        }
    }
    const bool rest = violations == 0 && oracle_disagree == 0;
    return {rest && bad_near_equal == 0,
            fmt("1e5 quads, %zu inequality violations, max (lhs-rhs)/scale %.3g, %zu near-equal (%zu with residual > "
                "1e-6, max residual %.3g), %zu oracle disagreements; gap >= %.3g * residual^2, so a 1e-9 gap bounds "
                "the residual only by %.2g",
                violations, worst_excess, near_equal, bad_near_equal, worst_residual, oracle_disagree, min_quadratic,
                std::sqrt(1e-9 / min_quadratic)),
            rest};
}

Outcome flip_creates_strict()
{
    const CounterRng rng(4);
    std::uint64_t k = 0;
    std::size_t failures = 0;
    for (int i = 0; i < 100000; ++i) {
        const EdgeQuad q = fixture::violated_quad(rng, k);
        failures += classify_edge(q.flipped()).kind == DelaunayKind::Strict ? 0 : 1;
    }
    const CounterRng skew_rng(44);
    std::uint64_t sk = 0;
    std::size_t tested = 0, skew_failures = 0;
    while (tested < 10000) {
        const EdgeQuad q = fixture::skew_nonstrict_quad(skew_rng, sk);
        if (classify_edge(q).kind != DelaunayKind::NonStrict || coplanarity_residual(q) <= 1e-6)
            continue;
        ++tested;
        skew_failures += classify_edge(q.flipped()).kind == DelaunayKind::Strict ? 0 : 1;
    }
    return {failures == 0 && skew_failures == 0,
            fmt("1e5 violated quads: %zu failures; %zu non-coplanar NonStrict quads: %zu failures", failures, tested,
                skew_failures)};
}

// ---- 5: planar oracle

Outcome planar_oracle()
{
    std::size_t circumdisk_failures = 0, hard = 0, soft = 0, not_done = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const fixture::ConvexSet s = fixture::convex_set(seed, 12);
        RunReport run;
        const PlanarTriangulation flipped = planar_delaunay_flip(s.points, {}, &run);
        not_done += run.status == RunStatus::Delaunay || run.status == RunStatus::StrictDelaunay ? 0 : 1;
        circumdisk_failures += empty_circumdisk_check(flipped).ok ? 0 : 1;
        const TriangulationDiff d = compare_triangulations(planar_delaunay_bruteforce(s.points, s.polygon), flipped);
        hard += d.hard_mismatch ? 1 : 0;
        soft += !d.empty() && !d.hard_mismatch ? 1 : 0;
    }
    return {circumdisk_failures == 0 && hard == 0 && not_done == 0,
            fmt("200 sets, %zu circumdisk failures, %zu hard mismatches, %zu concyclic-only differences, %zu "
                "unfinished runs",
                circumdisk_failures, hard, soft, not_done)};
}

// ---- 6, 7: embeddedness

Outcome pi8_embedded()
{
    std::size_t bad_construction = 0, not_injective = 0, not_embedded = 0, flips = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        fixture::Pi8Patch p = fixture::pi8_patch(seed);
        bad_construction += pi8_check(p.mesh.positions()).ok ? 0 : 1;
        flips += delaunayify(p.mesh).flips.size();
        not_injective += projection_injective(p.mesh, p.plane) ? 0 : 1;
        not_embedded += is_embedded(p.mesh).ok ? 0 : 1;
    }
    return {bad_construction == 0 && not_injective == 0 && not_embedded == 0,
            fmt("100 patches, %zu flips, %zu outside pi/8, %zu not injective, %zu not embedded", flips,
                bad_construction, not_injective, not_embedded)};
}

Outcome sliver()
{
    SurfaceMesh m = load_off(FLIPMESH_TEST_DATA "/sliver.off");
    const bool before = is_embedded(m).ok;
    const auto he = m.find_half_edge(0, 1);
    if (!he)
        return {false, "fixture lacks edge 0-1"};
    const EdgeRef e = m.edge_of(*he);
    const DelaunayKind kind = classify_mesh_edge(m, e);
    flip(m, e);
    const EmbeddingCheck after = is_embedded(m);
    return {before && kind == DelaunayKind::Violated && !after.ok,
            fmt("embedded before: %s, edge 0-1 violated: %s, overlapping pairs after switch: %zu",
                before ? "yes" : "no", kind == DelaunayKind::Violated ? "yes" : "no", after.offending_pairs.size())};
}

// ---- 8: thin triangles

Outcome thin()
{
    Outcome out;
    double previous = -1.0;
    bool trend = true, all_delaunay = true, all_strict = true, all_embedded = true;
    for (int n : {10, 50, 100}) {
        const ThinExample t = thin_example({equilateral_base(), n, 0.15});
        trend = trend && t.thin_fraction >= previous - 0.02;
        previous = t.thin_fraction;
        all_delaunay = all_delaunay && t.report.delaunay;
        all_strict = all_strict && t.report.strict;
        all_embedded = all_embedded && t.report.embedded;
        out.detail += fmt("n=%d thin %.3f strict %s (%zu cocircular edges); ", n, t.thin_fraction,
                          t.report.strict ? "yes" : "no", t.report.non_strict_edges);
    }
    out.pass = trend && previous > 0.8 && all_delaunay && all_strict && all_embedded;
    out.known = trend && previous > 0.8 && all_delaunay && all_embedded;
    out.detail += fmt("delaunay %s, embedded %s, trend %s", all_delaunay ? "yes" : "no", all_embedded ? "yes" : "no",
                      trend ? "yes" : "no");

    // the same construction on a scalene base, where no corner quad is cyclic
    const std::vector<Point3> v{{0, 0, 0}, {1, 0, 0}, {0.3, 0.8, 0}};
    const std::vector<std::array<VertexId, 3>> f{{0, 1, 2}};
    const ThinExample s = thin_example({SurfaceMesh::from_triangles(v, f), 100, 0.05});
    out.detail += fmt("; scalene base n=100: thin %.3f strict %s embedded %s", s.thin_fraction,
                      s.report.strict ? "yes" : "no", s.report.embedded ? "yes" : "no");
    return out;
}

// ---- 9: Lobachevsky

Outcome lobachevsky_kernel()
{
    const CounterRng rng(9);
    double worst_oracle = 0.0, worst_odd = 0.0, worst_period = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double x = rng.uniform(i, -2 * pi, 2 * pi);
        worst_oracle = std::max(worst_oracle, std::abs(lobachevsky(x) - oracle::lobachevsky(x)));
        worst_odd = std::max(worst_odd, std::abs(lobachevsky(-x) + lobachevsky(x)));
        worst_period = std::max(worst_period, std::abs(lobachevsky(x + pi) - lobachevsky(x)));
    }
    const double l6 = lobachevsky(pi / 6), l3 = 3 * lobachevsky(pi / 3);
    const bool values = std::abs(l6 - 0.5074708) < 1e-6 && std::abs(l3 - 1.0149416) < 1e-6;
    return {worst_oracle <= 1e-9 && worst_odd <= 1e-12 && worst_period <= 1e-12 && values,
            fmt("max |series - quadrature| %.2e, oddness %.2e, periodicity %.2e, L(pi/6) %.9f, 3L(pi/3) %.9f",
                worst_oracle, worst_odd, worst_period, l6, l3)};
}

// ---- 10: determinism

std::string cli_path;

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int shell(const std::string& cmd)
{
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism()
{
    Outcome out;
    std::size_t identical = 0, total = 0;
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        SurfaceSpec s;
        s.kind = seed == 12 ? SurfaceKind::Sphere : SurfaceKind::Monge;
        s.level = 3;
        s.grid = 20;
        s.jitter = seed == 12 ? 0.05 : 0.3;
        s.tangential_jitter = 0.3;
        s.seed = seed;
        for (Strategy strategy : {Strategy::GreedyMaxViolation, Strategy::Fifo}) {
            FlipConfig cfg;
            cfg.strategy = strategy;
            cfg.seed = seed;
            std::string first;
            for (int rep = 0; rep < 2; ++rep) {
                SurfaceMesh m = generate(s, false).mesh;
                const std::string dump = to_json(delaunayify(m, cfg)).dump(2) + format_off(m);
                if (rep == 0)
                    first = dump;
                else
                    identical += dump == first ? 1 : 0;
            }
            ++total;
        }
    }
    out.detail = fmt("in-process: %zu/%zu identical", identical, total);
    out.pass = identical == total;

    if (cli_path.empty()) {
        out.detail += "; separate invocations skipped (no --cli)";
        return out;
    }
    const fs::path dir = fs::temp_directory_path() / "flipmesh_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "spec.json") << R"({"kind": "sphere", "level": 3, "jitter": 0.05, "tangential_jitter": 0.3, "seed": 21})";
    const std::string q = "'";
    bool ok = shell(q + cli_path + q + " gen " + (dir / "spec.json").string() + " " + (dir / "in.off").string() +
                    " --no-measure >/dev/null 2>&1") == 0;
    for (int rep = 1; ok && rep <= 2; ++rep) {
        const std::string r = std::to_string(rep);
        ok = shell(q + cli_path + q + " delaunayify " + (dir / "in.off").string() + " " +
                   (dir / ("out" + r + ".off")).string() + " --strategy fifo --seed 5 --report " +
                   (dir / ("r" + r + ".json")).string() + " >/dev/null 2>&1") == 0;
    }
    const bool same = ok && slurp(dir / "r1.json") == slurp(dir / "r2.json") &&
                      slurp(dir / "out1.off") == slurp(dir / "out2.off") && !slurp(dir / "r1.json").empty();
    out.detail += fmt("; two CLI invocations: %s", !ok ? "failed to run" : same ? "identical" : "different");
    out.pass = out.pass && same;
    fs::remove_all(dir);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"flipmesh acceptance run"};
    app.add_option("--cli", cli_path, "flipmesh executable, for the cross-invocation determinism check");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "lexicographic descent", 60, descent},
        {2, "termination and fixpoint", 0, termination},
        {3, "area inequality", 10, area_inequality},
        {4, "switch creates strict Delaunay edge", 0, flip_creates_strict},
        {5, "planar oracle equivalence", 30, planar_oracle},
        {6, "embeddedness under pi/8", 0, pi8_embedded},
        {7, "sliver switch overlaps", 0, sliver},
        {8, "thin triangles on the equilateral base", 30, thin},
        {9, "Lobachevsky kernel", 0, lobachevsky_kernel},
        {10, "determinism", 0, determinism},
    };

    int unexpected = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0 && secs > c.budget_seconds) {
            o.pass = false;
            o.known = false;
            o.detail += fmt(" (over the %.0f s budget)", c.budget_seconds);
        }
        const bool known = !o.pass && o.known;
        if (!o.pass && !known)
            ++unexpected;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << fmt(" (%.2f s)", secs) << ": "
                  << o.detail << (known ? " [known]" : "") << std::endl;
    }
    std::cout << unexpected << " unexpected failure(s)" << std::endl;
    return unexpected;
}
