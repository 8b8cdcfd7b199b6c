// flipmesh: diagonal-switch Delaunay runs, condition checks and fixture generation.
//
// Exit codes: 0 success, 1 input/data error (or blocked/failed checks), 2 step limit, 64 usage.

#include "flipmesh/flipmesh.hpp"
#include "flipmesh/report_json.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace flipmesh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitStepLimit = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct TolFlags
{
    Tolerances tol;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--tau-angle", tol.angle, "NonStrict band on the opposite angle sum (rad)");
        cmd->add_option("--tau-plane", tol.plane, "relative coplanarity tolerance");
        cmd->add_option("--tau-deg", tol.deg, "relative degeneracy tolerance");
        cmd->add_option("--tau-area", tol.area, "relative area tolerance");
    }
};

std::uint64_t effective_seed(std::uint64_t flag)
{
    if (const char* env = std::getenv("FLIPMESH_SEED"); env && *env) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("FLIPMESH_SEED is not an unsigned integer: ") + env);
        }
    }
    return flag;
}

void write_json(const fs::path& path, const Json& j)
{
    detail::write_atomically(path, j.dump(2) + "\n");
}

fs::path sidecar_path(const fs::path& off)
{
    fs::path p = off;
    p.replace_extension(".json");
    return p;
}

void require_distinct(const fs::path& in, const fs::path& out)
{
    std::error_code ec;
    if (in == out || (fs::exists(out) && fs::equivalent(in, out, ec)))
        throw UsageError("input and output paths must differ");
}

SurfaceMesh load_mesh(const fs::path& path)
{
    const std::string ext = path.extension().string();
    return ext == ".obj" ? load_obj(path) : load_off(path);
}

// ---------------------------------------------------------------------------

struct DelaunayifyArgs
{
    std::string in, out, report, strategy = "greedy";
    bool strict = false, timing = false, verify = false;
    std::optional<std::size_t> max_steps;
    std::optional<double> disk_radius, eps;
    std::uint64_t seed = 0;
    TolFlags tol;
};

int run_delaunayify(const DelaunayifyArgs& a)
{
    require_distinct(a.in, a.out);
    if (a.disk_radius.has_value() != a.eps.has_value())
        throw UsageError("--disk-radius and --eps go together");
    Json report;
    int code = kExitOk;
    try {
        SurfaceMesh m = load_mesh(a.in);
        if (const auto problems = validate(m, a.tol.tol); !problems.empty()) {
            std::ostringstream msg;
            msg << "invalid mesh: " << to_string(problems.front().kind) << " at " << problems.front().index << " ("
                << problems.front().detail << ")";
            throw Error(msg.str());
        }
        FlipConfig cfg;
        cfg.strategy = a.strategy == "fifo" ? Strategy::Fifo : Strategy::GreedyMaxViolation;
        cfg.strict_mode = a.strict;
        cfg.max_steps = a.max_steps;
        cfg.tol = a.tol.tol;
        cfg.seed = effective_seed(a.seed);
        const RunReport run = a.disk_radius ? global_schedule(m, *a.disk_radius, *a.eps, cfg) : delaunayify(m, cfg);
        report = to_json(run, a.timing);
        if (a.verify) {
            Json v;
            v["delaunay"] = to_json(is_delaunay(m, cfg.tol), m);
            v["embedded"] = to_json(is_embedded(m, cfg.tol));
            report["verification"] = std::move(v);
        }
        std::cerr << "status " << to_string(run.status) << ", " << run.flips.size() << " flips, "
                  << run.remaining_violations.size() << " violated edges left\n";
        switch (run.status) {
        case RunStatus::Delaunay:
        case RunStatus::StrictDelaunay: save_off(m, a.out); break;
        case RunStatus::StepLimit: code = kExitStepLimit; break;
        case RunStatus::Blocked: code = kExitData; break;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        report = Json::object();
        report["status"] = "InputError";
        report["error"] = e.what();
        code = kExitData;
    }
    if (!a.report.empty())
        write_json(a.report, report);
    return code;
}

// ---------------------------------------------------------------------------

struct CheckArgs
{
    std::string in, report;
    std::optional<double> delta, theta, r;
    bool pi8 = false;
    std::uint64_t seed = 0;
    TolFlags tol;
};

int run_check(const CheckArgs& a)
{
    if (a.theta && !a.r)
        throw UsageError("--theta requires --r");
    Json report;
    bool pass = true;
    int code = kExitOk;
    try {
        auto mesh = std::make_shared<const SurfaceMesh>(load_mesh(a.in));
        PointCloud cloud;
        cloud.points.assign(mesh->positions().begin(), mesh->positions().end());
        cloud.reference_mesh = mesh;
        cloud.r = a.r.value_or(0.0);
        FlatnessOptions opt;
        opt.seed = effective_seed(a.seed);
        opt.tol = a.tol.tol;

        ConditionReport cond;
        if (a.delta) {
            cond.density = density_check(cloud, *a.delta);
            pass = pass && cond.density->dense;
        }
        if (a.theta) {
            cond.flatness = flatness_check(cloud, *a.theta, opt);
            pass = pass && cond.flatness->flat;
        }
        if (a.pi8) {
            cond.pi8 = pi8_check(cloud.points, opt);
            pass = pass && cond.pi8->ok;
        }
        const DelaunayCheck del = is_delaunay(*mesh, a.tol.tol);
        const EmbeddingCheck emb = is_embedded(*mesh, a.tol.tol);
        if (!a.delta && !a.theta && !a.pi8)
            pass = del.ok && emb.ok;

        report["status"] = pass ? "pass" : "fail";
        Json v = to_json(cond);
        v["delaunay"] = to_json(del, *mesh);
        v["embedded"] = to_json(emb);
        report["verification"] = std::move(v);
        std::cerr << (pass ? "all requested checks pass\n" : "some requested check failed\n");
        code = pass ? kExitOk : kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        report = Json::object();
        report["status"] = "InputError";
        report["error"] = e.what();
        code = kExitData;
    }
    if (!a.report.empty())
        write_json(a.report, report);
    return code;
}

// ---------------------------------------------------------------------------

struct GenArgs
{
    std::string spec, out;
    std::optional<std::uint64_t> seed;
    bool no_measure = false;
};

int run_gen(const GenArgs& a)
{
    require_distinct(a.spec, a.out);
    try {
        std::ifstream in(a.spec);
        if (!in)
            throw Error("cannot open " + a.spec);
        Json j;
        try {
            j = Json::parse(in);
        } catch (const Json::exception& e) {
            throw Error(std::string("spec is not valid JSON: ") + e.what());
        }
        SurfaceSpec spec = surface_spec_from_json(j);
        if (a.seed || std::getenv("FLIPMESH_SEED"))
            spec.seed = effective_seed(a.seed.value_or(spec.seed));
        const Generated g = generate(spec, !a.no_measure);
        save_off(g.mesh, a.out);
        Json side;
        side["spec"] = to_json(spec);
        side["vertices"] = g.mesh.num_vertices();
        side["faces"] = g.mesh.num_faces();
        std::ostringstream hash;
        hash << std::hex << mesh_hash(g.mesh);
        side["hash"] = hash.str();
        if (g.measured)
            side["measured"] = to_json(*g.measured);
        write_json(sidecar_path(a.out), side);
        std::cerr << "wrote " << g.mesh.num_vertices() << " vertices, " << g.mesh.num_faces() << " faces\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const Json::exception& e) {
        std::cerr << "error: bad spec: " << e.what() << "\n";
        return kExitData;
    }
}

// ---------------------------------------------------------------------------

struct ThinArgs
{
    std::string base, out;
    int n = 10;
    double eps = 0.15;
    double threshold_deg = 5.0;
};

int run_thin(const ThinArgs& a)
{
    if (!a.base.empty())
        require_distinct(a.base, a.out);
    try {
        ThinExampleSpec spec{a.base.empty() ? equilateral_base() : load_mesh(a.base), a.n, a.eps,
                             a.threshold_deg * std::numbers::pi / 180.0};
        const ThinExample t = thin_example(spec);
        save_off(t.mesh, a.out);
        Json side;
        side["n"] = a.n;
        side["epsilon"] = a.eps;
        side["thin_threshold_deg"] = a.threshold_deg;
        side["thin_fraction"] = t.thin_fraction;
        side["report"] = to_json(t.report);
        write_json(sidecar_path(a.out), side);
        std::cerr << "thin_fraction " << t.thin_fraction << " over " << t.report.faces << " faces\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

// ---------------------------------------------------------------------------

struct PlanarArgs
{
    std::string in, out, report;
    TolFlags tol;
};

std::vector<Point2> read_points_2d(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::vector<Point2> pts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto toks = detail::split_tokens(line);
        if (toks.empty())
            continue;
        if (toks.size() != 2)
            throw ParseError(line_no, "expected 'x y'");
        pts.push_back({detail::parse_real(toks[0], line_no), detail::parse_real(toks[1], line_no)});
    }
    return pts;
}

int run_planar(const PlanarArgs& a)
{
    if (!a.out.empty())
        require_distinct(a.in, a.out);
    Json report;
    int code = kExitOk;
    try {
        const std::vector<Point2> pts = read_points_2d(a.in);
        FlipConfig cfg;
        cfg.tol = a.tol.tol;
        RunReport run;
        const PlanarTriangulation flipped = planar_delaunay_flip(pts, cfg, &run);
        report = to_json(run);
        const CircumdiskCheck disk = empty_circumdisk_check(flipped, cfg.tol);
        Json v;
        v["empty_circumdisk"] = disk.ok;
        bool ok = disk.ok;
        if (pts.size() <= 16) {
            const PlanarTriangulation oracle = planar_delaunay_bruteforce(pts, {}, cfg.tol);
            const TriangulationDiff diff = compare_triangulations(oracle, flipped, cfg.tol);
            v["oracle_regions"] = diff.regions.size();
            v["hard_mismatch"] = diff.hard_mismatch;
            v["cocircular_groups"] = oracle.cocircular_groups;
            ok = ok && !diff.hard_mismatch;
        }
        report["verification"] = std::move(v);
        if (!a.out.empty())
            save_off(to_mesh(flipped), a.out);
        std::cerr << flipped.triangles.size() << " triangles, " << run.flips.size() << " flips, "
                  << (ok ? "oracle agrees" : "oracle DISAGREES") << "\n";
        code = ok ? kExitOk : kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        report = Json::object();
        report["status"] = "InputError";
        report["error"] = e.what();
        code = kExitData;
    }
    if (!a.report.empty())
        write_json(a.report, report);
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Delaunay triangulations of surface point clouds by diagonal switches"};
    app.require_subcommand(1);

    DelaunayifyArgs da;
    auto* del = app.add_subcommand("delaunayify", "switch diagonals until the mesh is Delaunay");
    del->add_option("input", da.in, "input mesh (.off or .obj)")->required();
    del->add_option("output", da.out, "output .off, written on success only")->required();
    del->add_option("--strategy", da.strategy)->check(CLI::IsMember({"greedy", "fifo"}));
    del->add_flag("--strict", da.strict, "also switch non-coplanar NonStrict edges");
    del->add_option("--max-steps", da.max_steps)->check(CLI::PositiveNumber);
    del->add_option("--report", da.report, "JSON report path");
    del->add_option("--seed", da.seed);
    del->add_option("--disk-radius", da.disk_radius, "run the disk-scheduled driver with this radius")
        ->check(CLI::PositiveNumber);
    del->add_option("--eps", da.eps, "edge-length scale of the disk schedule")->check(CLI::PositiveNumber);
    del->add_flag("--timing", da.timing, "include wall time in the report");
    del->add_flag("--verify", da.verify, "add Delaunay and embeddedness checks to the report");
    da.tol.attach(del);

    CheckArgs ca;
    auto* chk = app.add_subcommand("check", "verify density, flatness and projection conditions");
    chk->add_option("input", ca.in, "mesh whose vertices form the cloud; it also serves as proxy")->required();
    chk->add_option("--delta", ca.delta)->check(CLI::PositiveNumber);
    chk->add_option("--theta", ca.theta)->check(CLI::PositiveNumber);
    chk->add_option("--r", ca.r)->check(CLI::PositiveNumber);
    chk->add_flag("--pi8", ca.pi8, "all triple planes within pi/8 of one plane");
    chk->add_option("--report", ca.report);
    chk->add_option("--seed", ca.seed);
    ca.tol.attach(chk);

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "generate a test surface from a JSON spec");
    gen->add_option("spec", ga.spec)->required();
    gen->add_option("output", ga.out)->required();
    gen->add_option("--seed", ga.seed);
    gen->add_flag("--no-measure", ga.no_measure, "skip the (delta, theta, r) measurement");

    ThinArgs ta;
    auto* thin = app.add_subcommand("thin", "build the thin-triangle Delaunay example");
    thin->add_option("output", ta.out)->required();
    thin->add_option("--n", ta.n)->check(CLI::PositiveNumber);
    thin->add_option("--eps", ta.eps)->check(CLI::PositiveNumber);
    thin->add_option("--base", ta.base, "planar base triangulation (default: unit equilateral triangle)");
    thin->add_option("--threshold-deg", ta.threshold_deg)->check(CLI::PositiveNumber);

    PlanarArgs pa;
    auto* planar = app.add_subcommand("planar", "planar flip pipeline checked against the brute-force oracle");
    planar->add_option("points", pa.in, "text file of 'x y' lines")->required();
    planar->add_option("--out", pa.out);
    planar->add_option("--report", pa.report);
    pa.tol.attach(planar);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*del)
            return run_delaunayify(da);
        if (*chk)
            return run_check(ca);
        if (*gen)
            return run_gen(ga);
        if (*thin)
            return run_thin(ta);
        if (*planar)
            return run_planar(pa);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
