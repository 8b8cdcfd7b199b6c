// Flips a fan triangulation of a small point set to Delaunay and compares it with the
// brute-force empty-circumdisk triangulation.

#include "flipmesh/flipmesh.hpp"

#include <iostream>

int main()
{
    using namespace flipmesh;
    const std::vector<Point2> pts{{0, 0}, {4, 0}, {5, 3}, {2, 5}, {-1, 3}, {2, 2}, {1, 1}, {3, 1.5}};

    RunReport run;
    const PlanarTriangulation t = planar_delaunay_flip(pts, {}, &run);
    std::cout << t.triangles.size() << " triangles after " << run.flips.size() << " flips\n";
    for (const Tri& tri : t.triangles)
        std::cout << "  " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";

    const auto disk = empty_circumdisk_check(t);
    const auto diff = compare_triangulations(planar_delaunay_bruteforce(pts), t);
    std::cout << "empty circumdisks: " << (disk.ok ? "yes" : "no") << "\n"
              << "matches brute force: " << (diff.hard_mismatch ? "no" : "yes") << "\n";

    SurfaceMesh m = to_mesh(t);
    std::cout << "area " << potential(m).area << ", ideal volume " << potential(m).volume << "\n";
    return disk.ok && !diff.hard_mismatch ? 0 : 1;
}
