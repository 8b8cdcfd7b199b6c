#pragma once

namespace flipmesh {

/// Numerical tolerance bands shared by the kernel, the flip drivers and the checkers.
///
/// `angle` is absolute (radians). `plane`, `deg` and `area` are relative: they are
/// multiplied by a local length scale (bounding-box diagonal, or its square for
/// areas) before use, so results do not depend on the units of the input.
struct Tolerances
{
    double angle = 1e-9; ///< band around pi in which an edge is NonStrict
    double plane = 1e-9; ///< coplanarity, relative to the local bbox diagonal
    double deg = 1e-12;  ///< degenerate lengths / areas
    double area = 1e-12; ///< area comparisons, relative to squared local scale
};

} // namespace flipmesh
