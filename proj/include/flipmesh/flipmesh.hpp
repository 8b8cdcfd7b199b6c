#pragma once

#include "flipmesh/error.hpp"
#include "flipmesh/flipper.hpp"
#include "flipmesh/genex.hpp"
#include "flipmesh/geom.hpp"
#include "flipmesh/intersect.hpp"
#include "flipmesh/lobachevsky.hpp"
#include "flipmesh/mesh.hpp"
#include "flipmesh/mesh_io.hpp"
#include "flipmesh/planar.hpp"
#include "flipmesh/point.hpp"
#include "flipmesh/rng.hpp"
#include "flipmesh/tolerances.hpp"
#include "flipmesh/verify.hpp"
