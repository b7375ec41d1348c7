#pragma once

#include <string>
#include <vector>

#include "modsurf/surface.hpp"

namespace modsurf::stock {

// Named patterns used across the test and verification suites.
//   ngon2..ngon5          disks, all sides free
//   cylinder              "a c^-1 ap c", one vertex per boundary circle
//   cylinder2             annulus with two vertices per boundary circle
//   one_holed_torus       "a b a^-1 b^-1 c"
//   genus2                "a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1 c"
//   hexagon_boundary      hexagon with one glued pair, four free sides
//   torus_square          closed 2-torus from a square (analysis only)
//   torus_two_triangles   closed 2-torus from two triangles (analysis only)
//   torus_hexagon         closed 2-torus from a hexagon (analysis only)
GluingPattern pattern(const std::string& name);

std::vector<std::string> pattern_names();

// patterns satisfying (A1)-(A3) on which the 2-form suites run
std::vector<std::string> chartable_names();

}  // namespace modsurf::stock
