#pragma once

// Discrete conformal deformation of piecewise-linear metrics on closed
// triangulated surfaces: extended curvatures, the extended discrete Yamabe
// flow, and direct convex minimization toward constant or prescribed
// curvature.

#include "yamabe/angles.hpp"
#include "yamabe/curvature.hpp"
#include "yamabe/energy.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/flow.hpp"
#include "yamabe/io.hpp"
#include "yamabe/lobachevsky.hpp"
#include "yamabe/obstruction.hpp"
#include "yamabe/solver.hpp"
#include "yamabe/surface.hpp"
