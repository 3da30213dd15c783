#pragma once

// Seeded graph matching, alignment strength, and phantom-alignment-strength
// calibration.

#include "gmatch/assignment.hpp"
#include "gmatch/errors.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/harness.hpp"
#include "gmatch/matchers.hpp"
#include "gmatch/numfmt.hpp"
#include "gmatch/parallel.hpp"
#include "gmatch/phantom.hpp"
#include "gmatch/random_models.hpp"
#include "gmatch/rng.hpp"
