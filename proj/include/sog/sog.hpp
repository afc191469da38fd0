#pragma once

// Umbrella header for the sparse occupancy grid library.

#include "sog/bench.hpp"
#include "sog/camera.hpp"
#include "sog/distance.hpp"
#include "sog/grid.hpp"
#include "sog/io.hpp"
#include "sog/ray.hpp"
#include "sog/render.hpp"
#include "sog/sampling.hpp"
#include "sog/scene_gen.hpp"
#include "sog/sparse.hpp"
#include "sog/traversal.hpp"
#include "sog/vec.hpp"
