#pragma once

#include "objnav/grid.hpp"

namespace objnav {
namespace morphology {

// Binary dilation with a square (Chebyshev) structuring element of the
// given radius. radius 0 is the identity.
GridU8 dilate(const GridU8& g, int radius);

// Binary erosion, same structuring element.
GridU8 erode(const GridU8& g, int radius);

// Classical opening: erosion followed by dilation.
GridU8 open(const GridU8& g, int radius);

// Area opening: drops 8-connected components with fewer than min_cells
// cells. min_cells <= 1 is the identity.
GridU8 remove_small_components(const GridU8& g, int min_cells);

}  // namespace morphology
}  // namespace objnav
