#include "objnav/morphology.hpp"

#include <algorithm>

namespace objnav {
namespace morphology {
namespace {

// Separable running-max over a (2r+1) window, one axis at a time.
GridU8 window_max_rows(const GridU8& g, int radius) {
  GridU8 out(g.rows(), g.cols());
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      std::uint8_t v = 0;
      const int lo = std::max(0, c - radius);
      const int hi = std::min<int>(static_cast<int>(g.cols()) - 1, c + radius);
      for (int k = lo; k <= hi && !v; ++k) v = g(r, k);
      out(r, c) = v;
    }
  }
  return out;
}

GridU8 window_max_cols(const GridU8& g, int radius) {
  GridU8 out(g.rows(), g.cols());
  for (int c = 0; c < g.cols(); ++c) {
    for (int r = 0; r < g.rows(); ++r) {
      std::uint8_t v = 0;
      const int lo = std::max(0, r - radius);
      const int hi = std::min<int>(static_cast<int>(g.rows()) - 1, r + radius);
      for (int k = lo; k <= hi && !v; ++k) v = g(k, c);
      out(r, c) = v;
    }
  }
  return out;
}

}  // namespace

GridU8 dilate(const GridU8& g, int radius) {
  if (radius <= 0) return g;
  return window_max_cols(window_max_rows(g, radius), radius);
}

GridU8 erode(const GridU8& g, int radius) {
  if (radius <= 0) return g;
  GridU8 inv = (g == 0).cast<std::uint8_t>();
  GridU8 grown = dilate(inv, radius);
  return (grown == 0).cast<std::uint8_t>();
}

GridU8 open(const GridU8& g, int radius) {
  if (radius <= 0) return g;
  return dilate(erode(g, radius), radius);
}

GridU8 remove_small_components(const GridU8& g, int min_cells) {
  if (min_cells <= 1) return g;
  auto [labels, sizes] = label_components(g);
  GridU8 out = g;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      if (out(r, c) && sizes[static_cast<size_t>(labels(r, c)) - 1] < min_cells) out(r, c) = 0;
  return out;
}

}  // namespace morphology
}  // namespace objnav
