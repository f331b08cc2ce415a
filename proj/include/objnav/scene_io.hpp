#pragma once

#include "objnav/scene.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace objnav {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Canonical serialization: fixed key order, RLE obstacle rows, shortest
// round-trip number formatting. save(load(save(s))) is byte-identical.
std::string scene_to_json(const Scene& scene, const CategorySet& categories);
Scene scene_from_json(const std::string& text, const CategorySet& categories);

void save_scene(const std::string& path, const Scene& scene, const CategorySet& categories);
Scene load_scene(const std::string& path, const CategorySet& categories);

bool operator==(const ObjectInstance& a, const ObjectInstance& b);
bool operator==(const ReflectiveSurface& a, const ReflectiveSurface& b);
bool operator==(const Scene& a, const Scene& b);

}  // namespace objnav
