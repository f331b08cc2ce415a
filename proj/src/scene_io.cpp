#include "objnav/scene_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace objnav {

using ordered_json = nlohmann::ordered_json;

namespace {

// Row encoding: alternating run lengths [blocked, free, blocked, ...],
// always starting with a blocked run (0 if the row starts free).
ordered_json encode_row(const GridU8& traversable, int row) {
  ordered_json runs = ordered_json::array();
  const int cols = static_cast<int>(traversable.cols());
  int col = 0;
  bool expect_blocked = true;
  while (col < cols) {
    int run = 0;
    while (col + run < cols &&
           (traversable(row, col + run) == 0) == expect_blocked) {
      ++run;
    }
    runs.push_back(run);
    col += run;
    expect_blocked = !expect_blocked;
  }
  if (runs.empty()) runs.push_back(0);
  return runs;
}

ordered_json encode_cells(const std::vector<Cell>& cells) {
  ordered_json out = ordered_json::array();
  for (const Cell& c : cells) out.push_back(ordered_json::array({c.row, c.col}));
  return out;
}

std::vector<Cell> decode_cells(const ordered_json& j, const std::string& owner) {
  if (!j.is_array()) throw ParseError(owner + ": cells must be an array");
  std::vector<Cell> cells;
  cells.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      throw ParseError(owner + ": cell entries must be [row, col] integer pairs");
    }
    cells.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return cells;
}

const ordered_json& require(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field: ") + key);
  return *it;
}

}  // namespace

std::string scene_to_json(const Scene& scene, const CategorySet& categories) {
  ordered_json j;
  j["format"] = 1;
  j["id"] = scene.id;
  j["width"] = scene.width;
  j["height"] = scene.height;
  j["cell_size"] = scene.cell_size;

  ordered_json rows = ordered_json::array();
  for (int row = 0; row < scene.height; ++row) rows.push_back(encode_row(scene.traversable, row));
  j["obstacles"] = rows;

  ordered_json objs = ordered_json::array();
  for (const auto& obj : scene.objects) {
    ordered_json o;
    o["id"] = obj.instance_id;
    o["category"] = categories.name(obj.category);
    o["cells"] = encode_cells(obj.cells);
    objs.push_back(o);
  }
  j["objects"] = objs;

  ordered_json refl = ordered_json::array();
  for (const auto& surf : scene.reflective) {
    ordered_json r;
    r["cells"] = encode_cells(surf.cells);
    r["mode"] = surf.mode == ReflectiveMode::mirror ? "mirror" : "beyond_range";
    r["axis"] = ordered_json::array(
        {surf.mirror_axis.x0, surf.mirror_axis.y0, surf.mirror_axis.x1, surf.mirror_axis.y1});
    refl.push_back(r);
  }
  j["reflective"] = refl;

  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text, const CategorySet& categories) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level must be an object");

  const auto& fmt = require(j, "format");
  if (!fmt.is_number_integer() || fmt.get<int>() != 1) {
    throw ParseError("unsupported format (expected 1)");
  }

  Scene scene;
  scene.id = require(j, "id").get<std::string>();
  scene.width = require(j, "width").get<int>();
  scene.height = require(j, "height").get<int>();
  scene.cell_size = require(j, "cell_size").get<double>();
  if (scene.width <= 0 || scene.height <= 0) throw ParseError("non-positive dimensions");

  const auto& rows = require(j, "obstacles");
  if (!rows.is_array() || static_cast<int>(rows.size()) != scene.height) {
    throw ParseError("obstacles must have one run list per row");
  }
  scene.traversable = GridU8::Zero(scene.height, scene.width);
  for (int row = 0; row < scene.height; ++row) {
    const auto& runs = rows[row];
    if (!runs.is_array()) throw ParseError("obstacle row must be an array of run lengths");
    int col = 0;
    bool blocked = true;
    for (const auto& r : runs) {
      if (!r.is_number_integer() || r.get<int>() < 0) {
        throw ParseError("run lengths must be non-negative integers");
      }
      int run = r.get<int>();
      if (col + run > scene.width) {
        std::ostringstream os;
        os << "row " << row << " runs exceed width";
        throw ParseError(os.str());
      }
      if (!blocked) {
        for (int k = 0; k < run; ++k) scene.traversable(row, col + k) = 1;
      }
      col += run;
      blocked = !blocked;
    }
    if (col != scene.width) {
      std::ostringstream os;
      os << "row " << row << " runs sum to " << col << ", expected " << scene.width;
      throw ParseError(os.str());
    }
  }

  const auto& objs = require(j, "objects");
  if (!objs.is_array()) throw ParseError("objects must be an array");
  for (const auto& o : objs) {
    ObjectInstance obj;
    obj.instance_id = require(o, "id").get<int>();
    std::string cat = require(o, "category").get<std::string>();
    auto cat_idx = categories.index_of(cat);
    if (!cat_idx) throw ParseError("unknown category: " + cat);
    obj.category = *cat_idx;
    std::ostringstream owner;
    owner << "object " << obj.instance_id;
    obj.cells = decode_cells(require(o, "cells"), owner.str());
    scene.objects.push_back(std::move(obj));
  }

  const auto& refl = require(j, "reflective");
  if (!refl.is_array()) throw ParseError("reflective must be an array");
  for (size_t i = 0; i < refl.size(); ++i) {
    const auto& r = refl[i];
    ReflectiveSurface surf;
    std::ostringstream owner;
    owner << "reflective surface " << i;
    surf.cells = decode_cells(require(r, "cells"), owner.str());
    std::string mode = require(r, "mode").get<std::string>();
    if (mode == "mirror") {
      surf.mode = ReflectiveMode::mirror;
    } else if (mode == "beyond_range") {
      surf.mode = ReflectiveMode::beyond_range;
    } else {
      throw ParseError("unknown reflective mode: " + mode);
    }
    const auto& axis = require(r, "axis");
    if (!axis.is_array() || axis.size() != 4) {
      throw ParseError(owner.str() + ": axis must be [x0, y0, x1, y1]");
    }
    surf.mirror_axis = {axis[0].get<double>(), axis[1].get<double>(), axis[2].get<double>(),
                        axis[3].get<double>()};
    scene.reflective.push_back(std::move(surf));
  }

  validate_scene(scene, categories);
  return scene;
}

void save_scene(const std::string& path, const Scene& scene, const CategorySet& categories) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << scene_to_json(scene, categories);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Scene load_scene(const std::string& path, const CategorySet& categories) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return scene_from_json(buf.str(), categories);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(path + ": " + e.what());
  }
}

bool operator==(const ObjectInstance& a, const ObjectInstance& b) {
  return a.instance_id == b.instance_id && a.category == b.category && a.cells == b.cells;
}

bool operator==(const ReflectiveSurface& a, const ReflectiveSurface& b) {
  return a.cells == b.cells && a.mode == b.mode && a.mirror_axis.x0 == b.mirror_axis.x0 &&
         a.mirror_axis.y0 == b.mirror_axis.y0 && a.mirror_axis.x1 == b.mirror_axis.x1 &&
         a.mirror_axis.y1 == b.mirror_axis.y1;
}

bool operator==(const Scene& a, const Scene& b) {
  return a.id == b.id && a.width == b.width && a.height == b.height &&
         a.cell_size == b.cell_size && (a.traversable == b.traversable).all() &&
         a.objects == b.objects && a.reflective == b.reflective;
}

}  // namespace objnav
