#pragma once

#include <optional>
#include <string>
#include <vector>

namespace objnav {

// Closed set of goal object categories. The default set is the six
// categories every benchmark config uses; a config may extend it, and all
// category indices in a run are relative to one CategorySet instance.
class CategorySet {
 public:
  CategorySet() = default;
  explicit CategorySet(std::vector<std::string> names) : names_(std::move(names)) {}

  static CategorySet defaults() {
    return CategorySet({"chair", "couch", "potted_plant", "toilet", "tv", "bed"});
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int idx) const { return names_.at(static_cast<size_t>(idx)); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<int> index_of(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }

  friend bool operator==(const CategorySet& a, const CategorySet& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
};

// Sentinel for "no category" in per-ray semantics and map queries.
inline constexpr int k_no_category = -1;

}  // namespace objnav
