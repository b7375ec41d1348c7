#include "modsurf/stock.hpp"

#include <map>

namespace modsurf::stock {

namespace {

const std::map<std::string, std::string>& table() {
  static const std::map<std::string, std::string> t = {
      {"ngon2", "a b\n"},
      {"ngon3", "a b c\n"},
      {"ngon4", "a b c d\n"},
      {"ngon5", "a b c d e\n"},
      {"cylinder", "a c^-1 ap c\n"},
      {"cylinder2", "a1 a2 c^-1 b2 b1 c\n"},
      {"one_holed_torus", "a b a^-1 b^-1 c\n"},
      {"genus2", "a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1 c\n"},
      {"hexagon_boundary", "a b a^-1 c d f\n"},
      {"torus_square", "a b a^-1 b^-1\n"},
      {"torus_two_triangles", "a b c\na^-1 b^-1 c^-1\n"},
      {"torus_hexagon", "a b c a^-1 b^-1 c^-1\n"},
  };
  return t;
}

}  // namespace

GluingPattern pattern(const std::string& name) {
  auto it = table().find(name);
  if (it == table().end())
    throw SurfaceError("unknown stock pattern: " + name);
  return parse_pattern(it->second);
}

std::vector<std::string> pattern_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : table()) names.push_back(k);
  return names;
}

std::vector<std::string> chartable_names() {
  return {"ngon2",    "ngon3",          "ngon4",
          "ngon5",    "cylinder",       "cylinder2",
          "one_holed_torus", "genus2",  "hexagon_boundary"};
}

}  // namespace modsurf::stock
