#include "vemmhd/mesh_io.hpp"

#include <fstream>

#include <json.hpp>

#include "vemmhd/exceptions.hpp"

namespace vemmhd {

PolyMesh read_mesh_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshFileError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MeshFileError("parse failure in '" + path + "': " + e.what());
  }
  if (!j.contains("vertices") || !j.contains("cells"))
    throw MeshFileError("mesh file needs 'vertices' and 'cells'");
  std::vector<Vec2> vertices;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2) throw MeshFileError("vertex is not an [x,y] pair");
    vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  std::vector<std::vector<int>> cells;
  for (const auto& c : j["cells"]) {
    if (!c.is_array()) throw MeshFileError("cell is not an index list");
    cells.push_back(c.get<std::vector<int>>());
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

void write_mesh_json(const PolyMesh& mesh, const std::string& path) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) j["vertices"].push_back({v.x(), v.y()});
  j["cells"] = nlohmann::json::array();
  for (const auto& c : mesh.cells) j["cells"].push_back(c);
  std::ofstream out(path);
  if (!out) throw MeshFileError("cannot open '" + path + "' for writing");
  out << j.dump(1) << '\n';
}

}  // namespace vemmhd
