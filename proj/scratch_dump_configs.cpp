#include <fstream>
#include "inseam/geometry/config.hpp"
int main() {
  for (std::string name : {"rect", "ellip"}) {
    auto s = inseam::builtin_scene(name);
    std::ofstream out(std::string(INSEAM_CONFIG_DIR) + "/" + name + ".json");
    out << inseam::scene_to_json(s).dump(2) << "\n";
  }
  return 0;
}
