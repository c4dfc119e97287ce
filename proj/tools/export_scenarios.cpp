// Writes every bundled scenario to <dir>/<file>.
#include <fstream>
#include <iostream>

#include "picsif/scenarios.hpp"
#include "picsif/surface.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: export_scenarios <dir>\n";
    return 2;
  }
  for (const auto& [file, bundle] : picsif::bundled_scenarios()) {
    std::string path = std::string(argv[1]) + "/" + file;
    std::ofstream(path, std::ios::binary) << picsif::pretty(bundle.file);
    std::cout << path << "\n";
  }
  return 0;
}
