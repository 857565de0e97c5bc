#include "fuel/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fuel {

size_t VoxelGrid::countState(VoxelState s) const {
  return static_cast<size_t>(std::count(states_.begin(), states_.end(), s));
}

namespace {
char stateChar(VoxelState s) {
  switch (s) {
    case VoxelState::Unknown: return '?';
    case VoxelState::Free: return '.';
    case VoxelState::Occupied: return '#';
  }
  return '?';
}
}  // namespace

void writeAsciiSlices(const VoxelGrid& grid, std::ostream& os) {
  const auto& cfg = grid.config();
  std::string line(static_cast<size_t>(cfg.dims.x()) * cfg.dims.y(), '?');
  for (int z = 0; z < cfg.dims.z(); ++z) {
    size_t k = 0;
    for (int y = 0; y < cfg.dims.y(); ++y)
      for (int x = 0; x < cfg.dims.x(); ++x) line[k++] = stateChar(grid.at(Eigen::Vector3i(x, y, z)));
    os << line << '\n';
  }
}

void writeBinary(const VoxelGrid& grid, std::ostream& os) {
  const auto& cfg = grid.config();
  char header[256];
  std::snprintf(header, sizeof(header), "%d %d %d %.17g %.17g %.17g %.17g\n", cfg.dims.x(),
                cfg.dims.y(), cfg.dims.z(), cfg.resolution, cfg.origin.x(), cfg.origin.y(),
                cfg.origin.z());
  os << header;
  os.write(reinterpret_cast<const char*>(grid.states().data()),
           static_cast<std::streamsize>(grid.states().size()));
}

VoxelGrid readBinary(std::istream& is) {
  GridConfig cfg;
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("occupancy dump: missing header line");
  if (std::sscanf(header.c_str(), "%d %d %d %lg %lg %lg %lg", &cfg.dims.x(), &cfg.dims.y(),
                  &cfg.dims.z(), &cfg.resolution, &cfg.origin.x(), &cfg.origin.y(),
                  &cfg.origin.z()) != 7)
    throw std::runtime_error("occupancy dump: malformed header line");
  if (cfg.dims.minCoeff() < 1 || cfg.resolution <= 0.0)
    throw std::runtime_error("occupancy dump: invalid dims or resolution");
  VoxelGrid grid(cfg);
  is.read(reinterpret_cast<char*>(grid.states().data()),
          static_cast<std::streamsize>(grid.states().size()));
  if (static_cast<size_t>(is.gcount()) != grid.states().size())
    throw std::runtime_error("occupancy dump: truncated voxel body");
  for (VoxelState s : grid.states())
    if (static_cast<uint8_t>(s) > 2) throw std::runtime_error("occupancy dump: invalid voxel byte");
  return grid;
}

}  // namespace fuel
