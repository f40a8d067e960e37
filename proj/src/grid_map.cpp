#include "haris/grid_map.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace haris {

GridMap::GridMap(double resolution, int width, int height, Point2D origin)
    : resolution_(resolution), width_(width), height_(height), origin_(origin) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  if (width < 0 || height < 0) throw std::invalid_argument("grid dimensions must be non-negative");
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

namespace {

// Index k with corner(k) <= v < corner(k+1), corners computed as origin + k*res.
int axis_index(double v, double origin, double res) {
  auto k = static_cast<long long>(std::floor((v - origin) / res));
  if (v >= origin + static_cast<double>(k + 1) * res) ++k;
  else if (v < origin + static_cast<double>(k) * res) --k;
  if (k > (1LL << 30)) return 1 << 30;
  if (k < -(1LL << 30)) return -(1 << 30);
  return static_cast<int>(k);
}

}  // namespace

CellIndex world_to_grid_unbounded(const GridMap& map, Point2D p) {
  return {axis_index(p.x, map.origin().x, map.resolution()),
          axis_index(p.y, map.origin().y, map.resolution())};
}

std::optional<CellIndex> world_to_grid(const GridMap& map, Point2D p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
  const CellIndex c = world_to_grid_unbounded(map, p);
  if (!map.in_bounds(c)) return std::nullopt;
  return c;
}

Point2D grid_to_world(const GridMap& map, CellIndex c) {
  return {map.origin().x + (c.col + 0.5) * map.resolution(),
          map.origin().y + (c.row + 0.5) * map.resolution()};
}

std::string encode_pgm(const GridMap& map, OccupancyThresholds thresholds) {
  std::ostringstream out;
  out << "P5\n" << map.width() << ' ' << map.height() << "\n255\n";
  std::string raster(static_cast<std::size_t>(map.width()) * static_cast<std::size_t>(map.height()), '\0');
  std::size_t k = 0;
  for (int row = map.height() - 1; row >= 0; --row) {
    for (int col = 0; col < map.width(); ++col) {
      const double p = map.probability({col, row});
      unsigned char px = 205;
      if (p > thresholds.occupied) px = 0;
      else if (p < thresholds.free) px = 254;
      raster[k++] = static_cast<char>(px);
    }
  }
  out << raster;
  return out.str();
}

std::filesystem::path save_pgm(const GridMap& map, const std::filesystem::path& pgm_path,
                               OccupancyThresholds thresholds) {
  {
    std::ofstream f(pgm_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + pgm_path.string());
    f << encode_pgm(map, thresholds);
  }
  std::filesystem::path sidecar = pgm_path;
  sidecar.replace_extension(".yaml");
  std::ofstream y(sidecar);
  if (!y) throw std::runtime_error("cannot write " + sidecar.string());
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "image: %s\nresolution: %.6f\norigin: [%.6f, %.6f, 0.000000]\nnegate: 0\n"
                "occupied_thresh: %.2f\nfree_thresh: %.2f\n",
                pgm_path.filename().string().c_str(), map.resolution(), map.origin().x,
                map.origin().y, thresholds.occupied, thresholds.free);
  y << buf;
  return sidecar;
}

GridMap load_pgm(const std::filesystem::path& sidecar_path, double saturation) {
  std::ifstream y(sidecar_path);
  if (!y) throw std::runtime_error("cannot read " + sidecar_path.string());
  std::string line, image;
  double resolution = 0.0, ox = 0.0, oy = 0.0;
  bool have_res = false, have_origin = false;
  while (std::getline(y, line)) {
    if (line.rfind("image:", 0) == 0) {
      image = line.substr(6);
      image.erase(0, image.find_first_not_of(' '));
    } else if (line.rfind("resolution:", 0) == 0) {
      resolution = std::stod(line.substr(11));
      have_res = true;
    } else if (line.rfind("origin:", 0) == 0) {
      if (std::sscanf(line.c_str(), "origin: [%lf, %lf", &ox, &oy) == 2) have_origin = true;
    }
  }
  if (image.empty() || !have_res || !have_origin)
    throw std::runtime_error("map sidecar missing image/resolution/origin: " + sidecar_path.string());

  std::ifstream f(sidecar_path.parent_path() / image, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read map image " + image);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  f >> magic >> w >> h >> maxval;
  f.get();
  if (magic != "P5" || maxval != 255 || w <= 0 || h <= 0) throw std::runtime_error("unsupported PGM " + image);

  GridMap map(resolution, w, h, {ox, oy});
  for (int row = h - 1; row >= 0; --row) {
    for (int col = 0; col < w; ++col) {
      const int px = f.get();
      if (px == EOF) throw std::runtime_error("truncated PGM " + image);
      double l = 0.0;
      if (px == 0) l = saturation;
      else if (px == 254) l = -saturation;
      map.log_odds({col, row}) = l;
    }
  }
  return map;
}

}  // namespace haris
