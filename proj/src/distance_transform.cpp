#include "haris/distance_transform.hpp"

#include <algorithm>
#include <limits>

namespace haris {

namespace {

// Lower envelope of parabolas: d[q] = min_p (q-p)^2 + f[p], arg[q] = argmin.
void transform_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& arg,
                  std::vector<int>& v, std::vector<double>& z, int n) {
  auto intersect = [&](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * q - 2.0 * p);
  };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    d[q] = static_cast<double>(q - p) * (q - p) + f[p];
    arg[q] = p;
  }
}

}  // namespace

DistanceTransform euclidean_distance_transform(const std::vector<std::uint8_t>& is_site, int width, int height) {
  const double far = DistanceTransform::kFar;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  DistanceTransform out;
  out.squared.assign(n, far);
  out.nearest.assign(n, -1);
  if (n == 0) return out;

  const int longest = std::max(width, height);
  std::vector<double> f(longest), d(longest), z(longest + 1);
  std::vector<int> arg(longest), v(longest);
  std::vector<double> g(n, far);
  std::vector<int> site_row(n, -1);

  for (int c = 0; c < width; ++c) {
    bool any = false;
    for (int r = 0; r < height; ++r) {
      const bool site = is_site[static_cast<std::size_t>(r) * width + c] != 0;
      f[r] = site ? 0.0 : far;
      any = any || site;
    }
    if (!any) continue;
    transform_1d(f, d, arg, v, z, height);
    for (int r = 0; r < height; ++r) {
      g[static_cast<std::size_t>(r) * width + c] = d[r];
      site_row[static_cast<std::size_t>(r) * width + c] = arg[r];
    }
  }

  for (int r = 0; r < height; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * width;
    for (int c = 0; c < width; ++c) f[c] = g[base + c];
    transform_1d(f, d, arg, v, z, width);
    for (int c = 0; c < width; ++c) {
      const int sc = arg[c];
      const int sr = site_row[base + sc];
      if (sr < 0 || d[c] >= far / 2) continue;
      out.squared[base + c] = d[c];
      out.nearest[base + c] = sr * width + sc;
    }
  }
  return out;
}

}  // namespace haris
