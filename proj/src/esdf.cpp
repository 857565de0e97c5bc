#include "fuel/esdf.hpp"

#include <algorithm>
#include <cmath>

namespace fuel {

namespace {

constexpr double kInf = 1e30;

// 1D squared-distance lower envelope ("Distance Transforms of Sampled
// Functions", Felzenszwalb & Huttenlocher).
void envelope1d(const double* f, int n, double* out, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double d = q - v[k];
    out[q] = d * d + f[v[k]];
  }
}

}  // namespace

Esdf computeEsdf(const VoxelGrid& grid, double cap, bool unknown_as_occupied) {
  const GridConfig& cfg = grid.config();
  const int nx = cfg.dims.x(), ny = cfg.dims.y(), nz = cfg.dims.z();
  const int nmax = std::max({nx, ny, nz});

  std::vector<double> sq(cfg.voxelCount());
  for (size_t a = 0; a < sq.size(); ++a) {
    const VoxelState s = grid.at(a);
    const bool obstacle = s == VoxelState::Occupied || (unknown_as_occupied && s == VoxelState::Unknown);
    sq[a] = obstacle ? 0.0 : kInf;
  }

  std::vector<double> f(nmax), out(nmax), z(nmax + 1);
  std::vector<int> v(nmax);
  auto adr = [&](int x, int y, int zz) {
    return static_cast<size_t>(x) + static_cast<size_t>(nx) * (static_cast<size_t>(y) + static_cast<size_t>(ny) * zz);
  };

  // x pass
  for (int zz = 0; zz < nz; ++zz)
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) f[x] = sq[adr(x, y, zz)];
      envelope1d(f.data(), nx, out.data(), v.data(), z.data());
      for (int x = 0; x < nx; ++x) sq[adr(x, y, zz)] = out[x];
    }
  // y pass
  for (int zz = 0; zz < nz; ++zz)
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) f[y] = sq[adr(x, y, zz)];
      envelope1d(f.data(), ny, out.data(), v.data(), z.data());
      for (int y = 0; y < ny; ++y) sq[adr(x, y, zz)] = out[y];
    }
  // z pass
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      for (int zz = 0; zz < nz; ++zz) f[zz] = sq[adr(x, y, zz)];
      envelope1d(f.data(), nz, out.data(), v.data(), z.data());
      for (int zz = 0; zz < nz; ++zz) sq[adr(x, y, zz)] = out[zz];
    }

  Esdf esdf(cfg, cap);
  for (size_t a = 0; a < sq.size(); ++a)
    esdf.values()[a] = sq[a] >= kInf ? cap : std::min(cap, cfg.resolution * std::sqrt(sq[a]));
  return esdf;
}

EsdfSample esdfQuery(const Esdf& esdf, const Eigen::Vector3d& p) {
  const GridConfig& cfg = esdf.config();
  // Interpolation lattice spans voxel centers; clamp into it.
  Eigen::Vector3d rel = (p - cfg.origin) / cfg.resolution - Eigen::Vector3d::Constant(0.5);
  Eigen::Vector3i base;
  Eigen::Vector3d frac;
  for (int i = 0; i < 3; ++i) {
    rel[i] = std::clamp(rel[i], 0.0, static_cast<double>(cfg.dims[i] - 1));
    base[i] = std::min(static_cast<int>(std::floor(rel[i])), std::max(cfg.dims[i] - 2, 0));
    frac[i] = rel[i] - base[i];
    if (cfg.dims[i] == 1) frac[i] = 0.0;
  }

  double c[2][2][2];
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy)
      for (int dz = 0; dz < 2; ++dz) {
        Eigen::Vector3i idx = base + Eigen::Vector3i(dx, dy, dz);
        idx = idx.cwiseMin(cfg.dims - Eigen::Vector3i::Ones());
        c[dx][dy][dz] = esdf.at(idx);
      }

  const double fx = frac.x(), fy = frac.y(), fz = frac.z();
  // Collapse z, then y, keeping the partials needed for the analytic gradient.
  double cz[2][2], dz_[2][2];
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy) {
      cz[dx][dy] = c[dx][dy][0] * (1 - fz) + c[dx][dy][1] * fz;
      dz_[dx][dy] = c[dx][dy][1] - c[dx][dy][0];
    }
  double cy[2], dyv[2], dzv[2];
  for (int dx = 0; dx < 2; ++dx) {
    cy[dx] = cz[dx][0] * (1 - fy) + cz[dx][1] * fy;
    dyv[dx] = cz[dx][1] - cz[dx][0];
    dzv[dx] = dz_[dx][0] * (1 - fy) + dz_[dx][1] * fy;
  }

  EsdfSample s;
  s.distance = cy[0] * (1 - fx) + cy[1] * fx;
  const double inv = 1.0 / cfg.resolution;
  s.gradient.x() = (cy[1] - cy[0]) * inv;
  s.gradient.y() = (dyv[0] * (1 - fx) + dyv[1] * fx) * inv;
  s.gradient.z() = (dzv[0] * (1 - fx) + dzv[1] * fx) * inv;
  return s;
}

}  // namespace fuel
