#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"
#include "limitspec/potentials.hpp"

namespace limitspec {

struct BBox {
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
};

/// nx x ny cells over the box. Cell (ix, iy) has its center at
/// re_min + (ix + 1/2) dx, im_min + (iy + 1/2) dy and lives at mask index
/// iy * nx + ix.
struct Grid {
  BBox bbox;
  int nx = 0;
  int ny = 0;

  Grid() = default;
  Grid(BBox b, int nx_, int ny_);

  double dx() const { return (bbox.re_max - bbox.re_min) / nx; }
  double dy() const { return (bbox.im_max - bbox.im_min) / ny; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  cplx center(std::size_t index) const;
  /// Cell containing the point (closed box); nullopt outside the box.
  std::optional<std::size_t> cell_of(cplx z) const;
};

struct RealInterval {
  double a = 0.0, b = 0.0;
};
struct Circle {
  cplx center;
  double radius = 0.0;
};
struct ClosedDisk {
  cplx center;
  double radius = 0.0;
};
/// Intersection of the open disks |z - c| < radius, removed from the region.
struct DiskIntersection {
  std::vector<cplx> centers;
  double radius = 0.0;
};

using Component = std::variant<RealInterval, Circle, ClosedDisk, DiskIntersection>;

struct SpectralRegion {
  Grid grid;
  std::vector<std::uint8_t> mask;  // 1 = in region
  std::vector<Component> components;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  explicit SpectralRegion(Grid g = {});

  bool at(std::size_t index) const { return mask[index] != 0; }
  std::size_t count() const;
  void mark(cplx z);
  void merge(const SpectralRegion& other);  // mask OR; grids must match
  std::vector<cplx> marked_centers() const;
};

/// Whether the components describe the cell: curves and intervals cover every
/// cell they touch, disks cover cells whose center lies inside, and a
/// DiskIntersection removes cells whose center lies inside all its disks.
bool components_cover(const std::vector<Component>& components, const Grid& grid, std::size_t index);

/// Marks every cell covered by the region's components.
void rasterize_components(SpectralRegion& region);

/// Every covered cell is marked.
bool components_consistent(const SpectralRegion& region);

bool is_subset(const SpectralRegion& inner, const SpectralRegion& outer);

double directed_hausdorff(std::span<const cplx> from, std::span<const cplx> to);
double hausdorff(std::span<const cplx> a, std::span<const cplx> b);

/// Hausdorff distance between a point set and a union of real intervals.
double hausdorff_to_intervals(std::span<const cplx> points, std::span<const RealInterval> intervals);

/// Merges intervals that overlap or touch within `gap`.
std::vector<RealInterval> merge_intervals(std::vector<RealInterval> intervals, double gap);

}  // namespace limitspec
