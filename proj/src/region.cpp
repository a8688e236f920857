#include "limitspec/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace limitspec {

Grid::Grid(BBox b, int nx_, int ny_) : bbox(b), nx(nx_), ny(ny_) {
  if (!(b.re_max > b.re_min) || !(b.im_max > b.im_min))
    throw std::invalid_argument("bounding box is degenerate");
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid dimensions must be positive");
}

cplx Grid::center(std::size_t index) const {
  const auto ix = static_cast<double>(index % static_cast<std::size_t>(nx));
  const auto iy = static_cast<double>(index / static_cast<std::size_t>(nx));
  return {bbox.re_min + (ix + 0.5) * dx(), bbox.im_min + (iy + 0.5) * dy()};
}

std::optional<std::size_t> Grid::cell_of(cplx z) const {
  if (!(z.real() >= bbox.re_min && z.real() <= bbox.re_max && z.imag() >= bbox.im_min &&
        z.imag() <= bbox.im_max))
    return std::nullopt;
  const int ix = std::min(nx - 1, static_cast<int>(std::floor((z.real() - bbox.re_min) / dx())));
  const int iy = std::min(ny - 1, static_cast<int>(std::floor((z.imag() - bbox.im_min) / dy())));
  return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
}

SpectralRegion::SpectralRegion(Grid g) : grid(g), mask(g.size(), 0) {}

std::size_t SpectralRegion::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

void SpectralRegion::mark(cplx z) {
  if (auto cell = grid.cell_of(z)) mask[*cell] = 1;
}

void SpectralRegion::merge(const SpectralRegion& other) {
  if (other.mask.size() != mask.size()) throw std::invalid_argument("cannot merge regions on different grids");
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] |= other.mask[i];
}

std::vector<cplx> SpectralRegion::marked_centers() const {
  std::vector<cplx> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(grid.center(i));
  return out;
}

namespace {

struct CellGeometry {
  double re_lo, re_hi, im_lo, im_hi;
  cplx center;
};

CellGeometry cell_geometry(const Grid& grid, std::size_t index) {
  const cplx c = grid.center(index);
  const double hx = grid.dx() / 2, hy = grid.dy() / 2;
  return {c.real() - hx, c.real() + hx, c.imag() - hy, c.imag() + hy, c};
}

// Whether the closed cell rectangle meets the circle |z - center| = r.
bool rect_meets_circle(const CellGeometry& g, cplx center, double r) {
  const double nx = std::clamp(center.real(), g.re_lo, g.re_hi);
  const double ny = std::clamp(center.imag(), g.im_lo, g.im_hi);
  const double dmin = std::hypot(nx - center.real(), ny - center.imag());
  const double fx = std::max(std::abs(g.re_lo - center.real()), std::abs(g.re_hi - center.real()));
  const double fy = std::max(std::abs(g.im_lo - center.imag()), std::abs(g.im_hi - center.imag()));
  const double dmax = std::hypot(fx, fy);
  return dmin <= r && r <= dmax;
}

bool additive_covers(const Component& c, const CellGeometry& g) {
  if (const auto* iv = std::get_if<RealInterval>(&c))
    return g.im_lo <= 0.0 && 0.0 <= g.im_hi && g.re_hi >= iv->a && g.re_lo <= iv->b;
  if (const auto* ci = std::get_if<Circle>(&c)) return rect_meets_circle(g, ci->center, ci->radius);
  if (const auto* d = std::get_if<ClosedDisk>(&c)) return std::abs(g.center - d->center) <= d->radius;
  return false;
}

bool excluded(const Component& c, const CellGeometry& g) {
  const auto* di = std::get_if<DiskIntersection>(&c);
  if (!di || di->centers.empty()) return false;
  return std::all_of(di->centers.begin(), di->centers.end(),
                     [&](cplx s) { return std::abs(g.center - s) < di->radius; });
}

}  // namespace

bool components_cover(const std::vector<Component>& components, const Grid& grid, std::size_t index) {
  const CellGeometry g = cell_geometry(grid, index);
  bool in = false;
  for (const auto& c : components) in = in || additive_covers(c, g);
  if (!in) return false;
  return std::none_of(components.begin(), components.end(),
                      [&](const Component& c) { return excluded(c, g); });
}

void rasterize_components(SpectralRegion& region) {
  for (std::size_t i = 0; i < region.mask.size(); ++i)
    if (components_cover(region.components, region.grid, i)) region.mask[i] = 1;
}

bool components_consistent(const SpectralRegion& region) {
  for (std::size_t i = 0; i < region.mask.size(); ++i)
    if (!region.mask[i] && components_cover(region.components, region.grid, i)) return false;
  return true;
}

bool is_subset(const SpectralRegion& inner, const SpectralRegion& outer) {
  if (inner.mask.size() != outer.mask.size()) throw std::invalid_argument("regions on different grids");
  for (std::size_t i = 0; i < inner.mask.size(); ++i)
    if (inner.mask[i] && !outer.mask[i]) return false;
  return true;
}

double directed_hausdorff(std::span<const cplx> from, std::span<const cplx> to) {
  if (from.empty()) return 0.0;
  if (to.empty()) return std::numeric_limits<double>::infinity();
  std::vector<cplx> sorted(to.begin(), to.end());
  std::sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  double worst = 0.0;
  for (const cplx& p : from) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), p.real(),
                               [](cplx a, double x) { return a.real() < x; });
    double best = std::numeric_limits<double>::infinity();
    for (auto r = it; r != sorted.end() && r->real() - p.real() < best; ++r)
      best = std::min(best, std::abs(*r - p));
    for (auto l = it; l != sorted.begin();) {
      --l;
      if (p.real() - l->real() >= best) break;
      best = std::min(best, std::abs(*l - p));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(std::span<const cplx> a, std::span<const cplx> b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double hausdorff_to_intervals(std::span<const cplx> points, std::span<const RealInterval> intervals) {
  if (points.empty() && intervals.empty()) return 0.0;
  if (points.empty() || intervals.empty()) return std::numeric_limits<double>::infinity();
  double to_set = 0.0;
  for (const cplx& p : points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : intervals) {
      const double dr = p.real() < iv.a ? iv.a - p.real() : (p.real() > iv.b ? p.real() - iv.b : 0.0);
      best = std::min(best, std::hypot(dr, p.imag()));
    }
    to_set = std::max(to_set, best);
  }
  // Intervals are sampled at 4097 points each for the reverse direction.
  std::vector<cplx> samples;
  for (const auto& iv : intervals)
    for (int i = 0; i <= 4096; ++i) samples.emplace_back(iv.a + (iv.b - iv.a) * i / 4096.0, 0.0);
  return std::max(to_set, directed_hausdorff(samples, points));
}

std::vector<RealInterval> merge_intervals(std::vector<RealInterval> intervals, double gap) {
  std::sort(intervals.begin(), intervals.end(), [](auto& x, auto& y) { return x.a < y.a; });
  std::vector<RealInterval> out;
  for (const auto& iv : intervals) {
    if (!out.empty() && iv.a <= out.back().b + gap)
      out.back().b = std::max(out.back().b, iv.b);
    else
      out.push_back(iv);
  }
  return out;
}

}  // namespace limitspec
