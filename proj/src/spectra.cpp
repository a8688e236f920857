#include "limitspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "limitspec/banded.hpp"

namespace limitspec {

namespace {

constexpr std::int64_t kMaxSymbolPeriod = 256;
constexpr std::int64_t kMaxTruncationRadius = 2048;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

cplx int_power(cplx z, std::int64_t e) {
  if (e < 0) {
    z = 1.0 / z;
    e = -e;
  }
  cplx out = 1.0;
  while (e > 0) {
    if (e & 1) out *= z;
    z *= z;
    e >>= 1;
  }
  return out;
}

void check_radius(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("truncation radius must be non-negative");
  if (n > kMaxTruncationRadius) throw CapacityError("truncation radius", n, kMaxTruncationRadius);
}

void check_theta_samples(int samples) {
  if (samples < 1) throw std::invalid_argument("theta sample count must be positive");
}

// k-th smallest real eigenvalue of M(e^{i theta}).
double band_value(const FloquetSymbol& symbol, std::size_t band, double theta) {
  auto ev = small_eigenvalues(symbol.at_angle(theta));
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  return ev[band].real();
}

// Golden-section refinement of a band extremum bracketed by [lo, hi].
double refine_extremum(const FloquetSymbol& symbol, std::size_t band, double lo, double hi,
                       bool maximize) {
  const double sign = maximize ? -1.0 : 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = sign * band_value(symbol, band, c), fd = sign * band_value(symbol, band, d);
  for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = sign * band_value(symbol, band, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = sign * band_value(symbol, band, d);
    }
  }
  return sign * std::min(fc, fd);
}

}  // namespace

std::int64_t common_period(const BandOperator& a) {
  std::int64_t q = 1;
  for (const auto& [k, p] : a.diagonals()) {
    const auto period = p.period();
    if (!period)
      throw std::invalid_argument("diagonal " + std::to_string(k) + " (" + p.kind() +
                                  ") is not periodic");
    q = std::lcm(q, *period);
    if (q > kMaxSymbolPeriod) throw CapacityError("common period", q, kMaxSymbolPeriod);
  }
  return q;
}

FloquetSymbol::FloquetSymbol(const BandOperator& a, std::int64_t q) : q_(q) {
  if (q < 1) throw std::invalid_argument("period must be >= 1");
  if (q > kMaxSymbolPeriod) throw CapacityError("symbol period", q, kMaxSymbolPeriod);
  for (const auto& [k, p] : a.diagonals()) {
    const auto own = p.period();
    if (!own)
      throw std::invalid_argument("diagonal " + std::to_string(k) + " (" + p.kind() +
                                  ") is not periodic");
    for (std::int64_t n = 0; n < *own; ++n)
      if (p.eval(n + q) != p.eval(n))
        throw std::invalid_argument(std::to_string(q) + " is not a period of diagonal " +
                                    std::to_string(k));
    for (std::int64_t r = 0; r < q; ++r) {
      // r - k = q l + s with s in [0, q)
      const std::int64_t l = floor_div(r - k, q);
      const std::int64_t s = r - k - q * l;
      terms_.push_back({static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s), l, p.eval(r)});
    }
  }
}

Eigen::MatrixXcd FloquetSymbol::at(cplx z) const {
  if (std::abs(std::abs(z) - 1.0) > 1e-12) throw std::invalid_argument("symbol argument must lie on the unit circle");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(q_, q_);
  for (const auto& t : terms_) m(t.r, t.s) += t.coefficient * int_power(z, t.power);
  return m;
}

Eigen::MatrixXcd FloquetSymbol::at_angle(double theta) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(q_, q_);
  for (const auto& t : terms_)
    m(t.r, t.s) += t.coefficient * (t.power == 0 ? cplx{1.0} : std::polar(1.0, static_cast<double>(t.power) * theta));
  return m;
}

Eigen::MatrixXcd symbol_matrix(const BandOperator& a, std::int64_t q, cplx z) {
  return FloquetSymbol(a, q).at(z);
}

std::vector<cplx> small_eigenvalues(const Eigen::MatrixXcd& m) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("self-adjoint eigen-solver did not converge");
    const Eigen::VectorXd& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("complex eigen-solver did not converge");
  const Eigen::VectorXcd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<std::vector<cplx>> floquet_eigenvalues(const BandOperator& a, std::int64_t q,
                                                   int theta_samples) {
  check_theta_samples(theta_samples);
  const FloquetSymbol symbol(a, q);
  std::vector<std::vector<cplx>> out;
  out.reserve(static_cast<std::size_t>(theta_samples));
  for (int j = 0; j < theta_samples; ++j)
    out.push_back(small_eigenvalues(symbol.at_angle(2.0 * std::numbers::pi * j / theta_samples)));
  return out;
}

PeriodicSpectrumData periodic_spectrum_data(const BandOperator& a, std::int64_t q, int theta_samples,
                                            bool refine_band_edges) {
  const auto cloud = floquet_eigenvalues(a, q, theta_samples);
  PeriodicSpectrumData data;
  data.all_real = true;
  for (const auto& evs : cloud)
    for (const cplx& ev : evs) {
      data.points.push_back(ev);
      data.all_real = data.all_real && std::abs(ev.imag()) <= kRealTolerance;
    }
  if (!data.all_real) return data;

  const FloquetSymbol symbol(a, q);
  const double step = 2.0 * std::numbers::pi / theta_samples;
  std::vector<std::vector<double>> sorted(cloud.size());
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    for (const cplx& ev : cloud[j]) sorted[j].push_back(ev.real());
    std::sort(sorted[j].begin(), sorted[j].end());
  }
  std::vector<RealInterval> bands;
  for (std::size_t band = 0; band < static_cast<std::size_t>(q); ++band) {
    std::size_t jlo = 0, jhi = 0;
    for (std::size_t j = 1; j < sorted.size(); ++j) {
      if (sorted[j][band] < sorted[jlo][band]) jlo = j;
      if (sorted[j][band] > sorted[jhi][band]) jhi = j;
    }
    double lo = sorted[jlo][band], hi = sorted[jhi][band];
    if (refine_band_edges) {
      const double th_lo = step * static_cast<double>(jlo), th_hi = step * static_cast<double>(jhi);
      lo = std::min(lo, refine_extremum(symbol, band, th_lo - step, th_lo + step, false));
      hi = std::max(hi, refine_extremum(symbol, band, th_hi - step, th_hi + step, true));
    }
    bands.push_back({lo, hi});
  }
  data.bands = merge_intervals(std::move(bands), 1e-9);
  return data;
}

void add_to_region(SpectralRegion& region, const PeriodicSpectrumData& data) {
  for (const cplx& z : data.points) region.mark(z);
  if (!data.bands.empty()) {
    for (const auto& iv : data.bands) region.components.emplace_back(iv);
    rasterize_components(region);
  }
}

SpectralRegion periodic_spectrum(const BandOperator& a, std::int64_t q, int theta_samples,
                                 const Grid& grid) {
  SpectralRegion region(grid);
  add_to_region(region, periodic_spectrum_data(a, q, theta_samples));
  region.metadata["method"] = "floquet-bloch symbol";
  region.metadata["period"] = q;
  region.metadata["theta_samples"] = theta_samples;
  return region;
}

SpectralRegion laurent_spectrum(const BandOperator& a, int theta_samples, const Grid& grid) {
  for (const auto& [k, p] : a.diagonals())
    if (!p.as<Constant>())
      throw std::invalid_argument("diagonal " + std::to_string(k) + " (" + p.kind() +
                                  ") is not constant");
  SpectralRegion region = periodic_spectrum(a, 1, theta_samples, grid);

  // c + b e^{-ik theta} traces a circle
  cplx center{};
  std::vector<std::pair<std::int64_t, cplx>> off;
  for (const auto& [k, p] : a.diagonals()) {
    if (k == 0)
      center = p.as<Constant>()->value;
    else
      off.emplace_back(k, p.as<Constant>()->value);
  }
  if (off.size() == 1) {
    region.components.emplace_back(Circle{center, std::abs(off.front().second)});
    rasterize_components(region);
  }
  region.metadata["method"] = "laurent symbol";
  return region;
}

cplx transfer_discriminant(const Periodic& v, cplx lambda) {
  if (v.values.empty()) throw std::invalid_argument("empty periodic potential");
  Eigen::Matrix2cd t = Eigen::Matrix2cd::Identity();
  const std::size_t q = v.values.size();
  for (std::size_t j = 1; j <= q; ++j) {
    Eigen::Matrix2cd tj;
    tj << lambda - v.values[j % q], -1.0, 1.0, 0.0;
    t = tj * t;
  }
  return t.trace();
}

cplx transfer_discriminant(const BandOperator& a, cplx lambda) {
  const auto& d = a.diagonals();
  auto unit = [&](std::int64_t k) {
    const auto it = d.find(k);
    if (it == d.end()) return false;
    const auto* c = it->second.as<Constant>();
    return c && c->value == cplx{1.0};
  };
  if (!unit(-1) || !unit(1) || a.band_width() != 1)
    throw std::invalid_argument("transfer discriminant needs V_{-1} + V_1 + M_v");
  Periodic v{{0.0}};
  if (const auto it = d.find(0); it != d.end()) {
    if (const auto* c = it->second.as<Constant>())
      v = Periodic{{c->value}};
    else if (const auto* p = it->second.as<Periodic>())
      v = *p;
    else
      throw std::invalid_argument("transfer discriminant needs a periodic main diagonal");
  }
  return transfer_discriminant(v, lambda);
}

bool discriminant_in_spectrum(const Periodic& v, double lambda) {
  const cplx delta = transfer_discriminant(v, lambda);
  return std::abs(delta.imag()) <= kRealTolerance && std::abs(delta.real()) <= 2.0;
}

std::vector<RealInterval> discriminant_bands(const Periodic& v, double lo, double hi, int samples) {
  if (samples < 2 || !(hi > lo)) throw std::invalid_argument("discriminant scan needs lo < hi and >= 2 samples");
  auto inside = [&](double x) { return discriminant_in_spectrum(v, x); };
  auto edge = [&](double out, double in) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (out + in);
      (inside(mid) ? in : out) = mid;
    }
    return in;
  };
  const double h = (hi - lo) / (samples - 1);
  std::vector<RealInterval> bands;
  bool prev = false;
  double start = lo;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + h * i;
    const bool cur = inside(x);
    if (cur && !prev) start = i == 0 ? x : edge(x - h, x);
    if (!cur && prev) bands.push_back({start, edge(x, x - h)});
    prev = cur;
  }
  if (prev) bands.push_back({start, hi});
  return bands;
}

double smin_truncation(const BandOperator& a, cplx lambda, std::int64_t n) {
  check_radius(n);
  const IndexRange window = IndexRange::symmetric(n);
  return smallest_singular_value(shifted_window(a, lambda, window, window));
}

std::vector<double> smin_grid(const BandOperator& a, const Grid& grid, std::int64_t n, Execution exec) {
  check_radius(n);
  std::vector<double> out(grid.size());
  for_each_index(grid.size(), exec, [&](std::size_t i) { out[i] = smin_truncation(a, grid.center(i), n); });
  return out;
}

SpectralRegion pseudospectrum_from_smin(const std::vector<double>& smin, const Grid& grid, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (smin.size() != grid.size()) throw std::invalid_argument("value count does not match the grid");
  SpectralRegion region(grid);
  for (std::size_t i = 0; i < smin.size(); ++i) region.mask[i] = smin[i] <= eps ? 1 : 0;
  region.metadata["epsilon"] = eps;
  return region;
}

SpectralRegion pseudospectrum(const BandOperator& a, double eps, const Grid& grid, std::int64_t n,
                              Execution exec) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  SpectralRegion region = pseudospectrum_from_smin(smin_grid(a, grid, n, exec), grid, eps);
  region.metadata["method"] = "square truncation smallest singular value";
  region.metadata["n"] = n;
  return region;
}

double lower_norm_estimate(const BandOperator& a, std::int64_t n) {
  check_radius(n);
  const std::int64_t w = a.band_width();
  const IndexRange cols = IndexRange::symmetric(n);
  const IndexRange rows{-n - w, n + w};
  BandedMatrix m = BandedMatrix::for_window(rows, cols, w);
  m.add_operator(a, rows.lo, cols.lo, 1.0);
  return smallest_singular_value(m);
}

double periodic_lower_norm(const BandOperator& a, std::int64_t q, int theta_samples) {
  check_theta_samples(theta_samples);
  const FloquetSymbol symbol(a, q);
  auto smin = [&](double theta) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(symbol.at_angle(theta));
    return svd.singularValues().minCoeff();
  };
  const double step = 2.0 * std::numbers::pi / theta_samples;
  int best = 0;
  double best_value = smin(0.0);
  for (int j = 1; j < theta_samples; ++j)
    if (const double v = smin(step * j); v < best_value) {
      best_value = v;
      best = j;
    }
  // golden-section search on the bracket around the best sample
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = step * (best - 1), hi = step * (best + 1);
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = smin(x1), f2 = smin(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = smin(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = smin(x2);
    }
  }
  return std::min({best_value, f1, f2});
}

}  // namespace limitspec
