#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "limitspec/execution.hpp"
#include "limitspec/operators.hpp"
#include "limitspec/region.hpp"

namespace limitspec {

/// Threshold on imaginary parts below which Floquet eigenvalues count as real.
inline constexpr double kRealTolerance = 1e-10;

/// Least common period of all diagonals (Constant counts as 1). Throws
/// std::invalid_argument if some diagonal is not Constant or Periodic.
std::int64_t common_period(const BandOperator& a);

/// Floquet-Bloch symbol of a q-periodic band operator under the ansatz
/// x(m) = z^floor(m/q) u(m mod q):
///
///   M(z)_{r,s} = sum_l b_{r-s-ql}(r) z^l.
///
/// Each term stores (r, s, l, coefficient).
class FloquetSymbol {
 public:
  FloquetSymbol(const BandOperator& a, std::int64_t q);

  std::int64_t period() const { return q_; }
  /// |z| must be 1 within 1e-12.
  Eigen::MatrixXcd at(cplx z) const;
  /// M(e^{i theta}), with the powers z^l evaluated as e^{i l theta}.
  Eigen::MatrixXcd at_angle(double theta) const;

 private:
  struct Term {
    Eigen::Index r, s;
    std::int64_t power;
    cplx coefficient;
  };
  std::int64_t q_;
  std::vector<Term> terms_;
};

Eigen::MatrixXcd symbol_matrix(const BandOperator& a, std::int64_t q, cplx z);

/// Eigenvalues of a small dense matrix; Hermitian input takes the
/// self-adjoint path and returns exactly real values.
std::vector<cplx> small_eigenvalues(const Eigen::MatrixXcd& m);

/// eig(M(e^{i theta_j})) for theta_j = 2 pi j / theta_samples.
std::vector<std::vector<cplx>> floquet_eigenvalues(const BandOperator& a, std::int64_t q,
                                                   int theta_samples);

/// Sampled spectrum of a periodic operator before rasterization.
struct PeriodicSpectrumData {
  std::vector<cplx> points;          // all eigenvalues over all theta samples
  bool all_real = false;
  std::vector<RealInterval> bands;   // merged, only when all_real
};

/// Band edges are refined by golden-section search when `refine_band_edges`.
PeriodicSpectrumData periodic_spectrum_data(const BandOperator& a, std::int64_t q, int theta_samples,
                                            bool refine_band_edges = true);

/// Marks the points and attaches and rasterizes the bands.
void add_to_region(SpectralRegion& region, const PeriodicSpectrumData& data);

/// Union over the unit circle of the symbol eigenvalues, rasterized into the
/// grid. When every eigenvalue is real, one RealInterval per band (merged
/// where bands touch) is attached and rasterized as well.
SpectralRegion periodic_spectrum(const BandOperator& a, std::int64_t q, int theta_samples,
                                 const Grid& grid);

/// Symbol curve sum_k b_k e^{-i k theta} of an operator with constant
/// diagonals.
SpectralRegion laurent_spectrum(const BandOperator& a, int theta_samples, const Grid& grid);

/// trace(T_q ... T_1), T_j = [[lambda - v(j), -1], [1, 0]], for the Jacobi
/// operator V_{-1} + V_1 + M_v.
cplx transfer_discriminant(const Periodic& v, cplx lambda);
/// Same, after checking that `a` is exactly V_{-1} + V_1 + M_v with v periodic.
cplx transfer_discriminant(const BandOperator& a, cplx lambda);

/// Real lambda is in the spectrum iff the discriminant is real (1e-10) and
/// at most 2 in modulus.
bool discriminant_in_spectrum(const Periodic& v, double lambda);

/// Bands {lambda in [lo, hi] : discriminant test holds}, located on a uniform
/// scan and refined by bisection.
std::vector<RealInterval> discriminant_bands(const Periodic& v, double lo, double hi, int samples);

/// Smallest singular value of the square window [-n, n]^2 of lambda I - A.
double smin_truncation(const BandOperator& a, cplx lambda, std::int64_t n);

/// smin_truncation at every cell center of the grid.
std::vector<double> smin_grid(const BandOperator& a, const Grid& grid, std::int64_t n,
                              Execution exec = Execution::parallel);

/// Cells with smin_truncation <= eps.
SpectralRegion pseudospectrum(const BandOperator& a, double eps, const Grid& grid, std::int64_t n,
                              Execution exec = Execution::parallel);
SpectralRegion pseudospectrum_from_smin(const std::vector<double>& smin, const Grid& grid, double eps);

/// Smallest singular value of the rectangular window with columns [-n, n]
/// and rows [-n-w, n+w]. An upper bound for the lower norm, non-increasing
/// in n.
double lower_norm_estimate(const BandOperator& a, std::int64_t n);

/// Lower norm of a q-periodic operator, min over theta of the smallest
/// singular value of M(e^{i theta}); sampled, then refined by golden section.
/// Translates have unitarily similar symbols, so the value is translation
/// invariant up to rounding.
double periodic_lower_norm(const BandOperator& a, std::int64_t q, int theta_samples = 256);

}  // namespace limitspec
