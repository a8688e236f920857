#include "limitspec/banded.hpp"

#include <algorithm>
#include <stdexcept>
#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace limitspec {

BandedMatrix::BandedMatrix(Eigen::Index rows, Eigen::Index cols, int lower, int upper)
    : rows_(rows), cols_(cols), lower_(lower), upper_(upper) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("banded matrix must be nonempty");
  if (lower < 0 || upper < 0) throw std::invalid_argument("band widths must be non-negative");
  band_.assign(static_cast<std::size_t>((lower + upper + 1) * cols), cplx{});
}

BandedMatrix BandedMatrix::for_window(IndexRange rows, IndexRange cols, std::int64_t band_width) {
  for (auto [size, what] : {std::pair{rows.size(), "row interval"}, std::pair{cols.size(), "column interval"}}) {
    if (size < 1) throw std::invalid_argument(std::string(what) + " must contain at least one index");
    if (size > kMaxWindow) throw CapacityError(std::string(what) + " exceeds the dense window cap", size);
  }
  // global i - j in [-w, w]  <=>  c - r in [d - w, d + w] with d = rows.lo - cols.lo
  const std::int64_t d = rows.lo - cols.lo;
  const auto lower = static_cast<int>(std::clamp<std::int64_t>(band_width - d, 0, rows.size() - 1));
  const auto upper = static_cast<int>(std::clamp<std::int64_t>(d + band_width, 0, cols.size() - 1));
  return BandedMatrix(rows.size(), cols.size(), lower, upper);
}

cplx BandedMatrix::operator()(Eigen::Index r, Eigen::Index c) const {
  if (!in_band(r, c)) return {};
  return band_[static_cast<std::size_t>(c * (lower_ + upper_ + 1) + (upper_ + r - c))];
}

cplx& BandedMatrix::at(Eigen::Index r, Eigen::Index c) {
  if (!in_band(r, c)) throw std::out_of_range("entry outside the stored band");
  return band_[static_cast<std::size_t>(c * (lower_ + upper_ + 1) + (upper_ + r - c))];
}

void BandedMatrix::add_operator(const BandOperator& a, std::int64_t row_lo, std::int64_t col_lo,
                                cplx scale) {
  for (const auto& [k, p] : a.diagonals()) {
    // local c - r = row_lo - col_lo - k
    const std::int64_t offset = row_lo - col_lo - k;
    if (offset < -lower_ || offset > upper_) {
      // The whole diagonal misses the window only if it misses the matrix.
      const bool hits = offset > -rows_ && offset < cols_;
      if (hits) throw std::invalid_argument("operator band exceeds the banded storage");
      continue;
    }
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const Eigen::Index c = r + offset;
      if (c < 0 || c >= cols_) continue;
      at(r, c) += scale * p.eval(row_lo + r);
    }
  }
}

void BandedMatrix::add_identity(std::int64_t row_lo, std::int64_t col_lo, cplx shift) {
  const std::int64_t offset = row_lo - col_lo;
  if (offset < -lower_ || offset > upper_) return;
  for (Eigen::Index r = 0; r < rows_; ++r) {
    const Eigen::Index c = r + offset;
    if (c >= 0 && c < cols_) at(r, c) += shift;
  }
}

Eigen::MatrixXcd BandedMatrix::to_dense() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows_, cols_);
  for (Eigen::Index c = 0; c < cols_; ++c)
    for (Eigen::Index r = std::max<Eigen::Index>(0, c - upper_);
         r <= std::min<Eigen::Index>(rows_ - 1, c + lower_); ++r)
      out(r, c) = (*this)(r, c);
  return out;
}

BandedMatrix shifted_window(const BandOperator& a, cplx lambda, IndexRange rows, IndexRange cols) {
  BandedMatrix m = BandedMatrix::for_window(rows, cols, a.band_width());
  m.add_operator(a, rows.lo, cols.lo, -1.0);
  m.add_identity(rows.lo, cols.lo, lambda);
  return m;
}

std::vector<double> singular_values(const BandedMatrix& m) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int kl = m.lower();
  const lapack_int ku = m.upper();
  const lapack_int ldab = kl + ku + 1;
  const lapack_int k = std::min(rows, cols);

  std::vector<lapack_complex_double> ab(m.storage().begin(), m.storage().end());

  std::vector<double> d(static_cast<std::size_t>(k));
  std::vector<double> e(static_cast<std::size_t>(std::max<lapack_int>(k - 1, 1)));
  lapack_complex_double dummy{};
  lapack_int info = LAPACKE_zgbbrd(LAPACK_COL_MAJOR, 'N', rows, cols, 0, kl, ku, ab.data(), ldab,
                                   d.data(), e.data(), &dummy, 1, &dummy, 1, &dummy, 1);
  if (info != 0) throw std::runtime_error("zgbbrd failed with info = " + std::to_string(info));

  const char uplo = rows >= cols ? 'U' : 'L';
  double ddummy = 0.0;
  info = LAPACKE_dbdsqr(LAPACK_COL_MAJOR, uplo, k, 0, 0, 0, d.data(), e.data(), &ddummy, 1,
                        &ddummy, 1, &ddummy, 1);
  if (info != 0) throw std::runtime_error("dbdsqr failed with info = " + std::to_string(info));
  return d;
}

double smallest_singular_value(const BandedMatrix& m) { return singular_values(m).back(); }

double largest_singular_value(const BandedMatrix& m) { return singular_values(m).front(); }

std::vector<double> singular_values_dense(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace limitspec
