#pragma once

#include <vector>

#include <Eigen/Dense>

#include "limitspec/operators.hpp"

namespace limitspec {

/// rows x cols matrix with entry (r, c) structurally zero unless
/// -lower <= c - r <= upper. Stored in LAPACK general-band layout
/// (column-major, leading dimension lower + upper + 1).
class BandedMatrix {
 public:
  BandedMatrix(Eigen::Index rows, Eigen::Index cols, int lower, int upper);

  /// Storage sized for the window rows x cols of an operator with the given
  /// band width.
  static BandedMatrix for_window(IndexRange rows, IndexRange cols, std::int64_t band_width);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int lower() const { return lower_; }
  int upper() const { return upper_; }

  bool in_band(Eigen::Index r, Eigen::Index c) const {
    return c - r >= -lower_ && c - r <= upper_;
  }
  cplx operator()(Eigen::Index r, Eigen::Index c) const;
  cplx& at(Eigen::Index r, Eigen::Index c);

  /// this += scale * window of A, where local (0, 0) is global (row_lo, col_lo).
  void add_operator(const BandOperator& a, std::int64_t row_lo, std::int64_t col_lo, cplx scale);
  /// this += shift on the global diagonal.
  void add_identity(std::int64_t row_lo, std::int64_t col_lo, cplx shift);

  Eigen::MatrixXcd to_dense() const;

  const std::vector<cplx>& storage() const { return band_; }

 private:
  Eigen::Index rows_, cols_;
  int lower_, upper_;
  std::vector<cplx> band_;
};

/// Window of (lambda I - A) on rows x cols.
BandedMatrix shifted_window(const BandOperator& a, cplx lambda, IndexRange rows, IndexRange cols);

/// All min(rows, cols) singular values, descending. Band reduction to real
/// bidiagonal form followed by bidiagonal QR (LAPACK zgbbrd + dbdsqr).
std::vector<double> singular_values(const BandedMatrix& m);

double smallest_singular_value(const BandedMatrix& m);
double largest_singular_value(const BandedMatrix& m);

/// Dense reference path (Eigen Jacobi SVD), kept for testing the band kernel.
std::vector<double> singular_values_dense(const Eigen::MatrixXcd& m);

}  // namespace limitspec
