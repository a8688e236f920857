#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "limitspec/potentials.hpp"

namespace limitspec {

/// Largest dense window side (rows or columns) any operation will build.
inline constexpr std::int64_t kMaxWindow = 4096;

class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, std::int64_t requested,
                std::int64_t limit = kMaxWindow)
      : std::runtime_error(what + " (requested " + std::to_string(requested) + ", limit " +
                           std::to_string(limit) + ")"),
        requested_(requested) {}
  std::int64_t requested() const { return requested_; }

 private:
  std::int64_t requested_;
};

/// Closed integer interval [lo, hi].
struct IndexRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t size() const { return hi - lo + 1; }
  static IndexRange symmetric(std::int64_t n) { return {-n, n}; }
};

/// A = sum_k M_{b_k} V_k, so entry(i, j) = b_{i-j}(i).
class BandOperator {
 public:
  BandOperator() = default;
  /// Zero diagonals are dropped.
  explicit BandOperator(std::map<std::int64_t, Potential> diagonals);

  const std::map<std::int64_t, Potential>& diagonals() const { return diagonals_; }
  std::int64_t band_width() const { return band_width_; }

  cplx entry(std::int64_t i, std::int64_t j) const;

 private:
  std::map<std::int64_t, Potential> diagonals_;
  std::int64_t band_width_ = 0;
};

BandOperator band(std::map<std::int64_t, Potential> diagonals);

/// Free hopping V_{-1} + V_1.
BandOperator free_hopping();

/// V_{-1} + V_1 + M_v.
BandOperator jacobi(const Potential& v);

/// Result B satisfies B.entry(i, j) == A.entry(i + k, j + k); this is V_{-k} A V_k.
BandOperator shift_conjugate(const BandOperator& a, std::int64_t k);

struct DenseWindowMatrix {
  std::int64_t row_offset = 0;
  std::int64_t col_offset = 0;
  Eigen::MatrixXcd entries;
};

/// Dirichlet window: entries(r, c) = A.entry(rows.lo + r, cols.lo + c).
DenseWindowMatrix truncate(const BandOperator& a, IndexRange rows, IndexRange cols);

/// Sum of the sup norms of the diagonals.
double wiener_norm(const BandOperator& a);

/// Finitely supported vector: values[i] sits at global index offset + i.
struct FiniteVector {
  std::int64_t offset = 0;
  std::vector<cplx> values;
};

/// Exact banded product; the support grows by the band width on each side.
FiniteVector apply(const BandOperator& a, const FiniteVector& x);

}  // namespace limitspec
