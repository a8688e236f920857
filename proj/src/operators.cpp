#include "limitspec/operators.hpp"

#include <algorithm>
#include <cstdlib>

namespace limitspec {

namespace {

void check_window(std::int64_t size, const char* what) {
  if (size < 1) throw std::invalid_argument(std::string(what) + " must contain at least one index");
  if (size > kMaxWindow) throw CapacityError(std::string(what) + " exceeds the dense window cap", size);
}

}  // namespace

BandOperator::BandOperator(std::map<std::int64_t, Potential> diagonals) {
  for (auto& [k, p] : diagonals) {
    if (p.is_zero()) continue;
    band_width_ = std::max(band_width_, std::abs(k));
    diagonals_.emplace(k, std::move(p));
  }
}

cplx BandOperator::entry(std::int64_t i, std::int64_t j) const {
  const auto it = diagonals_.find(i - j);
  return it == diagonals_.end() ? cplx{} : it->second.eval(i);
}

BandOperator band(std::map<std::int64_t, Potential> diagonals) {
  return BandOperator(std::move(diagonals));
}

BandOperator free_hopping() { return band({{-1, Constant{1.0}}, {1, Constant{1.0}}}); }

BandOperator jacobi(const Potential& v) {
  return band({{-1, Constant{1.0}}, {0, v}, {1, Constant{1.0}}});
}

BandOperator shift_conjugate(const BandOperator& a, std::int64_t k) {
  std::map<std::int64_t, Potential> out;
  for (const auto& [offset, p] : a.diagonals()) out.emplace(offset, p.translated(-k));
  return BandOperator(std::move(out));
}

DenseWindowMatrix truncate(const BandOperator& a, IndexRange rows, IndexRange cols) {
  check_window(rows.size(), "row interval");
  check_window(cols.size(), "column interval");
  DenseWindowMatrix out{rows.lo, cols.lo, Eigen::MatrixXcd::Zero(rows.size(), cols.size())};
  for (const auto& [k, p] : a.diagonals()) {
    // entry(i, i - k) = b_k(i)
    const std::int64_t i_lo = std::max(rows.lo, cols.lo + k);
    const std::int64_t i_hi = std::min(rows.hi, cols.hi + k);
    for (std::int64_t i = i_lo; i <= i_hi; ++i)
      out.entries(i - rows.lo, i - k - cols.lo) = p.eval(i);
  }
  return out;
}

double wiener_norm(const BandOperator& a) {
  double s = 0.0;
  for (const auto& [k, p] : a.diagonals()) s += p.sup_norm();
  return s;
}

FiniteVector apply(const BandOperator& a, const FiniteVector& x) {
  check_window(static_cast<std::int64_t>(x.values.size()), "vector support");
  const std::int64_t w = a.band_width();
  const auto len = static_cast<std::int64_t>(x.values.size());
  FiniteVector y{x.offset - w, std::vector<cplx>(static_cast<std::size_t>(len + 2 * w))};
  for (const auto& [k, p] : a.diagonals()) {
    // y(i) += b_k(i) x(i - k)
    for (std::int64_t j = 0; j < len; ++j) {
      const std::int64_t i = x.offset + j + k;
      y.values[static_cast<std::size_t>(i - y.offset)] += p.eval(i) * x.values[static_cast<std::size_t>(j)];
    }
  }
  return y;
}

}  // namespace limitspec
