#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace limitspec {

using cplx = std::complex<double>;

/// b(n) = value for every n.
struct Constant {
  cplx value;
};

/// b(n) = values[n mod q] with q = values.size() and a non-negative modulus.
struct Periodic {
  std::vector<cplx> values;
};

/// b(n) = amplitude * cos(2*pi*(alpha*n + phase)), alpha declared irrational.
///
/// Rational frequencies never reach this type: quasi_periodic_rational()
/// rewrites them to Periodic.
struct QuasiPeriodic {
  cplx amplitude;
  double alpha = 0.0;
  double phase = 0.0;
};

enum class Drift { SignedSqrt, Log1p };

/// b(n) = amplitude * cos(2*pi*(alpha*m + phase + f(m))) with m = n - offset.
/// The offset carries translations so the variant survives translate().
struct SlowOscillation {
  QuasiPeriodic base;
  Drift drift = Drift::SignedSqrt;
  std::int64_t offset = 0;
};

/// A fixed realization of i.i.d. uniform draws from the alphabet, computed
/// as a counter-based hash of (seed, n).
struct PseudoErgodic {
  std::vector<cplx> alphabet;
  std::uint64_t seed = 0;
};

/// b(n) = floor(sqrt(|n - offset|)) mod 2.
struct SqrtParity {
  std::int64_t offset = 0;
};

/// Contiguous window of values starting at `start`, constant tails outside.
/// With an empty window: n < start -> left_tail, n >= start -> right_tail.
struct Explicit {
  std::int64_t start = 0;
  std::vector<cplx> values;
  cplx left_tail;
  cplx right_tail;
};

/// Window used when translating a PseudoErgodic realization into an Explicit
/// snapshot.
inline constexpr std::int64_t kSnapshotRadius = std::int64_t{1} << 16;

class Potential {
 public:
  using Variant = std::variant<Constant, Periodic, QuasiPeriodic, SlowOscillation,
                               PseudoErgodic, SqrtParity, Explicit>;

  Potential();
  Potential(Constant c);
  Potential(Periodic p);
  Potential(QuasiPeriodic q);
  Potential(SlowOscillation s);
  Potential(PseudoErgodic p);
  Potential(SqrtParity s);
  Potential(Explicit e);

  cplx eval(std::int64_t n) const;
  double sup_norm() const;

  /// Result r satisfies r.eval(m) == eval(m - k).
  Potential translated(std::int64_t k) const;

  /// True for identically-zero Constant, Periodic and Explicit values.
  bool is_zero() const;

  /// Period for Constant (1) and Periodic (q); nullopt otherwise.
  std::optional<std::int64_t> period() const;

  std::string kind() const;
  const Variant& data() const { return data_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&data_);
  }

 private:
  Variant data_;
};

// Validating factories.
Potential make_periodic(std::vector<cplx> values);
Potential make_quasi_periodic(cplx amplitude, double alpha, double phase);
Potential quasi_periodic_rational(cplx amplitude, std::int64_t numerator,
                                  std::int64_t denominator, double phase);
Potential make_pseudo_ergodic(std::vector<cplx> alphabet, std::uint64_t seed);

/// Step function with constant tails: value `below` for n <= jump, `above` for
/// n > jump.
Potential step_function(std::int64_t jump, cplx below, cplx above);

/// Sup-distance between two potentials on [-radius, radius].
double window_distance(const Potential& a, const Potential& b, std::int64_t radius);

// ---------------------------------------------------------------------------
// Limit functions

struct FiniteSet {
  std::vector<Potential> members;
};

/// {QuasiPeriodic(amplitude, alpha, t) : t in [0,1)}.
struct TorusFamily {
  cplx amplitude;
  double alpha = 0.0;

  Potential sample(double t) const;
};

/// Every sequence over the alphabet.
struct FullShift {
  std::vector<cplx> alphabet;
};

struct EmptyFamily {};

struct LimitFamily {
  std::variant<FiniteSet, TorusFamily, FullShift, EmptyFamily> family;
  /// Set when members are shift-orbit representatives rather than the whole
  /// set (SqrtParity steps are canonicalized with the jump at 0).
  bool orbit_representatives = false;

  std::string kind() const;
};

LimitFamily limit_functions(const Potential& p);

// ---------------------------------------------------------------------------
// Sequences tending to infinity

class IntegerSequenceSpec {
 public:
  /// h(n) = sum_i coeffs[i] * n^i for n >= 1. Degree must be >= 1.
  static IntegerSequenceSpec polynomial(std::vector<std::int64_t> coeffs);
  /// Values h(1), h(2), ... with |h| strictly increasing.
  static IntegerSequenceSpec explicit_list(std::vector<std::int64_t> values);

  /// Throws std::out_of_range past an explicit list and std::overflow_error on
  /// 64-bit overflow.
  std::int64_t operator()(std::int64_t n) const;

  bool is_polynomial() const { return polynomial_; }
  const std::vector<std::int64_t>& terms() const { return terms_; }

 private:
  IntegerSequenceSpec(bool polynomial, std::vector<std::int64_t> terms)
      : polynomial_(polynomial), terms_(std::move(terms)) {}

  bool polynomial_;
  std::vector<std::int64_t> terms_;
};

struct LimitWindow {
  std::int64_t radius = 0;
  std::vector<cplx> values;  // values[m + radius] for m in [-radius, radius]
};

struct DivergenceReport {
  double max_discrepancy = 0.0;
  std::vector<std::int64_t> windows_compared;  // the n's whose windows were compared
};

/// Compares the windows b(m + h(n)), |m| <= window_radius, for
/// n = steps-2, steps-1, steps. Agreement within tol (sup norm, pairwise)
/// returns the last window.
std::variant<LimitWindow, DivergenceReport> numeric_limit_along(
    const Potential& p, const IntegerSequenceSpec& h, std::int64_t window_radius,
    std::int64_t steps, double tol);

}  // namespace limitspec
