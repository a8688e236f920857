#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "limitspec/execution.hpp"
#include "limitspec/operators.hpp"
#include "limitspec/region.hpp"
#include "limitspec/spectra.hpp"

namespace limitspec {

/// How torus families on different diagonals move under a common shift.
enum class Coupling { Independent, SharedPhase };

/// sigma_op(A) described diagonal by diagonal.
///
/// Limit operators take every diagonal along the same sequence h, so members
/// are not the free product of the per-diagonal families. Enumeration couples
///  - periodic diagonals through one shift residue r (b -> b(. + r)),
///  - Explicit diagonals through one direction (all left tails or all right),
///  - SqrtParity diagonals with equal offsets through one representative,
///  - torus diagonals with equal alpha through one phase (SharedPhase),
///    keeping their relative phases,
/// and treats pseudo-ergodic diagonals as independent full shifts.
struct OperatorSpectrumFamily {
  BandOperator base;
  std::map<std::int64_t, LimitFamily> per_diagonal;
  Coupling coupling = Coupling::Independent;
};

OperatorSpectrumFamily operator_spectrum(const BandOperator& a);

struct LimitOperatorSample {
  BandOperator op;
  std::string descriptor;
};

struct EssentialOptions {
  int phase_samples = 64;
  int word_len = 4;
  int theta_samples = 256;
  /// Largest continued-fraction denominator used for torus families.
  std::int64_t max_period = 64;
  int convergents = 8;
  std::size_t max_members = std::size_t{1} << 16;
  /// Cap on |alphabet|^word_len.
  std::int64_t max_words = 4096;
  Execution exec = Execution::parallel;
};

/// The first `count` continued-fraction convergents p/q of alpha (0/1 is
/// skipped); stops early when alpha is exhausted.
std::vector<std::pair<std::int64_t, std::int64_t>> continued_fraction_convergents(double alpha,
                                                                                   int count);

/// Limit operators used for spectra: finite sets in full, torus families on a
/// uniform phase grid at rational frequency p/q, full shifts as all words of
/// length <= word_len taken as periodic potentials.
struct MemberList {
  std::vector<LimitOperatorSample> members;
  int word_len = 0;            // after applying the word cap
  bool words_truncated = false;
  std::vector<std::pair<std::int64_t, std::int64_t>> approximants;  // per torus group, in use
};

/// `rational` selects the convergent index per torus group; empty means the
/// last admissible convergent.
MemberList enumerate_members(const OperatorSpectrumFamily& family, const EssentialOptions& opts,
                             const std::vector<std::size_t>& convergent_choice = {});

/// Spectrum of one limit operator, by its class: periodic members through
/// the Floquet symbol; members with step diagonals through the spectra of
/// their own tail operators plus eigenvalues of a centered truncation whose
/// eigenvectors stay away from the window edges.
PeriodicSpectrumData member_spectrum(const BandOperator& b, int theta_samples);

/// Union of member spectra, with provenance in metadata.
SpectralRegion essential_spectrum(const BandOperator& a, const Grid& grid,
                                  const EssentialOptions& opts = {});

/// Pointwise min_s |lambda - s| <= eps <= max_s |lambda - s|.
bool random_bidiagonal_contains(const std::vector<cplx>& sigma, double eps, cplx lambda);

/// Closed form of the spectrum of eps V_{-1} + M_b for pseudo-ergodic b over
/// sigma: union of closed eps-disks minus the intersection of open ones.
SpectralRegion random_bidiagonal_spectrum(const std::vector<cplx>& sigma, double eps, const Grid& grid);

struct VerificationReport {
  double max_discrepancy = 0.0;
  std::vector<std::int64_t> windows_compared;
  bool verdict = false;
  /// verify_randprod: sup |x(n)| over the window.
  double bound = 0.0;
  /// verify_limit_operator: the six window norms, in evaluation order.
  std::vector<double> norms;
};

/// Eigenvector of V_{-1} + M_c with c = tau left of 0 and sigma from 0 on:
/// x(n) = prod_{k=0}^{n-1} (lambda - sigma) for n >= 0 and
/// x(n) = prod_{k=n}^{-1} (lambda - tau)^{-1} for n < 0.
/// Requires |lambda - sigma| <= 1 <= |lambda - tau|.
FiniteVector randprod_vector(cplx lambda, cplx sigma, cplx tau, std::int64_t window_radius);

VerificationReport verify_randprod(cplx lambda, cplx sigma, cplx tau, std::int64_t window_radius);

/// Checks V_{-h(n)} A V_{h(n)} - B on the windows rows [-m-w, m+w] x cols
/// [-m, m] and its transpose shape for n = steps-2 .. steps.
VerificationReport verify_limit_operator(const BandOperator& a, const IntegerSequenceSpec& h,
                                         const BandOperator& b, std::int64_t m, std::int64_t steps,
                                         double tol);

struct FavardEntry {
  std::string descriptor;
  double estimate = 0.0;
};

/// Heuristic injectivity diagnostic: lower_norm_estimate over sampled limit
/// operators. Small values flag candidate failures; nothing is certified.
std::vector<FavardEntry> favard_report(const BandOperator& a, std::size_t samples, std::int64_t n,
                                       std::uint64_t seed = 0, const EssentialOptions& opts = {});

}  // namespace limitspec
