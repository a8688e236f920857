#include "limitspec/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <stdexcept>

namespace limitspec {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

double frac(double x) { return x - std::floor(x); }

// Fractional part of alpha*n, keeping the rounding error of the product.
double frac_product(double alpha, std::int64_t n) {
  const double x = static_cast<double>(n);
  const double p = alpha * x;
  const double e = std::fma(alpha, x, -p);
  return frac(frac(p) + e);
}

std::int64_t isqrt(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return static_cast<std::int64_t>(r);
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double drift_value(Drift d, std::int64_t m) {
  const double am = std::abs(static_cast<double>(m));
  switch (d) {
    case Drift::SignedSqrt:
      return m < 0 ? -std::sqrt(am) : std::sqrt(am);
    case Drift::Log1p:
      return std::log1p(am);
  }
  return 0.0;
}

double cos_turns(double turns) { return std::cos(2.0 * std::numbers::pi * frac(turns)); }

std::vector<cplx> dedupe(const std::vector<cplx>& in) {
  std::vector<cplx> out;
  for (const cplx& v : in)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

}  // namespace

Potential::Potential() : data_(Constant{0.0}) {}
Potential::Potential(Constant c) : data_(c) {}
Potential::Potential(Periodic p) : data_(std::move(p)) {
  if (std::get<Periodic>(data_).values.empty())
    throw std::invalid_argument("periodic potential needs at least one value");
}
Potential::Potential(QuasiPeriodic q) : data_(q) {
  if (!(q.alpha > 0.0 && q.alpha < 1.0))
    throw std::invalid_argument("quasi-periodic frequency must lie in (0,1)");
}
Potential::Potential(SlowOscillation s) : data_(s) {
  if (!(s.base.alpha > 0.0 && s.base.alpha < 1.0))
    throw std::invalid_argument("quasi-periodic frequency must lie in (0,1)");
}
Potential::Potential(PseudoErgodic p) : data_(std::move(p)) {
  if (std::get<PseudoErgodic>(data_).alphabet.empty())
    throw std::invalid_argument("pseudo-ergodic alphabet must be nonempty");
}
Potential::Potential(SqrtParity s) : data_(s) {}
Potential::Potential(Explicit e) : data_(std::move(e)) {}

cplx Potential::eval(std::int64_t n) const {
  struct Visitor {
    std::int64_t n;
    cplx operator()(const Constant& c) const { return c.value; }
    cplx operator()(const Periodic& p) const {
      const auto q = static_cast<std::int64_t>(p.values.size());
      return p.values[static_cast<std::size_t>(floor_mod(n, q))];
    }
    cplx operator()(const QuasiPeriodic& q) const {
      return q.amplitude * cos_turns(frac_product(q.alpha, n) + q.phase);
    }
    cplx operator()(const SlowOscillation& s) const {
      const std::int64_t m = n - s.offset;
      return s.base.amplitude *
             cos_turns(frac_product(s.base.alpha, m) + s.base.phase + drift_value(s.drift, m));
    }
    cplx operator()(const PseudoErgodic& p) const {
      const std::uint64_t h =
          mix64(mix64(p.seed ^ 0x9E3779B97F4A7C15ULL) + static_cast<std::uint64_t>(n));
      return p.alphabet[static_cast<std::size_t>(h % p.alphabet.size())];
    }
    cplx operator()(const SqrtParity& s) const {
      const std::int64_t m = n - s.offset;
      const std::uint64_t am = m < 0 ? static_cast<std::uint64_t>(-(m + 1)) + 1
                                     : static_cast<std::uint64_t>(m);
      return static_cast<double>(isqrt(am) % 2);
    }
    cplx operator()(const Explicit& e) const {
      if (n < e.start) return e.left_tail;
      const std::int64_t i = n - e.start;
      if (i >= static_cast<std::int64_t>(e.values.size())) return e.right_tail;
      return e.values[static_cast<std::size_t>(i)];
    }
  };
  return std::visit(Visitor{n}, data_);
}

double Potential::sup_norm() const {
  struct Visitor {
    double operator()(const Constant& c) const { return std::abs(c.value); }
    double operator()(const Periodic& p) const {
      double s = 0.0;
      for (const cplx& v : p.values) s = std::max(s, std::abs(v));
      return s;
    }
    double operator()(const QuasiPeriodic& q) const { return std::abs(q.amplitude); }
    double operator()(const SlowOscillation& s) const { return std::abs(s.base.amplitude); }
    double operator()(const PseudoErgodic& p) const {
      double s = 0.0;
      for (const cplx& v : p.alphabet) s = std::max(s, std::abs(v));
      return s;
    }
    double operator()(const SqrtParity&) const { return 1.0; }
    double operator()(const Explicit& e) const {
      double s = std::max(std::abs(e.left_tail), std::abs(e.right_tail));
      for (const cplx& v : e.values) s = std::max(s, std::abs(v));
      return s;
    }
  };
  return std::visit(Visitor{}, data_);
}

Potential Potential::translated(std::int64_t k) const {
  struct Visitor {
    std::int64_t k;
    const Potential& self;
    Potential operator()(const Constant& c) const { return c; }
    Potential operator()(const Periodic& p) const {
      const auto q = static_cast<std::int64_t>(p.values.size());
      Periodic out{std::vector<cplx>(p.values.size())};
      for (std::int64_t i = 0; i < q; ++i)
        out.values[static_cast<std::size_t>(i)] =
            p.values[static_cast<std::size_t>(floor_mod(i - k, q))];
      return out;
    }
    Potential operator()(const QuasiPeriodic& q) const {
      QuasiPeriodic out = q;
      out.phase = frac(q.phase - frac_product(q.alpha, k));
      return out;
    }
    Potential operator()(const SlowOscillation& s) const {
      SlowOscillation out = s;
      out.offset += k;
      return out;
    }
    Potential operator()(const PseudoErgodic&) const {
      Explicit snap;
      snap.start = -kSnapshotRadius;
      snap.values.resize(static_cast<std::size_t>(2 * kSnapshotRadius + 1));
      for (std::int64_t m = -kSnapshotRadius; m <= kSnapshotRadius; ++m)
        snap.values[static_cast<std::size_t>(m + kSnapshotRadius)] = self.eval(m - k);
      snap.left_tail = snap.values.front();
      snap.right_tail = snap.values.back();
      return snap;
    }
    Potential operator()(const SqrtParity& s) const { return SqrtParity{s.offset + k}; }
    Potential operator()(const Explicit& e) const {
      Explicit out = e;
      out.start += k;
      return out;
    }
  };
  return std::visit(Visitor{k, *this}, data_);
}

bool Potential::is_zero() const {
  if (const auto* c = as<Constant>()) return c->value == cplx{};
  if (const auto* p = as<Periodic>())
    return std::all_of(p->values.begin(), p->values.end(), [](cplx v) { return v == cplx{}; });
  if (const auto* e = as<Explicit>())
    return e->left_tail == cplx{} && e->right_tail == cplx{} &&
           std::all_of(e->values.begin(), e->values.end(), [](cplx v) { return v == cplx{}; });
  return false;
}

std::optional<std::int64_t> Potential::period() const {
  if (as<Constant>()) return 1;
  if (const auto* p = as<Periodic>()) return static_cast<std::int64_t>(p->values.size());
  return std::nullopt;
}

std::string Potential::kind() const {
  static const char* names[] = {"constant",       "periodic",   "quasi_periodic", "slow_osc",
                                "pseudo_ergodic", "sqrt_parity", "explicit"};
  return names[data_.index()];
}

Potential make_periodic(std::vector<cplx> values) { return Periodic{std::move(values)}; }

Potential make_quasi_periodic(cplx amplitude, double alpha, double phase) {
  return QuasiPeriodic{amplitude, alpha, frac(phase)};
}

Potential quasi_periodic_rational(cplx amplitude, std::int64_t numerator,
                                  std::int64_t denominator, double phase) {
  if (denominator <= 0) throw std::invalid_argument("rational frequency needs a positive denominator");
  const std::int64_t g = std::gcd(numerator, denominator);
  const std::int64_t p = numerator / (g == 0 ? 1 : g);
  const std::int64_t q = denominator / (g == 0 ? 1 : g);
  std::vector<cplx> values(static_cast<std::size_t>(q));
  for (std::int64_t n = 0; n < q; ++n) {
    const double turns = static_cast<double>(floor_mod(p * n, q)) / static_cast<double>(q);
    values[static_cast<std::size_t>(n)] = amplitude * cos_turns(turns + phase);
  }
  return Periodic{std::move(values)};
}

Potential make_pseudo_ergodic(std::vector<cplx> alphabet, std::uint64_t seed) {
  return PseudoErgodic{std::move(alphabet), seed};
}

Potential step_function(std::int64_t jump, cplx below, cplx above) {
  return Explicit{jump, {below}, below, above};
}

double window_distance(const Potential& a, const Potential& b, std::int64_t radius) {
  double d = 0.0;
  for (std::int64_t m = -radius; m <= radius; ++m) d = std::max(d, std::abs(a.eval(m) - b.eval(m)));
  return d;
}

Potential TorusFamily::sample(double t) const { return QuasiPeriodic{amplitude, alpha, frac(t)}; }

std::string LimitFamily::kind() const {
  static const char* names[] = {"finite_set", "torus", "full_shift", "empty"};
  return names[family.index()];
}

LimitFamily limit_functions(const Potential& p) {
  constexpr std::int64_t kCompareRadius = 64;
  constexpr double kCompareTol = 1e-12;

  auto distinct = [&](std::vector<Potential> candidates) {
    FiniteSet set;
    for (auto& c : candidates) {
      const bool seen = std::any_of(set.members.begin(), set.members.end(), [&](const Potential& m) {
        return window_distance(m, c, kCompareRadius) <= kCompareTol;
      });
      if (!seen) set.members.push_back(std::move(c));
    }
    return set;
  };

  struct Visitor {
    decltype(distinct)& dedupe_set;
    const Potential& self;
    LimitFamily operator()(const Constant& c) const { return {FiniteSet{{c}}}; }
    LimitFamily operator()(const Periodic& per) const {
      // translate by -r is the limit along h(n) = q*n + r
      std::vector<Potential> out;
      for (std::size_t r = 0; r < per.values.size(); ++r)
        out.push_back(self.translated(-static_cast<std::int64_t>(r)));
      return {dedupe_set(std::move(out))};
    }
    LimitFamily operator()(const QuasiPeriodic& q) const {
      return {TorusFamily{q.amplitude, q.alpha}};
    }
    LimitFamily operator()(const SlowOscillation& s) const {
      return {TorusFamily{s.base.amplitude, s.base.alpha}};
    }
    LimitFamily operator()(const PseudoErgodic& pe) const {
      return {FullShift{dedupe(pe.alphabet)}};
    }
    LimitFamily operator()(const SqrtParity&) const {
      LimitFamily f{FiniteSet{{Constant{0.0}, Constant{1.0}, step_function(0, 1.0, 0.0),
                               step_function(0, 0.0, 1.0)}}};
      f.orbit_representatives = true;
      return f;
    }
    LimitFamily operator()(const Explicit& e) const {
      return {dedupe_set({Constant{e.left_tail}, Constant{e.right_tail}})};
    }
  };
  return std::visit(Visitor{distinct, p}, p.data());
}

IntegerSequenceSpec IntegerSequenceSpec::polynomial(std::vector<std::int64_t> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  if (coeffs.size() < 2)
    throw std::invalid_argument("sequence polynomial must have degree >= 1 to tend to infinity");
  return IntegerSequenceSpec(true, std::move(coeffs));
}

IntegerSequenceSpec IntegerSequenceSpec::explicit_list(std::vector<std::int64_t> values) {
  if (values.empty()) throw std::invalid_argument("explicit sequence is empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    // |values| must strictly increase; compare as unsigned magnitudes.
    const auto mag = [](std::int64_t v) {
      return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
    };
    if (mag(values[i]) <= mag(values[i - 1]))
      throw std::invalid_argument("explicit sequence must be strictly increasing in modulus");
  }
  return IntegerSequenceSpec(false, std::move(values));
}

std::int64_t IntegerSequenceSpec::operator()(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("sequences are indexed from n = 1");
  if (!polynomial_) {
    if (n > static_cast<std::int64_t>(terms_.size()))
      throw std::out_of_range("explicit sequence has only " + std::to_string(terms_.size()) +
                              " terms");
    return terms_[static_cast<std::size_t>(n - 1)];
  }
  std::int64_t acc = 0;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (__builtin_mul_overflow(acc, n, &acc) || __builtin_add_overflow(acc, *it, &acc))
      throw std::overflow_error("sequence value overflows 64 bits");
  }
  return acc;
}

std::variant<LimitWindow, DivergenceReport> numeric_limit_along(
    const Potential& p, const IntegerSequenceSpec& h, std::int64_t window_radius,
    std::int64_t steps, double tol) {
  if (window_radius < 1) throw std::invalid_argument("window radius must be >= 1");
  if (steps < 3) throw std::invalid_argument("steps must be >= 3");
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");

  std::vector<std::vector<cplx>> windows;
  std::vector<std::int64_t> ns;
  for (std::int64_t n = steps - 2; n <= steps; ++n) {
    const std::int64_t shift = h(n);
    std::vector<cplx> w;
    w.reserve(static_cast<std::size_t>(2 * window_radius + 1));
    for (std::int64_t m = -window_radius; m <= window_radius; ++m) w.push_back(p.eval(m + shift));
    windows.push_back(std::move(w));
    ns.push_back(n);
  }

  double worst = 0.0;
  for (std::size_t a = 0; a < windows.size(); ++a)
    for (std::size_t b = a + 1; b < windows.size(); ++b)
      for (std::size_t i = 0; i < windows[a].size(); ++i)
        worst = std::max(worst, std::abs(windows[a][i] - windows[b][i]));

  if (worst <= tol) return LimitWindow{window_radius, std::move(windows.back())};
  return DivergenceReport{worst, std::move(ns)};
}

}  // namespace limitspec
