#include "limitspec/limitops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "limitspec/banded.hpp"

namespace limitspec {

namespace {

std::string diagonal_name(std::int64_t k, const Potential& p) {
  return "diagonal " + std::to_string(k) + " (" + p.kind() + ")";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double torus_phase(const Potential& p) {
  if (const auto* q = p.as<QuasiPeriodic>()) return q->phase;
  if (const auto* s = p.as<SlowOscillation>()) return s->base.phase;
  return 0.0;
}

using Word = std::vector<std::size_t>;

bool is_primitive(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < n && repeats; ++i) repeats = w[i] == w[i - d];
    if (repeats) return false;
  }
  return true;
}

bool is_min_rotation(const Word& w) {
  for (std::size_t r = 1; r < w.size(); ++r)
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::size_t a = w[(i + r) % w.size()], b = w[i];
      if (a < b) return false;
      if (a > b) break;
    }
  return true;
}

// All primitive words of length 1..len, optionally one per rotation class.
std::vector<Word> enumerate_words(std::size_t alphabet, int len, bool necklaces) {
  std::vector<Word> out;
  for (int l = 1; l <= len; ++l) {
    Word w(static_cast<std::size_t>(l), 0);
    while (true) {
      if (is_primitive(w) && (!necklaces || is_min_rotation(w))) out.push_back(w);
      int i = l - 1;
      while (i >= 0 && w[static_cast<std::size_t>(i)] + 1 == alphabet) w[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
      ++w[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

std::string word_string(const Word& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + "]";
}

using Diagonals = std::map<std::int64_t, Potential>;

struct Axis {
  std::string name;
  std::size_t size = 1;
  std::function<std::string(std::size_t, Diagonals&)> apply;
  bool sampled = false;  // torus phases or words, as opposed to a finite family
};

struct BuildMode {
  bool rational_torus = true;   // periodic approximants instead of exact phases
  int phase_samples = 64;
  bool random_words = false;
  std::size_t random_word_count = 0;
  std::uint64_t seed = 0;
};

struct Built {
  std::vector<Axis> axes;
  Diagonals fixed;
  int word_len = 0;
  bool words_truncated = false;
  std::vector<std::pair<std::int64_t, std::int64_t>> approximants;
};

Built build_axes(const OperatorSpectrumFamily& family, const EssentialOptions& opts,
                 const BuildMode& mode, const std::vector<std::size_t>& convergent_choice) {
  Built built;
  const auto& base = family.base.diagonals();

  std::vector<std::int64_t> periodic, explicit_tails, full_shift;
  std::map<std::int64_t, std::vector<std::int64_t>> sqrt_groups;  // by offset
  std::vector<std::vector<std::int64_t>> torus_groups;

  for (const auto& [k, p] : base) {
    const LimitFamily& lf = family.per_diagonal.at(k);
    if (std::holds_alternative<EmptyFamily>(lf.family))
      throw std::invalid_argument("unsupported limit family on " + diagonal_name(k, p));
    if (p.as<Constant>()) {
      built.fixed.emplace(k, p);
    } else if (p.as<Periodic>()) {
      periodic.push_back(k);
    } else if (p.as<Explicit>()) {
      explicit_tails.push_back(k);
    } else if (const auto* sp = p.as<SqrtParity>()) {
      sqrt_groups[sp->offset].push_back(k);
    } else if (p.as<PseudoErgodic>()) {
      full_shift.push_back(k);
    } else if (const auto* tf = std::get_if<TorusFamily>(&lf.family)) {
      bool placed = false;
      if (family.coupling == Coupling::SharedPhase)
        for (auto& g : torus_groups)
          if (std::get<TorusFamily>(family.per_diagonal.at(g.front()).family).alpha == tf->alpha) {
            g.push_back(k);
            placed = true;
            break;
          }
      if (!placed) torus_groups.push_back({k});
    } else {
      throw std::invalid_argument("unsupported limit family on " + diagonal_name(k, p));
    }
  }

  if (!periodic.empty()) {
    std::int64_t lcm = 1;
    for (auto k : periodic) lcm = std::lcm(lcm, *base.at(k).period());
    built.axes.push_back({"periodic shift", static_cast<std::size_t>(lcm),
                          [&base, periodic](std::size_t r, Diagonals& d) {
                            for (auto k : periodic)
                              d.insert_or_assign(k, base.at(k).translated(-static_cast<std::int64_t>(r)));
                            return "shift=" + std::to_string(r);
                          }});
  }

  if (!explicit_tails.empty()) {
    built.axes.push_back({"explicit tails", 2, [&base, explicit_tails](std::size_t side, Diagonals& d) {
                            for (auto k : explicit_tails) {
                              const auto* e = base.at(k).as<Explicit>();
                              d.insert_or_assign(k, Constant{side == 0 ? e->left_tail : e->right_tail});
                            }
                            return std::string(side == 0 ? "tail=left" : "tail=right");
                          }});
  }

  for (const auto& [offset, ks] : sqrt_groups) {
    const auto reps = std::get<FiniteSet>(limit_functions(SqrtParity{offset}).family).members;
    built.axes.push_back({diagonal_name(ks.front(), base.at(ks.front())), reps.size(),
                          [ks, reps](std::size_t i, Diagonals& d) {
                            for (auto k : ks) d.insert_or_assign(k, reps[i]);
                            static const char* names[] = {"0", "1", "step<=0", "step>=1"};
                            return std::string("sqrt_parity=") + names[i];
                          }});
  }

  for (std::size_t g = 0; g < torus_groups.size(); ++g) {
    const auto& ks = torus_groups[g];
    const auto& tf = std::get<TorusFamily>(family.per_diagonal.at(ks.front()).family);
    const double ref_phase = torus_phase(base.at(ks.front()));
    std::int64_t p = 0, q = 0;
    if (mode.rational_torus) {
      auto convs = continued_fraction_convergents(tf.alpha, opts.convergents);
      std::erase_if(convs, [&](auto pq) { return pq.second > opts.max_period; });
      if (convs.empty())
        throw std::invalid_argument("no rational approximant with denominator <= " +
                                    std::to_string(opts.max_period) + " for " +
                                    diagonal_name(ks.front(), base.at(ks.front())));
      std::size_t choice = convs.size() - 1;
      if (g < convergent_choice.size()) choice = std::min(choice, convergent_choice[g]);
      std::tie(p, q) = convs[choice];
      built.approximants.emplace_back(p, q);
    }
    const int samples = std::max(1, mode.phase_samples);
    built.axes.push_back(
        {diagonal_name(ks.front(), base.at(ks.front())), static_cast<std::size_t>(samples),
         [&base, ks, ref_phase, p, q, samples, rational = mode.rational_torus,
          alpha = tf.alpha](std::size_t j, Diagonals& d) {
           const double t = static_cast<double>(j) / samples;
           for (auto k : ks) {
             const Potential& src = base.at(k);
             const cplx amp = src.as<QuasiPeriodic>() ? src.as<QuasiPeriodic>()->amplitude
                                                      : src.as<SlowOscillation>()->base.amplitude;
             const double phase = t + torus_phase(src) - ref_phase;
             d.insert_or_assign(k, rational ? quasi_periodic_rational(amp, p, q, phase)
                                            : make_quasi_periodic(amp, alpha, phase));
           }
           std::string s = "phase[" + fmt(alpha) + "]=" + fmt(t);
           if (rational) s += "@" + std::to_string(p) + "/" + std::to_string(q);
           return s;
         },
         true});
  }

  if (!full_shift.empty()) {
    const bool only_axis = built.axes.empty() && full_shift.size() == 1;
    built.word_len = opts.word_len;
    for (auto k : full_shift) {
      const auto& alphabet = std::get<FullShift>(family.per_diagonal.at(k).family).alphabet;
      std::vector<Word> words;
      if (mode.random_words) {
        std::mt19937_64 rng(mode.seed ^ static_cast<std::uint64_t>(k));
        std::uniform_int_distribution<int> len_dist(1, std::max(1, opts.word_len));
        std::uniform_int_distribution<std::size_t> letter(0, alphabet.size() - 1);
        for (std::size_t i = 0; i < std::max<std::size_t>(1, mode.random_word_count); ++i) {
          Word w(static_cast<std::size_t>(len_dist(rng)));
          for (auto& c : w) c = letter(rng);
          words.push_back(std::move(w));
        }
      } else {
        int len = opts.word_len;
        auto count_fits = [&](int l) {
          double c = std::pow(static_cast<double>(alphabet.size()), l);
          return c <= static_cast<double>(opts.max_words);
        };
        while (len > 0 && !count_fits(len)) --len;
        if (len < 1)
          throw std::invalid_argument("alphabet too large for the word cap on " + diagonal_name(k, base.at(k)));
        if (len < opts.word_len) built.words_truncated = true;
        built.word_len = std::min(built.word_len, len);
        words = enumerate_words(alphabet.size(), len, only_axis);
      }
      built.axes.push_back({diagonal_name(k, base.at(k)), words.size(),
                            [k, alphabet, words](std::size_t i, Diagonals& d) {
                              std::vector<cplx> values;
                              for (auto c : words[i]) values.push_back(alphabet[c]);
                              d.insert_or_assign(k, Periodic{std::move(values)});
                              return "word@" + std::to_string(k) + "=" + word_string(words[i]);
                            },
                            true});
    }
  }
  return built;
}

std::vector<LimitOperatorSample> materialize(const Built& built, std::size_t max_members) {
  std::size_t total = 1;
  for (const auto& axis : built.axes) {
    if (axis.size == 0) return {};
    if (total > max_members / axis.size)
      throw std::invalid_argument("limit-operator enumeration exceeds " + std::to_string(max_members) +
                                  " members at " + axis.name);
    total *= axis.size;
  }
  std::vector<LimitOperatorSample> out;
  out.reserve(total);
  std::vector<std::size_t> idx(built.axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Diagonals d = built.fixed;
    std::string desc;
    for (std::size_t a = 0; a < built.axes.size(); ++a) {
      if (!desc.empty()) desc += ";";
      desc += built.axes[a].apply(idx[a], d);
    }
    out.push_back({BandOperator(std::move(d)), desc.empty() ? "self" : desc});
    for (std::size_t a = built.axes.size(); a-- > 0;) {
      if (++idx[a] < built.axes[a].size) break;
      idx[a] = 0;
    }
  }
  return out;
}

void merge_data(PeriodicSpectrumData& into, const PeriodicSpectrumData& from, bool first) {
  into.points.insert(into.points.end(), from.points.begin(), from.points.end());
  into.all_real = (first || into.all_real) && from.all_real;
  if (into.all_real) {
    auto bands = into.bands;
    bands.insert(bands.end(), from.bands.begin(), from.bands.end());
    into.bands = merge_intervals(std::move(bands), 1e-9);
  } else {
    into.bands.clear();
  }
}

struct UnionResult {
  SpectralRegion region;
  std::size_t members = 0;
};

UnionResult union_of_members(const std::vector<LimitOperatorSample>& members, const Grid& grid,
                             const EssentialOptions& opts) {
  std::vector<PeriodicSpectrumData> parts(members.size());
  for_each_index(members.size(), opts.exec,
                 [&](std::size_t i) { parts[i] = member_spectrum(members[i].op, opts.theta_samples); });
  PeriodicSpectrumData all;
  for (std::size_t i = 0; i < parts.size(); ++i) merge_data(all, parts[i], i == 0);
  SpectralRegion region(grid);
  add_to_region(region, all);
  return {std::move(region), members.size()};
}

// Smallest enclosing circle radius of a finite point set (incremental).
double enclosing_radius(const std::vector<cplx>& pts) {
  auto circle2 = [](cplx a, cplx b) { return std::pair{(a + b) / 2.0, std::abs(a - b) / 2.0}; };
  auto circle3 = [&](cplx a, cplx b, cplx c) {
    const cplx ab = b - a, ac = c - a;
    const double d = 2.0 * (ab.real() * ac.imag() - ab.imag() * ac.real());
    if (std::abs(d) < 1e-300) {
      auto c1 = circle2(a, b), c2 = circle2(a, c), c3 = circle2(b, c);
      return std::max({c1, c2, c3}, [](auto x, auto y) { return x.second < y.second; });
    }
    const double b2 = std::norm(ab), c2 = std::norm(ac);
    const cplx u{(ac.imag() * b2 - ab.imag() * c2) / d, (ab.real() * c2 - ac.real() * b2) / d};
    return std::pair{a + u, std::abs(u)};
  };
  const double slack = 1e-12;
  std::pair<cplx, double> c{pts.front(), 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (std::abs(pts[i] - c.first) <= c.second * (1 + slack)) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(pts[j] - c.first) <= c.second * (1 + slack)) continue;
      c = circle2(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (std::abs(pts[k] - c.first) > c.second * (1 + slack)) c = circle3(pts[i], pts[j], pts[k]);
    }
  }
  return c.second;
}

}  // namespace

OperatorSpectrumFamily operator_spectrum(const BandOperator& a) {
  OperatorSpectrumFamily f{a, {}, Coupling::Independent};
  std::map<double, int> torus_alphas;
  for (const auto& [k, p] : a.diagonals()) {
    LimitFamily lf = limit_functions(p);
    if (const auto* t = std::get_if<TorusFamily>(&lf.family)) ++torus_alphas[t->alpha];
    f.per_diagonal.emplace(k, std::move(lf));
  }
  for (const auto& [alpha, count] : torus_alphas)
    if (count >= 2) f.coupling = Coupling::SharedPhase;
  return f;
}

std::vector<std::pair<std::int64_t, std::int64_t>> continued_fraction_convergents(double alpha,
                                                                                   int count) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p = static_cast<std::int64_t>(std::floor(alpha)), q = 1;
  double x = alpha - std::floor(alpha);
  while (static_cast<int>(out.size()) < count && x > 1e-12) {
    x = 1.0 / x;
    const auto a = static_cast<std::int64_t>(std::floor(x));
    x -= static_cast<double>(a);
    const std::int64_t pn = a * p + p_prev, qn = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    out.emplace_back(p, q);
    if (q > (std::int64_t{1} << 40)) break;
  }
  return out;
}

MemberList enumerate_members(const OperatorSpectrumFamily& family, const EssentialOptions& opts,
                             const std::vector<std::size_t>& convergent_choice) {
  BuildMode mode;
  mode.phase_samples = opts.phase_samples;
  Built built = build_axes(family, opts, mode, convergent_choice);
  MemberList list;
  list.members = materialize(built, opts.max_members);
  list.word_len = built.word_len;
  list.words_truncated = built.words_truncated;
  list.approximants = built.approximants;
  return list;
}

PeriodicSpectrumData member_spectrum(const BandOperator& b, int theta_samples) {
  bool periodic = true, steps = false;
  for (const auto& [k, p] : b.diagonals()) {
    if (p.as<Explicit>())
      steps = true;
    else if (!p.period())
      throw std::invalid_argument("no spectrum method for member with " + diagonal_name(k, p));
    periodic = periodic && p.period().has_value();
  }
  if (periodic) {
    const std::int64_t q = common_period(b);
    return periodic_spectrum_data(b, q, theta_samples, q <= 8);
  }
  if (!steps) throw std::invalid_argument("no spectrum method for member");

  // Tail operators at -inf and +inf.
  PeriodicSpectrumData out;
  std::int64_t center = 0, explicit_count = 0;
  for (int side = 0; side < 2; ++side) {
    std::map<std::int64_t, Potential> d;
    for (const auto& [k, p] : b.diagonals()) {
      if (const auto* e = p.as<Explicit>()) {
        d.emplace(k, Constant{side == 0 ? e->left_tail : e->right_tail});
        if (side == 0) {
          center += e->start + static_cast<std::int64_t>(e->values.size()) / 2;
          ++explicit_count;
        }
      } else {
        d.emplace(k, p);
      }
    }
    const BandOperator tail(std::move(d));
    const std::int64_t q = common_period(tail);
    merge_data(out, periodic_spectrum_data(tail, q, theta_samples, q <= 8), side == 0);
  }
  center /= std::max<std::int64_t>(1, explicit_count);

  // Bound states: eigenvectors of a centered truncation that vanish near its edges.
  constexpr std::int64_t radius = 128;
  const IndexRange window{center - radius, center + radius};
  const Eigen::MatrixXcd m = truncate(b, window, window).entries;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen-solver failed on a step member");
  PeriodicSpectrumData bound;
  bound.all_real = true;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    const Eigen::VectorXcd v = es.eigenvectors().col(j);
    const double peak = v.cwiseAbs().maxCoeff();
    double edge = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(i - radius) > radius / 2) edge = std::max(edge, std::abs(v(i)));
    if (edge > 1e-8 * peak) continue;
    const cplx ev = es.eigenvalues()(j);
    bound.points.push_back(ev);
    if (std::abs(ev.imag()) <= kRealTolerance)
      bound.bands.push_back({ev.real(), ev.real()});
    else
      bound.all_real = false;
  }
  if (!bound.all_real) bound.bands.clear();
  merge_data(out, bound, false);
  return out;
}

SpectralRegion essential_spectrum(const BandOperator& a, const Grid& grid, const EssentialOptions& opts) {
  if (opts.phase_samples < 1 || opts.word_len < 1 || opts.theta_samples < 1)
    throw std::invalid_argument("essential spectrum options must be positive");
  const OperatorSpectrumFamily family = operator_spectrum(a);
  const MemberList list = enumerate_members(family, opts);
  UnionResult result = union_of_members(list.members, grid, opts);
  SpectralRegion& region = result.region;

  nlohmann::ordered_json families = nlohmann::ordered_json::array();
  bool orbit_reps = false;
  for (const auto& [k, lf] : family.per_diagonal) {
    nlohmann::ordered_json f{{"offset", k}, {"kind", lf.kind()}};
    if (const auto* fs = std::get_if<FiniteSet>(&lf.family)) f["members"] = fs->members.size();
    if (const auto* t = std::get_if<TorusFamily>(&lf.family)) f["alpha"] = t->alpha;
    if (const auto* s = std::get_if<FullShift>(&lf.family)) f["alphabetSize"] = s->alphabet.size();
    if (lf.orbit_representatives) f["orbitRepresentatives"] = true;
    orbit_reps = orbit_reps || lf.orbit_representatives;
    families.push_back(std::move(f));
  }

  nlohmann::ordered_json convergents = nlohmann::ordered_json::array();
  for (const auto& [p, q] : list.approximants) convergents.push_back({p, q});

  auto& md = region.metadata;
  md["method"] = "union-over-limit-operators";
  md["families"] = families;
  md["coupling"] = family.coupling == Coupling::SharedPhase ? "shared_phase" : "independent";
  md["wordLen"] = list.word_len;
  md["wordsTruncated"] = list.words_truncated;
  md["phaseSamples"] = opts.phase_samples;
  md["thetaSamples"] = opts.theta_samples;
  md["convergents"] = convergents;
  md["members"] = list.members.size();
  if (orbit_reps) md["orbitRepresentatives"] = true;

  if (!list.approximants.empty()) {
    // Cauchy check against the previous admissible convergent of every group.
    std::vector<std::size_t> previous;
    bool available = true;
    std::map<double, bool> seen;
    for (const auto& [k, lf] : family.per_diagonal) {
      const auto* t = std::get_if<TorusFamily>(&lf.family);
      if (!t) continue;
      if (family.coupling == Coupling::SharedPhase && seen.count(t->alpha)) continue;
      seen[t->alpha] = true;
      auto convs = continued_fraction_convergents(t->alpha, opts.convergents);
      std::erase_if(convs, [&](auto pq) { return pq.second > opts.max_period; });
      if (convs.size() < 2) available = false;
      previous.push_back(convs.size() >= 2 ? convs.size() - 2 : 0);
    }
    if (available) {
      const MemberList prev = enumerate_members(family, opts, previous);
      const UnionResult prev_union = union_of_members(prev.members, grid, opts);
      nlohmann::ordered_json prev_conv = nlohmann::ordered_json::array();
      for (const auto& [p, q] : prev.approximants) prev_conv.push_back({p, q});
      const auto a_pts = region.marked_centers();
      const auto b_pts = prev_union.region.marked_centers();
      md["previousConvergents"] = prev_conv;
      md["cauchyHausdorff"] = hausdorff(a_pts, b_pts);
    }
  }
  md["closedness"] = "mask is closed by rasterization; closedness of the union is not decided";
  return region;
}

bool random_bidiagonal_contains(const std::vector<cplx>& sigma, double eps, cplx lambda) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const cplx& s : sigma) {
    const double d = std::abs(lambda - s);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return lo <= eps && hi >= eps;
}

SpectralRegion random_bidiagonal_spectrum(const std::vector<cplx>& sigma, double eps, const Grid& grid) {
  if (sigma.empty()) throw std::invalid_argument("alphabet must be nonempty");
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  SpectralRegion region(grid);
  for (std::size_t i = 0; i < region.mask.size(); ++i)
    region.mask[i] = random_bidiagonal_contains(sigma, eps, grid.center(i)) ? 1 : 0;
  for (const cplx& s : sigma) region.components.emplace_back(ClosedDisk{s, eps});
  const bool intersection_nonempty = enclosing_radius(sigma) < eps;
  if (intersection_nonempty) region.components.emplace_back(DiskIntersection{sigma, eps});
  region.metadata["method"] = "closed form: union of closed disks minus intersection of open disks";
  region.metadata["epsilon"] = eps;
  region.metadata["intersectionEmpty"] = !intersection_nonempty;
  return region;
}

FiniteVector randprod_vector(cplx lambda, cplx sigma, cplx tau, std::int64_t window_radius) {
  if (window_radius < 1) throw std::invalid_argument("window radius must be >= 1");
  if (2 * window_radius + 1 > kMaxWindow) throw CapacityError("eigenvector window", 2 * window_radius + 1);
  FiniteVector x{-window_radius, std::vector<cplx>(static_cast<std::size_t>(2 * window_radius + 1))};
  auto at = [&](std::int64_t n) -> cplx& { return x.values[static_cast<std::size_t>(n + window_radius)]; };
  at(0) = 1.0;
  for (std::int64_t n = 1; n <= window_radius; ++n) at(n) = at(n - 1) * (lambda - sigma);
  for (std::int64_t n = -1; n >= -window_radius; --n) at(n) = at(n + 1) / (lambda - tau);
  return x;
}

VerificationReport verify_randprod(cplx lambda, cplx sigma, cplx tau, std::int64_t window_radius) {
  if (!(std::abs(lambda - sigma) <= 1.0 && 1.0 <= std::abs(lambda - tau)))
    throw std::invalid_argument("eigenvector construction needs |lambda - sigma| <= 1 <= |lambda - tau|");
  const FiniteVector x = randprod_vector(lambda, sigma, tau, window_radius);
  // (V_{-1} + M_c - lambda I) with c = tau on n < 0, sigma on n >= 0
  const BandOperator shifted = band({{-1, Constant{1.0}}, {0, Explicit{0, {}, tau - lambda, sigma - lambda}}});
  const FiniteVector y = apply(shifted, x);

  VerificationReport report;
  for (std::int64_t n = -window_radius + 1; n <= window_radius - 1; ++n)
    report.max_discrepancy =
        std::max(report.max_discrepancy, std::abs(y.values[static_cast<std::size_t>(n - y.offset)]));
  for (const cplx& v : x.values) report.bound = std::max(report.bound, std::abs(v));
  report.windows_compared = {window_radius};
  report.verdict = report.max_discrepancy <= 1e-10;
  return report;
}

VerificationReport verify_limit_operator(const BandOperator& a, const IntegerSequenceSpec& h,
                                         const BandOperator& b, std::int64_t m, std::int64_t steps,
                                         double tol) {
  if (m < 0 || m > 256) throw std::invalid_argument("window radius m must lie in [0, 256]");
  if (steps < 3) throw std::invalid_argument("steps must be >= 3");
  const std::int64_t w = std::max(a.band_width(), b.band_width());
  VerificationReport report;
  for (std::int64_t n = steps - 2; n <= steps; ++n) {
    const BandOperator shifted = shift_conjugate(a, h(n));
    for (const auto& [rows, cols] : {std::pair{IndexRange{-m - w, m + w}, IndexRange{-m, m}},
                                     std::pair{IndexRange{-m, m}, IndexRange{-m - w, m + w}}}) {
      BandedMatrix diff = BandedMatrix::for_window(rows, cols, w);
      diff.add_operator(shifted, rows.lo, cols.lo, 1.0);
      diff.add_operator(b, rows.lo, cols.lo, -1.0);
      const double norm = largest_singular_value(diff);
      report.norms.push_back(norm);
      report.max_discrepancy = std::max(report.max_discrepancy, norm);
    }
    report.windows_compared.push_back(n);
  }
  report.verdict = report.max_discrepancy <= tol;
  return report;
}

std::vector<FavardEntry> favard_report(const BandOperator& a, std::size_t samples, std::int64_t n,
                                       std::uint64_t seed, const EssentialOptions& opts) {
  if (samples == 0) return {};
  const OperatorSpectrumFamily family = operator_spectrum(a);

  // Finite axes are enumerated in full; free axes share the remaining budget.
  BuildMode probe;
  probe.rational_torus = false;
  probe.phase_samples = 1;
  probe.random_words = true;
  probe.random_word_count = 1;
  const Built shape = build_axes(family, opts, probe, {});
  std::size_t finite = 1, free_axes = 0;
  for (const auto& axis : shape.axes) {
    if (axis.sampled)
      ++free_axes;
    else
      finite *= axis.size;
  }
  std::size_t per_free = 1;
  if (free_axes > 0 && samples > finite)
    per_free = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(samples / finite),
                                                         1.0 / static_cast<double>(free_axes)))));

  BuildMode mode = probe;
  mode.phase_samples = static_cast<int>(per_free);
  mode.random_word_count = per_free;
  mode.seed = seed;
  const Built built = build_axes(family, opts, mode, {});
  auto members = materialize(built, std::max(opts.max_members, samples));
  if (members.size() > samples) members.resize(samples);

  std::vector<FavardEntry> out(members.size());
  for_each_index(members.size(), opts.exec, [&](std::size_t i) {
    out[i] = {members[i].descriptor, lower_norm_estimate(members[i].op, n)};
  });
  return out;
}

}  // namespace limitspec
