#include "doctest.h"

#include <cmath>
#include <random>

#include "limitspec/limitops.hpp"

using namespace limitspec;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

BandOperator with_potential(const Potential& v) { return jacobi(v); }

}  // namespace

TEST_SUITE("limitops") {
  TEST_CASE("operator spectrum families") {
    const auto sq = operator_spectrum(with_potential(SqrtParity{}));
    CHECK(sq.per_diagonal.at(0).kind() == "finite_set");
    CHECK(std::get<FiniteSet>(sq.per_diagonal.at(0).family).members.size() == 4);
    CHECK(sq.coupling == Coupling::Independent);
    CHECK(enumerate_members(sq, {}).members.size() == 4);

    const BandOperator laurent = band({{-1, Constant{1.0}}, {0, Constant{{0.0, 2.0}}}});
    const auto single = enumerate_members(operator_spectrum(laurent), {});
    REQUIRE(single.members.size() == 1);
    for (std::int64_t i = -32; i <= 32; ++i)
      for (std::int64_t j = i - 2; j <= i + 2; ++j) CHECK(single.members[0].op.entry(i, j) == laurent.entry(i, j));

    const auto pe = operator_spectrum(with_potential(make_pseudo_ergodic({0.0, 1.0}, 1)));
    CHECK(std::holds_alternative<FullShift>(pe.per_diagonal.at(0).family));

    const BandOperator two_torus = band({{0, make_quasi_periodic(1.0, kGolden, 0.1)},
                                         {1, make_quasi_periodic(0.5, kGolden, 0.4)},
                                         {-1, Constant{1.0}}});
    CHECK(operator_spectrum(two_torus).coupling == Coupling::SharedPhase);
    const BandOperator different = band({{0, make_quasi_periodic(1.0, kGolden, 0.1)},
                                         {1, make_quasi_periodic(0.5, std::sqrt(2.0) - 1.0, 0.4)}});
    CHECK(operator_spectrum(different).coupling == Coupling::Independent);
  }

  TEST_CASE("shared phase keeps relative phases") {
    const BandOperator a = band({{0, make_quasi_periodic(1.0, kGolden, 0.1)},
                                 {1, make_quasi_periodic(0.5, kGolden, 0.35)}});
    EssentialOptions opts;
    opts.phase_samples = 8;
    const auto list = enumerate_members(operator_spectrum(a), opts);
    CHECK(list.members.size() == 8);
    for (const auto& m : list.members) {
      const auto* d0 = m.op.diagonals().at(0).as<Periodic>();
      const auto* d1 = m.op.diagonals().at(1).as<Periodic>();
      REQUIRE(d0);
      REQUIRE(d1);
      CHECK(d0->values.size() == d1->values.size());
    }
    // member j: diagonal 1 is diagonal 0's template advanced by 0.25 in phase
    const auto& m3 = list.members[3];
    const auto [p, q] = list.approximants.at(0);
    const Potential expect1 = quasi_periodic_rational(0.5, p, q, 3.0 / 8 + 0.25);
    for (std::int64_t n = -10; n <= 10; ++n)
      CHECK(std::abs(m3.op.diagonals().at(1).eval(n) - expect1.eval(n)) < 1e-12);
  }

  TEST_CASE("self-similarity") {
    const Potential per = make_periodic({1.0, {0.0, 2.0}, -0.5});
    const BandOperator a = with_potential(per);
    bool found = false;
    for (const auto& m : enumerate_members(operator_spectrum(a), {}).members) {
      bool same = true;
      for (std::int64_t i = -32; i <= 32 && same; ++i)
        for (std::int64_t j = i - 1; j <= i + 1; ++j) same = same && std::abs(m.op.entry(i, j) - a.entry(i, j)) <= 1e-12;
      found = found || same;
    }
    CHECK(found);

    const auto qp = make_quasi_periodic(1.5, kGolden, 0.27);
    const auto& torus = std::get<TorusFamily>(limit_functions(qp).family);
    const Potential sample = torus.sample(0.27);
    for (std::int64_t n = -32; n <= 32; ++n) CHECK(std::abs(sample.eval(n) - qp.eval(n)) <= 1e-12);
  }

  TEST_CASE("continued fraction convergents") {
    const auto c = continued_fraction_convergents(kGolden, 8);
    REQUIRE(c.size() == 8);
    const std::int64_t fib[] = {1, 1, 2, 3, 5, 8, 13, 21, 34};
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c[i].first == fib[i]);
      CHECK(c[i].second == fib[i + 1]);
    }
    CHECK(continued_fraction_convergents(0.25, 8).size() == 1);
  }

  TEST_CASE("essential spectrum of the free operator") {
    const Grid grid({-3.0, 3.0, -0.5, 0.5}, 300, 25);
    const SpectralRegion r = essential_spectrum(free_hopping(), grid);
    REQUIRE(r.components.size() == 1);
    const auto iv = std::get<RealInterval>(r.components[0]);
    CHECK(std::abs(iv.a + 2.0) <= 1e-6);
    CHECK(std::abs(iv.b - 2.0) <= 1e-6);
    CHECK(r.metadata["method"] == "union-over-limit-operators");
    for (const char* key : {"families", "wordLen", "phaseSamples", "convergents"}) CHECK(r.metadata.contains(key));
  }

  TEST_CASE("essential spectrum of the square-root parity potential") {
    const Grid grid({-3.0, 4.0, -0.5, 0.5}, 350, 25);
    const SpectralRegion r = essential_spectrum(with_potential(SqrtParity{}), grid);
    REQUIRE(r.components.size() == 1);
    const auto iv = std::get<RealInterval>(r.components[0]);
    CHECK(iv.a == doctest::Approx(-2.0));
    CHECK(iv.b == doctest::Approx(3.0));
    CHECK(r.metadata["orbitRepresentatives"] == true);
  }

  TEST_CASE("drift washes out at infinity") {
    const Grid grid({-4.0, 4.0, -0.25, 0.25}, 400, 16);
    EssentialOptions opts;
    opts.phase_samples = 16;
    const auto slow = essential_spectrum(
        with_potential(SlowOscillation{QuasiPeriodic{2.0, kGolden, 0.0}, Drift::SignedSqrt, 0}), grid, opts);
    for (double s : {0.0, 0.3, 0.71}) {
      const auto plain = essential_spectrum(with_potential(make_quasi_periodic(2.0, kGolden, s)), grid, opts);
      CHECK(plain.mask == slow.mask);
    }
    CHECK(slow.metadata.contains("cauchyHausdorff"));
    CHECK(slow.metadata["convergents"].size() == 1);
  }

  TEST_CASE("every sampled limit operator's spectrum lies in the union") {
    const Grid grid({-3.0, 4.0, -2.0, 2.0}, 70, 40);
    const BandOperator a = band({{-1, Constant{1.0}},
                                 {0, make_periodic({0.0, 1.0, {0.0, 0.5}})},
                                 {1, make_pseudo_ergodic({0.0, 0.5}, 3)}});
    EssentialOptions opts;
    opts.word_len = 3;
    const SpectralRegion ess = essential_spectrum(a, grid, opts);
    const auto list = enumerate_members(operator_spectrum(a), opts);
    CHECK(list.members.size() == 3 * 10);  // 2 + 2 + 6 primitive words
    for (const auto& m : list.members) {
      SpectralRegion single(grid);
      add_to_region(single, member_spectrum(m.op, opts.theta_samples));
      CHECK(is_subset(single, ess));
    }
  }

  TEST_CASE("word unions grow with the word length and stay inside the closed form") {
    const Grid grid({-1.25, 3.25, -1.25, 1.25}, 64, 40);
    const BandOperator a = band({{-1, Constant{1.0}}, {0, make_pseudo_ergodic({0.0, 2.0}, 7)}});
    const SpectralRegion closed = random_bidiagonal_spectrum({0.0, 2.0}, 1.0, grid);
    const double slack = 0.5 * std::hypot(grid.dx(), grid.dy());
    SpectralRegion previous(grid);
    for (int len = 1; len <= 4; ++len) {
      EssentialOptions opts;
      opts.word_len = len;
      const SpectralRegion r = essential_spectrum(a, grid, opts);
      CHECK(is_subset(previous, r));
      for (const cplx& z : r.marked_centers()) {
        const double d0 = std::abs(z), d2 = std::abs(z - 2.0);
        CHECK(std::min(d0, d2) <= 1.0 + slack);
      }
      previous = r;
    }
    CHECK(closed.count() > previous.count());
  }

  TEST_CASE("word cap truncates the word length") {
    const BandOperator a = band({{-1, Constant{1.0}}, {0, make_pseudo_ergodic({0.0, 1.0, 2.0, 3.0, 4.0}, 1)}});
    EssentialOptions opts;
    opts.word_len = 6;
    opts.theta_samples = 16;
    const auto list = enumerate_members(operator_spectrum(a), opts);
    CHECK(list.word_len == 5);
    CHECK(list.words_truncated);
  }

  TEST_CASE("errors name the offending diagonal") {
    const BandOperator slow_alpha = band({{3, make_quasi_periodic(1.0, 0.001, 0.0)}});
    const Grid grid({-1.0, 1.0, -1.0, 1.0}, 16, 16);
    try {
      essential_spectrum(slow_alpha, grid);
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("diagonal 3") != std::string::npos);
    }
    EssentialOptions opts;
    opts.max_members = 10;
    opts.phase_samples = 64;
    CHECK_THROWS_AS(essential_spectrum(with_potential(make_quasi_periodic(1.0, kGolden, 0.0)), grid, opts),
                    std::invalid_argument);
  }

  TEST_CASE("serial and parallel unions agree") {
    const Grid grid({-3.0, 3.0, -3.0, 3.0}, 64, 64);
    const BandOperator a = band({{-1, Constant{1.0}}, {0, make_pseudo_ergodic({0.0, {1.0, 1.0}}, 2)}, {1, Constant{0.3}}});
    EssentialOptions serial, parallel;
    serial.exec = Execution::serial;
    serial.word_len = parallel.word_len = 4;
    const auto rs = essential_spectrum(a, grid, serial), rp = essential_spectrum(a, grid, parallel);
    CHECK(rs.mask == rp.mask);
    CHECK(rs.metadata.dump() == rp.metadata.dump());
  }

  TEST_CASE("random bidiagonal closed form") {
    const Grid grid({-2.0, 2.0, -2.0, 2.0}, 64, 64);
    const auto point = random_bidiagonal_spectrum({0.0}, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(point.at(i) == (std::abs(grid.center(i)) == 1.0));
    CHECK(components_consistent(point));

    const Grid wide({-2.0, 6.0, -2.0, 2.0}, 128, 64);
    const auto far = random_bidiagonal_spectrum({0.0, 4.0}, 1.0, wide);
    for (std::size_t i = 0; i < wide.size(); ++i) {
      const cplx z = wide.center(i);
      CHECK(far.at(i) == (std::abs(z) <= 1.0 || std::abs(z - 4.0) <= 1.0));
    }
    CHECK(far.components.size() == 2);

    std::vector<cplx> segment;
    for (int i = 0; i <= 20; ++i) segment.emplace_back(0.0, 1.5 * i / 20.0);
    const Grid g2({-1.5, 1.5, -1.25, 2.75}, 96, 128);
    const auto lens = random_bidiagonal_spectrum(segment, 1.0, g2);
    CHECK(std::holds_alternative<DiskIntersection>(lens.components.back()));
    CHECK(components_consistent(lens));
    CHECK_FALSE(lens.at(*g2.cell_of({0.0, 0.75})));
    CHECK(lens.at(*g2.cell_of({0.9, 0.2})));
    SpectralRegion rebuilt(g2);
    rebuilt.components = lens.components;
    rasterize_components(rebuilt);
    CHECK(rebuilt.mask == lens.mask);

    CHECK_THROWS(random_bidiagonal_spectrum({}, 1.0, grid));
    CHECK_THROWS(random_bidiagonal_spectrum({0.0}, 0.0, grid));
  }

  TEST_CASE("eigenvector construction") {
    const auto x = randprod_vector(0.0, 0.0, 2.0, 5);
    auto at = [&](std::int64_t n) { return x.values[static_cast<std::size_t>(n + 5)]; };
    CHECK(at(0) == cplx(1.0));
    CHECK(at(1) == cplx(0.0));
    CHECK(at(-1) == cplx(-0.5));
    CHECK(at(-2) == cplx(0.25));
    const auto r = verify_randprod(0.0, 0.0, 2.0, 50);
    CHECK(r.verdict);
    CHECK(r.max_discrepancy == 0.0);

    const cplx lambda{0.5, std::sqrt(3.0) / 2.0};
    const auto unit = verify_randprod(lambda, 0.0, 1.0, 100);
    CHECK(unit.verdict);
    CHECK(unit.max_discrepancy <= 1e-12);
    for (const cplx& v : randprod_vector(lambda, 0.0, 1.0, 100).values) CHECK(std::abs(std::abs(v) - 1.0) <= 1e-12);

    CHECK_THROWS_AS(verify_randprod(5.0, 0.0, 2.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(verify_randprod(0.0, 0.0, 0.5, 10), std::invalid_argument);
  }

  TEST_CASE("limit operator verification") {
    const auto h = IntegerSequenceSpec::polynomial({3, 0, 4});
    const BandOperator a = band({{0, SqrtParity{}}});
    const BandOperator b = band({{0, step_function(-4, 1.0, 0.0)}});
    const auto ok = verify_limit_operator(a, h, b, 10, 40, 1e-12);
    CHECK(ok.verdict);
    CHECK(ok.norms.size() == 6);
    CHECK(ok.windows_compared == std::vector<std::int64_t>{38, 39, 40});

    const auto wrong = verify_limit_operator(a, h, band({{0, Constant{1.0}}}), 10, 40, 1e-12);
    CHECK_FALSE(wrong.verdict);
    CHECK(wrong.max_discrepancy == doctest::Approx(1.0));

    const BandOperator laurent = band({{-1, Constant{1.0}}, {2, Constant{{0.0, 0.5}}}});
    const auto same = verify_limit_operator(laurent, IntegerSequenceSpec::polynomial({0, 5}), laurent, 20, 6, 0.0);
    CHECK(same.verdict);
    for (double v : same.norms) CHECK(v == 0.0);

    CHECK_THROWS(verify_limit_operator(a, h, b, 257, 40, 1e-12));
    CHECK_THROWS(verify_limit_operator(a, h, b, 10, 2, 1e-12));
  }

  TEST_CASE("favard report") {
    for (const auto& e : favard_report(band({{0, Constant{2.0}}}), 5, 50)) CHECK(e.estimate == doctest::Approx(2.0));
    const auto l = favard_report(free_hopping(), 3, 400);
    REQUIRE(l.size() == 1);
    CHECK(l[0].estimate <= 0.02);
    for (const auto& e : favard_report(band({{-1, Constant{1.0}}, {1, Constant{1.0}}, {0, Constant{5.0}}}), 3, 400))
      CHECK(e.estimate >= 1.0);

    const BandOperator mixed = band({{-1, Constant{1.0}},
                                     {0, make_quasi_periodic(1.0, kGolden, 0.0)},
                                     {1, make_pseudo_ergodic({0.0, 1.0}, 4)}});
    const auto sampled = favard_report(mixed, 12, 30, 99);
    CHECK(sampled.size() <= 12);
    CHECK(sampled.size() >= 4);
    const auto again = favard_report(mixed, 12, 30, 99);
    REQUIRE(again.size() == sampled.size());
    for (std::size_t i = 0; i < sampled.size(); ++i) {
      CHECK(again[i].descriptor == sampled[i].descriptor);
      CHECK(again[i].estimate == sampled[i].estimate);
    }
  }
}
