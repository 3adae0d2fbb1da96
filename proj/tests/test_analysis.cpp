#include <doctest.h>

#include "loopbetti/analysis.hpp"

using namespace loopbetti;

namespace {

PoincareSeries ps(std::vector<std::size_t> c) { return PoincareSeries{std::move(c)}; }

bool all_ok(const std::vector<CheckLine>& lines) {
  for (const auto& l : lines)
    if (!l.ok) return false;
  return true;
}

struct Setup {
  FilteredModelFragment f;
  Generator y;
  HgaOptions o;
};

Setup cup1_setup(const std::string& space, std::size_t index, int T) {
  auto a = catalog_dga(space, CoefficientRing::rationals(), T);
  HgaOptions o;
  o.k_max = T;
  auto f = cobar_fragment(a, T, o);
  Generator y = cobar_generator(a, {Word{a.gens[index]}});
  return {with_cup1_closure(f, y, o), y, o};
}

}  // namespace

TEST_CASE("series comparison") {
  CHECK(series_leq(ps({1, 2, 3}), ps({1, 2, 3})));
  CHECK(series_leq(ps({1, 0, 1}), ps({1, 1, 1})));
  CHECK_FALSE(series_leq(ps({1, 2}), ps({1, 1})));
  CHECK_THROWS_AS(series_leq(ps({1}), ps({1, 1})), TruncationMismatch);
  CHECK(ps({1, 2}) + ps({3, 4}) == ps({4, 6}));
  CHECK(shift(ps({1, 2, 3}), 1) == ps({0, 1, 2}));
  CHECK(shift(ps({1, 2, 3}), 0) == ps({1, 2, 3}));
  CHECK(ps({1, 2, 3}).at(7) == 0);
}

TEST_CASE("quotient check, Moore space") {
  auto s = cup1_setup("moore:2,2", 1, 9);
  auto rep = quotient_inequality_check(s.f, s.y, -1, {}, s.o);
  CHECK(rep.k == 2);
  CHECK(rep.N == 6);
  CHECK(rep.vbar == ps({1, 0, 0, 0, 0, 0, 0}));
  CHECK(rep.quotient == ps({1, 1, 0, 0, 0, 0, 0}));
  CHECK(rep.bound == ps({1, 1, 0, 0, 0, 0, 0}));
  CHECK(rep.holds);
  CHECK(rep.agrees);
  CHECK(all_ok(rep.lines));

  auto bad = quotient_inequality_check(s.f, s.y, -1, [](PoincareSeries& q) { q.coeffs[1] += 1; }, s.o);
  CHECK_FALSE(bad.holds);
  CHECK_FALSE(all_ok(bad.lines));

  CHECK_THROWS_AS(quotient_inequality_check(s.f, s.y, 7, {}, s.o), DegreeOutOfRange);
  auto a = catalog_dga("moore:2,2", CoefficientRing::rationals(), 9);
  auto ya = cobar_generator(a, {Word{a.gens[0]}});
  CHECK_THROWS_AS(quotient_inequality_check(s.f, ya, -1, {}, s.o), NotCocycle);
}

TEST_CASE("quotient check, wedge of two spheres") {
  auto s = cup1_setup("wedge:S2,S2", 0, 9);
  auto rep = quotient_inequality_check(s.f, s.y, -1, {}, s.o);
  CHECK(rep.k == 1);
  // frozen from a run at truncation 13
  CHECK(rep.vbar == ps({1, 2, 6, 14, 30, 62, 126}));
  CHECK(rep.quotient == ps({1, 1, 4, 8, 16, 32, 64}));
  CHECK(rep.image == ps({0, 1, 2, 6, 14, 30, 62}));
  CHECK(rep.bound == ps({2, 4, 12, 28, 60, 124, 252}));
  CHECK(rep.injective);
  CHECK(rep.les == rep.quotient);
  CHECK(rep.euler_poincare == rep.quotient);
  CHECK(rep.holds);
  CHECK(rep.agrees);
  CHECK(all_ok(rep.lines));
}

TEST_CASE("algebra generators") {
  auto Z = CoefficientRing::integers(), Q = CoefficientRing::rationals();
  CHECK(count_algebra_generators(catalog_dga("sphere:2", Z, 12), 10) == 1);
  CHECK(count_algebra_generators(catalog_dga("sphere:4", Q, 12), 10) == 1);
  CHECK(count_algebra_generators(catalog_dga("wedge:S2,S2", Q, 12), 10) == 2);
  CHECK(count_algebra_generators(catalog_dga("product:S2,S2", Q, 12), 10) == 2);
  CHECK(count_algebra_generators(catalog_dga("poly:2", Q, 12), 10) == 1);
  // enlarging the decomposables never adds generators
  CHECK(count_algebra_generators(catalog_dga("wedge:S2,S2,S4", Q, 12), 10) == 3);
  CHECK(count_algebra_generators(catalog_dga("moore:2,2", CoefficientRing::prime_field(2), 12), 10) == 2);
  CHECK(count_algebra_generators(catalog_dga("moore:2,2", Z, 12), 10) == 1);
  CHECK(count_algebra_generators(catalog_dga("moore:3,2", CoefficientRing::prime_field(2), 12), 10) == 0);
  CHECK(cohomology_is_free(catalog_dga("sphere:2", Z, 12), 10));
  CHECK_FALSE(cohomology_is_free(catalog_dga("moore:2,2", Z, 12), 10));
}

TEST_CASE("growth verdict") {
  CHECK(growth_verdict({1, 1, 1, 1, 1, 1}) == Verdict::BoundedSoFar);
  CHECK(growth_verdict({1, 0, 1, 0, 1, 0, 1}) == Verdict::BoundedSoFar);
  CHECK(growth_verdict({1, 2, 4, 8, 16, 32}) == Verdict::GrowthDetected);
  CHECK(growth_verdict({1}) == Verdict::BoundedSoFar);
  CHECK(to_string(Verdict::GrowthDetected) == "GrowthDetected");
}

TEST_CASE("dichotomy reports") {
  auto s3 = dichotomy_report("sphere:3", CoefficientRing::integers(), 20);
  CHECK(s3.taus.size() == 21);
  for (int i = 0; i <= 20; ++i) CHECK(s3.taus[i] == (i % 2 == 0 ? 1u : 0u));
  CHECK(s3.verdict == Verdict::BoundedSoFar);
  CHECK(s3.generator_count == 1);
  CHECK_FALSE(s3.predicted_unbounded);
  CHECK(s3.consistent());

  auto w = dichotomy_report("wedge:S2,S2", CoefficientRing::rationals(), 10);
  for (int i = 0; i <= 10; ++i) CHECK(w.taus[i] == (1u << i));
  CHECK(w.verdict == Verdict::GrowthDetected);
  CHECK(w.generator_count == 2);
  CHECK(w.predicted_unbounded);
  CHECK(w.consistent());

  auto mw = dichotomy_report("wedge:M2_2,S2", CoefficientRing::prime_field(2), 8);
  CHECK(mw.verdict == Verdict::GrowthDetected);
  CHECK(mw.consistent());

  auto mz = dichotomy_report("moore:2,2", CoefficientRing::integers(), 8);
  CHECK_FALSE(mz.prediction_applies);
  CHECK(mz.window == 8);
}
