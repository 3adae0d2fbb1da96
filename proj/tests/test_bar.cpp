#include <doctest.h>

#include "loopbetti/bar.hpp"

#include <random>

using namespace loopbetti;

namespace {

std::vector<std::size_t> taus(const std::vector<HomologySummary>& p) {
  std::vector<std::size_t> out;
  for (const auto& h : p) out.push_back(minimal_generator_count(h));
  return out;
}

// Compositions of n into parts from the multiset of reduced letter degrees.
std::size_t compositions(int n, const std::vector<int>& parts) {
  std::vector<std::size_t> c(static_cast<std::size_t>(n) + 1, 0);
  c[0] = 1;
  for (int m = 1; m <= n; ++m)
    for (int p : parts)
      if (p <= m) c[m] += c[m - p];
  return c[n];
}

DGAPresentation free_algebra() {
  DGAPresentation fa;
  fa.name = "free";
  fa.mult = Multiplication::Free;
  fa.truncation = 10;
  auto v = Generator::plain("v", 2), u = Generator::plain("u", 3), w = Generator::plain("w", 3),
       z = Generator::plain("z", 4);
  fa.gens = {v, u, w, z};
  DerivationSpec d;
  d.set_image(u, {}).set_image(v, {});
  d.set_image(w, multiply(Element::of(v), Element::of(v)));
  d.set_image(z, multiply(Element::of(u), Element::of(v)) - multiply(Element::of(v), Element::of(u)));
  fa.diff = with_hga_rules(d);
  return fa;
}

}  // namespace

TEST_CASE("bar bases") {
  auto m = catalog_dga("moore:2,2", CoefficientRing::integers(), 12);
  const Word a{m.gens[0]}, b{m.gens[1]};
  CHECK(bar_basis(m, 0) == std::vector<BarWord>{BarWord{}});
  CHECK(bar_basis(m, 2) == std::vector<BarWord>{{b}, {a, a}});
  CHECK_THROWS_AS(bar_basis(m, 12), TruncationExceeded);

  auto s2 = catalog_dga("sphere:2", CoefficientRing::integers(), 10);
  const Word x{s2.gens[0]};
  CHECK(bar_basis(s2, 2) == std::vector<BarWord>{{x, x}});

  auto p2 = catalog_dga("poly:2", CoefficientRing::integers(), 10);
  auto b3 = bar_basis(p2, 3);
  CHECK(b3.size() == 2);

  auto wedge = catalog_dga("wedge:S2,S3,M2_2", CoefficientRing::integers(), 12);
  for (int n = 0; n <= 9; ++n) CHECK(bar_basis(wedge, n).size() == compositions(n, {1, 2, 1, 2}));
}

TEST_CASE("bar differential") {
  auto m = catalog_dga("moore:2,2", CoefficientRing::integers(), 12);
  const Word a{m.gens[0]}, b{m.gens[1]};
  CHECK(bar_differential(BarWord{a}, m) == BarElement::of({b}, 2));
  // eps_1 = |a| - 1 = 1 on the second letter
  CHECK(bar_differential(BarWord{a, a}, m) == BarElement::of({b, a}, 2) + BarElement::of({a, b}, -2));

  auto w = catalog_dga("wedge:S2,S3", CoefficientRing::integers(), 12);
  for (int n = 0; n <= 8; ++n)
    for (const auto& bw : bar_basis(w, n)) CHECK(bar_differential(bw, w).is_zero());

  auto p2 = catalog_dga("poly:2", CoefficientRing::integers(), 10);
  const Word x{p2.gens[0]};
  auto xx = bar_differential(BarWord{x, x}, p2);
  REQUIRE(xx.terms().size() == 1);
  CHECK(xx.terms().begin()->second == -1);
  CHECK(xx.terms().begin()->first.size() == 1);
  CHECK(bar_differential(bar_differential(BarWord{x, x, x}, p2), p2).is_zero());
}

TEST_CASE("bar d^2 on catalog algebras") {
  for (auto name : {"sphere:2", "sphere:3", "poly:2", "wedge:S2,S3", "product:S2,S3", "moore:2,2", "moore:3,2"})
    for (auto ring : {CoefficientRing::integers(), CoefficientRing::prime_field(2)}) {
      auto a = catalog_dga(name, ring, 10);
      for (int n = 0; n <= 8; ++n)
        for (const auto& bw : bar_basis(a, n))
          CHECK(bar_differential(bar_differential(bw, a), a).is_zero());
    }
}

TEST_CASE("tor profiles") {
  auto s3 = catalog_dga("sphere:3", CoefficientRing::integers(), 14);
  std::vector<std::size_t> alt;
  for (int n = 0; n <= 12; ++n) alt.push_back(n % 2 == 0 ? 1 : 0);
  CHECK(taus(tor_profile(s3, 12)) == alt);

  auto w = catalog_dga("wedge:S2,S2", CoefficientRing::rationals(), 10);
  CHECK(taus(tor_profile(w, 8)) == std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 128, 256});

  auto m = catalog_dga("moore:2,2", CoefficientRing::prime_field(2), 9);
  CHECK(taus(tor_profile(m, 7)) == std::vector<std::size_t>{1, 1, 2, 3, 5, 8, 13, 21});

  // over Z the Moore space has torsion: Tor^1 = 0, Tor^2 = Z/2
  auto mz = tor_profile(catalog_dga("moore:2,2", CoefficientRing::integers(), 8), 4);
  CHECK(mz[1].free_rank == 0);
  CHECK(mz[2].torsion == std::vector<Integer>{2});

  CHECK_THROWS_AS(tor_profile(s3, 13), TruncationExceeded);
}

TEST_CASE("bar product") {
  auto fa = free_algebra();
  const auto& v = fa.gens[0];
  const auto& u = fa.gens[1];
  const BarWord x{{v}}, y{{u}};
  CHECK(bar_product(x, BarWord{}, fa) == BarElement::of(x));
  CHECK(bar_product(BarWord{}, x, fa) == BarElement::of(x));

  auto xy = bar_product(x, y, fa);
  CHECK(xy.terms().size() == 3);
  CHECK(xy.terms().at({{v}, {u}}) == 1);
  CHECK(xy.terms().at({{u}, {v}}) == ((v.degree() - 1) * (u.degree() - 1) % 2 ? -1 : 1));
  const Integer e = xy.terms().at({{Generator::e_symbol({{v}}, u)}});
  CHECK(abs(e) == 1);
}

TEST_CASE("bar product Leibniz") {
  auto fa = free_algebra();
  std::vector<BarWord> ws;
  for (int n = 1; n <= 4; ++n)
    for (const auto& bw : bar_basis(fa, n)) ws.push_back(bw);
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int i = 0; i < 80; ++i) {
    const auto& p = ws[rng() % ws.size()];
    const auto& q = ws[rng() % ws.size()];
    if (bar_degree(p) + bar_degree(q) > 7) continue;
    ++checked;
    BarElement lhs = bar_differential(bar_product(p, q, fa), fa);
    BarElement rhs = bar_product(bar_differential(BarElement::of(p), fa), BarElement::of(q), fa) +
                     Integer(bar_degree(p) % 2 ? -1 : 1) *
                         bar_product(BarElement::of(p), bar_differential(BarElement::of(q), fa), fa);
    CHECK(lhs == rhs);
  }
  CHECK(checked > 20);

  // products of cocycles are cocycles
  const auto& v = fa.gens[0];
  const auto& u = fa.gens[1];
  for (const auto& [p, q] : std::vector<std::pair<BarWord, BarWord>>{
           {{{v}}, {{u}}}, {{{u}}, {{v}}}, {{{v}}, {{v}}}, {{{u}}, {{u}}}}) {
    REQUIRE(bar_differential(p, fa).is_zero());
    REQUIRE(bar_differential(q, fa).is_zero());
    CHECK(bar_differential(bar_product(p, q, fa), fa).is_zero());
  }
}

TEST_CASE("cobar model") {
  auto s3 = catalog_dga("sphere:3", CoefficientRing::rationals(), 10);
  auto f = cobar_fragment(s3, 10);
  auto dsq = check_d_squared(f.dh, f.gens, 9);
  CHECK(dsq.ok);
  auto sc = small_complex(f, 8);
  auto tor = tor_profile(s3, 8);
  for (int n = 1; n <= 8; ++n) CHECK(sc.homology(n).free_rank == tor[n].free_rank);

  auto m = catalog_dga("moore:2,2", CoefficientRing::rationals(), 9);
  auto fm = cobar_fragment(m, 9);
  CHECK(check_d_squared(fm.dh, fm.gens, 8).ok);
  auto smq = small_complex(fm, 7);
  auto tm = tor_profile(m, 7);
  for (int n = 1; n <= 7; ++n) CHECK(smq.homology(n).free_rank == tm[n].free_rank);
}
