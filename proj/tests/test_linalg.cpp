#include <doctest.h>

#include "loopbetti/linalg.hpp"

#include <random>

using namespace loopbetti;

namespace {

bool is_smith(const IntMatrix& d) {
  Integer prev = 1;
  bool zeros = false;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (i != j && d(i, j) != 0) return false;
      if (i != j) continue;
      if (d(i, i) < 0) return false;
      if (d(i, i) == 0) {
        zeros = true;
        continue;
      }
      if (zeros || d(i, i) % prev != 0) return false;
      prev = d(i, i);
    }
  return true;
}

bool unimodular(const IntMatrix& m) {
  Integer det = determinant(m);
  return det == 1 || det == -1;
}

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int bound) {
  std::uniform_int_distribution<int> e(-bound, bound);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = e(rng);
  return m;
}

}  // namespace

TEST_CASE("smith form of small matrices") {
  auto id = smith_normal_form(IntMatrix::identity(3));
  CHECK(id.D == IntMatrix::identity(3));
  CHECK(id.U == IntMatrix::identity(3));
  CHECK(id.V == IntMatrix::identity(3));

  auto z = smith_normal_form(IntMatrix{{0}});
  CHECK(z.D == IntMatrix{{0}});

  IntMatrix a{{2, 4}, {6, 8}};
  auto s = smith_normal_form(a);
  CHECK(s.D == IntMatrix{{2, 0}, {0, 4}});
  CHECK(s.U * a * s.V == s.D);
  CHECK(unimodular(s.U));
  CHECK(unimodular(s.V));

  auto e = smith_normal_form(IntMatrix(0, 3));
  CHECK(e.D.rows() == 0);
  CHECK(e.V.rows() == 3);
}

TEST_CASE("smith form on random matrices") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    IntMatrix a = random_matrix(rng, r, c, 9);
    auto s = smith_normal_form(a);
    CHECK(s.U * a * s.V == s.D);
    CHECK(is_smith(s.D));
    CHECK(unimodular(s.U));
    CHECK(unimodular(s.V));
    CHECK(s.diagonal().size() == rank_rational(a));
  }
}

TEST_CASE("arbitrary precision survives large products") {
  IntMatrix a{{1, 0}, {0, 1}};
  a(0, 0) = Integer("123456789012345678901234567890");
  a(1, 1) = Integer("987654321098765432109876543210");
  auto s = smith_normal_form(a);
  CHECK(s.U * a * s.V == s.D);
  CHECK(s.D(0, 0) * s.D(1, 1) == a(0, 0) * a(1, 1));
  CHECK(s.D(1, 1) % s.D(0, 0) == 0);
}

TEST_CASE("homology_at basics") {
  IntMatrix zero{{0}}, two{{2}};
  auto hz = homology_at(zero, two, CoefficientRing::integers());
  CHECK(hz.free_rank == 0);
  REQUIRE(hz.torsion.size() == 1);
  CHECK(hz.torsion[0] == 2);

  auto h2 = homology_at(zero, two, CoefficientRing::prime_field(2));
  CHECK(h2.free_rank == 1);
  CHECK(h2.torsion.empty());

  auto hq = homology_at(zero, two, CoefficientRing::rationals());
  CHECK(hq.free_rank == 0);

  auto h4 = homology_at(zero, two, CoefficientRing::mod(4));
  CHECK(h4.free_rank == 0);
  REQUIRE(h4.torsion.size() == 1);
  CHECK(h4.torsion[0] == 2);

  IntMatrix out(1, 3), in(3, 1);
  auto hn = homology_at(out, in, CoefficientRing::integers());
  CHECK(hn.free_rank == 3);
}

TEST_CASE("homology_at rejects a nonzero composite") {
  IntMatrix one{{1}};
  CHECK_THROWS_AS(homology_at(one, one, CoefficientRing::integers()), CompositionNonzero);
  IntMatrix two{{2}};
  CHECK_NOTHROW(homology_at(two, one, CoefficientRing::prime_field(2)));
}

TEST_CASE("field homology matches rank-nullity") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    // d_out * d_in = 0 by construction: d_in = K * M with K spanning ker d_out.
    std::size_t n = 2 + rng() % 5;
    IntMatrix c = random_matrix(rng, 1 + rng() % 3, n, 3);
    IntMatrix k = kernel_basis(c);
    IntMatrix b = k.cols() ? k * random_matrix(rng, k.cols(), 1 + rng() % 3, 2) : IntMatrix(n, 1);
    auto hq = homology_at(c, b, CoefficientRing::rationals());
    CHECK(hq.free_rank == n - rank_rational(c) - rank_rational(b));

    auto hz = homology_at(c, b, CoefficientRing::integers());
    for (long p : {2L, 3L, 5L}) {
      // Universal coefficients: ker/im over F_p from integer data.
      auto hp = homology_at(c, b, CoefficientRing::prime_field(p));
      std::size_t rc = rank_mod_p(SparseIntMatrix::from_dense(c), p);
      std::size_t rb = rank_mod_p(SparseIntMatrix::from_dense(b), p);
      CHECK(hp.free_rank == n - rc - rb);
    }
    CHECK(hz.free_rank == hq.free_rank);
  }
}

TEST_CASE("minimal generator count") {
  CHECK(minimal_generator_count({2, {2, 4}}) == 4);
  CHECK(minimal_generator_count({0, {}}) == 0);
  CHECK(minimal_generator_count({1, {3}}) == 2);
}

TEST_CASE("coefficient rings") {
  CHECK(CoefficientRing::parse("Z") == CoefficientRing::integers());
  CHECK(CoefficientRing::parse("F3") == CoefficientRing::prime_field(3));
  CHECK(CoefficientRing::parse("Z/4") == CoefficientRing::mod(4));
  CHECK(CoefficientRing::mod(4).mu() == 4);
  CHECK(CoefficientRing::rationals().mu() == 0);
  CHECK_THROWS(CoefficientRing::prime_field(4));
  CHECK_THROWS(CoefficientRing::mod(1));
}

TEST_CASE("lattice quotient") {
  // Z^2 / <(2,0),(0,3),(2,3)> = Z/6
  IntMatrix z = IntMatrix::identity(2);
  IntMatrix n{{2, 0, 2}, {0, 3, 3}};
  auto h = lattice_quotient(z, n);
  CHECK(h.free_rank == 0);
  CHECK(minimal_generator_count(h) == 1);
  CHECK(normalize_torsion({2, 3}) == std::vector<Integer>{6});
  CHECK(normalize_torsion({2, 4, 1}) == std::vector<Integer>{2, 4});
}
