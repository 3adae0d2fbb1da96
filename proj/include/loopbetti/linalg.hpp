// Exact integer linear algebra: Smith normal form, lattice helpers and
// homology of finitely generated cochain complexes over several rings.
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopbetti {

using Integer = mpz_class;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const;
  IntMatrix transpose() const;
  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

// Matrix assembled entry by entry; rows are kept as ordered maps.
class SparseIntMatrix {
 public:
  SparseIntMatrix() = default;
  SparseIntMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  void add(std::size_t i, std::size_t j, const Integer& v);
  const std::map<std::size_t, Integer>& row(std::size_t i) const { return rows_[i]; }
  std::size_t nonzeros() const;
  bool is_zero() const { return nonzeros() == 0; }

  IntMatrix to_dense() const;
  static SparseIntMatrix from_dense(const IntMatrix& m);
  friend SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b);

 private:
  std::size_t cols_ = 0;
  std::vector<std::map<std::size_t, Integer>> rows_;
};

Integer determinant(const IntMatrix& a);

struct SmithForm {
  IntMatrix D;
  IntMatrix U;
  IntMatrix V;
  std::vector<Integer> diagonal() const;  // nonzero entries d_1 | d_2 | ...
};

/// U*A*V = D with U, V unimodular and D in Smith form. Pivots are the
/// entries of least absolute value.
SmithForm smith_normal_form(const IntMatrix& a);

/// Nonzero invariant factors of a sparse matrix (ones included).
std::vector<Integer> invariant_factors(const SparseIntMatrix& a);
std::size_t rank_integral(const SparseIntMatrix& a);
std::size_t rank_mod_p(const SparseIntMatrix& a, const Integer& p);

/// Rearranges a list of cyclic orders into a divisibility chain, dropping 1s.
std::vector<Integer> normalize_torsion(std::vector<Integer> orders);

class CoefficientRing {
 public:
  enum class Kind { Integers, PrimeField, Rationals, ModM };

  static CoefficientRing integers() { return CoefficientRing(Kind::Integers, 0); }
  static CoefficientRing rationals() { return CoefficientRing(Kind::Rationals, 0); }
  static CoefficientRing prime_field(long p);
  static CoefficientRing mod(long m);
  /// Accepts Z, Q, F<p>, GF(<p>), Z/<m>.
  static CoefficientRing parse(const std::string& spec);

  Kind kind() const { return kind_; }
  /// The characteristic-like number mu: m for Z/m, p for F_p, 0 otherwise.
  long mu() const { return modulus_; }
  bool is_field() const { return kind_ == Kind::PrimeField || kind_ == Kind::Rationals; }
  Integer reduce(const Integer& v) const;
  std::string to_string() const;

  friend bool operator==(const CoefficientRing&, const CoefficientRing&) = default;

 private:
  CoefficientRing(Kind k, long m) : kind_(k), modulus_(m) {}
  Kind kind_;
  long modulus_;
};

struct HomologySummary {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;
  friend bool operator==(const HomologySummary&, const HomologySummary&) = default;
};

std::string to_string(const HomologySummary& h);

class CompositionNonzero : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ker(d_out)/im(d_in) for C^{n-1} --d_in--> C^n --d_out--> C^{n+1}.
/// d_out has dim C^n columns, d_in has dim C^n rows.
HomologySummary homology_at(const SparseIntMatrix& d_out, const SparseIntMatrix& d_in,
                            const CoefficientRing& ring);
HomologySummary homology_at(const IntMatrix& d_out, const IntMatrix& d_in,
                            const CoefficientRing& ring);

std::size_t minimal_generator_count(const HomologySummary& h);

/// Columns spanning the integer kernel of a.
IntMatrix kernel_basis(const IntMatrix& a);

/// Integer solution of a*x = b, if one exists.
std::optional<std::vector<Integer>> solve_integral(const IntMatrix& a, const std::vector<Integer>& b);
/// Rational solution of a*x = b, if one exists.
std::optional<std::vector<mpq_class>> solve_rational(const IntMatrix& a,
                                                     const std::vector<Integer>& b);
std::size_t rank_rational(const IntMatrix& a);

/// Z/N where the columns of z span a lattice Z and the columns of n span a
/// sublattice of Z; both live in the same ambient Z^r.
HomologySummary lattice_quotient(const IntMatrix& z, const IntMatrix& n);

}  // namespace loopbetti
