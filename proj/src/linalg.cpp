#include "loopbetti/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace loopbetti {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("IntMatrix: ragged initializer");
    for (long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("IntMatrix: shape mismatch in product");
  IntMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Integer& x = a(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += x * b(k, j);
    }
  return c;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

void SparseIntMatrix::add(std::size_t i, std::size_t j, const Integer& v) {
  if (i >= rows_.size() || j >= cols_) throw std::out_of_range("SparseIntMatrix::add");
  if (v == 0) return;
  auto& slot = rows_[i][j];
  slot += v;
  if (slot == 0) rows_[i].erase(j);
}

std::size_t SparseIntMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

IntMatrix SparseIntMatrix::to_dense() const {
  IntMatrix m(rows_.size(), cols_);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    for (const auto& [j, v] : rows_[i]) m(i, j) = v;
  return m;
}

SparseIntMatrix SparseIntMatrix::from_dense(const IntMatrix& m) {
  SparseIntMatrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) s.rows_[i][j] = m(i, j);
  return s;
}

SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("SparseIntMatrix: shape mismatch");
  SparseIntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (const auto& [k, x] : a.rows_[i])
      for (const auto& [j, y] : b.rows_[k]) c.add(i, j, x * y);
  return c;
}

Integer determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = t;
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

namespace {

// row_dst -= q * row_src on columns [from, cols)
void row_submul(IntMatrix& m, std::size_t dst, std::size_t src, const Integer& q) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (m(src, j) != 0) m(dst, j) -= q * m(src, j);
}

void col_submul(IntMatrix& m, std::size_t dst, std::size_t src, const Integer& q) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (m(i, src) != 0) m(i, dst) -= q * m(i, src);
}

void negate_row(IntMatrix& m, std::size_t r) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = -m(r, j);
}

// Shared reduction; u and v may be null when transforms are not needed.
void smith_reduce(IntMatrix& d, IntMatrix* u, IntMatrix* v) {
  const std::size_t m = d.rows(), n = d.cols();
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    for (;;) {
      // pivot: least nonzero |entry| of the remaining block, every pass
      std::size_t pi = m, pj = n;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (d(i, j) != 0 && (pi == m || abs(d(i, j)) < abs(d(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == m) return;
      d.swap_rows(t, pi);
      if (u) u->swap_rows(t, pi);
      d.swap_cols(t, pj);
      if (v) v->swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        Integer q = d(i, t) / d(t, t);
        row_submul(d, i, t, q);
        if (u) row_submul(*u, i, t, q);
        clean = clean && d(i, t) == 0;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        Integer q = d(t, j) / d(t, t);
        col_submul(d, j, t, q);
        if (v) col_submul(*v, j, t, q);
        clean = clean && d(t, j) == 0;
      }
      if (!clean) continue;  // a smaller remainder is left in row or column t
      std::size_t bad = m;
      for (std::size_t i = t + 1; i < m && bad == m; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!mpz_divisible_p(d(i, j).get_mpz_t(), d(t, t).get_mpz_t())) {
            bad = i;
            break;
          }
      if (bad == m) break;
      row_submul(d, t, bad, Integer(-1));
      if (u) row_submul(*u, t, bad, Integer(-1));
    }
    if (d(t, t) < 0) {
      negate_row(d, t);
      if (u) negate_row(*u, t);
    }
  }
}

}  // namespace

std::vector<Integer> SmithForm::diagonal() const {
  std::vector<Integer> out;
  for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i)
    if (D(i, i) != 0) out.push_back(D(i, i));
  return out;
}

SmithForm smith_normal_form(const IntMatrix& a) {
  SmithForm s{a, IntMatrix::identity(a.rows()), IntMatrix::identity(a.cols())};
  smith_reduce(s.D, &s.U, &s.V);
  return s;
}

namespace {

enum class ElimMode { IntegerUnits, ModP, Rational };

// Sparse elimination. IntegerUnits only pivots on +-1 and leaves the rest;
// ModP and Rational eliminate completely. Returns the number of pivots.
struct SparseElim {
  std::vector<std::map<std::size_t, Integer>> rows;
  std::vector<std::set<std::size_t>> cols;
  ElimMode mode;
  Integer p;

  SparseElim(const SparseIntMatrix& a, ElimMode m, const Integer& modulus)
      : rows(a.rows()), cols(a.cols()), mode(m), p(modulus) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (const auto& [j, v] : a.row(i)) {
        Integer x = v;
        if (mode == ElimMode::ModP) {
          mpz_mod(x.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
          if (x == 0) continue;
        }
        rows[i][j] = x;
        cols[j].insert(i);
      }
  }

  void set_entry(std::size_t i, std::size_t j, Integer x) {
    if (mode == ElimMode::ModP) mpz_mod(x.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
    if (x == 0) {
      rows[i].erase(j);
      cols[j].erase(i);
    } else {
      rows[i][j] = x;
      cols[j].insert(i);
    }
  }

  void drop_row(std::size_t r) {
    for (const auto& [j, v] : rows[r]) cols[j].erase(r);
    rows[r].clear();
  }

  void pivot(std::size_t r, std::size_t c) {
    const Integer piv = rows[r].at(c);
    Integer inv;
    if (mode == ElimMode::ModP) mpz_invert(inv.get_mpz_t(), piv.get_mpz_t(), p.get_mpz_t());
    std::vector<std::size_t> others(cols[c].begin(), cols[c].end());
    const auto src = rows[r];
    for (std::size_t o : others) {
      if (o == r) continue;
      const Integer a = rows[o].at(c);
      if (mode == ElimMode::Rational) {
        // row_o = piv*row_o - a*row_r, then strip the content
        std::map<std::size_t, Integer> next;
        for (const auto& [j, v] : rows[o]) next[j] = piv * v;
        for (const auto& [j, v] : src) next[j] -= a * v;
        for (const auto& [j, v] : rows[o]) cols[j].erase(o);
        rows[o].clear();
        Integer g = 0;
        for (const auto& [j, v] : next)
          if (v != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        for (auto& [j, v] : next)
          if (v != 0) {
            if (g > 1) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
            rows[o][j] = v;
            cols[j].insert(o);
          }
      } else {
        const Integer f = mode == ElimMode::ModP ? Integer(a * inv) : Integer(a * piv);
        for (const auto& [j, v] : src) {
          auto it = rows[o].find(j);
          Integer x = (it == rows[o].end() ? Integer(0) : it->second) - f * v;
          set_entry(o, j, x);
        }
      }
    }
    drop_row(r);
  }

  std::size_t run() {
    std::size_t pivots = 0;
    bool progress = true;
    while (progress) {
      progress = false;
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].empty()) order.push_back(i);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows[a].size() < rows[b].size();
      });
      for (std::size_t r : order) {
        if (rows[r].empty()) continue;
        std::size_t best = cols.size();
        for (const auto& [j, v] : rows[r]) {
          bool ok = mode != ElimMode::IntegerUnits || abs(v) == 1;
          if (!ok) continue;
          if (best == cols.size() || cols[j].size() < cols[best].size() ||
              (mode == ElimMode::Rational && abs(v) < abs(rows[r].at(best))))
            best = j;
        }
        if (best == cols.size()) continue;
        pivot(r, best);
        ++pivots;
        progress = true;
      }
    }
    return pivots;
  }
};

std::vector<Integer> smith_diagonal(IntMatrix d) {
  smith_reduce(d, nullptr, nullptr);
  std::vector<Integer> out;
  for (std::size_t i = 0; i < std::min(d.rows(), d.cols()); ++i)
    if (d(i, i) != 0) out.push_back(d(i, i));
  return out;
}

}  // namespace

std::vector<Integer> invariant_factors(const SparseIntMatrix& a) {
  SparseElim e(a, ElimMode::IntegerUnits, 0);
  const std::size_t units = e.run();
  // Densify what is left, compressing away empty rows and columns.
  std::vector<std::size_t> live_rows, live_cols;
  for (std::size_t i = 0; i < e.rows.size(); ++i)
    if (!e.rows[i].empty()) live_rows.push_back(i);
  for (std::size_t j = 0; j < e.cols.size(); ++j)
    if (!e.cols[j].empty()) live_cols.push_back(j);
  std::vector<Integer> out(units, Integer(1));
  if (!live_rows.empty()) {
    std::map<std::size_t, std::size_t> col_index;
    for (std::size_t k = 0; k < live_cols.size(); ++k) col_index[live_cols[k]] = k;
    IntMatrix d(live_rows.size(), live_cols.size());
    for (std::size_t k = 0; k < live_rows.size(); ++k)
      for (const auto& [j, v] : e.rows[live_rows[k]]) d(k, col_index[j]) = v;
    for (auto& f : smith_diagonal(std::move(d))) out.push_back(f);
  }
  return out;
}

std::size_t rank_integral(const SparseIntMatrix& a) {
  SparseElim e(a, ElimMode::Rational, 0);
  return e.run();
}

std::size_t rank_mod_p(const SparseIntMatrix& a, const Integer& p) {
  SparseElim e(a, ElimMode::ModP, p);
  return e.run();
}

std::vector<Integer> normalize_torsion(std::vector<Integer> orders) {
  for (auto& o : orders) o = abs(o);
  for (std::size_t i = 0; i < orders.size(); ++i)
    for (std::size_t j = i + 1; j < orders.size(); ++j) {
      Integer g, l;
      mpz_gcd(g.get_mpz_t(), orders[i].get_mpz_t(), orders[j].get_mpz_t());
      mpz_lcm(l.get_mpz_t(), orders[i].get_mpz_t(), orders[j].get_mpz_t());
      orders[i] = g;
      orders[j] = l;
    }
  std::vector<Integer> out;
  for (auto& o : orders)
    if (o != 1) out.push_back(o);
  return out;
}

namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

CoefficientRing CoefficientRing::prime_field(long p) {
  if (!is_prime(p)) throw std::invalid_argument("PrimeField requires a prime, got " + std::to_string(p));
  return CoefficientRing(Kind::PrimeField, p);
}

CoefficientRing CoefficientRing::mod(long m) {
  if (m < 2) throw std::invalid_argument("ModM requires m >= 2");
  return CoefficientRing(Kind::ModM, m);
}

CoefficientRing CoefficientRing::parse(const std::string& spec) {
  auto number = [&](const std::string& s) -> long {
    if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit))
      throw std::invalid_argument("bad ring spec '" + spec + "'");
    return std::stol(s);
  };
  if (spec == "Z" || spec == "ZZ") return integers();
  if (spec == "Q" || spec == "QQ") return rationals();
  if (spec.rfind("GF(", 0) == 0 && spec.back() == ')')
    return prime_field(number(spec.substr(3, spec.size() - 4)));
  if (spec.rfind("F", 0) == 0) return prime_field(number(spec.substr(1)));
  if (spec.rfind("Z/", 0) == 0) return mod(number(spec.substr(2)));
  throw std::invalid_argument("bad ring spec '" + spec + "'");
}

Integer CoefficientRing::reduce(const Integer& v) const {
  if (modulus_ == 0) return v;
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(modulus_));
  return r;
}

std::string CoefficientRing::to_string() const {
  switch (kind_) {
    case Kind::Integers: return "Z";
    case Kind::Rationals: return "Q";
    case Kind::PrimeField: return "F" + std::to_string(modulus_);
    case Kind::ModM: return "Z/" + std::to_string(modulus_);
  }
  return "?";
}

std::string to_string(const HomologySummary& h) {
  std::ostringstream os;
  os << "free " << h.free_rank;
  if (!h.torsion.empty()) {
    os << " torsion [";
    for (std::size_t i = 0; i < h.torsion.size(); ++i) os << (i ? "," : "") << h.torsion[i];
    os << "]";
  }
  return os.str();
}

std::size_t minimal_generator_count(const HomologySummary& h) {
  return h.free_rank + h.torsion.size();
}

IntMatrix kernel_basis(const IntMatrix& a) {
  SmithForm s = smith_normal_form(a);
  const std::size_t r = s.diagonal().size();
  IntMatrix k(a.cols(), a.cols() - r);
  for (std::size_t j = r; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) k(i, j - r) = s.V(i, j);
  return k;
}

std::optional<std::vector<Integer>> solve_integral(const IntMatrix& a,
                                                   const std::vector<Integer>& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve_integral: shape mismatch");
  SmithForm s = smith_normal_form(a);
  std::vector<Integer> ub(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.rows(); ++k) ub[i] += s.U(i, k) * b[k];
  const std::size_t r = s.diagonal().size();
  std::vector<Integer> y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (i < r) {
      if (!mpz_divisible_p(ub[i].get_mpz_t(), s.D(i, i).get_mpz_t())) return std::nullopt;
      y[i] = ub[i] / s.D(i, i);
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  std::vector<Integer> x(a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) x[i] += s.V(i, k) * y[k];
  return x;
}

namespace {

// Reduced row echelon form over Q of [a | b]; returns pivot columns.
std::vector<std::size_t> rref(std::vector<std::vector<mpq_class>>& m, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < ncols && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    const mpq_class inv = 1 / m[row][c];
    for (auto& v : m[row]) v *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || m[i][c] == 0) continue;
      const mpq_class f = m[i][c];
      for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] -= f * m[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

}  // namespace

std::optional<std::vector<mpq_class>> solve_rational(const IntMatrix& a,
                                                     const std::vector<Integer>& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve_rational: shape mismatch");
  std::vector<std::vector<mpq_class>> m(a.rows(), std::vector<mpq_class>(a.cols() + 1));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
    m[i][a.cols()] = b[i];
  }
  auto piv = rref(m, a.cols() + 1);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  std::vector<mpq_class> x(a.cols());
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = m[r][a.cols()];
  return x;
}

std::size_t rank_rational(const IntMatrix& a) {
  return rank_integral(SparseIntMatrix::from_dense(a));
}

HomologySummary lattice_quotient(const IntMatrix& z, const IntMatrix& n) {
  if (z.rows() != n.rows()) throw std::invalid_argument("lattice_quotient: ambient mismatch");
  SmithForm s = smith_normal_form(z);
  const auto diag = s.diagonal();
  const std::size_t r = diag.size();
  // Coordinates of the generators of N in the basis d_i * U^{-1} e_i of Z.
  IntMatrix c(r, n.cols());
  IntMatrix un = s.U * n;
  for (std::size_t j = 0; j < n.cols(); ++j) {
    for (std::size_t i = 0; i < un.rows(); ++i) {
      if (i >= r) {
        if (un(i, j) != 0) throw std::invalid_argument("lattice_quotient: N is not inside Z");
        continue;
      }
      if (!mpz_divisible_p(un(i, j).get_mpz_t(), diag[i].get_mpz_t()))
        throw std::invalid_argument("lattice_quotient: N is not inside Z");
      c(i, j) = un(i, j) / diag[i];
    }
  }
  const auto factors = smith_diagonal(c);
  HomologySummary h;
  h.free_rank = r - factors.size();
  h.torsion = normalize_torsion(factors);
  return h;
}

namespace {

bool composition_vanishes(const SparseIntMatrix& d_out, const SparseIntMatrix& d_in,
                          const CoefficientRing& ring) {
  if (d_out.cols() != d_in.rows())
    throw std::invalid_argument("homology_at: d_out and d_in do not compose");
  SparseIntMatrix c = d_out * d_in;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (const auto& [j, v] : c.row(i))
      if (ring.reduce(v) != 0) return false;
  return true;
}

HomologySummary mod_m_lattice(const SparseIntMatrix& d_out, const SparseIntMatrix& d_in, long m) {
  const std::size_t n = d_out.cols(), k = d_out.rows();
  // Z = {x : d_out x in mZ^k}, N = im d_in + mZ^n.
  IntMatrix aug(k, n + k);
  IntMatrix dense_out = d_out.to_dense();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = dense_out(i, j);
    aug(i, n + i) = m;
  }
  IntMatrix ker = kernel_basis(aug);
  IntMatrix z(n, ker.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < ker.cols(); ++j) z(i, j) = ker(i, j);
  IntMatrix nn(n, d_in.cols() + n);
  IntMatrix dense_in = d_in.to_dense();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d_in.cols(); ++j) nn(i, j) = dense_in(i, j);
    nn(i, d_in.cols() + i) = m;
  }
  HomologySummary q = lattice_quotient(z, nn);
  // Every summand is Z/d with d | m; the Z/m ones are free over Z/m.
  HomologySummary h;
  for (const auto& t : q.torsion) {
    if (t == m)
      ++h.free_rank;
    else
      h.torsion.push_back(t);
  }
  h.torsion = normalize_torsion(h.torsion);
  return h;
}

}  // namespace

HomologySummary homology_at(const SparseIntMatrix& d_out, const SparseIntMatrix& d_in,
                            const CoefficientRing& ring) {
  const std::size_t n = d_out.cols();
  if (d_in.rows() != n) throw std::invalid_argument("homology_at: d_out and d_in do not compose");
  if (!composition_vanishes(d_out, d_in, ring))
    throw CompositionNonzero("homology_at: d_out * d_in != 0 over " + ring.to_string());
  HomologySummary h;
  switch (ring.kind()) {
    case CoefficientRing::Kind::Rationals: {
      h.free_rank = n - rank_integral(d_out) - rank_integral(d_in);
      return h;
    }
    case CoefficientRing::Kind::PrimeField: {
      const Integer p = ring.mu();
      h.free_rank = n - rank_mod_p(d_out, p) - rank_mod_p(d_in, p);
      return h;
    }
    case CoefficientRing::Kind::Integers: {
      const std::size_t r_out = rank_integral(d_out);
      const auto f_in = invariant_factors(d_in);
      h.free_rank = n - r_out - f_in.size();
      h.torsion = normalize_torsion(f_in);
      return h;
    }
    case CoefficientRing::Kind::ModM: {
      if (!composition_vanishes(d_out, d_in, CoefficientRing::integers()))
        return mod_m_lattice(d_out, d_in, ring.mu());
      // Universal coefficients: H^n(C) (x) Z/m  +  Tor(H^{n+1}(C), Z/m).
      const Integer m = ring.mu();
      const auto f_in = invariant_factors(d_in);
      const auto f_out = invariant_factors(d_out);
      h.free_rank = n - f_in.size() - f_out.size();
      std::vector<Integer> parts;
      for (const auto* list : {&f_in, &f_out})
        for (const auto& t : *list) {
          Integer g;
          mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t());
          if (g == m)
            ++h.free_rank;
          else if (g > 1)
            parts.push_back(g);
        }
      h.torsion = normalize_torsion(parts);
      return h;
    }
  }
  return h;
}

HomologySummary homology_at(const IntMatrix& d_out, const IntMatrix& d_in,
                            const CoefficientRing& ring) {
  return homology_at(SparseIntMatrix::from_dense(d_out), SparseIntMatrix::from_dense(d_in), ring);
}

}  // namespace loopbetti
