#include "loopbetti/analysis.hpp"

#include <algorithm>
#include <sstream>

namespace loopbetti {

std::size_t PoincareSeries::at(int n) const {
  if (n < 0 || n > truncation()) return 0;
  return coeffs[static_cast<std::size_t>(n)];
}

std::string PoincareSeries::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    if (coeffs[n] == 0) continue;
    if (!first) out << " + ";
    first = false;
    if (n == 0 || coeffs[n] != 1) out << coeffs[n];
    if (n > 0) out << (coeffs[n] != 1 ? "*" : "") << "T" << (n > 1 ? "^" + std::to_string(n) : "");
  }
  if (first) out << "0";
  out << " + O(T^" << coeffs.size() << ")";
  return out.str();
}

PoincareSeries operator+(const PoincareSeries& a, const PoincareSeries& b) {
  if (a.coeffs.size() != b.coeffs.size()) throw TruncationMismatch("series truncations differ");
  PoincareSeries r = a;
  for (std::size_t n = 0; n < r.coeffs.size(); ++n) r.coeffs[n] += b.coeffs[n];
  return r;
}

PoincareSeries shift(const PoincareSeries& a, int k) {
  PoincareSeries r{std::vector<std::size_t>(a.coeffs.size(), 0)};
  for (int n = 0; n <= a.truncation(); ++n) r.coeffs[static_cast<std::size_t>(n)] = a.at(n - k);
  return r;
}

bool series_leq(const PoincareSeries& a, const PoincareSeries& b) {
  if (a.coeffs.size() != b.coeffs.size()) throw TruncationMismatch("series truncations differ");
  for (std::size_t n = 0; n < a.coeffs.size(); ++n)
    if (a.coeffs[n] > b.coeffs[n]) return false;
  return true;
}

// ---------------------------------------------------------------- quotient

namespace {

SparseIntMatrix hcat(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.rows() != b.rows()) throw std::logic_error("hcat: row mismatch");
  SparseIntMatrix m(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (const auto& [j, v] : a.row(i)) m.add(i, j, v);
    for (const auto& [j, v] : b.row(i)) m.add(i, a.cols() + j, v);
  }
  return m;
}

std::size_t rk(const SparseIntMatrix& m) { return m.rows() == 0 || m.cols() == 0 ? 0 : rank_integral(m); }

}  // namespace

QuotientReport quotient_inequality_check(const FilteredModelFragment& f, const Generator& y, int N,
                                         const std::function<void(PoincareSeries&)>& tamper,
                                         const HgaOptions& opts) {
  if (N < 0) N = f.truncation - 3;
  if (N + 3 > f.truncation)
    throw DegreeOutOfRange("quotient check to degree " + std::to_string(N) + " needs fragment truncation >= " +
                           std::to_string(N + 3));
  if (!f.contains(y)) throw std::invalid_argument("y is not a generator of the fragment");
  const int k = y.degree() - 1;
  if (k < 1) throw std::invalid_argument("y must have total degree >= 2");
  if (!f.dh.image(y).linear_part().is_zero()) throw NotCocycle("d-bar of " + y.name() + " is not zero");

  FilteredModelFragment fq = f;
  fq.ring = CoefficientRing::rationals();
  const SmallComplex sc = small_complex(fq, N + 1);
  const int top = N + 1;
  auto dim = [&](int n) { return sc.dim(n); };
  auto D = [&](int n) {
    if (n < 0) return SparseIntMatrix(dim(0), 0);
    if (n > N + 1) throw std::logic_error("differential out of range");
    return sc.d[static_cast<std::size_t>(n)];
  };

  // Columns spanning S^n inside V-bar^n.
  std::vector<SparseIntMatrix> S(static_cast<std::size_t>(top + 1));
  for (int n = 0; n <= top; ++n) {
    std::map<Generator, std::size_t> index;
    if (n >= 1)
      for (std::size_t i = 0; i < sc.basis[static_cast<std::size_t>(n)].size(); ++i)
        index.emplace(sc.basis[static_cast<std::size_t>(n)][i], i);
    std::vector<Element> cols;
    if (n == k) cols.push_back(Element::of(y));
    for (const auto& v : f.in_degree(n - k + 1))
      if (v.degree() >= 2) cols.push_back(cup1(Element::of(y), Element::of(v), opts).linear_part());
    SparseIntMatrix m(dim(n), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (const auto& [w, c] : cols[j].terms()) {
        auto it = index.find(w[0]);
        if (it == index.end()) throw MissingEOp("the fragment lacks " + w[0].name() + " needed by y cup-1 v");
        m.add(it->second, j, c);
      }
    S[static_cast<std::size_t>(n)] = std::move(m);
  }

  std::vector<std::size_t> rD(static_cast<std::size_t>(top + 1)), s(static_cast<std::size_t>(top + 1)),
      rDS(static_cast<std::size_t>(top + 1));
  for (int n = 0; n <= top; ++n) {
    s[n] = rk(S[n]);
    rD[n] = rk(D(n));
    rDS[n] = rk(D(n) * S[n]);
  }
  auto rD_ = [&](int n) { return n < 0 ? std::size_t{0} : rD[n]; };
  auto rDS_ = [&](int n) { return n < 0 ? std::size_t{0} : rDS[n]; };
  std::vector<std::size_t> rDprevS(static_cast<std::size_t>(top + 1));
  rDprevS[0] = s[0];
  for (int n = 1; n <= top; ++n) rDprevS[n] = rk(hcat(D(n - 1), S[n]));

  QuotientReport rep;
  rep.y = y.name();
  rep.k = k;
  rep.N = N;
  const std::size_t len = static_cast<std::size_t>(N + 1);
  rep.vbar.coeffs.assign(len, 0);
  rep.quotient.coeffs.assign(len, 0);
  rep.les.coeffs.assign(len, 0);
  rep.image.coeffs.assign(len, 0);
  rep.euler_poincare.coeffs.assign(len, 0);

  bool subcomplex = true;
  for (int n = 0; n <= N; ++n)
    if (rk(hcat(S[n + 1], D(n) * S[n])) != s[n + 1]) subcomplex = false;
  rep.lines.push_back({"y-bar and the y cup-1 v span a subcomplex", subcomplex, ""});

  auto hv = [&](int n) -> std::size_t { return n < 0 ? 0 : dim(n) - rD[n] - rD_(n - 1); };
  auto hs = [&](int n) -> std::size_t { return s[n] - rDS[n] - rDS_(n - 1); };
  auto in = [&](int n) -> std::size_t { return rDprevS[n] - rDS[n] - rD_(n - 1); };

  for (int n = 0; n <= N; ++n) {
    const std::size_t u = static_cast<std::size_t>(n);
    rep.vbar.coeffs[u] = hv(n);
    const std::size_t z = dim(n) - rk(hcat(D(n), S[n + 1])) + s[n + 1] - s[n];
    const std::size_t b = rDprevS[n] - s[n];
    rep.quotient.coeffs[u] = z - b;
    rep.image.coeffs[u] = in(n);
    rep.les.coeffs[u] = hv(n) - in(n) + hs(n + 1) - in(n + 1);
    const std::size_t expected = (n == k ? 1 : 0) + (n - k >= 1 ? dim(n - k) : 0);
    if (s[u] != expected) rep.injective = false;
  }
  if (s[static_cast<std::size_t>(N + 1)] != (N + 1 == k ? 1u : 0u) + (N + 1 - k >= 1 ? dim(N + 1 - k) : 0u))
    rep.injective = false;
  rep.bound.coeffs.assign(len, 0);
  for (int n = 0; n <= N; ++n) {
    const std::size_t u = static_cast<std::size_t>(n);
    const std::size_t bound = hv(n) + hv(n - k + 1);
    rep.bound.coeffs[u] = bound;
    rep.euler_poincare.coeffs[u] = bound - in(n) - in(n + 1);
  }

  if (tamper) tamper(rep.quotient);
  rep.holds = series_leq(rep.quotient, rep.bound);
  rep.agrees = rep.quotient == rep.les && (!rep.injective || rep.quotient == rep.euler_poincare);
  std::ostringstream detail;
  if (!rep.holds)
    for (int n = 0; n <= N; ++n)
      if (rep.quotient.at(n) > rep.bound.at(n)) {
        detail << "degree " << n << ": " << rep.quotient.at(n) << " > " << rep.bound.at(n);
        break;
      }
  rep.lines.push_back({"S_H(quotient) <= (1 + T^" + std::to_string(k - 1) + ") S_H(V-bar)", rep.holds, detail.str()});
  rep.lines.push_back({"long exact sequence recomputes the quotient series", rep.quotient == rep.les, ""});
  if (rep.injective)
    rep.lines.push_back({"Euler-Poincare form (1+T^" + std::to_string(k - 1) + ")S - (1+T)S_I/T agrees",
                         rep.quotient == rep.euler_poincare, ""});
  else
    rep.lines.push_back({"Euler-Poincare form skipped: s^k V-bar -> V-bar is not injective in range", true, ""});
  return rep;
}

// ---------------------------------------------------------------- generators

namespace {

IntMatrix d_matrix(const DGAPresentation& a, const std::vector<Word>& src, const std::vector<Word>& dst) {
  std::map<Word, std::size_t, WordLess> index;
  for (std::size_t i = 0; i < dst.size(); ++i) index.emplace(dst[i], i);
  IntMatrix m(dst.size(), src.size());
  for (std::size_t j = 0; j < src.size(); ++j)
    for (const auto img = a.differential(src[j]); const auto& [w, c] : img.terms()) {
      auto it = index.find(w);
      if (it == index.end()) throw std::logic_error("differential leaves the basis: " + to_string(w));
      m(it->second, j) += c;
    }
  return m;
}

}  // namespace

std::size_t count_algebra_generators(const DGAPresentation& a, int N) {
  N = std::min(N, a.truncation - 1);
  const Integer q = a.ring.mu();
  const bool rational = a.ring.kind() == CoefficientRing::Kind::Rationals;
  std::vector<std::vector<Word>> basis(static_cast<std::size_t>(std::max(N, 0)) + 2);
  for (int n = 1; n <= N + 1; ++n) basis[n] = a.basis(n);
  // cocycles[n]: columns spanning {x : dx = 0 mod q} in degree n.
  std::vector<IntMatrix> cocycles(basis.size());
  std::size_t count = 0;
  for (int n = 1; n <= N; ++n) {
    const auto& b = basis[n];
    const std::size_t r = b.size(), rt = basis[n + 1].size();
    IntMatrix dn = d_matrix(a, b, basis[n + 1]);
    IntMatrix ext(rt, r + (q != 0 ? rt : 0));
    for (std::size_t i = 0; i < rt; ++i) {
      for (std::size_t j = 0; j < r; ++j) ext(i, j) = dn(i, j);
      if (q != 0) ext(i, r + i) = q;
    }
    IntMatrix kz = r == 0 ? IntMatrix(0, 0) : kernel_basis(ext);
    IntMatrix z(r, kz.cols());
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < kz.cols(); ++j) z(i, j) = kz(i, j);
    cocycles[n] = z;
    if (r == 0) continue;

    std::vector<std::vector<Integer>> rel;
    if (n >= 2) {
      IntMatrix dp = d_matrix(a, basis[n - 1], b);
      for (std::size_t j = 0; j < dp.cols(); ++j) {
        std::vector<Integer> col(r);
        for (std::size_t i = 0; i < r; ++i) col[i] = dp(i, j);
        rel.push_back(col);
      }
    }
    if (q != 0)
      for (std::size_t i = 0; i < r; ++i) {
        std::vector<Integer> col(r);
        col[i] = q;
        rel.push_back(col);
      }
    std::map<Word, std::size_t, WordLess> index;
    for (std::size_t i = 0; i < r; ++i) index.emplace(b[i], i);
    for (int i = 1; i < n; ++i) {
      const IntMatrix& zl = cocycles[i];
      const IntMatrix& zr = cocycles[n - i];
      for (std::size_t x = 0; x < zl.cols(); ++x)
        for (std::size_t y = 0; y < zr.cols(); ++y) {
          std::vector<Integer> col(r);
          for (std::size_t p = 0; p < zl.rows(); ++p) {
            if (zl(p, x) == 0) continue;
            for (std::size_t t = 0; t < zr.rows(); ++t) {
              if (zr(t, y) == 0) continue;
              for (const auto img = a.product(basis[i][p], basis[n - i][t]); const auto& [w, c] : img.terms())
                col[index.at(w)] += zl(p, x) * zr(t, y) * c;
            }
          }
          rel.push_back(col);
        }
    }
    IntMatrix nm(r, rel.size());
    for (std::size_t j = 0; j < rel.size(); ++j)
      for (std::size_t i = 0; i < r; ++i) nm(i, j) = rel[j][i];
    const HomologySummary h = lattice_quotient(z, nm);
    count += rational ? h.free_rank : minimal_generator_count(h);
  }
  return count;
}

bool cohomology_is_free(const DGAPresentation& a, int N) {
  N = std::min(N, a.truncation - 1);
  const CoefficientRing z = CoefficientRing::integers();
  for (int n = 1; n <= N; ++n) {
    const auto b = a.basis(n);
    if (b.empty()) continue;
    const IntMatrix out = d_matrix(a, b, a.basis(n + 1));
    const IntMatrix in = n == 1 ? IntMatrix(b.size(), 0) : d_matrix(a, a.basis(n - 1), b);
    if (!homology_at(out, in, z).torsion.empty()) return false;
  }
  return true;
}

// ---------------------------------------------------------------- dichotomy

std::string to_string(Verdict v) { return v == Verdict::BoundedSoFar ? "BoundedSoFar" : "GrowthDetected"; }

Verdict growth_verdict(const std::vector<std::size_t>& taus) {
  if (taus.empty()) return Verdict::BoundedSoFar;
  const std::size_t third = std::max<std::size_t>(1, taus.size() / 3);
  const auto first = *std::max_element(taus.begin(), taus.begin() + static_cast<long>(third));
  const auto last = *std::max_element(taus.end() - static_cast<long>(third), taus.end());
  return last > first ? Verdict::GrowthDetected : Verdict::BoundedSoFar;
}

BettiReport dichotomy_report(const DGAPresentation& a, int N) {
  BettiReport r;
  r.space = a.name;
  r.ring = a.ring;
  r.window = N;
  r.profile = tor_profile(a, N);
  for (const auto& h : r.profile) r.taus.push_back(minimal_generator_count(h));
  r.third = std::max<std::size_t>(1, r.taus.size() / 3);
  r.verdict = growth_verdict(r.taus);
  r.generator_count = count_algebra_generators(a, a.truncation - 1);
  r.predicted_unbounded = r.generator_count >= 2;
  r.prediction_applies = a.ring.is_field() || cohomology_is_free(a, a.truncation - 1);
  return r;
}

BettiReport dichotomy_report(const std::string& space, const CoefficientRing& ring, int N) {
  return dichotomy_report(catalog_dga(space, ring, N + 2), N);
}

}  // namespace loopbetti
