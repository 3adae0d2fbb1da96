#include "loopbetti/models.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace loopbetti {

namespace {

Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

bool by_degree(const Generator& a, const Generator& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return a < b;
}

std::vector<Integer> prime_factors(Integer n) {
  std::vector<Integer> out;
  if (n < 0) n = -n;
  for (Integer q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    out.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Bilinear extension of the table product.
Element table_mul(const DGAPresentation& a, const Element& x, const Element& y) {
  Element r;
  for (const auto& [w1, c1] : x.terms())
    for (const auto& [w2, c2] : y.terms()) r += (c1 * c2) * a.product(w1, w2);
  return r;
}

Element table_d(const DGAPresentation& a, const Element& x) {
  Element r;
  for (const auto& [w, c] : x.terms()) r += c * a.differential(w);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- DGAs

std::vector<Word> DGAPresentation::basis(int deg) const {
  std::vector<Word> out;
  if (deg <= 0 || deg > truncation) return out;
  if (mult == Multiplication::Free) return basis_words(deg, gens);
  for (const auto& g : gens)
    if (g.degree() == deg) out.push_back(Word{g});
  return out;
}

Element DGAPresentation::differential(const Word& letter) const {
  if (mult == Multiplication::Free) return apply_derivation(diff, letter);
  if (letter.size() != 1) throw std::invalid_argument("table algebra letters are single generators");
  return diff.has_image(letter[0]) ? diff.image(letter[0]) : Element();
}

Element DGAPresentation::product(const Word& a, const Word& b) const {
  if (degree(a) + degree(b) > truncation) return {};
  if (mult == Multiplication::Free) {
    Word w = a;
    w.insert(w.end(), b.begin(), b.end());
    return Element::of(w);
  }
  if (a.size() != 1 || b.size() != 1) throw std::invalid_argument("table algebra letters are single generators");
  auto it = table.find({a[0], b[0]});
  return it == table.end() ? Element() : it->second;
}

int DGAPresentation::weight_of(const Word& letter) const {
  int w = 0;
  for (const auto& g : letter) {
    auto it = weight.find(g);
    w += it == weight.end() ? 1 : it->second;
  }
  return w;
}

void DGAPresentation::validate() const {
  std::set<std::string> names;
  for (const auto& g : gens) {
    if (g.degree() < 2) throw BadParams("generator " + g.name() + " has degree < 2");
    if (!names.insert(g.name()).second) throw BadParams("duplicate generator name " + g.name());
  }
  if (mult == Multiplication::Free) {
    auto rep = check_d_squared(diff, gens, truncation);
    if (!rep.ok) throw BadParams("d^2 != 0 on " + rep.failing->name() + ": " + rep.residue.to_string());
    return;
  }
  std::set<Generator> known(gens.begin(), gens.end());
  auto check_letters = [&](const Element& e, const std::string& what) {
    for (const auto& [w, c] : e.terms())
      if (w.size() != 1 || !known.count(w[0])) throw BadParams(what + " leaves the generator basis");
  };
  for (const auto& g : gens) {
    Element dg = differential(Word{g});
    check_letters(dg, "d" + g.name());
    if (!table_d(*this, dg).is_zero()) throw BadParams("d^2 != 0 on " + g.name());
  }
  for (const auto& [key, val] : table) {
    if (!known.count(key.first) || !known.count(key.second)) throw BadParams("product table names an unknown generator");
    check_letters(val, key.first.name() + "*" + key.second.name());
    if (!val.is_zero() && val.degree() != key.first.degree() + key.second.degree())
      throw BadParams("product " + key.first.name() + "*" + key.second.name() + " has the wrong degree");
  }
  for (const auto& g : gens)
    for (const auto& h : gens) {
      if (g.degree() + h.degree() + 1 > truncation) continue;
      Element eg = Element::of(g), eh = Element::of(h);
      Element lhs = table_d(*this, table_mul(*this, eg, eh));
      Element rhs = table_mul(*this, table_d(*this, eg), eh);
      rhs += (g.degree() % 2 ? -1 : 1) * table_mul(*this, eg, table_d(*this, eh));
      if (!(lhs == rhs)) throw BadParams("Leibniz rule fails on " + g.name() + "*" + h.name());
      for (const auto& k : gens) {
        if (g.degree() + h.degree() + k.degree() > truncation) continue;
        Element ek = Element::of(k);
        if (!(table_mul(*this, table_mul(*this, eg, eh), ek) == table_mul(*this, eg, table_mul(*this, eh, ek))))
          throw BadParams("product is not associative on " + g.name() + "," + h.name() + "," + k.name());
      }
    }
}

DGAPresentation sphere_dga(int n, const CoefficientRing& ring, int truncation) {
  if (n < 2) throw BadParams("sphere dimension must be at least 2");
  DGAPresentation a;
  a.name = "sphere:" + std::to_string(n);
  a.ring = ring;
  a.truncation = truncation;
  Generator x = Generator::plain("x", n);
  a.gens = {x};
  a.diff.set_image(x, {});
  a.weight[x] = 1;
  return a;
}

DGAPresentation poly_dga(int n, const CoefficientRing& ring, int truncation) {
  if (n < 2) throw BadParams("generator degree must be at least 2");
  DGAPresentation a;
  a.name = "poly:" + std::to_string(n);
  a.ring = ring;
  a.truncation = truncation;
  std::vector<Generator> pw;
  for (int k = 1; k * n <= truncation; ++k) {
    pw.push_back(Generator::plain(k == 1 ? "x" : "x^" + std::to_string(k), k * n));
    a.diff.set_image(pw.back(), {});
    a.weight[pw.back()] = k;
  }
  a.gens = pw;
  for (std::size_t i = 0; i < pw.size(); ++i)
    for (std::size_t j = 0; i + j + 1 < pw.size(); ++j) a.table[{pw[i], pw[j]}] = Element::of(pw[i + j + 1]);
  return a;
}

DGAPresentation moore_dga(long mu, int n, const CoefficientRing& ring, int truncation) {
  if (mu < 2) throw BadParams("Moore space needs mu >= 2");
  if (n < 2) throw BadParams("Moore space needs n >= 2");
  DGAPresentation a;
  a.name = "moore:" + std::to_string(mu) + "," + std::to_string(n);
  a.ring = ring;
  a.truncation = truncation;
  Generator ga = Generator::plain("a", n), gb = Generator::plain("b", n + 1);
  a.gens = {ga, gb};
  a.diff.set_image(ga, Integer(mu) * Element::of(gb));
  a.diff.set_image(gb, {});
  a.weight[ga] = 1;
  a.weight[gb] = 1;
  return a;
}

namespace {

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw BadParams("cannot read " + what + " from '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

int sphere_token(const std::string& tok) {
  std::string t = tok;
  if (!t.empty() && (t[0] == 'S' || t[0] == 's')) t = t.substr(1);
  return parse_int(t, "sphere dimension");
}

}  // namespace

DGAPresentation wedge_dga(const std::vector<std::string>& pieces, const CoefficientRing& ring, int truncation) {
  if (pieces.empty()) throw BadParams("empty wedge");
  DGAPresentation a;
  a.name = "wedge:";
  a.ring = ring;
  a.truncation = truncation;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string& tok = pieces[i];
    std::string idx = std::to_string(i + 1);
    a.name += (i ? "," : "") + tok;
    if (!tok.empty() && (tok[0] == 'M' || tok[0] == 'm')) {
      auto parts = split(tok.substr(1), '_');
      if (parts.size() != 2) throw BadParams("Moore piece must look like M<mu>_<n>: " + tok);
      int mu = parse_int(parts[0], "mu"), n = parse_int(parts[1], "dimension");
      if (mu < 2 || n < 2) throw BadParams("bad Moore piece " + tok);
      Generator ga = Generator::plain("a" + idx, n), gb = Generator::plain("b" + idx, n + 1);
      a.gens.push_back(ga);
      a.gens.push_back(gb);
      a.diff.set_image(ga, Integer(mu) * Element::of(gb));
      a.diff.set_image(gb, {});
    } else {
      int n = sphere_token(tok);
      if (n < 2) throw BadParams("sphere dimension must be at least 2");
      Generator x = Generator::plain("x" + idx, n);
      a.gens.push_back(x);
      a.diff.set_image(x, {});
    }
  }
  for (const auto& g : a.gens) a.weight[g] = 1;
  return a;
}

DGAPresentation product_dga(const std::vector<int>& dims, const CoefficientRing& ring, int truncation) {
  if (dims.empty()) throw BadParams("empty product");
  if (dims.size() > 12) throw BadParams("too many factors");
  for (int n : dims)
    if (n < 2) throw BadParams("sphere dimension must be at least 2");
  DGAPresentation a;
  a.name = "product:";
  for (std::size_t i = 0; i < dims.size(); ++i) a.name += (i ? ",S" : "S") + std::to_string(dims[i]);
  a.ring = ring;
  a.truncation = truncation;
  const unsigned full = 1u << dims.size();
  std::map<unsigned, Generator> by_mask;
  for (unsigned mask = 1; mask < full; ++mask) {
    int deg = 0;
    std::string name;
    for (std::size_t i = 0; i < dims.size(); ++i)
      if (mask & (1u << i)) {
        deg += dims[i];
        name += "x" + std::to_string(i + 1);
      }
    if (deg > truncation) continue;
    Generator g = Generator::plain(name, deg);
    by_mask.emplace(mask, g);
    a.gens.push_back(g);
    a.diff.set_image(g, {});
    a.weight[g] = std::popcount(mask);
  }
  std::sort(a.gens.begin(), a.gens.end(), by_degree);
  for (const auto& [s, gs] : by_mask)
    for (const auto& [t, gt] : by_mask) {
      if (s & t) continue;
      auto it = by_mask.find(s | t);
      if (it == by_mask.end()) continue;
      int exponent = 0;
      for (std::size_t i = 0; i < dims.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
          if ((s & (1u << i)) && (t & (1u << j))) exponent += dims[i] * dims[j];
      a.table[{gs, gt}] = Element::of(it->second, exponent % 2 ? -1 : 1);
    }
  return a;
}

DGAPresentation catalog_dga(const std::string& spec, const CoefficientRing& ring, int truncation) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw BadParams("catalog names look like kind:params, got '" + spec + "'");
  std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  auto args = split(rest, ',');
  DGAPresentation a;
  if (kind == "sphere") {
    if (args.size() != 1) throw BadParams("sphere takes one dimension");
    a = sphere_dga(sphere_token(args[0]), ring, truncation);
  } else if (kind == "poly") {
    if (args.size() != 1) throw BadParams("poly takes one degree");
    a = poly_dga(parse_int(args[0], "degree"), ring, truncation);
  } else if (kind == "moore") {
    if (args.size() != 2) throw BadParams("moore takes mu,n");
    a = moore_dga(parse_int(args[0], "mu"), parse_int(args[1], "dimension"), ring, truncation);
  } else if (kind == "wedge") {
    a = wedge_dga(args, ring, truncation);
  } else if (kind == "product") {
    std::vector<int> dims;
    for (const auto& t : args) dims.push_back(sphere_token(t));
    a = product_dga(dims, ring, truncation);
  } else {
    throw BadParams("unknown catalog space '" + kind + "'");
  }
  a.validate();
  return a;
}

// ---------------------------------------------------------------- fragments

std::vector<Generator> FilteredModelFragment::in_degree(int total_degree) const {
  std::vector<Generator> out;
  for (const auto& g : gens)
    if (g.degree() == total_degree) out.push_back(g);
  return out;
}

bool FilteredModelFragment::contains(const Generator& g) const {
  return std::find(gens.begin(), gens.end(), g) != gens.end();
}

FilteredModelFragment close_fragment(std::string name, const CoefficientRing& ring,
                                     const std::vector<Generator>& seeds, DerivationSpec dh, int truncation) {
  FilteredModelFragment f;
  f.name = std::move(name);
  f.ring = ring;
  f.truncation = truncation;
  std::set<Generator> seen;
  std::deque<Generator> queue;
  for (const auto& g : seeds)
    if (g.degree() <= truncation && seen.insert(g).second) queue.push_back(g);
  while (!queue.empty()) {
    Generator g = queue.front();
    queue.pop_front();
    for (const Element img = dh.image(g); const auto& [w, c] : img.terms())
      for (const auto& l : w)
        if (l.degree() <= truncation && seen.insert(l).second) queue.push_back(l);
  }
  f.gens.assign(seen.begin(), seen.end());
  std::sort(f.gens.begin(), f.gens.end(), by_degree);
  f.dh = std::move(dh);
  return f;
}

FilteredModelFragment with_cup1_closure(const FilteredModelFragment& f, const Generator& y, const HgaOptions& opts) {
  // One pass: every generator contributes its d_h-letters and the letters of y cup-1 v.
  std::set<Generator> seen(f.gens.begin(), f.gens.end());
  std::deque<Generator> queue(f.gens.begin(), f.gens.end());
  auto visit = [&](const Element& e) {
    for (const auto& [w, c] : e.terms())
      for (const auto& l : w)
        if (l.degree() <= f.truncation && seen.insert(l).second) queue.push_back(l);
  };
  while (!queue.empty()) {
    Generator v = queue.front();
    queue.pop_front();
    visit(f.dh.image(v));
    if (y.degree() + v.degree() - 1 <= f.truncation) visit(cup1(Element::of(y), Element::of(v), opts));
  }
  FilteredModelFragment out = f;
  out.gens.assign(seen.begin(), seen.end());
  std::sort(out.gens.begin(), out.gens.end(), by_degree);
  return out;
}

std::optional<Generator> minimality_violation(const FilteredModelFragment& f) {
  const Integer mu = f.ring.mu();
  for (const auto& g : f.gens) {
    if (g.kind() != GeneratorKind::Plain) continue;
    for (const Element img = f.dh.image(g).linear_part(); const auto& [w, c] : img.terms()) {
      if (w[0].kind() != GeneratorKind::Plain) continue;
      bool unit = false;
      switch (f.ring.kind()) {
        case CoefficientRing::Kind::Integers: unit = abs(c) == 1; break;
        case CoefficientRing::Kind::Rationals: unit = c != 0; break;
        default: {
          Integer r = gcd(c, mu);
          unit = r == 1;
        }
      }
      if (unit) return g;
    }
  }
  return std::nullopt;
}

std::size_t SmallComplex::dim(int n) const {
  if (n < 0 || n >= static_cast<int>(basis.size())) return 0;
  return n == 0 ? 1 : basis[static_cast<std::size_t>(n)].size();
}

HomologySummary SmallComplex::homology(int n) const {
  if (n < 0 || n >= static_cast<int>(d.size())) throw DegreeOutOfRange("small complex degree out of range");
  SparseIntMatrix in = n == 0 ? SparseIntMatrix(1, 0) : d[static_cast<std::size_t>(n - 1)];
  return homology_at(d[static_cast<std::size_t>(n)], in, ring);
}

SmallComplex small_complex(const FilteredModelFragment& f, int N) {
  if (N + 2 > f.truncation) throw DegreeOutOfRange("small complex to degree " + std::to_string(N) +
                                                   " needs fragment truncation >= " + std::to_string(N + 2));
  SmallComplex sc;
  sc.ring = f.ring;
  sc.basis.resize(static_cast<std::size_t>(N + 2));
  for (int n = 1; n <= N + 1; ++n) sc.basis[static_cast<std::size_t>(n)] = f.in_degree(n + 1);
  for (int n = 0; n <= N; ++n) {
    SparseIntMatrix m(sc.dim(n + 1), sc.dim(n));
    if (n > 0) {
      const auto& target = sc.basis[static_cast<std::size_t>(n + 1)];
      std::map<Generator, std::size_t> index;
      for (std::size_t i = 0; i < target.size(); ++i) index.emplace(target[i], i);
      const auto& src = sc.basis[static_cast<std::size_t>(n)];
      for (std::size_t j = 0; j < src.size(); ++j)
        for (const Element img = f.dh.image(src[j]).linear_part(); const auto& [w, c] : img.terms()) {
          auto it = index.find(w[0]);
          if (it == index.end()) throw std::logic_error("fragment is not closed: " + w[0].name());
          m.add(it->second, j, c);
        }
    }
    sc.d.push_back(std::move(m));
  }
  return sc;
}

// ---------------------------------------------------------------- sequence families

SequenceFamily sequence_family(FamilyCase which, const SequenceParams& params, int length) {
  const int m = params.base_degree;
  if (m < 3 || m % 2 == 0) throw CaseMismatch("the base generator b_0 must have odd degree >= 3");
  if (length < 1) throw BadParams("family length must be positive");
  if (which == FamilyCase::III && params.mu < 2) throw CaseMismatch("case III needs db_0 = mu c with mu >= 2");
  if (which != FamilyCase::III && params.mu != 0) throw CaseMismatch("cases I and II have a cocycle b_0 (mu = 0)");
  if (which == FamilyCase::III && params.base_res > -1) throw BadParams("b_0 must sit in negative resolution degree");

  SequenceFamily fam;
  fam.which = which;
  fam.params = params;
  fam.length = length;
  const int N = length;
  const Integer mu = params.mu;
  DerivationSpec d;

  auto deg_b = [&](int n) { return (n + 1) * m - n; };
  auto res_b = [&](int n) { return which == FamilyCase::III ? (n + 1) * params.base_res - n : -n; };

  std::vector<std::optional<Generator>> bg(static_cast<std::size_t>(N + 1)), fg(static_cast<std::size_t>(N + 1));
  for (int n = 0; n <= N; ++n) {
    if (which == FamilyCase::II && n == 1) continue;
    int r = res_b(n);
    bg[n] = Generator::plain("b" + std::to_string(n), r, deg_b(n) - r);
    fam.generators.push_back(*bg[n]);
  }
  fam.b.resize(static_cast<std::size_t>(N + 1));
  for (int n = 0; n <= N; ++n) fam.b[n] = bg[n] ? Element::of(*bg[n]) : Element();
  if (which == FamilyCase::II) fam.b[1] = -cup1(fam.b[0], fam.b[0]);

  const int first_witness = which == FamilyCase::II ? 2 : 1;
  for (int n = first_witness; n <= N; ++n) {
    int r = res_b(n) - 1;
    fg[n] = Generator::plain("f" + std::to_string(n), r, deg_b(n) - 1 - r);
    fam.generators.push_back(*fg[n]);
  }
  fam.witness.resize(static_cast<std::size_t>(N + 1));
  for (int n = 0; n <= N; ++n) fam.witness[n] = fg[n] ? Element::of(*fg[n]) : Element();

  auto B = [&](int i) { return i >= 0 && i <= N ? fam.b[i] : Element(); };
  auto F = [&](int i) { return i >= 0 && i <= N ? fam.witness[i] : Element(); };
  auto commutator = [](const Element& f, const Element& b) { return multiply(f, b) - multiply(b, f); };
  auto alt = [](int i) { return i % 2 ? -1 : 1; };

  // Shared shape: -(-1)^n((n+1) b_n + b_0 ~1 b_{n-1}) + sum (-1)^i (f_j b_i - b_i f_j).
  auto witness_core = [&](int n) {
    Element e = (-alt(n)) * (Integer(n + 1) * B(n) + cup1(B(0), B(n - 1)));
    for (int i = 0; i < n; ++i) e += alt(i) * commutator(F(n - 1 - i), B(i));
    return e;
  };

  if (which == FamilyCase::I) {
    d.set_image(*bg[0], {});
    for (int n = 1; n <= N; ++n) {
      Element e;
      for (int i = 0; i < n; ++i) e += multiply(B(i), B(n - 1 - i));
      d.set_image(*bg[n], e);
    }
    for (int n = 1; n <= N; ++n) d.set_image(*fg[n], witness_core(n));
  } else if (which == FamilyCase::II) {
    d.set_image(*bg[0], {});
    for (int n = 2; n <= N; ++n) {
      Element e;
      if (n % 2 == 0) {
        for (int i = 0; i < n; ++i) e += multiply(B(i), B(n - 1 - i));
      } else {
        int k = n / 2;
        for (int i = 0; i <= k; ++i) {
          int j = k - i;
          e += 2 * multiply(B(2 * i), B(2 * j));
          e += multiply(B(2 * i - 1), B(2 * j + 1));
        }
      }
      d.set_image(*bg[n], e);
    }
    for (int n = 2; n <= N; ++n) {
      Element e;
      if (n % 2 == 0) {
        int k = n / 2;
        e = Integer(-(n + 1)) * B(n) - cup1(B(0), B(n - 1));
        for (int i = 0; i <= k; ++i) {
          int j = k - i;
          e += 2 * commutator(F(2 * j - 1), B(2 * i));
          e -= commutator(F(2 * j), B(2 * i - 1));
        }
      } else {
        int k = n / 2;
        e = Integer(k + 1) * B(n) + cup1(B(0), B(n - 1));
        for (int i = 0; i < n; ++i) e += alt(i) * commutator(F(n - 1 - i), B(i));
      }
      d.set_image(*fg[n], e);
    }
  } else {
    Generator c = Generator::plain("c", 0, m + 1);
    fam.generators.push_back(c);
    d.set_image(c, {});
    d.set_image(*bg[0], mu * Element::of(c));
    for (int k = 0; k <= N; ++k) fam.omega.push_back(ipow(mu, static_cast<unsigned long>(k)) * cup2_power(c, k + 1));
    // W_p = c U2 ... U2 c U2 b_0 (p copies of c). b_0 is no cocycle, so the
    // unshuffle sum is corrected by the term coming from db_0 = mu c.
    std::map<int, Generator> W;
    for (int p = 1; p <= N + 1; ++p) {
      std::vector<Generator> factors(static_cast<std::size_t>(p), c);
      factors.push_back(*bg[0]);
      Generator wp = Generator::cup2(factors);
      W.emplace(p, wp);
      fam.generators.push_back(wp);
      d.set_image(wp, cup2_unshuffle_sum(factors) + Integer(p + 1) * mu * cup2_power(c, p + 1));
    }
    auto omega_u2_b0 = [&](int i) { return ipow(mu, static_cast<unsigned long>(i)) * Element::of(W.at(i + 1)); };
    fam.c.assign(static_cast<std::size_t>(N + 1), Element());
    for (int n = 1; n <= N; ++n) {
      Element e = -cup1(fam.omega[0], B(n - 1));
      for (int i = 1; i < n; ++i) e -= alt(i) * cup1(fam.omega[i], B(n - 1 - i));
      e += alt(n) * fam.omega[n];
      fam.c[n] = e;
      Element db;
      for (int i = 0; i < n; ++i) db += multiply(B(i), B(n - 1 - i));
      d.set_image(*bg[n], db + mu * e);
    }
    fam.a.assign(static_cast<std::size_t>(N + 1), Element());
    for (int n = 2; n <= N; ++n) {
      Element e;
      for (int i = 0; i + 2 <= n; ++i) {
        int j = n - 2 - i;
        e += alt(j) * cup1(omega_u2_b0(i), B(j));
        e += cup1(fam.omega[i], F(j + 1));
      }
      e += omega_u2_b0(n - 1);
      fam.a[n] = e;
    }
    d.set_image(*fg[1], 2 * B(1) + cup1(B(0), B(0)) + mu * omega_u2_b0(0));
    for (int n = 2; n <= N; ++n) d.set_image(*fg[n], witness_core(n) + mu * fam.a[n]);
  }
  std::stable_sort(fam.generators.begin(), fam.generators.end(), by_degree);
  fam.d = with_hga_rules(std::move(d));
  return fam;
}

std::vector<CheckLine> verify_family(const SequenceFamily& fam) {
  std::vector<CheckLine> out;
  const int m = fam.params.base_degree;
  auto dd = [&](const Element& e) { return apply_derivation(fam.d, apply_derivation(fam.d, e)); };
  for (int n = 0; n <= fam.length; ++n) {
    CheckLine l{"degree of b" + std::to_string(n), true, ""};
    auto deg = fam.b[n].degree();
    l.ok = deg && *deg == (n + 1) * m - n;
    if (!l.ok) l.detail = "expected " + std::to_string((n + 1) * m - n);
    out.push_back(l);
  }
  for (int n = 0; n <= fam.length; ++n) {
    Element r = dd(fam.b[n]);
    out.push_back({"d^2 b" + std::to_string(n) + " = 0", r.is_zero(), r.is_zero() ? "" : r.to_string()});
  }
  if (fam.which == FamilyCase::II) {
    Element lhs = apply_derivation(fam.d, fam.b[1]);
    Element rhs = 2 * multiply(fam.b[0], fam.b[0]);
    out.push_back({"d b1 = 2 b0 b0", lhs == rhs, lhs == rhs ? "" : lhs.to_string()});
  }
  for (int n = 0; n <= fam.length; ++n) {
    if (fam.witness[n].is_zero()) continue;
    Element r = dd(fam.witness[n]);
    out.push_back({"d^2 f" + std::to_string(n) + " = 0", r.is_zero(), r.is_zero() ? "" : r.to_string()});
  }
  if (fam.which == FamilyCase::III) {
    const Integer mu = fam.params.mu;
    const Generator c = fam.omega[0].terms().begin()->first[0];
    for (int k = 0; k <= fam.length; ++k) {
      Element expect = ipow(mu, static_cast<unsigned long>(k)) * cup2_element(std::vector<Generator>(k + 1, c));
      out.push_back({"omega" + std::to_string(k) + " = mu^k omega0^{U2(k+1)}", fam.omega[k] == expect, ""});
      Element lhs = apply_derivation(fam.d, fam.omega[k]);
      Element rhs;
      for (int i = 0; i < k; ++i) rhs += mu * cup1(fam.omega[i], fam.omega[k - 1 - i]);
      out.push_back({"d omega" + std::to_string(k) + " = sum mu omega_i ~1 omega_j", lhs == rhs,
                     lhs == rhs ? "" : (lhs - rhs).to_string()});
    }
    for (int n = 1; n <= fam.length; ++n) {
      Element r = dd(fam.c[n]);
      out.push_back({"d^2 c" + std::to_string(n) + " = 0", r.is_zero(), r.is_zero() ? "" : r.to_string()});
    }
  }
  return out;
}

FilteredModelFragment sequence_fragment(const SequenceFamily& fam, const CoefficientRing& ring, int truncation) {
  std::vector<Generator> seeds;
  for (const auto& g : fam.generators)
    if (g.degree() <= truncation) seeds.push_back(g);
  std::string name = fam.which == FamilyCase::I ? "family-I" : fam.which == FamilyCase::II ? "family-II" : "family-III";
  return close_fragment(name, ring, seeds, fam.d, truncation);
}

// ---------------------------------------------------------------- lambda-homology

namespace {

// Linear parts of d_h on the generators one degree below x, as a matrix
// whose rows are indexed by the generators that occur.
struct LinearSystem {
  std::vector<Generator> cols;
  std::vector<Generator> rows;
  IntMatrix L;
  std::vector<Integer> target;
};

LinearSystem linear_system(const Element& x, const FilteredModelFragment& f) {
  auto deg = x.degree();
  if (!deg) throw std::invalid_argument("x must be a nonzero homogeneous element");
  if (*deg >= f.truncation) throw DegreeOutOfRange("degree " + std::to_string(*deg) + " is not below the truncation " +
                                                   std::to_string(f.truncation));
  LinearSystem s;
  s.cols = f.in_degree(*deg - 1);
  std::map<Generator, std::size_t> index;
  auto row_of = [&](const Generator& g) {
    auto [it, fresh] = index.emplace(g, s.rows.size());
    if (fresh) s.rows.push_back(g);
    return it->second;
  };
  for (const Element img = x.linear_part(); const auto& [w, c] : img.terms()) row_of(w[0]);
  std::vector<Element> images;
  for (const auto& u : s.cols) {
    images.push_back(f.dh.image(u).linear_part());
    for (const auto img = images.back(); const auto& [w, c] : img.terms()) row_of(w[0]);
  }
  s.L = IntMatrix(s.rows.size(), s.cols.size());
  for (std::size_t j = 0; j < s.cols.size(); ++j)
    for (const auto& [w, c] : images[j].terms()) s.L(index[w[0]], j) = c;
  s.target.assign(s.rows.size(), 0);
  for (const Element img = x.linear_part(); const auto& [w, c] : img.terms()) s.target[index[w[0]]] = c;
  return s;
}

// Integer u with L u = t mod lambda (lambda = 0: exactly).
std::optional<std::vector<Integer>> solve_mod(const IntMatrix& L, const std::vector<Integer>& t, const Integer& lambda) {
  if (lambda == 0) return solve_integral(L, t);
  IntMatrix A(L.rows(), L.cols() + L.rows());
  for (std::size_t i = 0; i < L.rows(); ++i) {
    for (std::size_t j = 0; j < L.cols(); ++j) A(i, j) = L(i, j);
    A(i, L.cols() + i) = lambda;
  }
  auto sol = solve_integral(A, t);
  if (!sol) return std::nullopt;
  sol->resize(L.cols());
  return sol;
}

Element combination(const std::vector<Generator>& gens, const std::vector<Integer>& coeffs) {
  Element e;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (coeffs[i] != 0) e.add_term(Word{gens[i]}, coeffs[i]);
  return e;
}

// Fills u, z and v once the integral coefficient vector of u is known.
LambdaVerdict witness(const Element& x, const FilteredModelFragment& f, const LinearSystem& s,
                      const std::vector<Integer>& ucoef, const Integer& lambda, const Integer& denominator) {
  LambdaVerdict v;
  v.truncation = f.truncation;
  v.denominator = denominator;
  v.u = combination(s.cols, ucoef);
  Element du = apply_derivation(f.dh, v.u);
  Element rest = (du - denominator * x).linear_part();
  if (!rest.is_zero()) {
    if (lambda == 0) throw std::logic_error("lambda-homology witness does not close");
    Element vv;
    for (const auto& [w, c] : rest.terms()) {
      if (c % lambda != 0) throw std::logic_error("lambda-homology witness is not divisible by lambda");
      vv.add_term(w, c / lambda);
    }
    v.v = vv;
  }
  v.z = du - denominator * x - lambda * v.v;
  v.kind = v.v.is_zero() ? LambdaKind::WeaklyZero : LambdaKind::Zero;
  return v;
}

LambdaVerdict rational_verdict(const Element& x, const FilteredModelFragment& f, const LinearSystem& s) {
  LambdaVerdict out;
  out.truncation = f.truncation;
  auto sol = solve_rational(s.L, s.target);
  if (!sol) return out;
  Integer den = 1;
  for (const auto& q : *sol) den = lcm(den, Integer(q.get_den()));
  std::vector<Integer> coef;
  for (const auto& q : *sol) coef.push_back(Integer(q * den));
  return witness(x, f, s, coef, 0, den);
}

}  // namespace

LambdaVerdict lambda_homologous(const Element& x, const FilteredModelFragment& f, const Integer& lambda) {
  if (lambda == 1 || lambda == -1) throw std::invalid_argument("lambda must not be a unit");
  LinearSystem s = linear_system(x, f);
  if (f.ring.kind() == CoefficientRing::Kind::Rationals) {
    LambdaVerdict v = rational_verdict(x, f, s);
    if (v.kind == LambdaKind::WeaklyZero) v.kind = LambdaKind::Zero;
    return v;
  }
  if (auto exact = solve_integral(s.L, s.target)) {
    LambdaVerdict v = witness(x, f, s, *exact, lambda, 1);
    v.kind = LambdaKind::Zero;
    return v;
  }
  if (lambda != 0)
    if (auto sol = solve_mod(s.L, s.target, lambda)) {
      LambdaVerdict v = witness(x, f, s, *sol, lambda, 1);
      v.kind = LambdaKind::Zero;
      return v;
    }
  LambdaVerdict none;
  none.truncation = f.truncation;
  return none;
}

LambdaVerdict lambda_homologous(const Generator& x, const FilteredModelFragment& f, const Integer& lambda) {
  if (x.degree() >= f.truncation)
    throw DegreeOutOfRange("degree " + std::to_string(x.degree()) + " is not below the truncation " +
                           std::to_string(f.truncation));
  if (!in_decomposables_plus(f.dh.image(x), lambda))
    throw std::invalid_argument("d_h " + x.name() + " is not in D + lambda V");
  return lambda_homologous(Element::of(x), f, lambda);
}

LambdaVerdict weakly_homologous(const Element& x, const FilteredModelFragment& f) {
  LinearSystem s = linear_system(x, f);
  if (f.ring.kind() == CoefficientRing::Kind::Rationals) return rational_verdict(x, f, s);
  if (auto exact = solve_integral(s.L, s.target)) return witness(x, f, s, *exact, 0, 1);
  LambdaVerdict none;
  none.truncation = f.truncation;
  return none;
}

SummandVerdict summand_criterion(const Generator& c, const FilteredModelFragment& f) {
  SummandVerdict out;
  const Integer mu = f.ring.mu();
  Element dc = f.dh.image(c);
  if (!in_decomposables_plus(dc, mu)) {
    out.detail = "d_h " + c.name() + " is not in D_k";
    return out;
  }
  auto is_unit = [&](const Integer& k) {
    if (f.ring.kind() == CoefficientRing::Kind::Integers) return abs(k) == 1;
    if (f.ring.kind() == CoefficientRing::Kind::Rationals) return k != 0;
    return gcd(k, mu) == 1;
  };
  auto weakly_nonzero = [&](const Generator& g) {
    if (g.degree() >= f.truncation) return false;
    return weakly_homologous(Element::of(g), f).kind == LambdaKind::NotZero;
  };
  for (const auto& [w, k] : dc.terms()) {
    if (w.size() != 2 || !is_unit(k)) continue;
    const Generator& a = w[0];
    const Generator& b = w[1];
    if (!in_decomposables_plus(f.dh.image(a), mu) || !in_decomposables_plus(f.dh.image(b), mu)) continue;
    if (!weakly_nonzero(a) || !weakly_nonzero(b)) continue;
    out.a = a;
    out.b = b;
    LambdaVerdict vc = weakly_homologous(Element::of(c), f);
    if (vc.kind == LambdaKind::NotZero) {
      out.kind = SummandKind::Satisfied;
      out.detail = c.name() + " is not weakly homologous to zero below degree " + std::to_string(f.truncation);
    } else {
      out.kind = SummandKind::Contradiction;
      out.detail = c.name() + " is weakly homologous to zero via " + vc.u.to_string();
    }
    return out;
  }
  out.detail = "no summand ab with a, b not weakly homologous to zero";
  return out;
}

// ---------------------------------------------------------------- f.i.s.

FISRecord fis_start(const Generator& x) {
  if (x.degree() % 2 == 0) throw std::invalid_argument("f.i.s. needs an odd generator");
  FISRecord r{x, {Element::of(x)}, {Element::of(x)}, {PowerCase{}}};
  return r;
}

FISRecord fis_extend(const FISRecord& rec, const FilteredModelFragment& f, const HgaOptions& opts) {
  if (rec.members.empty()) return fis_start(rec.x);
  const Generator& x = rec.x;
  const Integer mu = f.ring.mu();
  if (!in_decomposables_plus(f.dh.image(x), mu)) throw std::invalid_argument("d_h x is not in D_k");
  if (mu != 0) {
    if (weakly_homologous(Element::of(x, mu), f).kind != LambdaKind::NotZero)
      throw Obstructed("the fragment contains d_h u = mu " + x.name() + " mod decomposables");
    if (lambda_homologous(Element::of(x), f, mu).kind != LambdaKind::NotZero)
      throw std::invalid_argument(x.name() + " is homologous to zero at mu");
  }

  FISRecord out = rec;
  BoldCup1 bc = bold_cup1(x, rec.powers.back(), f.dh, mu, opts);
  Element p = bc.result;
  if (!p.decomposable_part().is_zero()) throw UnsupportedShape("power x^{(n+1)} has decomposable terms");
  out.powers.push_back(p);

  LinearSystem s = linear_system(p, f);
  LambdaVerdict v = lambda_homologous(p, f, mu);
  if (v.kind == LambdaKind::NotZero) {
    out.members.push_back(p);
    out.certificates.push_back(PowerCase{});
    return out;
  }
  if (v.v.is_zero() || mu == 0) throw UnsupportedShape("power x^{(n+1)} is weakly homologous to zero");

  Integer mu_prime = mu;
  for (const auto& q : prime_factors(mu))
    for (int guard = 0; guard < 64 && solve_mod(s.L, s.target, mu_prime * q); ++guard) mu_prime *= q;
  auto sol = solve_mod(s.L, s.target, mu_prime);
  LambdaVerdict w = witness(p, f, s, *sol, mu_prime, 1);
  if (w.v.is_zero()) throw UnsupportedShape("power x^{(n+1)} is weakly homologous to zero");
  RelationCase rc{w.u, w.z, mu_prime};
  out.members.push_back(w.v);
  out.certificates.push_back(rc);
  return out;
}

// ---------------------------------------------------------------- perturbation

PerturbationReport perturbation_check(const FilteredModelFragment& f) {
  // d_h = sum of components of pure resolution shift r, so the shift-r part
  // of d_h^2 is exactly sum_{p+q=r} D_p D_q.
  PerturbationReport rep;
  auto shift = [](const Generator& g, const Word& w) { return res_degree(w) - g.res_degree(); };
  auto identity_name = [](int r) -> std::string {
    if (r == 2) return "d^2 = 0";
    if (r == 3) return "d h^2 + h^2 d = 0";
    if (r == 4) return "d h^3 + h^3 d = -h^2 h^2";
    return "sum over p+q=" + std::to_string(r) + " of h^p h^q = 0";
  };

  CheckLine shifts{"components have resolution shift >= 1", true, ""};
  CheckLine tr{"h^tr = 0 on E-symbols", true, ""};
  std::map<int, CheckLine> identities;
  for (int r = 2; r <= 4; ++r) identities[r] = {identity_name(r), true, ""};
  std::vector<CheckLine> missing;

  for (const auto& g : f.gens) {
    Element img, dd;
    try {
      img = f.dh.image(g);
      dd = apply_derivation(f.dh, img);
    } catch (const MissingImage& e) {
      missing.push_back({"image of " + g.name(), false, e.what()});
      continue;
    }
    ++rep.generators_checked;
    for (const auto& [w, c] : img.terms()) {
      int r = shift(g, w);
      rep.max_shift = std::max(rep.max_shift, r);
      if (r < 1 && shifts.ok) {
        shifts.ok = false;
        shifts.detail = g.name() + " -> " + to_string(w) + " has shift " + std::to_string(r);
      }
      if (g.kind() == GeneratorKind::ESymbol && r >= 2 && r == -g.res_degree() && tr.ok) {
        tr.ok = false;
        tr.detail = g.name() + " -> " + to_string(w);
      }
    }
    std::map<int, Element> parts;
    for (const auto& [w, c] : dd.terms()) parts[shift(g, w)].add_term(w, c);
    for (const auto& [r, part] : parts) {
      auto [it, fresh] = identities.try_emplace(r, CheckLine{identity_name(r), true, ""});
      if (it->second.ok) {
        it->second.ok = false;
        it->second.detail = g.name() + ": " + part.to_string();
      }
    }
  }
  rep.lines.push_back(shifts);
  for (int r = 5; r <= 2 * rep.max_shift; ++r) identities.try_emplace(r, CheckLine{identity_name(r), true, ""});
  for (auto& [r, line] : identities) rep.lines.push_back(line);
  rep.lines.push_back(tr);
  rep.lines.insert(rep.lines.end(), missing.begin(), missing.end());
  for (const auto& l : rep.lines) rep.ok = rep.ok && l.ok;
  return rep;
}

}  // namespace loopbetti
