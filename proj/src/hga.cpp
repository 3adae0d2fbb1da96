#include "loopbetti/hga.hpp"

#include "loopbetti/signs.hpp"

#include <algorithm>
#include <set>

namespace loopbetti {

using signs::sign;

namespace {

std::vector<int> word_degrees(const std::vector<Word>& ws) {
  std::vector<int> d;
  d.reserve(ws.size());
  for (const auto& w : ws) d.push_back(degree(w));
  return d;
}

Element e_words(const std::vector<Word>& ws, const Word& rw, const HgaOptions& opts);

// Associativity: E_{k,1}(a; E_{l,1}(b_1..b_l; c)) is the signed sum of
// E_{p,1}(X_1..X_p; c) where the X run through a in order, each X being a
// single a_i or E_{q,1}(a_{i+1}..a_{i+q}; b_j), every b_j used once in order.
void nested_terms(const std::vector<Word>& ws, const std::vector<Word>& bs, const Generator& c, std::size_t i,
                  std::size_t j, std::vector<Element>& xs, long exponent, Element& out, const HgaOptions& opts) {
  if (i == ws.size() && j == bs.size()) {
    out += sign(exponent) * e_op(xs, Element::of(c), opts);
    return;
  }
  if (i < ws.size()) {
    xs.push_back(Element::of(ws[i]));
    nested_terms(ws, bs, c, i + 1, j, xs, exponent, out, opts);
    xs.pop_back();
  }
  if (j < bs.size()) {
    const auto degs = word_degrees(ws);
    for (std::size_t q = 0; i + q <= ws.size(); ++q) {
      std::vector<Word> block(ws.begin() + static_cast<long>(i), ws.begin() + static_cast<long>(i + q));
      Element x = e_words(block, bs[j], opts);
      if (x.is_zero()) continue;
      xs.push_back(std::move(x));
      long e = exponent + signs::nested_block(degs, degree(bs[j]), i + q);
      nested_terms(ws, bs, c, i + q, j + 1, xs, e, out, opts);
      xs.pop_back();
    }
  }
}

Element e_gen(const std::vector<Word>& ws, const Generator& g, const HgaOptions& opts) {
  if (ws.empty()) return Element::of(g);
  if (opts.associativity_rewrite && g.kind() == GeneratorKind::ESymbol) {
    Element r;
    std::vector<Element> xs;
    nested_terms(ws, g.e_args(), g.e_right(), 0, 0, xs, 0, r, opts);
    return r;
  }
  if (static_cast<int>(ws.size()) > opts.k_max)
    throw MissingEOp("E_{" + std::to_string(ws.size()) + ",1} exceeds k_max = " + std::to_string(opts.k_max));
  return Element::of(Generator::e_symbol(ws, g));
}

Element e_words(const std::vector<Word>& ws, const Word& rw, const HgaOptions& opts) {
  if (rw.empty()) return ws.empty() ? Element::unit() : Element();
  if (ws.empty()) return Element::of(rw);
  if (rw.size() == 1) return e_gen(ws, rw[0], opts);
  const Word b{rw[0]};
  const Word c(rw.begin() + 1, rw.end());
  const auto degs = word_degrees(ws);
  Element r;
  for (std::size_t i = 0; i <= ws.size(); ++i) {
    std::vector<Word> head(ws.begin(), ws.begin() + static_cast<long>(i));
    std::vector<Word> tail(ws.begin() + static_cast<long>(i), ws.end());
    Element left = e_words(head, b, opts);
    if (left.is_zero()) continue;
    Element right = e_words(tail, c, opts);
    if (right.is_zero()) continue;
    r += sign(signs::product_split(degs, degree(b), i)) * multiply(left, right);
  }
  return r;
}

int homogeneous_degree(const Element& e, const char* what) {
  auto d = e.degree();
  if (!d) throw std::invalid_argument(std::string(what) + " must be homogeneous and nonzero");
  return *d;
}

}  // namespace

Element e_op(const std::vector<Element>& lefts, const Element& right, const HgaOptions& opts) {
  Element res;
  if (lefts.empty()) return right;
  for (const auto& l : lefts)
    if (l.is_zero()) return res;
  std::vector<Element::Terms::const_iterator> it;
  for (const auto& l : lefts) it.push_back(l.terms().begin());
  for (;;) {
    std::vector<Word> ws;
    Integer coef = 1;
    bool unit_arg = false;
    for (std::size_t i = 0; i < lefts.size(); ++i) {
      if (it[i]->first.empty()) unit_arg = true;
      ws.push_back(it[i]->first);
      coef *= it[i]->second;
    }
    if (!unit_arg) {
      for (const auto& [rw, rc] : right.terms()) {
        Element t = e_words(ws, rw, opts);
        t *= coef * rc;
        res += t;
      }
    }
    std::size_t i = 0;
    for (; i < lefts.size(); ++i) {
      if (++it[i] != lefts[i].terms().end()) break;
      it[i] = lefts[i].terms().begin();
    }
    if (i == lefts.size()) break;
  }
  return res;
}

Element e_op(const ESymbol& sym, const HgaOptions& opts) { return e_op(sym.args_left, sym.arg_right, opts); }

Element cup1(const Element& a, const Element& b, const HgaOptions& opts) { return e_op({a}, b, opts); }

Element e_differential(const ESymbol& sym, const DerivationSpec& d, const HgaOptions& opts) {
  const auto& a = sym.args_left;
  const Element& b = sym.arg_right;
  const std::size_t k = a.size();
  if (k == 0) throw std::invalid_argument("e_differential: arity must be at least 1");
  for (const auto& x : a)
    if (x.is_zero()) return {};
  if (b.is_zero()) return {};
  std::vector<int> degs;
  for (const auto& x : a) degs.push_back(homogeneous_degree(x, "E argument"));
  const int bdeg = homogeneous_degree(b, "E argument");

  Element r;
  for (std::size_t i = 1; i <= k; ++i) {
    auto args = a;
    args[i - 1] = apply_derivation(d, a[i - 1]);
    r += sign(signs::internal_term(degs, i)) * e_op(args, b, opts);
  }
  r += sign(signs::right_internal_term(degs)) * e_op(a, apply_derivation(d, b), opts);
  for (std::size_t i = 1; i < k; ++i) {
    std::vector<Element> args(a.begin(), a.begin() + static_cast<long>(i) - 1);
    args.push_back(multiply(a[i - 1], a[i]));
    args.insert(args.end(), a.begin() + static_cast<long>(i) + 1, a.end());
    r += sign(signs::contraction_term(degs, i)) * e_op(args, b, opts);
  }
  std::vector<Element> init(a.begin(), a.end() - 1);
  r += sign(signs::right_extremal_term(degs, bdeg)) * multiply(e_op(init, b, opts), a.back());
  std::vector<Element> rest(a.begin() + 1, a.end());
  Integer s = sign(signs::left_extremal_term(degs));
  if (opts.corrupt_extremal_sign) s = -s;
  r += s * multiply(a.front(), e_op(rest, b, opts));
  return r;
}

Element e_differential(const Generator& sym, const DerivationSpec& d, const HgaOptions& opts) {
  if (sym.kind() != GeneratorKind::ESymbol)
    throw std::invalid_argument("e_differential: " + sym.name() + " is not an E-symbol");
  ESymbol s;
  for (const auto& w : sym.e_args()) s.args_left.push_back(Element::of(w));
  s.arg_right = Element::of(sym.e_right());
  return e_differential(s, d, opts);
}

Element e_product_expand(const std::vector<Element>& lefts, const Element& b, const Element& c,
                         const HgaOptions& opts) {
  if (lefts.empty()) return multiply(b, c);
  std::vector<int> degs;
  for (const auto& x : lefts) {
    if (x.is_zero()) return {};
    degs.push_back(homogeneous_degree(x, "E argument"));
  }
  if (b.is_zero() || c.is_zero()) return {};
  const int bdeg = homogeneous_degree(b, "E argument");
  Element r;
  for (std::size_t i = 0; i <= lefts.size(); ++i) {
    std::vector<Element> head(lefts.begin(), lefts.begin() + static_cast<long>(i));
    std::vector<Element> tail(lefts.begin() + static_cast<long>(i), lefts.end());
    r += sign(signs::product_split(degs, bdeg, i)) * multiply(e_op(head, b, opts), e_op(tail, c, opts));
  }
  return r;
}

Element cup2_element(const std::vector<Generator>& factors) {
  if (factors.empty()) throw std::invalid_argument("cup2_element: no factors");
  if (factors.size() == 1) return Element::of(factors.front());
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (std::size_t j = i + 1; j < factors.size(); ++j)
      if (factors[i] == factors[j] && factors[i].degree() % 2 != 0) return {};
  return Element::of(Generator::cup2(factors));
}

Element cup2_power(const Generator& a, int n) {
  if (n < 1) throw std::invalid_argument("cup2_power: exponent must be positive");
  return cup2_element(std::vector<Generator>(static_cast<std::size_t>(n), a));
}

Element cup2_unshuffle_sum(const std::vector<Generator>& factors, const HgaOptions& opts) {
  std::set<Generator> odd;
  for (const auto& f : factors)
    if (f.degree() % 2 != 0) odd.insert(f);
  if (odd.size() >= 2)
    throw UnsupportedParity("cup-2 differential with two distinct odd factors is not supported");
  const std::size_t n = factors.size();
  Element r;
  std::set<std::pair<std::vector<Generator>, std::vector<Generator>>> seen;
  for (std::size_t size = 1; size < n; ++size) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
    // walk subsets of the given size in lexicographic order of positions
    do {
      std::vector<Generator> first, second;
      std::vector<int> first_degrees;
      for (std::size_t i = 0; i < n; ++i) {
        if (pick[i]) {
          first.push_back(factors[i]);
          first_degrees.push_back(factors[i].degree());
        } else {
          second.push_back(factors[i]);
        }
      }
      if (!seen.insert({first, second}).second) continue;
      r += sign(signs::unshuffle(first_degrees)) * e_op({cup2_element(first)}, cup2_element(second), opts);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return r;
}

Element cup2_power_diff(const Generator& power, const DerivationSpec& d, const HgaOptions& opts) {
  if (power.kind() != GeneratorKind::Cup2Power)
    throw std::invalid_argument("cup2_power_diff: " + power.name() + " is not a cup-2 product");
  for (const auto& f : power.factors())
    if (!d.image(f).is_zero()) throw NonCocycleBase("cup-2 factor " + f.name() + " is not a cocycle");
  return cup2_unshuffle_sum(power.factors(), opts);
}

bool in_decomposables_plus(const Element& e, const Integer& lambda) {
  for (const auto& [w, c] : e.terms()) {
    if (w.size() != 1) continue;
    if (lambda == 0) return false;
    if (!mpz_divisible_p(c.get_mpz_t(), lambda.get_mpz_t())) return false;
  }
  return true;
}

BoldCup1 bold_cup1(const Generator& x, const Element& c, const DerivationSpec& d, const Integer& lambda,
                   const HgaOptions& opts) {
  const Element dx = d.image(x);
  if (!in_decomposables_plus(dx, lambda))
    throw UnsupportedShape("d" + x.name() + " is not in D + lambda V");
  BoldCup1 out;
  const Element dec = dx.decomposable_part();
  for (const auto& [w, coef] : dec.terms()) {
    if (w.size() != 2) throw UnsupportedShape("d" + x.name() + " has a summand of length " + std::to_string(w.size()));
    for (const auto& g : w) {
      Element dg = d.image(g);
      if (!dg.decomposable_part().is_zero() || !in_decomposables_plus(dg, lambda))
        throw UnsupportedShape("factor " + g.name() + " of d" + x.name() + " has d not in lambda V");
    }
    out.eta += coef * sign(signs::eta_term(w[0].degree())) *
               e_op({Element::of(w[0]), Element::of(w[1])}, c, opts);
  }
  out.result = out.eta + cup1(Element::of(x), c, opts);
  out.verified = in_decomposables_plus(apply_derivation(d, out.result), lambda);
  return out;
}

DerivationSpec with_hga_rules(DerivationSpec d, const HgaOptions& opts) {
  d.set_symbol_rule([opts](const Generator& g, const DerivationSpec& self) -> std::optional<Element> {
    switch (g.kind()) {
      case GeneratorKind::ESymbol: return e_differential(g, self, opts);
      case GeneratorKind::Cup2Power: return cup2_power_diff(g, self, opts);
      case GeneratorKind::Plain: return std::nullopt;
    }
    return std::nullopt;
  });
  return d;
}

FragmentReport verify_hga_fragment(std::span<const Generator> gens, const DerivationSpec& d, int up_to_degree) {
  FragmentReport rep;
  for (const auto& g : gens) {
    if (g.kind() == GeneratorKind::Plain || g.degree() > up_to_degree) continue;
    ++rep.checked;
    Element dd = apply_derivation(d, d.image(g));
    if (!dd.is_zero()) {
      rep.ok = false;
      rep.failing = g;
      rep.residue = std::move(dd);
      return rep;
    }
  }
  return rep;
}

std::vector<Generator> free_hga_symbols(const std::vector<Generator>& base, int max_degree, int nesting,
                                        const HgaOptions& opts) {
  std::set<Generator> symbols;
  std::vector<Generator> letters = base;
  for (int level = 1; level <= nesting; ++level) {
    std::vector<Generator> found;
    // words over the current letters, bucketed by degree
    std::vector<std::vector<Word>> words(static_cast<std::size_t>(std::max(max_degree, 0)) + 2);
    for (int deg = 2; deg <= max_degree + opts.k_max; ++deg) {
      if (static_cast<std::size_t>(deg) >= words.size()) words.resize(static_cast<std::size_t>(deg) + 1);
      words[static_cast<std::size_t>(deg)] = basis_words(deg, letters);
    }
    for (const auto& g : letters) {
      // right-nested symbols are rewritten away
      if (g.kind() == GeneratorKind::ESymbol && opts.associativity_rewrite) continue;
      for (int k = 1; k <= opts.k_max; ++k) {
        // left argument degrees sum to at most max_degree - |g| + k
        const int budget = max_degree - g.degree() + k;
        std::vector<Word> args;
        std::function<void(int)> rec = [&](int left) {
          if (static_cast<int>(args.size()) == k) {
            found.push_back(Generator::e_symbol(args, g));
            return;
          }
          for (int deg = 2; deg <= left; ++deg) {
            for (const auto& w : words[static_cast<std::size_t>(deg)]) {
              args.push_back(w);
              rec(left - deg);
              args.pop_back();
            }
          }
        };
        rec(budget);
      }
    }
    for (const auto& s : found)
      if (symbols.insert(s).second) letters.push_back(s);
  }
  std::vector<Generator> out(symbols.begin(), symbols.end());
  // cup-2 products of base generators: powers of even ones, and distinct
  // subsets containing at most one odd generator
  for (const auto& a : base) {
    if (a.degree() % 2 != 0) continue;
    for (int n = 2; n <= 5; ++n) {
      Element p = cup2_power(a, n);
      if (p.is_zero()) break;
      const Generator g = p.terms().begin()->first.front();
      if (g.degree() > max_degree) break;
      out.push_back(g);
    }
  }
  const std::size_t nb = base.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << nb); ++mask) {
    std::vector<Generator> f;
    int odd = 0, deg = 0;
    for (std::size_t i = 0; i < nb; ++i)
      if (mask & (std::size_t{1} << i)) {
        f.push_back(base[i]);
        odd += base[i].degree() % 2;
        deg += base[i].degree();
      }
    if (f.size() < 2 || odd > 1) continue;
    if (deg - 2 * static_cast<int>(f.size() - 1) > max_degree) continue;
    out.push_back(Generator::cup2(f));
  }
  std::sort(out.begin(), out.end(), [](const Generator& a, const Generator& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a < b;
  });
  return out;
}

}  // namespace loopbetti
