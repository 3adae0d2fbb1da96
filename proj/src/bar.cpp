#include "loopbetti/bar.hpp"

#include "loopbetti/signs.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace loopbetti {

using signs::sign;

int bar_degree(const BarWord& w) {
  int d = 0;
  for (const auto& l : w) d += degree(l) - 1;
  return d;
}

std::string to_string(const BarWord& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "|" : "") + to_string(w[i]);
  return s + "]";
}

bool BarWordLess::operator()(const BarWord& a, const BarWord& b) const {
  if (a.size() != b.size()) return a.size() < b.size();
  WordLess less;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (less(a[i], b[i])) return true;
    if (less(b[i], a[i])) return false;
  }
  return false;
}

BarElement BarElement::of(const BarWord& w, const Integer& c) {
  BarElement e;
  e.add_term(w, c);
  return e;
}

void BarElement::add_term(const BarWord& w, const Integer& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

BarElement& BarElement::operator+=(const BarElement& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

BarElement& BarElement::operator*=(const Integer& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, v] : terms_) v *= c;
  return *this;
}

std::string BarElement::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) out << (c < 0 ? " - " : " + ");
    else if (c < 0) out << "-";
    first = false;
    if (abs(c) != 1) out << abs(c) << "*";
    out << loopbetti::to_string(w);
  }
  return out.str();
}

namespace {

// All bar words of bar degree n, no truncation check.
std::vector<BarWord> enumerate_bar(const DGAPresentation& a, int n) {
  std::vector<std::vector<Word>> letters(static_cast<std::size_t>(std::max(n, 0)) + 1);
  for (int r = 1; r <= n; ++r) letters[static_cast<std::size_t>(r)] = a.basis(r + 1);
  std::vector<BarWord> out;
  BarWord cur;
  std::function<void(int)> rec = [&](int left) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int r = 1; r <= left; ++r)
      for (const auto& l : letters[static_cast<std::size_t>(r)]) {
        cur.push_back(l);
        rec(left - r);
        cur.pop_back();
      }
  };
  rec(n);
  return out;
}

SparseIntMatrix bar_matrix(const DGAPresentation& a, const std::vector<BarWord>& src,
                           const std::vector<BarWord>& dst) {
  std::map<BarWord, std::size_t, BarWordLess> index;
  for (std::size_t i = 0; i < dst.size(); ++i) index.emplace(dst[i], i);
  SparseIntMatrix m(dst.size(), src.size());
  for (std::size_t j = 0; j < src.size(); ++j)
    for (const auto img = bar_differential(src[j], a); const auto& [w, c] : img.terms()) {
      auto it = index.find(w);
      if (it == index.end()) throw std::logic_error("bar differential leaves the basis: " + to_string(w));
      m.add(it->second, j, c);
    }
  return m;
}

}  // namespace

std::vector<BarWord> bar_basis(const DGAPresentation& a, int n) {
  if (n < 0) return {};
  if (n > a.truncation - 1)
    throw TruncationExceeded("bar degree " + std::to_string(n) + " needs truncation >= " + std::to_string(n + 1));
  auto out = enumerate_bar(a, n);
  std::sort(out.begin(), out.end(), BarWordLess{});
  return out;
}

BarElement bar_differential(const BarWord& w, const DGAPresentation& a) {
  BarElement r;
  std::vector<int> degs;
  for (const auto& l : w) degs.push_back(degree(l));
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Integer s_int = sign(signs::bar_epsilon(degs, k));
    for (const auto img = a.differential(w[k]); const auto& [x, c] : img.terms()) {
      if (x.empty()) continue;
      BarWord v = w;
      v[k] = x;
      r.add_term(v, s_int * c);
    }
    if (k + 1 < w.size()) {
      const Integer s_prod = sign(signs::bar_epsilon(degs, k + 1));
      for (const auto img = a.product(w[k], w[k + 1]); const auto& [x, c] : img.terms()) {
        if (x.empty()) continue;
        BarWord v(w.begin(), w.begin() + static_cast<long>(k));
        v.push_back(x);
        v.insert(v.end(), w.begin() + static_cast<long>(k) + 2, w.end());
        r.add_term(v, s_prod * c);
      }
    }
  }
  return r;
}

BarElement bar_differential(const BarElement& e, const DGAPresentation& a) {
  BarElement r;
  for (const auto& [w, c] : e.terms()) r += c * bar_differential(w, a);
  return r;
}

std::vector<HomologySummary> tor_profile(const DGAPresentation& a, int N) {
  if (N > a.truncation - 2) throw TruncationExceeded("Tor to degree " + std::to_string(N) + " needs a larger truncation");
  std::vector<std::vector<BarWord>> basis;
  for (int n = 0; n <= N + 1; ++n) basis.push_back(enumerate_bar(a, n));
  std::vector<SparseIntMatrix> d;
  for (int n = 0; n <= N; ++n) d.push_back(bar_matrix(a, basis[n], basis[n + 1]));
  std::vector<HomologySummary> out;
  for (int n = 0; n <= N; ++n) {
    SparseIntMatrix in = n == 0 ? SparseIntMatrix(1, 0) : d[n - 1];
    out.push_back(homology_at(d[n], in, a.ring));
  }
  return out;
}

namespace {

// One interleaving: a run of a-letters absorbed by b_j (run may be empty),
// or a lone a-letter (j = npos).
struct Token {
  std::size_t first = 0, count = 0;
  std::size_t b = static_cast<std::size_t>(-1);
};

}  // namespace

BarElement bar_product(const BarWord& u, const BarWord& v, const DGAPresentation& a, const HgaOptions& opts) {
  if (a.mult != Multiplication::Free) throw std::invalid_argument("bar_product needs a free algebra with hga operations");
  if (bar_degree(u) + bar_degree(v) > a.truncation - 1)
    throw TruncationExceeded("product leaves the truncated range");
  const std::size_t m = u.size(), n = v.size();
  BarElement out;
  std::vector<Token> toks;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
    if (j == n) {
      std::vector<Token> all = toks;
      for (std::size_t t = i; t < m; ++t) all.push_back({t, 1});
      // Koszul sign: b_j passes every a that follows it in the output.
      long exponent = 0;
      std::vector<std::pair<bool, std::size_t>> order;
      for (const auto& t : all) {
        if (t.b == static_cast<std::size_t>(-1)) {
          order.push_back({false, t.first});
        } else {
          for (std::size_t q = 0; q < t.count; ++q) order.push_back({false, t.first + q});
          order.push_back({true, t.b});
        }
      }
      for (std::size_t x = 0; x < order.size(); ++x) {
        if (!order[x].first) continue;
        for (std::size_t y = x + 1; y < order.size(); ++y)
          if (!order[y].first)
            exponent += signs::bar_transposition(degree(v[order[x].second]), degree(u[order[y].second]));
      }
      BarElement cur = BarElement::of({}, sign(exponent));
      for (const auto& t : all) {
        Element letter;
        if (t.b == static_cast<std::size_t>(-1)) {
          letter = Element::of(u[t.first]);
        } else {
          std::vector<Element> args;
          for (std::size_t q = 0; q < t.count; ++q) args.push_back(Element::of(u[t.first + q]));
          letter = e_op(args, Element::of(v[t.b]), opts);
        }
        BarElement next;
        for (const auto& [bw, c] : cur.terms())
          for (const auto& [w, c2] : letter.terms()) {
            if (w.empty()) continue;
            BarWord ext = bw;
            ext.push_back(w);
            next.add_term(ext, c * c2);
          }
        cur = std::move(next);
        if (cur.is_zero()) break;
      }
      out += cur;
      return;
    }
    if (i < m) {
      toks.push_back({i, 1});
      rec(i + 1, j);
      toks.pop_back();
    }
    for (std::size_t p = 0; i + p <= m; ++p) {
      toks.push_back({i, p, j});
      rec(i + p, j + 1);
      toks.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

BarElement bar_product(const BarElement& u, const BarElement& v, const DGAPresentation& a, const HgaOptions& opts) {
  BarElement r;
  for (const auto& [x, c] : u.terms())
    for (const auto& [y, c2] : v.terms()) r += (c * c2) * bar_product(x, y, a, opts);
  return r;
}

namespace {

// Smallest c with c * weight >= degree for every letter up to the truncation.
int weight_scale(const DGAPresentation& a) {
  int c = 1;
  for (int deg = 2; deg <= a.truncation; ++deg)
    for (const auto& l : a.basis(deg)) {
      int w = std::max(a.weight_of(l), 1);
      c = std::max(c, (deg + w - 1) / w);
    }
  return c;
}

Generator cobar_gen(const BarWord& w, int scale, const DGAPresentation& a) {
  std::string name = "v[";
  int weight = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    name += (i ? "|" : "") + to_string(w[i]);
    weight += a.weight_of(w[i]);
  }
  name += "]";
  const int total = bar_degree(w) + 1;
  const int internal = scale * weight;
  return Generator::plain(name, total - internal, internal);
}

}  // namespace

Generator cobar_generator(const DGAPresentation& a, const BarWord& w) { return cobar_gen(w, weight_scale(a), a); }

FilteredModelFragment cobar_fragment(const DGAPresentation& a, int truncation, const HgaOptions& opts) {
  if (truncation > a.truncation) throw TruncationExceeded("model truncation exceeds the algebra truncation");
  const int scale = weight_scale(a);
  DerivationSpec d;
  std::vector<Generator> seeds;
  for (int n = 1; n <= truncation - 1; ++n) {
    for (const auto& w : enumerate_bar(a, n)) {
      Generator g = cobar_gen(w, scale, a);
      seeds.push_back(g);
      Element img;
      for (const auto dw = bar_differential(w, a); const auto& [x, c] : dw.terms()) img.add_term(Word{cobar_gen(x, scale, a)}, c);
      for (std::size_t i = 1; i < w.size(); ++i) {
        BarWord left(w.begin(), w.begin() + static_cast<long>(i)), right(w.begin() + static_cast<long>(i), w.end());
        Generator gl = cobar_gen(left, scale, a), gr = cobar_gen(right, scale, a);
        img.add_term(Word{gl, gr}, sign(signs::cobar_split(gl.degree())));
      }
      d.set_image(g, img);
    }
  }
  return close_fragment("cobar:" + a.name, a.ring, seeds, with_hga_rules(std::move(d), opts), truncation);
}

}  // namespace loopbetti
