#include "loopbetti/algebra.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace loopbetti {

namespace {

struct InternTable {
  std::mutex mutex;
  std::unordered_map<std::string, std::unique_ptr<GeneratorNode>> nodes;
};

InternTable& intern_table() {
  static InternTable table;
  return table;
}

const GeneratorNode* intern(GeneratorNode node) {
  std::string key = node.name + "@" + std::to_string(node.res_degree) + "," +
                    std::to_string(node.int_degree);
  auto& t = intern_table();
  std::lock_guard lock(t.mutex);
  auto it = t.nodes.find(key);
  if (it != t.nodes.end()) return it->second.get();
  auto owned = std::make_unique<GeneratorNode>(std::move(node));
  const GeneratorNode* p = owned.get();
  t.nodes.emplace(std::move(key), std::move(owned));
  return p;
}

std::string word_name(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += w[i].name();
  }
  return s;
}

}  // namespace

Generator Generator::plain(const std::string& name, int res_degree, int int_degree) {
  if (name.empty()) throw std::invalid_argument("generator name must be nonempty");
  GeneratorNode n;
  n.name = name;
  n.res_degree = res_degree;
  n.int_degree = int_degree;
  return Generator(intern(std::move(n)));
}

Generator Generator::e_symbol(std::vector<Word> args, const Generator& right) {
  if (args.empty()) throw std::invalid_argument("E-symbol needs at least one left argument");
  GeneratorNode n;
  n.kind = GeneratorKind::ESymbol;
  n.name = "E(";
  int res = right.res_degree() - static_cast<int>(args.size());
  int internal = right.int_degree();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].empty()) throw std::invalid_argument("E-symbol argument must not be the unit");
    if (i) n.name += ',';
    n.name += word_name(args[i]);
    res += loopbetti::res_degree(args[i]);
    internal += loopbetti::degree(args[i]) - loopbetti::res_degree(args[i]);
  }
  n.name += ';' + right.name() + ')';
  n.res_degree = res;
  n.int_degree = internal;
  n.e_args = std::move(args);
  n.operands = {right};
  return Generator(intern(std::move(n)));
}

Generator Generator::cup2(std::vector<Generator> factors) {
  if (factors.size() < 2) throw std::invalid_argument("cup2 needs at least two factors");
  GeneratorNode n;
  n.kind = GeneratorKind::Cup2Power;
  n.name = "U2(";
  int res = -2 * static_cast<int>(factors.size() - 1);
  int internal = 0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) n.name += ',';
    n.name += factors[i].name();
    res += factors[i].res_degree();
    internal += factors[i].int_degree();
  }
  n.name += ')';
  n.res_degree = res;
  n.int_degree = internal;
  n.operands = std::move(factors);
  return Generator(intern(std::move(n)));
}

const std::string& Generator::name() const { return node_->name; }
int Generator::res_degree() const { return node_->res_degree; }
int Generator::int_degree() const { return node_->int_degree; }
GeneratorKind Generator::kind() const { return node_->kind; }
const std::vector<Word>& Generator::e_args() const { return node_->e_args; }
const Generator& Generator::e_right() const { return node_->operands.front(); }
const std::vector<Generator>& Generator::factors() const { return node_->operands; }

std::strong_ordering operator<=>(const Generator& a, const Generator& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  if (auto c = a.node_->int_degree <=> b.node_->int_degree; c != 0) return c;
  return a.node_->res_degree <=> b.node_->res_degree;
}

int degree(const Word& w) {
  int d = 0;
  for (const auto& g : w) d += g.degree();
  return d;
}

int res_degree(const Word& w) {
  int d = 0;
  for (const auto& g : w) d += g.res_degree();
  return d;
}

std::string to_string(const Word& w) { return word_name(w); }

bool WordLess::operator()(const Word& a, const Word& b) const {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    return a[i] < b[i];
  }
  return false;
}

Element Element::unit() { return of(Word{}); }

Element Element::of(const Generator& g, const Integer& c) { return of(Word{g}, c); }

Element Element::of(const Word& w, const Integer& c) {
  Element e;
  e.add_term(w, c);
  return e;
}

Integer Element::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Integer(0) : it->second;
}

void Element::add_term(const Word& w, const Integer& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

Element& Element::operator+=(const Element& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

Element& Element::operator-=(const Element& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

Element& Element::operator*=(const Integer& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, v] : terms_) v *= c;
  return *this;
}

std::optional<int> Element::degree() const {
  std::optional<int> d;
  for (const auto& [w, c] : terms_) {
    int k = loopbetti::degree(w);
    if (d && *d != k) return std::nullopt;
    d = k;
  }
  return d;
}

Element Element::linear_part() const {
  Element e;
  for (const auto& [w, c] : terms_)
    if (w.size() == 1) e.terms_.emplace(w, c);
  return e;
}

Element Element::decomposable_part() const {
  Element e;
  for (const auto& [w, c] : terms_)
    if (w.size() >= 2) e.terms_.emplace(w, c);
  return e;
}

Element Element::reduced_mod(const Integer& m) const {
  Element e;
  for (const auto& [w, c] : terms_) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
    e.add_term(w, r);
  }
  return e;
}

std::string Element::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    Integer a = abs(c);
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    if (a != 1 || w.empty()) os << a;
    if (a != 1 && !w.empty()) os << '*';
    if (!w.empty()) os << word_name(w);
    first = false;
  }
  return os.str();
}

Element multiply(const Element& a, const Element& b) {
  Element r;
  for (const auto& [wa, ca] : a.terms()) {
    for (const auto& [wb, cb] : b.terms()) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      r.add_term(w, ca * cb);
    }
  }
  return r;
}

DerivationSpec::DerivationSpec() : cache_(std::make_shared<Cache>()) {}

DerivationSpec& DerivationSpec::set_image(const Generator& g, Element image) {
  if (!image.is_zero()) {
    auto d = image.degree();
    if (!d || *d != g.degree() + 1)
      throw std::invalid_argument("image of " + g.name() + " is not homogeneous of degree " +
                                  std::to_string(g.degree() + 1));
  }
  images_[g] = std::move(image);
  cache_ = std::make_shared<Cache>();
  return *this;
}

bool DerivationSpec::has_image(const Generator& g) const { return images_.count(g) > 0; }

void DerivationSpec::set_symbol_rule(SymbolRule rule) {
  rule_ = std::move(rule);
  cache_ = std::make_shared<Cache>();
}

Element DerivationSpec::image(const Generator& g) const {
  if (auto it = images_.find(g); it != images_.end()) return it->second;
  if (rule_) {
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->images.find(g); it != cache_->images.end()) return it->second;
    }
    if (auto v = rule_(g, *this)) {
      std::lock_guard lock(cache_->mutex);
      cache_->images.emplace(g, *v);
      return *v;
    }
  }
  throw MissingImage("no differential image for generator " + g.name());
}

Element apply_derivation(const DerivationSpec& d, const Word& w) {
  Element r;
  int sign_exp = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    Element dg = d.image(w[k]);
    const Integer s = (sign_exp % 2) ? -1 : 1;
    for (const auto& [img, c] : dg.terms()) {
      Word nw(w.begin(), w.begin() + static_cast<long>(k));
      nw.insert(nw.end(), img.begin(), img.end());
      nw.insert(nw.end(), w.begin() + static_cast<long>(k) + 1, w.end());
      r.add_term(nw, s * c);
    }
    sign_exp += w[k].degree();
  }
  return r;
}

Element apply_derivation(const DerivationSpec& d, const Element& e) {
  Element r;
  for (const auto& [w, c] : e.terms()) {
    Element dw = apply_derivation(d, w);
    dw *= c;
    r += dw;
  }
  return r;
}

std::vector<Word> basis_words(int n, std::span<const Generator> gens) {
  for (const auto& g : gens)
    if (g.degree() < 2) throw std::invalid_argument("basis_words: generator " + g.name() + " has degree < 2");
  std::vector<Word> out;
  if (n < 0) return out;
  Word cur;
  std::function<void(int)> rec = [&](int left) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (const auto& g : gens) {
      if (g.degree() > left) continue;
      cur.push_back(g);
      rec(left - g.degree());
      cur.pop_back();
    }
  };
  rec(n);
  std::sort(out.begin(), out.end(), WordLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DSquaredReport check_d_squared(const DerivationSpec& d, std::span<const Generator> gens, int up_to_degree) {
  DSquaredReport rep;
  for (const auto& g : gens) {
    if (g.degree() > up_to_degree) continue;
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

}  // namespace loopbetti
