// Free graded tensor algebra on bigraded generators, with derivations
// extended by the Koszul-signed Leibniz rule.
#pragma once

#include "loopbetti/linalg.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopbetti {

enum class GeneratorKind { Plain, ESymbol, Cup2Power };

class Generator;
using Word = std::vector<Generator>;

struct GeneratorNode;

// Handle to an interned, immutable generator. Two handles compare equal
// exactly when name and bidegree agree.
class Generator {
 public:
  static Generator plain(const std::string& name, int res_degree, int int_degree);
  /// A generator in resolution degree 0.
  static Generator plain(const std::string& name, int degree) { return plain(name, 0, degree); }
  /// E_{k,1}(w_1,...,w_k; b) materialized as a generator, k >= 1. No rewriting.
  static Generator e_symbol(std::vector<Word> args, const Generator& right);
  /// a_1 U2 ... U2 a_n, n >= 2, factors in the given order.
  static Generator cup2(std::vector<Generator> factors);

  const std::string& name() const;
  int res_degree() const;
  int int_degree() const;
  int degree() const { return res_degree() + int_degree(); }
  GeneratorKind kind() const;
  /// ESymbol left arguments.
  const std::vector<Word>& e_args() const;
  /// ESymbol right argument.
  const Generator& e_right() const;
  /// Cup2Power factors.
  const std::vector<Generator>& factors() const;

  const GeneratorNode* node() const { return node_; }

  friend bool operator==(const Generator& a, const Generator& b) { return a.node_ == b.node_; }
  friend std::strong_ordering operator<=>(const Generator& a, const Generator& b);

 private:
  explicit Generator(const GeneratorNode* n) : node_(n) {}
  const GeneratorNode* node_ = nullptr;
};

struct GeneratorNode {
  std::string name;
  int res_degree = 0;
  int int_degree = 0;
  GeneratorKind kind = GeneratorKind::Plain;
  std::vector<Word> e_args;
  std::vector<Generator> operands;  // ESymbol: {right}; Cup2Power: factors
};

int degree(const Word& w);
int res_degree(const Word& w);
std::string to_string(const Word& w);

/// Length first, then lexicographic on generators.
struct WordLess {
  bool operator()(const Word& a, const Word& b) const;
};

class Element {
 public:
  using Terms = std::map<Word, Integer, WordLess>;

  Element() = default;
  static Element unit();
  static Element of(const Generator& g, const Integer& c = 1);
  static Element of(const Word& w, const Integer& c = 1);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Integer coefficient(const Word& w) const;

  void add_term(const Word& w, const Integer& c);
  Element& operator+=(const Element& o);
  Element& operator-=(const Element& o);
  Element& operator*=(const Integer& c);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator-(Element a) { return a *= Integer(-1); }
  friend Element operator*(const Integer& c, Element a) { return a *= c; }
  friend Element operator*(long c, Element a) { return a *= Integer(c); }
  friend bool operator==(const Element& a, const Element& b) { return a.terms_ == b.terms_; }

  /// Total degree if all terms share one; empty for zero or mixed elements.
  std::optional<int> degree() const;
  /// Words of length exactly one.
  Element linear_part() const;
  /// Words of length at least two (the decomposables).
  Element decomposable_part() const;
  /// Reduces coefficients modulo m (m >= 2).
  Element reduced_mod(const Integer& m) const;

  std::string to_string() const;

 private:
  Terms terms_;
};

/// Concatenation product, bilinear.
Element multiply(const Element& a, const Element& b);

class MissingImage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A degree +1 derivation: explicit images on generators, plus an optional
// rule producing images for generators without one (used for symbols).
class DerivationSpec {
 public:
  using SymbolRule = std::function<std::optional<Element>(const Generator&, const DerivationSpec&)>;

  DerivationSpec();

  DerivationSpec& set_image(const Generator& g, Element image);
  bool has_image(const Generator& g) const;
  const std::map<Generator, Element>& images() const { return images_; }
  void set_symbol_rule(SymbolRule rule);
  bool has_symbol_rule() const { return static_cast<bool>(rule_); }

  /// Image of g: explicit, else by rule, else MissingImage. Rule results are cached.
  Element image(const Generator& g) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::map<Generator, Element> images;
  };
  std::map<Generator, Element> images_;
  SymbolRule rule_;
  std::shared_ptr<Cache> cache_;
};

Element apply_derivation(const DerivationSpec& d, const Word& w);
Element apply_derivation(const DerivationSpec& d, const Element& e);

/// All words of total degree exactly n, in WordLess order.
std::vector<Word> basis_words(int n, std::span<const Generator> gens);

struct DSquaredReport {
  bool ok = true;
  std::optional<Generator> failing;
  Element residue;
  std::size_t checked = 0;
};

/// Applies d twice to every generator of degree <= n; stops at the first failure.
DSquaredReport check_d_squared(const DerivationSpec& d, std::span<const Generator> gens, int up_to_degree);

}  // namespace loopbetti
