// Homotopy G-algebra operations on the free algebra: E_{k,1}, cup-1, cup-2,
// their differentials, and instance verification of the axioms.
#pragma once

#include "loopbetti/algebra.hpp"

namespace loopbetti {

struct HgaOptions {
  int k_max = 4;
  /// Rewrite right-nested E(a..;E(b..;c)) through the associativity relation.
  bool associativity_rewrite = true;
  /// Negative control: flips the sign of the left extremal term of dE.
  bool corrupt_extremal_sign = false;
};

class MissingEOp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NonCocycleBase : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnsupportedShape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnsupportedParity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ESymbol {
  std::vector<Element> args_left;
  Element arg_right;
  std::size_t arity() const { return args_left.size(); }
};

/// E_{k,1}(a_1..a_k; b), multilinear, expanded to canonical generators.
/// k = 0 gives b; a unit left argument gives 0; E_{k,1}(..;1) = 0 for k >= 1.
Element e_op(const std::vector<Element>& lefts, const Element& right, const HgaOptions& opts = {});
Element e_op(const ESymbol& sym, const HgaOptions& opts = {});
/// a cup-1 b = E_{1,1}(a; b).
Element cup1(const Element& a, const Element& b, const HgaOptions& opts = {});

/// Right-hand side of the dE_{k,1} formula for homogeneous arguments.
Element e_differential(const ESymbol& sym, const DerivationSpec& d, const HgaOptions& opts = {});
/// The same formula for a canonical E-symbol generator.
Element e_differential(const Generator& sym, const DerivationSpec& d, const HgaOptions& opts = {});

/// One step of the product rule E_{k,1}(a; b.c) = sum of k+1 split terms.
Element e_product_expand(const std::vector<Element>& lefts, const Element& b, const Element& c,
                         const HgaOptions& opts = {});

/// a_1 U2 ... U2 a_n as an element: the generator itself for n = 1, zero if an
/// odd generator repeats.
Element cup2_element(const std::vector<Generator>& factors);
/// a^{U2 n}.
Element cup2_power(const Generator& a, int n);

/// Unshuffle sum of d(a_1 U2 ... U2 a_n) without any cocycle check; equal
/// tuples are counted once.
Element cup2_unshuffle_sum(const std::vector<Generator>& factors, const HgaOptions& opts = {});
/// d of a Cup2Power generator whose factors are cocycles.
Element cup2_power_diff(const Generator& power, const DerivationSpec& d, const HgaOptions& opts = {});

struct BoldCup1 {
  Element eta;
  Element result;
  bool verified = false;  // d(result) in D + lambda V
};

/// x bold-cup-1 c = eta_{x,c} + x cup-1 c for the two shapes dx in lambda V and
/// dx = sum a_i b_i + lambda v with d a_i, d b_i in lambda V.
BoldCup1 bold_cup1(const Generator& x, const Element& c, const DerivationSpec& d, const Integer& lambda,
                   const HgaOptions& opts = {});

/// True when every linear coefficient is divisible by lambda (lambda = 0: no linear part).
bool in_decomposables_plus(const Element& e, const Integer& lambda);

/// d with images for E-symbols and Cup2Power generators supplied by the rules above.
DerivationSpec with_hga_rules(DerivationSpec d, const HgaOptions& opts = {});

struct FragmentReport {
  bool ok = true;
  std::optional<Generator> failing;
  Element residue;
  std::size_t checked = 0;
};

/// d^2 = 0 on every ESymbol and Cup2Power generator of degree <= n.
FragmentReport verify_hga_fragment(std::span<const Generator> gens, const DerivationSpec& d, int up_to_degree);

/// Canonical symbols over cocycle base generators up to a degree: E_{k,1}
/// symbols with k <= k_max whose arguments use base letters and symbols of
/// lower nesting, plus cup-2 products of base generators.
std::vector<Generator> free_hga_symbols(const std::vector<Generator>& base, int max_degree, int nesting,
                                        const HgaOptions& opts = {});

}  // namespace loopbetti
