// Truncated normalized bar construction of an augmented DGA, its cohomology
// Tor^A(k,k), the hga-induced product and the cobar-on-bar model.
#pragma once

#include "loopbetti/models.hpp"

#include <map>
#include <string>
#include <vector>

namespace loopbetti {

/// [a_1|...|a_n]; each letter is an algebra basis word of positive degree.
using BarWord = std::vector<Word>;

int bar_degree(const BarWord& w);
std::string to_string(const BarWord& w);

struct BarWordLess {
  bool operator()(const BarWord& a, const BarWord& b) const;
};

class BarElement {
 public:
  using Terms = std::map<BarWord, Integer, BarWordLess>;

  static BarElement of(const BarWord& w, const Integer& c = 1);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add_term(const BarWord& w, const Integer& c);
  BarElement& operator+=(const BarElement& o);
  BarElement& operator*=(const Integer& c);
  friend BarElement operator+(BarElement a, const BarElement& b) { return a += b; }
  friend BarElement operator*(const Integer& c, BarElement a) { return a *= c; }
  friend bool operator==(const BarElement& a, const BarElement& b) { return a.terms_ == b.terms_; }
  std::string to_string() const;

 private:
  Terms terms_;
};

class TruncationExceeded : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Bar words of bar degree n, letters ordered by degree then basis order.
std::vector<BarWord> bar_basis(const DGAPresentation& a, int n);

BarElement bar_differential(const BarWord& w, const DGAPresentation& a);
BarElement bar_differential(const BarElement& e, const DGAPresentation& a);

/// Cohomology of the bar complex in degrees 0..N over a.ring. Needs
/// N <= truncation - 2: degree N + 1 words carry letters of degree N + 2.
std::vector<HomologySummary> tor_profile(const DGAPresentation& a, int N);

/// Product on B(A) for a free algebra with hga operations: every b_j absorbs
/// a consecutive run of the a's as E_{p,1}(run; b_j), signed by the Koszul
/// sign of the resulting shuffle in desuspended degrees.
BarElement bar_product(const BarWord& u, const BarWord& v, const DGAPresentation& a, const HgaOptions& opts = {});
BarElement bar_product(const BarElement& u, const BarElement& v, const DGAPresentation& a,
                       const HgaOptions& opts = {});

/// Multiplicative model T(v_w) of A: one generator per bar word, with
/// d v_w = (bar differential) + sum over w = u|v of (-1)^{|v_u|} v_u v_v.
/// Generators are bigraded by filtration weight so d has resolution shift 1.
FilteredModelFragment cobar_fragment(const DGAPresentation& a, int truncation, const HgaOptions& opts = {});

/// v_w for a bar word, as used by cobar_fragment.
Generator cobar_generator(const DGAPresentation& a, const BarWord& w);

}  // namespace loopbetti
