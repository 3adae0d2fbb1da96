// Truncated Poincare series, the quotient-complex inequality, counting
// algebra generators of a cohomology ring and the Betti-growth report.
#pragma once

#include "loopbetti/bar.hpp"

#include <functional>
#include <string>
#include <vector>

namespace loopbetti {

class TruncationMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class NotCocycle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// c_0 + c_1 T + ... + c_N T^N.
struct PoincareSeries {
  std::vector<std::size_t> coeffs;

  int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
  std::size_t at(int n) const;
  std::string to_string() const;
  friend bool operator==(const PoincareSeries&, const PoincareSeries&) = default;
};

PoincareSeries operator+(const PoincareSeries& a, const PoincareSeries& b);
/// T^k * a, cut at the same truncation.
PoincareSeries shift(const PoincareSeries& a, int k);
bool series_leq(const PoincareSeries& a, const PoincareSeries& b);

struct QuotientReport {
  std::string y;
  int k = 0;  // degree of y-bar
  int N = 0;
  PoincareSeries vbar;       // S_{H(V-bar)}, the unit in degree 0
  PoincareSeries quotient;   // S_{H(V-bar / y V-bar)}, direct
  PoincareSeries bound;      // (1 + T^{k-1}) S_{H(V-bar)}
  PoincareSeries les;        // quotient recomputed from the long exact sequence
  PoincareSeries image;      // S_I, I_n = im(H^n(S) -> H^n(V-bar))
  bool injective = true;     // s^k V-bar -> V-bar is injective in range
  PoincareSeries euler_poincare; // bound - (I_n + I_{n+1}), valid when injective
  bool holds = false;
  bool agrees = false;
  std::vector<CheckLine> lines;
};

/// Over Q. The subcomplex S is spanned by y-bar and the linear parts of
/// y cup-1 v for v in the fragment. N < 0 picks truncation - 3. The tamper
/// hook edits the direct quotient series before comparison.
QuotientReport quotient_inequality_check(const FilteredModelFragment& f, const Generator& y, int N = -1,
                                         const std::function<void(PoincareSeries&)>& tamper = {},
                                         const HgaOptions& opts = {});

/// Minimal number of algebra generators of the positive part of H(A) over
/// a.ring in degrees 2..N: indecomposables H+/(H+ H+) counted degreewise.
std::size_t count_algebra_generators(const DGAPresentation& a, int N);

/// H^n(A; Z) has no torsion for 1 <= n <= N.
bool cohomology_is_free(const DGAPresentation& a, int N);

enum class Verdict { BoundedSoFar, GrowthDetected };
std::string to_string(Verdict v);

struct BettiReport {
  std::string space;
  CoefficientRing ring = CoefficientRing::integers();
  std::vector<HomologySummary> profile;
  std::vector<std::size_t> taus;
  std::size_t generator_count = 0;
  Verdict verdict = Verdict::BoundedSoFar;
  /// Unbounded iff at least two algebra generators. Applied over fields and
  /// over Z when H(A; Z) is torsion-free.
  bool predicted_unbounded = false;
  bool prediction_applies = true;
  int window = 0;
  std::size_t third = 0;

  bool consistent() const { return !prediction_applies || predicted_unbounded == (verdict == Verdict::GrowthDetected); }
};

/// GrowthDetected iff the max of tau over the last third of 0..N exceeds the
/// max over the first third.
Verdict growth_verdict(const std::vector<std::size_t>& taus);

BettiReport dichotomy_report(const DGAPresentation& a, int N);
BettiReport dichotomy_report(const std::string& space, const CoefficientRing& ring, int N);

}  // namespace loopbetti
