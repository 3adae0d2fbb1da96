// Concrete differential graded algebras, filtered model fragments, the
// three explicit sequence families, lambda-homology and f.i.s. extension.
#pragma once

#include "loopbetti/hga.hpp"

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace loopbetti {

class BadParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class CaseMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class DegreeOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};
class Obstructed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Multiplication { Free, Table };

// An augmented 1-reduced DGA. In Table mode the generators are an additive
// basis of the augmentation ideal and products come from a table (missing
// entries are zero); in Free mode the algebra is the tensor algebra on gens.
struct DGAPresentation {
  std::string name;
  CoefficientRing ring = CoefficientRing::integers();
  std::vector<Generator> gens;
  DerivationSpec diff;
  Multiplication mult = Multiplication::Table;
  std::map<std::pair<Generator, Generator>, Element> table;
  /// Filtration weight of each basis element (additive under products,
  /// preserved by d). Used to bigrade model fragments; defaults to 1.
  std::map<Generator, int> weight;
  int truncation = 0;

  /// Additive basis of the algebra in one positive degree.
  std::vector<Word> basis(int degree) const;
  Element differential(const Word& letter) const;
  Element product(const Word& a, const Word& b) const;
  int weight_of(const Word& letter) const;
  /// Checks degrees, d^2 = 0, the Leibniz rule and associativity on the
  /// truncated range; throws BadParams with a description otherwise.
  void validate() const;
};

DGAPresentation sphere_dga(int n, const CoefficientRing& ring, int truncation);
/// Truncated polynomial algebra Z[x]/(x^{k+1}) on |x| = n, cut at the truncation.
DGAPresentation poly_dga(int n, const CoefficientRing& ring, int truncation);
DGAPresentation moore_dga(long mu, int n, const CoefficientRing& ring, int truncation);
/// Wedge pieces are tokens S<n> or M<mu>_<n>.
DGAPresentation wedge_dga(const std::vector<std::string>& pieces, const CoefficientRing& ring, int truncation);
DGAPresentation product_dga(const std::vector<int>& sphere_dims, const CoefficientRing& ring, int truncation);
/// Names: sphere:<n>, poly:<n>, moore:<mu>,<n>, wedge:<tok>,..., product:<tok>,...
DGAPresentation catalog_dga(const std::string& spec, const CoefficientRing& ring, int truncation);

// A fragment of a filtered model (T(V), d_h) over Z together with the
// coefficient ring k it models. gens is closed under taking the letters of
// d_h-images up to the truncation.
struct FilteredModelFragment {
  std::string name;
  CoefficientRing ring = CoefficientRing::integers();
  std::vector<Generator> gens;
  DerivationSpec dh;
  int truncation = 0;

  std::vector<Generator> in_degree(int total_degree) const;
  bool contains(const Generator& g) const;
};

/// Builds a fragment from seed generators, adding every generator that
/// occurs in a d_h-image, up to the truncation degree.
FilteredModelFragment close_fragment(std::string name, const CoefficientRing& ring,
                                     const std::vector<Generator>& seeds, DerivationSpec dh, int truncation);

/// Adds s^{-1}(y cup-1 v) closure: the symbols needed by y cup-1 v for every
/// v in the fragment, together with everything their images mention.
FilteredModelFragment with_cup1_closure(const FilteredModelFragment& f, const Generator& y,
                                        const HgaOptions& opts = {});

/// Minimality d(U) in E + D + kappa V: no Plain generator has an invertible
/// linear coefficient on another Plain generator. Returns the first offender.
std::optional<Generator> minimality_violation(const FilteredModelFragment& f);

struct SmallComplex {
  CoefficientRing ring = CoefficientRing::integers();
  /// basis[n] for n >= 1 holds generators of total degree n + 1; degree 0
  /// is the unit alone.
  std::vector<std::vector<Generator>> basis;
  /// d[n] maps degree n to degree n + 1.
  std::vector<SparseIntMatrix> d;

  std::size_t dim(int n) const;
  HomologySummary homology(int n) const;
};

/// (V-bar, d-bar_h): desuspended generators, linear part of d_h. Degrees 0..N.
SmallComplex small_complex(const FilteredModelFragment& f, int N);

enum class FamilyCase { I, II, III };

struct SequenceParams {
  int base_degree = 3;  // |b_0|, odd
  long mu = 0;          // case III only
  /// Resolution degree of b_0 in case III; -1 in the plain resolution,
  /// -2 moves the mu-corrections into the perturbation.
  int base_res = -1;
};

struct SequenceFamily {
  FamilyCase which = FamilyCase::I;
  SequenceParams params;
  int length = 0;
  std::vector<Element> b;             // b_0..b_N
  std::vector<Element> witness;       // c-fraktur_0..N, zero where absent
  std::vector<Element> omega;         // case III: omega_0..omega_N
  std::vector<Element> c;             // case III: c_0 (unused) .. c_N
  std::vector<Element> a;             // case III: a-fraktur_0..N, zero for n < 2
  std::vector<Generator> generators;  // explicit plain and cup-2 generators
  DerivationSpec d;                   // includes the hga rules
};

SequenceFamily sequence_family(FamilyCase which, const SequenceParams& params, int length);

struct CheckLine {
  std::string what;
  bool ok = true;
  std::string detail;
};

/// d^2 on members and witnesses, the omega relations, degree laws.
std::vector<CheckLine> verify_family(const SequenceFamily& fam);

FilteredModelFragment sequence_fragment(const SequenceFamily& fam, const CoefficientRing& ring, int truncation);

enum class LambdaKind { Zero, WeaklyZero, NotZero };

struct LambdaVerdict {
  LambdaKind kind = LambdaKind::NotZero;
  Element u;  // d_h u = denominator * x + z + lambda v
  Element z;
  Element v;
  Integer denominator = 1;  // only Rationals produce a value other than 1
  int truncation = 0;       // NotZero means "no witness below this degree"
};

/// Searches the generator span one degree below x for d_h u = x + z + lambda v.
LambdaVerdict lambda_homologous(const Element& x, const FilteredModelFragment& f, const Integer& lambda);
LambdaVerdict lambda_homologous(const Generator& x, const FilteredModelFragment& f, const Integer& lambda);
/// WeaklyZero when d_h u = x + z is solvable, NotZero otherwise.
LambdaVerdict weakly_homologous(const Element& x, const FilteredModelFragment& f);

enum class SummandKind { Satisfied, NotApplicable, Contradiction };

struct SummandVerdict {
  SummandKind kind = SummandKind::NotApplicable;
  std::optional<Generator> a, b;
  std::string detail;
};

SummandVerdict summand_criterion(const Generator& c, const FilteredModelFragment& f);

struct PowerCase {};
struct RelationCase {
  Element b;  // d_h b = power + z + mu' x(i)
  Element z;
  Integer mu_prime;
};

struct FISRecord {
  Generator x;
  std::vector<Element> members;  // x(0), x(1), ...
  std::vector<Element> powers;   // x^{bold-cup-1 (i+1)}
  std::vector<std::variant<PowerCase, RelationCase>> certificates;
};

FISRecord fis_start(const Generator& x);
/// Appends x(n) for n = current length.
FISRecord fis_extend(const FISRecord& rec, const FilteredModelFragment& f, const HgaOptions& opts = {});

struct PerturbationReport {
  bool ok = true;
  std::vector<CheckLine> lines;
  std::size_t generators_checked = 0;
  int max_shift = 1;
};

/// Splits d_h by resolution shift (1 = d, r >= 2 = h^r) and verifies every
/// graded piece of d_h^2 = 0 on the fragment, plus h^{tr} = 0 on E-symbols.
PerturbationReport perturbation_check(const FilteredModelFragment& f);

}  // namespace loopbetti
