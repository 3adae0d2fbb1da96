// Acceptance criteria. `acceptance` runs all of them, `acceptance <n>` one.
// Each criterion prints a single PASS or FAIL line.
#include "loopbetti/analysis.hpp"
#include "loopbetti/presentation_io.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace loopbetti;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string join(const std::vector<std::size_t>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

std::vector<std::size_t> taus(const std::vector<HomologySummary>& p) {
  std::vector<std::size_t> out;
  for (const auto& h : p) out.push_back(minimal_generator_count(h));
  return out;
}

Outcome smith_contract() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> entry(-9, 9), size(1, 8);
  for (int t = 0; t < 200; ++t) {
    IntMatrix a(static_cast<std::size_t>(size(rng)), static_cast<std::size_t>(size(rng)));
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = entry(rng);
    auto s = smith_normal_form(a);
    const std::string tag = "matrix " + std::to_string(t);
    o.require(s.U * a * s.V == s.D, tag + ": U A V != D");
    o.require(abs(determinant(s.U)) == 1 && abs(determinant(s.V)) == 1, tag + ": not unimodular");
    Integer prev = 1;
    bool zero_seen = false;
    for (std::size_t i = 0; i < s.D.rows(); ++i)
      for (std::size_t j = 0; j < s.D.cols(); ++j) {
        const Integer& d = s.D(i, j);
        if (i != j) {
          o.require(d == 0, tag + ": off-diagonal entry");
          continue;
        }
        o.require(d >= 0, tag + ": negative diagonal entry");
        if (d == 0) {
          zero_seen = true;
        } else {
          o.require(!zero_seen && d % prev == 0, tag + ": divisibility chain broken");
          prev = d;
        }
      }
  }
  return o;
}

Outcome bar_d_squared() {
  Outcome o;
  std::size_t words = 0;
  for (auto name : {"sphere:2", "sphere:3", "sphere:4", "wedge:S2,S3", "wedge:S2,S2", "product:S2,S3", "product:S2,S2",
                    "moore:2,2", "moore:3,2"})
    for (auto ring : {CoefficientRing::integers(), CoefficientRing::prime_field(2), CoefficientRing::prime_field(3)}) {
      auto a = catalog_dga(name, ring, 13);
      for (int n = 0; n <= 12; ++n)
        for (const auto& w : bar_basis(a, n)) {
          ++words;
          BarElement dd = bar_differential(bar_differential(w, a), a);
          bool zero = true;
          for (const auto& [v, c] : dd.terms()) zero = zero && ring.reduce(c) == 0;
          o.require(zero, std::string(name) + " over " + ring.to_string() + ": d^2 " + to_string(w) + " != 0");
        }
    }
  o.detail = o.ok ? std::to_string(words) + " words" : o.detail;
  return o;
}

Outcome loop_s3() {
  Outcome o;
  auto a = catalog_dga("sphere:3", CoefficientRing::integers(), 22);
  auto profile = tor_profile(a, 20);
  // Independent assembly: the bar words of S^3 are [x|...|x] in even degrees
  // and every differential vanishes since x^2 = 0 and dx = 0.
  std::vector<HomologySummary> expect;
  for (int n = 0; n <= 20; ++n) {
    std::size_t here = n % 2 == 0 ? 1 : 0, below = n % 2 == 1 ? 1 : 0, above = below;
    expect.push_back(homology_at(IntMatrix(above, here), IntMatrix(here, below), CoefficientRing::integers()));
  }
  o.require(profile == expect, "profile " + join(taus(profile)));
  std::vector<std::size_t> pattern;
  for (int n = 0; n <= 20; ++n) pattern.push_back(n % 2 == 0 ? 1 : 0);
  o.require(taus(profile) == pattern, "taus " + join(taus(profile)));
  for (const auto& h : profile) o.require(h.torsion.empty(), "unexpected torsion");
  return o;
}

Outcome loop_s2() {
  Outcome o;
  auto r = dichotomy_report("sphere:2", CoefficientRing::integers(), 15);
  o.require(r.taus == std::vector<std::size_t>(16, 1), "taus " + join(r.taus));
  o.require(r.verdict == Verdict::BoundedSoFar, "verdict " + to_string(r.verdict));
  o.require(r.generator_count == 1, "generators " + std::to_string(r.generator_count));
  o.require(!r.predicted_unbounded && r.consistent(), "prediction disagrees");
  return o;
}

Outcome loop_wedge() {
  Outcome o;
  auto r = dichotomy_report("wedge:S2,S2", CoefficientRing::rationals(), 10);
  std::vector<std::size_t> pow2;
  for (int i = 0; i <= 10; ++i) pow2.push_back(std::size_t{1} << i);
  o.require(r.taus == pow2, "dims " + join(r.taus));
  o.require(r.verdict == Verdict::GrowthDetected, "verdict " + to_string(r.verdict));
  o.require(r.generator_count == 2, "generators " + std::to_string(r.generator_count));
  o.require(r.consistent(), "prediction disagrees");
  return o;
}

Outcome loop_moore() {
  Outcome o;
  auto a = catalog_dga("moore:2,2", CoefficientRing::prime_field(2), 9);
  auto t = taus(tor_profile(a, 7));
  // compositions of n into parts 1 and 2
  std::vector<std::size_t> comp{1, 1};
  while (comp.size() < 8) comp.push_back(comp[comp.size() - 1] + comp[comp.size() - 2]);
  o.require(t == comp, "dims " + join(t));
  o.require(t == std::vector<std::size_t>{1, 1, 2, 3, 5, 8, 13, 21}, "dims " + join(t));
  return o;
}

Outcome families() {
  Outcome o;
  struct Run {
    FamilyCase which;
    long mu;
    int length;
    const char* name;
  };
  for (const auto& r : {Run{FamilyCase::I, 0, 6, "I"}, Run{FamilyCase::II, 0, 6, "II"},
                        Run{FamilyCase::III, 2, 5, "III mu=2"}, Run{FamilyCase::III, 3, 5, "III mu=3"}}) {
    SequenceParams p;
    p.mu = r.mu;
    auto fam = sequence_family(r.which, p, r.length);
    auto dsq = check_d_squared(fam.d, fam.generators, 1 << 20);
    o.require(dsq.ok, std::string("case ") + r.name + ": d^2 fails on " + (dsq.failing ? dsq.failing->name() : ""));
    for (const auto& l : verify_family(fam)) o.require(l.ok, std::string("case ") + r.name + ": " + l.what);
  }
  return o;
}

Outcome cup2_calculus() {
  Outcome o;
  auto a = Generator::plain("a", 2), a2 = Generator::plain("a2", 4), a3 = Generator::plain("a3", 6),
       odd = Generator::plain("o", 3);
  DerivationSpec base;
  for (const auto& g : {a, a2, a3, odd}) base.set_image(g, {});
  auto d = with_hga_rules(base);
  for (int n = 2; n <= 5; ++n) {
    Element conv;
    for (int k = 1; k < n; ++k) conv += cup1(cup2_power(a, k), cup2_power(a, n - k));
    auto p = cup2_power(a, n).terms().begin()->first.front();
    o.require(cup2_power_diff(p, d) == conv, "convolution fails at n = " + std::to_string(n));
    o.require(apply_derivation(d, conv).is_zero(), "d^2 a^(U2 " + std::to_string(n) + ") != 0");
  }
  for (const auto& fs : std::vector<std::vector<Generator>>{{a, a2}, {a2, odd}, {a, a2, a3}, {a, a2, odd}, {odd, a3, a}}) {
    auto g = cup2_element(fs).terms().begin()->first.front();
    Element dg = cup2_power_diff(g, d);
    o.require(apply_derivation(d, dg).is_zero(), "d^2 " + g.name() + " != 0");
  }
  return o;
}

Outcome hga_axioms() {
  Outcome o;
  auto x = Generator::plain("x", 2), y = Generator::plain("y", 3);
  DerivationSpec base;
  base.set_image(x, {}).set_image(y, {});
  auto d = with_hga_rules(base);
  std::size_t checked = 0;
  for (const auto& gens : {std::vector<Generator>{x}, std::vector<Generator>{x, y}}) {
    auto rep = verify_hga_fragment(free_hga_symbols(gens, 16, 1), d, 16);
    o.require(rep.ok, "fails on " + (rep.failing ? rep.failing->name() : std::string()));
    checked += rep.checked;
  }
  HgaOptions bad;
  bad.corrupt_extremal_sign = true;
  auto rep = verify_hga_fragment(free_hga_symbols({x}, 16, 1, bad), with_hga_rules(base, bad), 16);
  o.require(!rep.ok && rep.failing, "corrupted build passed");
  if (o.ok) o.detail = std::to_string(checked) + " symbols; corrupted build fails at " + rep.failing->name();
  return o;
}

Outcome quotient() {
  Outcome o;
  for (auto [space, index, T] : {std::tuple{"wedge:S2,S2", 0, 13}, std::tuple{"moore:2,2", 1, 13}}) {
    auto a = catalog_dga(space, CoefficientRing::rationals(), T);
    HgaOptions opts;
    opts.k_max = T;
    auto f = cobar_fragment(a, T, opts);
    auto y = cobar_generator(a, {Word{a.gens[static_cast<std::size_t>(index)]}});
    auto g = with_cup1_closure(f, y, opts);
    auto rep = quotient_inequality_check(g, y, 10, {}, opts);
    const std::string tag = std::string(space) + ": ";
    o.require(rep.N == 10, tag + "window " + std::to_string(rep.N));
    o.require(rep.holds, tag + rep.quotient.to_string() + " exceeds " + rep.bound.to_string());
    o.require(rep.agrees, tag + "Euler-Poincare form disagrees");
    for (const auto& l : rep.lines) o.require(l.ok, tag + l.what);
  }
  return o;
}

Outcome fis() {
  Outcome o;
  auto a = catalog_dga("sphere:3", CoefficientRing::rationals(), 16);
  HgaOptions opts;
  opts.k_max = 8;
  auto f = cobar_fragment(a, 16, opts);
  auto rec = fis_start(cobar_generator(a, {Word{a.gens[0]}}));
  for (int n = 1; n <= 5; ++n) {
    rec = fis_extend(rec, f, opts);
    o.require(std::holds_alternative<PowerCase>(rec.certificates.back()), "step " + std::to_string(n) + " is a relation");
    o.require(rec.members.back() == rec.powers.back(), "x(" + std::to_string(n) + ") is not the power");
  }
  auto x = Generator::plain("x", 3), u = Generator::plain("u", 2);
  DerivationSpec d;
  d.set_image(x, {}).set_image(u, Element::of(x, 2));
  auto planted = close_fragment("planted", CoefficientRing::mod(2), {x, u}, with_hga_rules(d), 8);
  bool obstructed = false;
  try {
    fis_extend(fis_start(x), planted);
  } catch (const Obstructed&) {
    obstructed = true;
  }
  o.require(obstructed, "planted relation not detected");
  return o;
}

Outcome perturbation() {
  Outcome o;
  SequenceParams p;
  p.mu = 2;
  p.base_res = -2;
  auto fam = sequence_family(FamilyCase::III, p, 7);
  auto f = sequence_fragment(fam, CoefficientRing::integers(), 14);
  auto rep = perturbation_check(f);
  o.require(rep.max_shift >= 3, "h^3 never occurs");
  for (const auto& l : rep.lines) o.require(l.ok, l.what + " " + l.detail);
  if (o.ok) o.detail = std::to_string(rep.generators_checked) + " generators";
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"Smith normal form contract on 200 random matrices", smith_contract},
      {"bar d^2 = 0 to bar degree 12 on the catalog over Z, F2, F3", bar_d_squared},
      {"loop S3 over Z to degree 20: 1,0,1,0,...", loop_s3},
      {"loop S2 over Z to degree 15: all 1, bounded, one generator", loop_s2},
      {"loop S2 v S2 over Q to degree 10: 2^i, growth, two generators", loop_wedge},
      {"loop Moore(2,2) over F2 to degree 7: 1,1,2,3,5,8,13,21", loop_moore},
      {"sequence families I, II, III with witnesses", families},
      {"cup-2 convolution and d^2 on cup-2 products", cup2_calculus},
      {"hga axiom instances to degree 16, corrupted build caught", hga_axioms},
      {"quotient inequality to T^10 on wedge and Moore fragments", quotient},
      {"f.i.s. over Q is all powers to length 5; planted relation obstructs", fis},
      {"perturbation identities on the case III fragment, truncation 14", perturbation},
  };
  return all;
}

bool run_one(std::size_t n) {
  const auto& c = criteria().at(n - 1);
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (n == 1 && secs >= 5.0) {
    o.ok = false;
    o.detail = "too slow";
  }
  std::ostringstream t;
  t.precision(2);
  t << std::fixed << secs;
  std::cout << (o.ok ? "PASS " : "FAIL ") << n << ": " << c.name << " (" << t.str() << " s)"
            << (o.detail.empty() ? "" : " -- " + o.detail) << std::endl;
  return o.ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    const std::size_t n = std::strtoul(argv[1], nullptr, 10);
    if (n < 1 || n > criteria().size()) {
      std::cerr << "usage: acceptance [1-" << criteria().size() << "]\n";
      return 2;
    }
    return run_one(n) ? 0 : 1;
  }
  bool ok = true;
  for (std::size_t n = 1; n <= criteria().size(); ++n) ok = run_one(n) && ok;
  return ok ? 0 : 1;
}
