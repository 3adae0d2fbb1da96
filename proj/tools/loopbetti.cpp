// loopbetti: generalized Betti numbers of loop spaces from small DGA models.
#include "loopbetti/analysis.hpp"
#include "loopbetti/presentation_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace loopbetti;
using nlohmann::json;

namespace {

enum class Format { Table, Csv, Json };

struct VerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string space = "sphere:3";
  std::string ring = "Z";
  int max_degree = 10;
  std::string format = "table";
  std::uint64_t seed = 1;
  std::string cocycle;
  std::string family = "i";
  long mu = 0;
  int base_degree = 3;
  int base_res = -1;
  int length = 5;
  std::string generator;
  bool ring_given = false;
};

Format parse_format(const std::string& s) {
  if (s == "table") return Format::Table;
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw BadInput("--format: expected table, csv or json");
}

bool is_custom(const std::string& space) {
  return space.rfind("custom:", 0) == 0 || (space.size() > 5 && space.substr(space.size() - 5) == ".json");
}

DGAPresentation load_space(const Config& c, int truncation) {
  if (is_custom(c.space)) {
    DGAPresentation a = load_presentation(c.space.rfind("custom:", 0) == 0 ? c.space.substr(7) : c.space);
    if (c.ring_given && CoefficientRing::parse(c.ring) != a.ring)
      throw BadInput("--ring: the file declares ring " + a.ring.to_string());
    if (a.truncation < truncation)
      throw BadInput("truncation: the file stops at degree " + std::to_string(a.truncation) + ", need " +
                     std::to_string(truncation) + " for --max-degree " + std::to_string(c.max_degree));
    return a;
  }
  return catalog_dga(c.space, CoefficientRing::parse(c.ring), truncation);
}

std::string torsion_text(const HomologySummary& h, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < h.torsion.size(); ++i) s += (i ? sep : "") + h.torsion[i].get_str();
  return s;
}

// (Z/2)^3 + Z/4
std::string torsion_pretty(const HomologySummary& h) {
  if (h.torsion.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < h.torsion.size();) {
    std::size_t j = i;
    while (j < h.torsion.size() && h.torsion[j] == h.torsion[i]) ++j;
    s += (i ? " + " : "") + (j - i > 1 ? "(Z/" + h.torsion[i].get_str() + ")^" + std::to_string(j - i)
                                        : "Z/" + h.torsion[i].get_str());
    i = j;
  }
  return s;
}

json profile_json(const std::vector<HomologySummary>& p) {
  json rows = json::array();
  for (std::size_t n = 0; n < p.size(); ++n) {
    json tor = json::array();
    for (const auto& t : p[n].torsion) tor.push_back(t.get_str());
    rows.push_back({{"degree", n}, {"tau", minimal_generator_count(p[n])}, {"free_rank", p[n].free_rank}, {"torsion", tor}});
  }
  return rows;
}

void print_profile(const std::vector<HomologySummary>& p, Format f, std::ostream& out) {
  if (f == Format::Csv) {
    out << "degree,tau,free_rank,torsion\n";
    for (std::size_t n = 0; n < p.size(); ++n)
      out << n << "," << minimal_generator_count(p[n]) << "," << p[n].free_rank << "," << torsion_text(p[n], ";") << "\n";
    return;
  }
  out << std::left << std::setw(8) << "degree" << std::setw(8) << "tau" << std::setw(11) << "free_rank" << "torsion\n";
  for (std::size_t n = 0; n < p.size(); ++n)
    out << std::setw(8) << n << std::setw(8) << minimal_generator_count(p[n]) << std::setw(11) << p[n].free_rank
        << torsion_pretty(p[n]) << "\n";
}

int cmd_tor(const Config& c, Format f) {
  DGAPresentation a = load_space(c, c.max_degree + 2);
  auto p = tor_profile(a, c.max_degree);
  if (f == Format::Json) {
    std::cout << json{{"space", a.name}, {"ring", a.ring.to_string()}, {"max_degree", c.max_degree}, {"rows", profile_json(p)}}.dump(2)
              << "\n";
    return 0;
  }
  if (f == Format::Table) std::cout << "# Tor of " << a.name << " over " << a.ring.to_string() << "\n";
  print_profile(p, f, std::cout);
  return 0;
}

int cmd_loop_betti(const Config& c, Format f) {
  BettiReport r = dichotomy_report(load_space(c, c.max_degree + 2), c.max_degree);
  const std::string prediction = r.predicted_unbounded ? "unbounded" : "bounded";
  if (f == Format::Json) {
    json taus = r.taus;
    std::cout << json{{"space", r.space},
                      {"ring", r.ring.to_string()},
                      {"window", {{"first_degree", 0}, {"last_degree", r.window}, {"third", r.third}}},
                      {"taus", taus},
                      {"rows", profile_json(r.profile)},
                      {"generator_count", r.generator_count},
                      {"verdict", to_string(r.verdict)},
                      {"prediction", prediction},
                      {"prediction_applies", r.prediction_applies},
                      {"consistent", r.consistent()}}
                     .dump(2)
              << "\n";
    return 0;
  }
  if (f == Format::Csv) {
    print_profile(r.profile, f, std::cout);
    return 0;
  }
  std::cout << "# loop space Betti numbers of " << r.space << " over " << r.ring.to_string() << "\n";
  print_profile(r.profile, f, std::cout);
  std::cout << "algebra generators of reduced cohomology: " << r.generator_count << "\n"
            << "verdict: " << to_string(r.verdict) << " (max over degrees " << r.window + 1 - static_cast<int>(r.third)
            << ".." << r.window << " vs degrees 0.." << r.third - 1 << ")\n"
            << "prediction from generator count: " << prediction
            << (r.prediction_applies ? "" : " (not applied: torsion in the cohomology over Z)") << "\n";
  if (r.prediction_applies && !r.consistent()) std::cout << "note: verdict and prediction disagree in this window\n";
  return 0;
}

int cmd_series(const Config& c, Format f) {
  DGAPresentation a = load_space(c, c.max_degree + 2);
  PoincareSeries s;
  for (const auto& h : tor_profile(a, c.max_degree)) s.coeffs.push_back(minimal_generator_count(h));
  json out{{"space", a.name}, {"ring", a.ring.to_string()}, {"series", s.coeffs}};
  bool ok = true;
  std::ostringstream text;
  text << "S(T) = " << s.to_string() << "\n";
  if (!c.cocycle.empty()) {
    // The quotient check runs on the cobar model of the algebra over Q.
    const int T = c.max_degree + 3;
    Config qc = c;
    qc.ring = "Q";
    qc.ring_given = false;
    DGAPresentation aq = is_custom(c.space) ? load_space(c, T) : load_space(qc, T);
    aq.ring = CoefficientRing::rationals();
    std::optional<Generator> letter;
    for (const auto& g : aq.gens)
      if (g.name() == c.cocycle) letter = g;
    if (!letter) throw BadInput("--cocycle: no generator named '" + c.cocycle + "'");
    HgaOptions opts;
    opts.k_max = T;
    Generator y = cobar_generator(aq, {Word{*letter}});
    FilteredModelFragment frag = with_cup1_closure(cobar_fragment(aq, T, opts), y, opts);
    QuotientReport q = quotient_inequality_check(frag, y, c.max_degree, {}, opts);
    ok = q.holds && q.agrees;
    text << "quotient by " << q.y << " (k = " << q.k << "), over Q:\n"
         << "  H(V)        " << q.vbar.to_string() << "\n"
         << "  H(V/yV)     " << q.quotient.to_string() << "\n"
         << "  bound       " << q.bound.to_string() << "\n"
         << "  image I     " << q.image.to_string() << "\n";
    json lines = json::array();
    for (const auto& l : q.lines) {
      text << "  " << (l.ok ? "ok    " : "FAIL  ") << l.what << (l.detail.empty() ? "" : ": " + l.detail) << "\n";
      lines.push_back({{"check", l.what}, {"ok", l.ok}, {"detail", l.detail}});
    }
    out["quotient"] = {{"y", q.y},         {"k", q.k},
                       {"vbar", q.vbar.coeffs}, {"quotient", q.quotient.coeffs},
                       {"bound", q.bound.coeffs}, {"image", q.image.coeffs},
                       {"checks", lines}};
  }
  if (f == Format::Json) std::cout << out.dump(2) << "\n";
  else if (f == Format::Csv) {
    std::cout << "degree,coefficient\n";
    for (int n = 0; n <= s.truncation(); ++n) std::cout << n << "," << s.at(n) << "\n";
  } else {
    std::cout << text.str();
  }
  if (!ok) throw VerificationFailed("quotient inequality check failed");
  return 0;
}

struct Suite {
  std::vector<CheckLine> lines;
  void add(std::string what, bool ok, std::string detail = "") { lines.push_back({std::move(what), ok, std::move(detail)}); }
  bool ok() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.ok; });
  }
};

void print_suite(const Suite& s, Format f, const json& extra = json::object()) {
  if (f == Format::Json) {
    json out = extra;
    out["checks"] = json::array();
    for (const auto& l : s.lines) out["checks"].push_back({{"check", l.what}, {"ok", l.ok}, {"detail", l.detail}});
    out["ok"] = s.ok();
    std::cout << out.dump(2) << "\n";
  } else if (f == Format::Csv) {
    std::cout << "check,ok,detail\n";
    for (const auto& l : s.lines) std::cout << '"' << l.what << "\"," << (l.ok ? 1 : 0) << ",\"" << l.detail << "\"\n";
  } else {
    for (const auto& l : s.lines)
      std::cout << (l.ok ? "ok    " : "FAIL  ") << l.what << (l.detail.empty() ? "" : ": " + l.detail) << "\n";
  }
}

int cmd_check_axioms(const Config& c, Format f) {
  Suite s;
  const int N = c.max_degree;
  if (f == Format::Table) std::cout << "seed " << c.seed << "\n";

  // Bar d^2 on every catalog algebra.
  const std::vector<std::string> catalog = {"sphere:2", "sphere:3", "sphere:4", "wedge:S2,S3",
                                            "product:S2,S3", "moore:2,2", "moore:3,2"};
  for (const std::string r : {"Z", "F2", "F3"})
    for (const auto& name : catalog) {
      DGAPresentation a = catalog_dga(name, CoefficientRing::parse(r), N + 1);
      std::size_t words = 0;
      std::string bad;
      for (int n = 1; n <= N && bad.empty(); ++n)
        for (const auto& w : bar_basis(a, n)) {
          ++words;
          if (!bar_differential(bar_differential(w, a), a).is_zero()) {
            bad = to_string(w);
            break;
          }
        }
      s.add("bar d^2 = 0 on " + name + " over " + r + " (" + std::to_string(words) + " words)", bad.empty(), bad);
    }

  // hga axioms on free symbols over cocycles x (degree 2) and y (degree 3).
  Generator x = Generator::plain("x", 2), y = Generator::plain("y", 3);
  DerivationSpec d0;
  d0.set_image(x, {});
  d0.set_image(y, {});
  const DerivationSpec dh = with_hga_rules(d0);
  const int hd = std::min(N, 16);
  for (const auto& base : {std::vector<Generator>{x}, std::vector<Generator>{x, y}}) {
    auto syms = free_hga_symbols(base, hd, 1);
    FragmentReport rep = verify_hga_fragment(syms, dh, hd);
    s.add("d^2 = 0 on " + std::to_string(rep.checked) + " hga symbols over " + std::to_string(base.size()) +
              " cocycle(s) to degree " + std::to_string(hd),
          rep.ok, rep.failing ? rep.failing->name() : "");
  }
  for (int n = 2; n <= 5; ++n) {
    const Generator p = cup2_power(x, n).terms().begin()->first.front();
    Element rhs;
    for (int k = 1; k < n; ++k) rhs += cup1(cup2_power(x, k), cup2_power(x, n - k));
    s.add("d x^{U2 " + std::to_string(n) + "} is the cup-1 convolution", dh.image(p) == rhs);
  }

  // Sequence families and the perturbation identities.
  for (auto [which, mu, len, label] : std::vector<std::tuple<FamilyCase, long, int, std::string>>{
           {FamilyCase::I, 0, 6, "i"}, {FamilyCase::II, 0, 6, "ii"}, {FamilyCase::III, 2, 5, "iii mu=2"},
           {FamilyCase::III, 3, 5, "iii mu=3"}}) {
    SequenceParams p;
    p.mu = mu;
    SequenceFamily fam = sequence_family(which, p, len);
    std::size_t failed = 0;
    std::string first;
    for (const auto& l : verify_family(fam))
      if (!l.ok && failed++ == 0) first = l.what;
    s.add("family " + label + " length " + std::to_string(len) + " relations", failed == 0, first);
  }
  {
    SequenceParams p;
    p.mu = 2;
    p.base_res = -2;
    SequenceFamily fam = sequence_family(FamilyCase::III, p, 7);
    PerturbationReport rep = perturbation_check(sequence_fragment(fam, CoefficientRing::mod(2), 14));
    for (const auto& l : rep.lines) s.add("perturbation: " + l.what, l.ok, l.detail);
  }

  // Seeded sweep: random bar words and random bar-product pairs.
  std::mt19937_64 rng(c.seed);
  {
    std::size_t checked = 0;
    std::string bad;
    for (int i = 0; i < 200 && bad.empty(); ++i) {
      const auto& name = catalog[rng() % catalog.size()];
      DGAPresentation a = catalog_dga(name, CoefficientRing::integers(), N + 1);
      const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(N));
      auto words = bar_basis(a, n);
      if (words.empty()) continue;
      const auto& w = words[rng() % words.size()];
      ++checked;
      if (!bar_differential(bar_differential(w, a), a).is_zero()) bad = name + " " + to_string(w);
    }
    s.add("seeded sweep: bar d^2 = 0 on " + std::to_string(checked) + " random words", bad.empty(), bad);
  }
  {
    DGAPresentation fa;
    fa.name = "free";
    fa.mult = Multiplication::Free;
    fa.truncation = 10;
    Generator u = Generator::plain("u", 3), v = Generator::plain("v", 2), w = Generator::plain("w", 3),
              z = Generator::plain("z", 4);
    fa.gens = {v, u, w, z};
    DerivationSpec d;
    d.set_image(u, {});
    d.set_image(v, {});
    d.set_image(w, multiply(Element::of(v), Element::of(v)));
    d.set_image(z, multiply(Element::of(u), Element::of(v)) - multiply(Element::of(v), Element::of(u)));
    fa.diff = with_hga_rules(d);
    std::vector<BarWord> ws;
    for (int n = 1; n <= 4; ++n)
      for (const auto& bw : bar_basis(fa, n)) ws.push_back(bw);
    std::size_t checked = 0;
    std::string bad;
    for (int i = 0; i < 60 && bad.empty(); ++i) {
      const auto& p = ws[rng() % ws.size()];
      const auto& q = ws[rng() % ws.size()];
      if (bar_degree(p) + bar_degree(q) > 7) continue;
      ++checked;
      BarElement lhs = bar_differential(bar_product(p, q, fa), fa);
      BarElement rhs = bar_product(bar_differential(BarElement::of(p), fa), BarElement::of(q), fa) +
                       Integer(bar_degree(p) % 2 ? -1 : 1) *
                           bar_product(BarElement::of(p), bar_differential(BarElement::of(q), fa), fa);
      if (!(lhs == rhs)) bad = to_string(p) + " * " + to_string(q);
    }
    s.add("seeded sweep: bar product Leibniz on " + std::to_string(checked) + " random pairs", bad.empty(), bad);
  }

  print_suite(s, f, {{"seed", c.seed}, {"max_degree", N}});
  if (!s.ok()) throw VerificationFailed("axiom checks failed");
  return 0;
}

int cmd_sequences(const Config& c, Format f) {
  FamilyCase which;
  if (c.family == "i") which = FamilyCase::I;
  else if (c.family == "ii") which = FamilyCase::II;
  else if (c.family == "iii") which = FamilyCase::III;
  else throw BadInput("--case: expected i, ii or iii");
  SequenceParams p;
  p.mu = c.mu;
  p.base_degree = c.base_degree;
  p.base_res = c.base_res;
  SequenceFamily fam = sequence_family(which, p, c.length);
  Suite s;
  for (const auto& l : verify_family(fam)) s.lines.push_back(l);
  auto dsq = check_d_squared(fam.d, fam.generators, 1 << 20);
  s.add("d^2 = 0 on the " + std::to_string(dsq.checked) + " family generators", dsq.ok,
        dsq.failing ? dsq.failing->name() : "");

  json members = json::array();
  std::ostringstream text;
  for (int n = 0; n <= c.length; ++n) {
    json m{{"n", n}, {"b", fam.b[n].to_string()}};
    text << "b" << n << " = " << fam.b[n].to_string() << "\n";
    auto show = [&](const char* key, const std::vector<Element>& v, const std::string& label) {
      if (static_cast<int>(v.size()) > n && !v[n].is_zero()) {
        m[key] = v[n].to_string();
        text << "  " << label << " = " << v[n].to_string() << "\n";
      }
    };
    show("witness", fam.witness, "f" + std::to_string(n));
    show("omega", fam.omega, "omega" + std::to_string(n));
    show("c", fam.c, "c" + std::to_string(n));
    show("a", fam.a, "a" + std::to_string(n));
    members.push_back(m);
  }
  json images = json::object();
  for (const auto& g : fam.generators)
    if (fam.d.has_image(g)) {
      images[g.name()] = fam.d.image(g).to_string();
      text << "d " << g.name() << " = " << fam.d.image(g).to_string() << "\n";
    }
  if (f == Format::Table) std::cout << text.str();
  print_suite(s, f, {{"case", c.family}, {"mu", c.mu}, {"base_degree", c.base_degree}, {"length", c.length},
                     {"members", members}, {"differential", images}});
  if (!s.ok()) throw VerificationFailed("family relations failed");
  return 0;
}

int cmd_fis(const Config& c, Format f) {
  // x(n) has degree (n + 1)|x| - n; the search looks one degree below.
  DGAPresentation probe = load_space(c, c.max_degree + 2);
  std::optional<Generator> letter;
  for (const auto& g : probe.gens)
    if (c.generator.empty() ? true : g.name() == c.generator) {
      letter = g;
      break;
    }
  if (!letter) throw BadInput("--generator: no generator named '" + c.generator + "'");
  const int xdeg = letter->degree();  // v[x] has the same total degree
  const int T = (c.length + 1) * xdeg - c.length + 1;
  DGAPresentation a = load_space(c, std::max(T, c.max_degree + 2));
  for (const auto& g : a.gens)
    if (g.name() == letter->name()) letter = g;
  HgaOptions opts;
  opts.k_max = c.length + 2;
  FilteredModelFragment frag = cobar_fragment(a, a.truncation, opts);
  Generator x = cobar_generator(a, {Word{*letter}});
  FISRecord rec = fis_start(x);
  json steps = json::array();
  std::ostringstream text;
  text << "f.i.s. of " << x.name() << " in the cobar model of " << a.name << " over " << a.ring.to_string() << "\n";
  for (int n = 1; n <= c.length; ++n) {
    rec = fis_extend(rec, frag, opts);
    const auto& cert = rec.certificates.back();
    json step{{"n", n}, {"terms", rec.members.back().size()}};
    if (std::holds_alternative<PowerCase>(cert)) {
      step["case"] = "power";
      text << "x(" << n << "): power, " << rec.members.back().size() << " terms\n";
    } else {
      const auto& rc = std::get<RelationCase>(cert);
      step["case"] = "relation";
      step["mu_prime"] = rc.mu_prime.get_str();
      step["member"] = rec.members.back().to_string();
      text << "x(" << n << "): relation with mu' = " << rc.mu_prime << ", x(" << n << ") = " << rec.members.back().to_string()
           << "\n";
    }
    steps.push_back(step);
  }
  if (f == Format::Json) std::cout << json{{"x", x.name()}, {"space", a.name}, {"steps", steps}}.dump(2) << "\n";
  else if (f == Format::Csv) {
    std::cout << "n,case,terms\n";
    for (const auto& st : steps) std::cout << st["n"] << "," << st["case"].get<std::string>() << "," << st["terms"] << "\n";
  } else {
    std::cout << text.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Betti numbers of loop spaces from small DGA models"};
  app.require_subcommand(1);
  Config c;
  // default_val writes through immediately, so each subcommand keeps its own N.
  std::map<CLI::App*, int> degrees;

  auto space_opts = [&](CLI::App* sub, int default_degree) {
    sub->add_option("space", c.space, "catalog name (sphere:3, wedge:S2,S2, moore:2,2, ...) or custom:<file.json>")
        ->required();
    sub->add_option("--ring", c.ring, "coefficients: Z, Q, F<p>, Z/<m>")->each([&](const std::string&) { c.ring_given = true; });
    sub->add_option("--max-degree,-N", degrees[sub], "top degree N")->default_val(default_degree);
  };
  auto format_opt = [&](CLI::App* sub) { sub->add_option("--format", c.format, "table, csv or json")->default_val("table"); };

  auto* tor = app.add_subcommand("tor", "Tor of the algebra: tau_i with free rank and torsion");
  space_opts(tor, 10);
  format_opt(tor);
  auto* lb = app.add_subcommand("loop-betti", "Betti report with growth verdict and generator-count prediction");
  space_opts(lb, 10);
  format_opt(lb);
  auto* series = app.add_subcommand("series", "Poincare series, optionally with the quotient inequality check");
  space_opts(series, 8);
  format_opt(series);
  series->add_option("--cocycle", c.cocycle, "generator x; checks the quotient by v[x] in the cobar model");
  auto* axioms = app.add_subcommand("check-axioms", "d^2 suites, hga axioms, perturbation identities, seeded sweeps");
  axioms->add_option("--seed", c.seed, "seed for the randomized sweeps")->default_val(1);
  axioms->add_option("--max-degree,-N", degrees[axioms], "top degree")->default_val(12);
  format_opt(axioms);
  auto* seq = app.add_subcommand("sequences", "explicit sequence families with verified relations");
  seq->add_option("--case", c.family, "i, ii or iii")->required();
  seq->add_option("--mu", c.mu, "case iii: d b0 = mu c")->default_val(0);
  seq->add_option("--base-degree", c.base_degree, "odd degree of b0")->default_val(3);
  seq->add_option("--base-res", c.base_res, "case iii: resolution degree of b0")->default_val(-1);
  seq->add_option("--length", c.length, "last index")->default_val(5);
  format_opt(seq);
  auto* fis = app.add_subcommand("fis", "formal implication sequence of v[x] in the cobar model");
  space_opts(fis, 4);
  fis->add_option("--generator", c.generator, "odd-degree algebra generator x (default: the first)");
  fis->add_option("--length", c.length, "number of steps")->default_val(5);
  format_opt(fis);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (const auto& [sub, n] : degrees)
    if (sub->parsed()) c.max_degree = n;

  try {
    if (c.max_degree < 2) throw BadInput("--max-degree: N must be at least 2");
    CoefficientRing::parse(c.ring);
    const Format f = parse_format(c.format);
    if (*tor) return cmd_tor(c, f);
    if (*lb) return cmd_loop_betti(c, f);
    if (*series) return cmd_series(c, f);
    if (*axioms) return cmd_check_axioms(c, f);
    if (*seq) return cmd_sequences(c, f);
    if (*fis) return cmd_fis(c, f);
  } catch (const VerificationFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Obstructed& e) {
    std::cerr << "obstructed: " << e.what() << "\n";
    return 1;
  } catch (const BadInput& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
