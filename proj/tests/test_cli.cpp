#include <doctest.h>

#include "loopbetti/analysis.hpp"
#include "loopbetti/presentation_io.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <sstream>

using namespace loopbetti;

namespace {

const std::string cli = LOOPBETTI_CLI;
const std::string data = LOOPBETTI_EXAMPLES;

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, bool with_stderr = false) {
  std::string cmd = "'" + cli + "' " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string bad_input_message(const std::string& file) {
  try {
    load_presentation(data + "/" + file);
  } catch (const BadInput& e) {
    return e.what();
  }
  return "";
}

std::vector<std::vector<std::string>> split_rows(const std::string& text, char sep) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    if (sep == ',') {
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
    } else {
      std::istringstream ls(line);
      while (ls >> cell) cells.push_back(cell);
    }
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("presentation files round trip") {
  auto m = catalog_dga("moore:2,2", CoefficientRing::integers(), 12);
  std::istringstream in(write_presentation(m));
  auto back = read_presentation(in);
  CHECK(back.gens == m.gens);
  CHECK(back.truncation == 12);
  CHECK(back.ring == m.ring);
  CHECK(write_presentation(back) == write_presentation(m));
  auto t1 = tor_profile(m, 8), t2 = tor_profile(back, 8);
  CHECK(t1 == t2);

  auto s = load_presentation(data + "/s2xs2.json");
  CHECK(s.gens.size() == 3);
  CHECK(count_algebra_generators(s, 10) == 2);
  std::istringstream again(write_presentation(s));
  CHECK(write_presentation(read_presentation(again)) == write_presentation(s));

  auto mf = load_presentation(data + "/moore22.json");
  CHECK(tor_profile(mf, 7) == tor_profile(catalog_dga("moore:2,2", CoefficientRing::prime_field(2), 12), 7));
}

TEST_CASE("presentation diagnostics") {
  CHECK(bad_input_message("bad_degree.json").find("generators[1].degree") != std::string::npos);
  CHECK(bad_input_message("bad_syntax.json").find(":7:") != std::string::npos);
  CHECK(bad_input_message("bad_leibniz.json").find("Leibniz") != std::string::npos);
  CHECK(bad_input_message("no_such_file.json").find("cannot open") != std::string::npos);

  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_presentation(in);
    } catch (const BadInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string head = R"({"format": 1, "ring": "Z", "truncation": 8, )";
  CHECK(parse(head + R"("generators": [{"name": "a", "degree": 1}]})").find("degrees start at 2") != std::string::npos);
  CHECK(parse(head + R"("generators": [{"name": "1a", "degree": 2}]})").find("generators[0].name") != std::string::npos);
  CHECK(parse(head + R"("generators": [{"name": "a", "degree": 2}], "differential": {"a": [[1, ["z"]]]}})")
            .find("unknown generator 'z'") != std::string::npos);
  CHECK(parse(R"({"format": 2})").find("format") != std::string::npos);
  CHECK(parse(R"({"format": 1, "ring": "Z/1", "truncation": 8, "generators": []})").find("ring") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run("tor sphere:3 --ring Z --max-degree 6").status == 0);
  CHECK(run("loop-betti wedge:S2,S2 --ring Q --max-degree 6").status == 0);
  CHECK(run("sequences --case iii --mu 2 --base-degree 3 --length 4").status == 0);
  CHECK(run("series moore:2,2 --ring Q --cocycle b --max-degree 9").status == 0);
  CHECK(run("fis sphere:3 --ring Q --length 2").status == 0);
  CHECK(run("check-axioms --seed 3 --max-degree 8").status == 0);

  CHECK(run("fis moore:2,2 --ring Z/2 --generator b --length 2").status == 1);

  CHECK(run("tor nope:3").status == 2);
  CHECK(run("tor sphere:3 --ring Z/1").status == 2);
  CHECK(run("tor sphere:3 --frobnicate").status == 2);
  CHECK(run("tor '" + data + "/bad_degree.json'").status == 2);
  Run diag = run("tor '" + data + "/bad_syntax.json'", true);
  CHECK(diag.status == 2);
  CHECK(diag.out.find("malformed JSON") != std::string::npos);
}

TEST_CASE("reports") {
  Run s3 = run("loop-betti sphere:3 --ring Z --max-degree 20");
  CHECK(s3.out.find("BoundedSoFar") != std::string::npos);
  Run w = run("loop-betti wedge:S2,S2 --ring Q --max-degree 10 --format csv");
  CHECK(w.status == 0);
  auto rows = split_rows(w.out, ',');
  REQUIRE(rows.size() >= 12);
  CHECK(rows[0] == std::vector<std::string>{"degree", "tau", "free_rank", "torsion"});
  for (int i = 0; i <= 10; ++i) CHECK(rows[1 + i][1] == std::to_string(1 << i));
  Run wt = run("loop-betti wedge:S2,S2 --ring Q --max-degree 10");
  CHECK(wt.out.find("GrowthDetected") != std::string::npos);

  Run seq = run("sequences --case iii --mu 2 --base-degree 3 --length 5");
  CHECK(seq.status == 0);
  CHECK(seq.out.find("FAIL") == std::string::npos);

  Run axioms = run("check-axioms --seed 41 --max-degree 8");
  CHECK(axioms.out.find("41") != std::string::npos);
}

TEST_CASE("table and csv agree with the library") {
  for (const std::string& space : std::vector<std::string>{"moore:2,2 --ring Z", "sphere:2 --ring Z", "wedge:M2_2,S2 --ring F2",
                            "custom:" + data + "/s2xs2.json"}) {
    Run table = run("tor " + space + " --max-degree 6");
    Run csv = run("tor " + space + " --max-degree 6 --format csv");
    REQUIRE(table.status == 0);
    REQUIRE(csv.status == 0);
    auto t = split_rows(table.out, ' ');
    auto c = split_rows(csv.out, ',');
    REQUIRE(t.size() == 8);
    REQUIRE(c.size() == 8);
    for (std::size_t i = 1; i < 8; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(t[i][j] == c[i][j]);
  }
  auto lib = tor_profile(catalog_dga("moore:2,2", CoefficientRing::integers(), 8), 6);
  auto c = split_rows(run("tor moore:2,2 --ring Z --max-degree 6 --format csv").out, ',');
  for (int n = 0; n <= 6; ++n) {
    CHECK(c[1 + n][1] == std::to_string(minimal_generator_count(lib[n])));
    CHECK(c[1 + n][2] == std::to_string(lib[n].free_rank));
  }
}

TEST_CASE("output is deterministic") {
  for (const std::string& args : std::vector<std::string>{"check-axioms --seed 9 --max-degree 8", "loop-betti moore:2,2 --ring F2 --max-degree 7 --format json",
                           "sequences --case i --length 4"}) {
    Run a = run(args), b = run(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
  }
}
