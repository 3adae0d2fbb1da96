#include "loopbetti/presentation_io.hpp"

#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>

namespace loopbetti {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw BadInput(where + ": " + what); }

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) fail(path, "missing field '" + key + "'");
  return obj.at(key);
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

Integer as_coefficient(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Integer(v.get<long>());
  if (v.is_string()) {
    Integer c;
    if (c.set_str(v.get<std::string>(), 10) != 0) fail(path, "expected an integer coefficient");
    return c;
  }
  fail(path, "expected an integer coefficient");
}

Element parse_terms(const json& v, const std::string& path, const std::map<std::string, Generator>& gens,
                    bool single_letter) {
  if (!v.is_array()) fail(path, "expected a list of [coefficient, [letters]] terms");
  Element e;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& t = v[i];
    if (!t.is_array() || t.size() != 2) fail(p, "expected [coefficient, [letters]]");
    Integer c = as_coefficient(t[0], p + "[0]");
    if (!t[1].is_array()) fail(p + "[1]", "expected a list of generator names");
    Word w;
    for (std::size_t j = 0; j < t[1].size(); ++j) {
      const std::string lp = p + "[1][" + std::to_string(j) + "]";
      if (!t[1][j].is_string()) fail(lp, "expected a generator name");
      auto it = gens.find(t[1][j].get<std::string>());
      if (it == gens.end()) fail(lp, "unknown generator '" + t[1][j].get<std::string>() + "'");
      w.push_back(it->second);
    }
    if (w.empty()) fail(p + "[1]", "the unit is not allowed in an augmentation ideal");
    if (single_letter && w.size() != 1) fail(p + "[1]", "table algebras take exactly one letter per term");
    e.add_term(w, c);
  }
  return e;
}

}  // namespace

DGAPresentation read_presentation(std::istream& in, const std::string& source) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw BadInput(source + ":" + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": malformed JSON");
  }
  if (!doc.is_object()) fail("(root)", "expected an object");
  if (as_int(field(doc, "format", "(root)"), "format") != 1) fail("format", "only format 1 is supported");

  DGAPresentation a;
  a.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "custom";
  const json& ring = field(doc, "ring", "(root)");
  if (!ring.is_string()) fail("ring", "expected a ring such as Z, Q, F2 or Z/4");
  try {
    a.ring = CoefficientRing::parse(ring.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail("ring", e.what());
  }
  if (doc.contains("multiplication")) {
    const json& m = doc["multiplication"];
    if (m == "table") a.mult = Multiplication::Table;
    else if (m == "free") a.mult = Multiplication::Free;
    else fail("multiplication", "expected \"table\" or \"free\"");
  }
  a.truncation = as_int(field(doc, "truncation", "(root)"), "truncation");
  if (a.truncation < 2) fail("truncation", "must be at least 2");

  const json& gl = field(doc, "generators", "(root)");
  if (!gl.is_array() || gl.empty()) fail("generators", "expected a nonempty list");
  static const std::regex name_re("[A-Za-z][A-Za-z0-9_^]*");
  std::map<std::string, Generator> gens;
  for (std::size_t i = 0; i < gl.size(); ++i) {
    const std::string p = "generators[" + std::to_string(i) + "]";
    if (!gl[i].is_object()) fail(p, "expected {name, degree}");
    const json& nm = field(gl[i], "name", p);
    if (!nm.is_string() || !std::regex_match(nm.get<std::string>(), name_re))
      fail(p + ".name", "names are a letter followed by letters, digits, '_' or '^'");
    const int deg = as_int(field(gl[i], "degree", p), p + ".degree");
    if (deg < 2) fail(p + ".degree", "degrees start at 2");
    Generator g = Generator::plain(nm.get<std::string>(), deg);
    if (!gens.emplace(g.name(), g).second) fail(p + ".name", "duplicate generator '" + g.name() + "'");
    a.gens.push_back(g);
    a.weight[g] = gl[i].contains("weight") ? as_int(gl[i]["weight"], p + ".weight") : 1;
  }
  const bool table = a.mult == Multiplication::Table;
  for (const auto& g : a.gens) a.diff.set_image(g, {});
  if (doc.contains("differential")) {
    const json& d = doc["differential"];
    if (!d.is_object()) fail("differential", "expected an object keyed by generator name");
    for (const auto& [key, val] : d.items()) {
      const std::string p = "differential." + key;
      auto it = gens.find(key);
      if (it == gens.end()) fail(p, "unknown generator '" + key + "'");
      Element img = parse_terms(val, p, gens, table);
      if (!img.is_zero() && img.degree() != it->second.degree() + 1)
        fail(p, "image must have degree " + std::to_string(it->second.degree() + 1));
      a.diff.set_image(it->second, img);
    }
  }
  if (doc.contains("products")) {
    if (!table) fail("products", "free algebras have no product table");
    const json& pl = doc["products"];
    if (!pl.is_array()) fail("products", "expected a list");
    for (std::size_t i = 0; i < pl.size(); ++i) {
      const std::string p = "products[" + std::to_string(i) + "]";
      auto name = [&](const char* key) {
        const json& v = field(pl[i], key, p);
        if (!v.is_string() || !gens.count(v.get<std::string>())) fail(p + "." + key, "unknown generator");
        return gens.at(v.get<std::string>());
      };
      Generator l = name("left"), r = name("right");
      Element val = parse_terms(field(pl[i], "value", p), p + ".value", gens, true);
      if (!val.is_zero() && val.degree() != l.degree() + r.degree())
        fail(p + ".value", "value must have degree " + std::to_string(l.degree() + r.degree()));
      if (!a.table.emplace(std::pair{l, r}, val).second) fail(p, "product listed twice");
    }
  }
  try {
    a.validate();
  } catch (const BadParams& e) {
    fail(source, e.what());
  }
  return a;
}

DGAPresentation load_presentation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput(path + ": cannot open file");
  return read_presentation(in, path);
}

std::string write_presentation(const DGAPresentation& a) {
  auto terms = [](const Element& e) {
    json out = json::array();
    for (const auto& [w, c] : e.terms()) {
      json letters = json::array();
      for (const auto& g : w) letters.push_back(g.name());
      json coef = c.fits_slong_p() ? json(c.get_si()) : json(c.get_str());
      out.push_back(json::array({coef, letters}));
    }
    return out;
  };
  json doc;
  doc["format"] = 1;
  doc["name"] = a.name;
  doc["ring"] = a.ring.to_string();
  doc["multiplication"] = a.mult == Multiplication::Table ? "table" : "free";
  doc["generators"] = json::array();
  for (const auto& g : a.gens)
    doc["generators"].push_back({{"name", g.name()}, {"degree", g.degree()}, {"weight", a.weight_of(Word{g})}});
  doc["differential"] = json::object();
  for (const auto& g : a.gens)
    if (a.diff.has_image(g) && !a.diff.image(g).is_zero()) doc["differential"][g.name()] = terms(a.diff.image(g));
  doc["products"] = json::array();
  for (const auto& [key, val] : a.table)
    doc["products"].push_back({{"left", key.first.name()}, {"right", key.second.name()}, {"value", terms(val)}});
  doc["truncation"] = a.truncation;
  return doc.dump(2) + "\n";
}

}  // namespace loopbetti
