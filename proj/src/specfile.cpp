#include "critfan/specfile.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace critfan {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw InvalidSpecFile(msg); }

bool bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// ---- TOML subset ----------------------------------------------------------

struct TomlParser {
  int line = 0;

  [[noreturn]] void err(const std::string& msg) {
    fail("line " + std::to_string(line) + ": " + msg);
  }

  static std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::string strip_comment(const std::string& raw) {
    bool in_str = false;
    for (size_t i = 0; i < raw.size(); ++i) {
      char c = raw[i];
      if (in_str && c == '\\') {
        ++i;
        continue;
      }
      if (c == '"') in_str = !in_str;
      if (!in_str && c == '#') return raw.substr(0, i);
    }
    if (in_str) err("unterminated string");
    return raw;
  }

  void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }

  std::string parse_bare_key(const std::string& s, size_t& i) {
    size_t start = i;
    while (i < s.size() && bare_key_char(s[i])) ++i;
    if (i == start) err("expected a key");
    return s.substr(start, i - start);
  }

  std::vector<std::string> parse_key_path(const std::string& s, size_t& i) {
    std::vector<std::string> path;
    for (;;) {
      skip_ws(s, i);
      path.push_back(parse_bare_key(s, i));
      skip_ws(s, i);
      if (i < s.size() && s[i] == '.') {
        ++i;
        continue;
      }
      return path;
    }
  }

  json parse_string(const std::string& s, size_t& i) {
    ++i;
    std::string out;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\') {
        ++i;
        if (i >= s.size()) err("bad escape");
        switch (s[i]) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: err("unsupported escape");
        }
      } else {
        out += s[i];
      }
      ++i;
    }
    if (i >= s.size()) err("unterminated string");
    ++i;
    return json(out);
  }

  json parse_value(const std::string& s, size_t& i) {
    skip_ws(s, i);
    if (i >= s.size()) err("missing value");
    char c = s[i];
    if (c == '"') return parse_string(s, i);
    if (c == '[') {
      ++i;
      json arr = json::array();
      skip_ws(s, i);
      if (i < s.size() && s[i] == ']') {
        ++i;
        return arr;
      }
      for (;;) {
        arr.push_back(parse_value(s, i));
        skip_ws(s, i);
        if (i < s.size() && s[i] == ',') {
          ++i;
          skip_ws(s, i);
          if (i < s.size() && s[i] == ']') {
            ++i;
            return arr;
          }
          continue;
        }
        if (i < s.size() && s[i] == ']') {
          ++i;
          return arr;
        }
        err("expected ',' or ']' in array");
      }
    }
    if (c == '{') {
      ++i;
      json obj = json::object();
      skip_ws(s, i);
      if (i < s.size() && s[i] == '}') {
        ++i;
        return obj;
      }
      for (;;) {
        skip_ws(s, i);
        std::string key = parse_bare_key(s, i);
        skip_ws(s, i);
        if (i >= s.size() || s[i] != '=') err("expected '=' in inline table");
        ++i;
        if (obj.contains(key)) err("duplicate key \"" + key + "\"");
        obj[key] = parse_value(s, i);
        skip_ws(s, i);
        if (i < s.size() && s[i] == ',') {
          ++i;
          continue;
        }
        if (i < s.size() && s[i] == '}') {
          ++i;
          return obj;
        }
        err("expected ',' or '}' in inline table");
      }
    }
    if (s.compare(i, 4, "true") == 0 && (i + 4 >= s.size() || !bare_key_char(s[i + 4]))) {
      i += 4;
      return json(true);
    }
    if (s.compare(i, 5, "false") == 0 && (i + 5 >= s.size() || !bare_key_char(s[i + 5]))) {
      i += 5;
      return json(false);
    }
    size_t start = i;
    bool is_float = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                            s[i] == '.' || s[i] == 'e' || s[i] == 'E' ||
                            ((s[i] == '+' || s[i] == '-') &&
                             (s[i - 1] == 'e' || s[i - 1] == 'E')))) {
      if (s[i] == '.' || s[i] == 'e' || s[i] == 'E') is_float = true;
      ++i;
    }
    if (i == start || (i == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
      err("cannot parse value");
    std::string tok = s.substr(start, i - start);
    try {
      if (is_float) return json(std::stod(tok));
      return json(std::stoll(tok));
    } catch (const std::exception&) {
      err("cannot parse number \"" + tok + "\"");
    }
  }

  json* navigate(json* node, const std::vector<std::string>& path, size_t upto) {
    for (size_t k = 0; k < upto; ++k) {
      json& cur = *node;
      if (!cur.contains(path[k])) cur[path[k]] = json::object();
      json& next = cur[path[k]];
      if (next.is_array()) {
        if (next.empty()) err("empty table array \"" + path[k] + "\"");
        node = &next.back();
      } else if (next.is_object()) {
        node = &next;
      } else {
        err("key \"" + path[k] + "\" is not a table");
      }
    }
    return node;
  }

  json parse(const std::string& text) {
    json root = json::object();
    json* current = &root;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = trim(strip_comment(raw));
      if (s.empty()) continue;
      if (s.front() == '[') {
        bool array_header = s.size() > 1 && s[1] == '[';
        std::string close = array_header ? "]]" : "]";
        if (s.size() < 2 + 2 * close.size() ||
            s.compare(s.size() - close.size(), close.size(), close) != 0)
          err("malformed table header");
        std::string inner = s.substr(array_header ? 2 : 1,
                                     s.size() - 2 * (array_header ? 2 : 1));
        size_t i = 0;
        std::vector<std::string> path = parse_key_path(inner, i);
        skip_ws(inner, i);
        if (i != inner.size()) err("malformed table header");
        json* parent = navigate(&root, path, path.size() - 1);
        const std::string& last = path.back();
        if (array_header) {
          if (!parent->contains(last)) (*parent)[last] = json::array();
          json& arr = (*parent)[last];
          if (!arr.is_array()) err("key \"" + last + "\" is not a table array");
          arr.push_back(json::object());
          current = &arr.back();
        } else {
          if (parent->contains(last)) err("duplicate table \"" + last + "\"");
          (*parent)[last] = json::object();
          current = &(*parent)[last];
        }
        continue;
      }
      size_t i = 0;
      std::vector<std::string> path = parse_key_path(s, i);
      skip_ws(s, i);
      if (i >= s.size() || s[i] != '=') err("expected '='");
      ++i;
      json val = parse_value(s, i);
      skip_ws(s, i);
      if (i != s.size()) err("trailing content after value");
      json* parent = navigate(current, path, path.size() - 1);
      if (parent->contains(path.back()))
        err("duplicate key \"" + path.back() + "\"");
      (*parent)[path.back()] = std::move(val);
    }
    return root;
  }
};

// ---- schema validation ----------------------------------------------------

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path + ": expected a table");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || key == k;
    if (!ok) fail(path + "." + key + ": unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + "." + key + ": missing");
  return obj[key];
}

long long as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path + ": expected an integer");
  return v.get<long long>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path + ": expected a number");
  return v.get<double>();
}

Rational as_rational(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return rational_from_string(v.get<std::string>());
    } catch (const std::exception& e) {
      fail(path + ": " + e.what());
    }
  }
  fail(path + ": expected an integer or a rational string like \"-3/2\"");
}

QVec as_rational_vector(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path + ": expected an array");
  QVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out[Eigen::Index(i)] = as_rational(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

GroupSpec parse_group(const json& doc) {
  const json& jg = require(doc, "spec", "group");
  if (!jg.is_array() || jg.empty()) fail("spec.group: expected a nonempty array");
  GroupSpec g;
  for (size_t i = 0; i < jg.size(); ++i) {
    std::string path = "spec.group[" + std::to_string(i) + "]";
    expect_keys(jg[i], path, {"family", "rank"});
    const json& jf = require(jg[i], path, "family");
    if (!jf.is_string()) fail(path + ".family: expected a string");
    Family fam;
    try {
      fam = family_from_name(jf.get<std::string>());
    } catch (const std::exception& e) {
      fail(path + ".family: " + e.what());
    }
    long long rank = as_int(require(jg[i], path, "rank"), path + ".rank");
    if (rank < 1) fail(path + ".rank: must be positive");
    g.factors.push_back({fam, int(rank)});
  }
  return g;
}

int group_dim(const GroupSpec& g) {
  int d = 0;
  for (const GroupFactor& f : g.factors) d += f.rank;
  return d;
}

RepExpr parse_rep(const json& jr, const std::string& path, const GroupSpec& g) {
  if (!jr.is_object()) fail(path + ": expected a table");
  const json& jk = require(jr, path, "kind");
  if (!jk.is_string()) fail(path + ".kind: expected a string");
  std::string kind = jk.get<std::string>();
  auto factor_of = [&]() {
    long long f = 0;
    if (jr.contains("factor")) f = as_int(jr["factor"], path + ".factor");
    if (f < 0 || f >= (long long)g.factors.size())
      fail(path + ".factor: index " + std::to_string(f) + " out of range");
    return int(f);
  };
  if (kind == "std") {
    expect_keys(jr, path, {"kind", "factor"});
    return rep_std(factor_of());
  }
  if (kind == "adjoint") {
    expect_keys(jr, path, {"kind", "factor"});
    return rep_adjoint(factor_of());
  }
  if (kind == "dual") {
    expect_keys(jr, path, {"kind", "arg"});
    return rep_dual(parse_rep(require(jr, path, "arg"), path + ".arg", g));
  }
  if (kind == "sum") {
    expect_keys(jr, path, {"kind", "args"});
    const json& ja = require(jr, path, "args");
    if (!ja.is_array() || ja.empty()) fail(path + ".args: expected a nonempty array");
    std::vector<RepExpr> parts;
    for (size_t i = 0; i < ja.size(); ++i)
      parts.push_back(parse_rep(ja[i], path + ".args[" + std::to_string(i) + "]", g));
    return rep_sum(std::move(parts));
  }
  if (kind == "mult") {
    expect_keys(jr, path, {"kind", "n", "arg"});
    long long n = as_int(require(jr, path, "n"), path + ".n");
    if (n < 1) fail(path + ".n: must be positive");
    return rep_mult(parse_rep(require(jr, path, "arg"), path + ".arg", g), int(n));
  }
  if (kind == "weights") {
    expect_keys(jr, path, {"kind", "entries"});
    const json& je = require(jr, path, "entries");
    if (!je.is_array() || je.empty())
      fail(path + ".entries: expected a nonempty array");
    std::vector<std::pair<QVec, long>> entries;
    for (size_t i = 0; i < je.size(); ++i) {
      std::string p = path + ".entries[" + std::to_string(i) + "]";
      expect_keys(je[i], p, {"weight", "multiplicity"});
      QVec w = as_rational_vector(require(je[i], p, "weight"), p + ".weight");
      if (w.size() != group_dim(g))
        fail(p + ".weight: expected " + std::to_string(group_dim(g)) + " entries");
      long long m = 1;
      if (je[i].contains("multiplicity"))
        m = as_int(je[i]["multiplicity"], p + ".multiplicity");
      if (m < 1) fail(p + ".multiplicity: must be positive");
      entries.emplace_back(std::move(w), long(m));
    }
    return rep_weights(std::move(entries));
  }
  fail(path + ".kind: unknown kind \"" + kind + "\"");
}

ShiftSpec parse_shift(const json& doc, const GroupSpec& g) {
  if (!doc.contains("shift")) return {ShiftMode::None, {}};
  const json& js = doc["shift"];
  if (js.is_string()) {
    std::string s = js.get<std::string>();
    if (s == "none") return {ShiftMode::None, {}};
    if (s == "haar") return {ShiftMode::Haar, {}};
    fail("spec.shift: expected \"none\", \"haar\", or a coefficient array");
  }
  if (js.is_array()) {
    QVec v = as_rational_vector(js, "spec.shift");
    if (v.size() != group_dim(g))
      fail("spec.shift: expected " + std::to_string(group_dim(g)) + " coefficients");
    return {ShiftMode::Custom, v};
  }
  fail("spec.shift: expected \"none\", \"haar\", or a coefficient array");
}

}  // namespace

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read \"" + path + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::ordered_json toml_to_json(const std::string& text) {
  TomlParser p;
  return p.parse(text);
}

AnalysisSpecFile spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("spec: expected a table at top level");
  expect_keys(doc, "spec", {"group", "representation", "shift", "options"});
  AnalysisSpecFile out;
  out.group = parse_group(doc);
  out.representation =
      parse_rep(require(doc, "spec", "representation"), "spec.representation", out.group);
  out.shift = parse_shift(doc, out.group);
  if (doc.contains("options")) {
    const json& jo = doc["options"];
    expect_keys(jo, "spec.options",
                {"refine", "derivative_of", "simulate", "grid"});
    if (jo.contains("refine")) {
      if (!jo["refine"].is_boolean()) fail("spec.options.refine: expected a boolean");
      out.refine = jo["refine"].get<bool>();
    }
    if (jo.contains("simulate")) {
      if (!jo["simulate"].is_boolean())
        fail("spec.options.simulate: expected a boolean");
      out.simulate = jo["simulate"].get<bool>();
    }
    if (jo.contains("derivative_of")) {
      QVec v = as_rational_vector(jo["derivative_of"], "spec.options.derivative_of");
      if (v.size() != group_dim(out.group))
        fail("spec.options.derivative_of: expected " +
             std::to_string(group_dim(out.group)) + " entries");
      out.derivative_of = v;
    }
    if (jo.contains("grid")) {
      const json& jgr = jo["grid"];
      expect_keys(jgr, "spec.options.grid", {"t_min", "t_max", "points"});
      if (jgr.contains("t_min"))
        out.grid.t_min = as_number(jgr["t_min"], "spec.options.grid.t_min");
      if (jgr.contains("t_max"))
        out.grid.t_max = as_number(jgr["t_max"], "spec.options.grid.t_max");
      if (jgr.contains("points")) {
        long long p = as_int(jgr["points"], "spec.options.grid.points");
        if (p < 2 || p > 10000) fail("spec.options.grid.points: out of range");
        out.grid.points = int(p);
      }
      if (!(out.grid.t_min > 0.0) || !(out.grid.t_max > out.grid.t_min))
        fail("spec.options.grid: need 0 < t_min < t_max");
    }
  }
  return out;
}

AnalysisSpecFile parse_spec_text(const std::string& text, bool toml) {
  if (toml) return spec_from_json(toml_to_json(text));
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("JSON parse error: ") + e.what());
  }
  return spec_from_json(doc);
}

AnalysisSpecFile load_spec_file(const std::string& path) {
  bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
  return parse_spec_text(slurp_file(path), toml);
}

}  // namespace critfan
