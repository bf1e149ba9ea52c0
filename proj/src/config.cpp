#include "seqent/config.hpp"

#include <fstream>
#include <set>

#include "seqent/error.hpp"

namespace seqent {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

const json& field(const json& j, const std::string& where, const char* key) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing");
  return *it;
}

const json* optional_field(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::int64_t get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t get_uint(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail(where, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

Rational get_rational(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
}

const json& get_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

std::vector<std::int64_t> get_ints(const json& j, const std::string& where) {
  std::vector<std::int64_t> out;
  const json& a = get_array(j, where);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(get_int(a[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::int64_t positive(std::int64_t v, const std::string& where) {
  if (v < 1) fail(where, "must be >= 1");
  return v;
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) fail(where + "." + k, "unknown field");
  }
}

void check_word(const std::string& w, const std::string& where) {
  for (char c : w) {
    if (c < '0' || c > '9') fail(where, "words are strings of decimal digits");
  }
}

CylinderSpec parse_cylinder(const json& j, const std::string& where) {
  check_keys(j, where, {"whole", "start", "words"});
  CylinderSpec c;
  if (const json* w = optional_field(j, "whole")) {
    c.whole = get_bool(*w, where + ".whole");
    if (c.whole) {
      if (j.size() != 1) fail(where, "\"whole\" excludes other fields");
      return c;
    }
  }
  c.start = get_int(field(j, where, "start"), where + ".start");
  const json& words = get_array(field(j, where, "words"), where + ".words");
  if (words.empty()) fail(where + ".words", "must be nonempty");
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string at = where + ".words[" + std::to_string(i) + "]";
    c.words.push_back(get_string(words[i], at));
    check_word(c.words.back(), at);
    if (c.words.back().empty()) fail(at, "must be nonempty");
    if (c.words.back().size() != c.words.front().size()) fail(at, "all words need the same length");
  }
  return c;
}

json cylinder_json(const CylinderSpec& c) {
  if (c.whole) return {{"whole", true}};
  return {{"start", c.start}, {"words", c.words}};
}

PointSpec parse_point(const json& j, const std::string& where) {
  check_keys(j, where, {"periodic", "left", "core", "right"});
  PointSpec p;
  if (const json* per = optional_field(j, "periodic")) {
    if (j.size() != 1) fail(where, "\"periodic\" excludes other fields");
    p.periodic = true;
    p.core = get_string(*per, where + ".periodic");
    check_word(p.core, where + ".periodic");
    if (p.core.empty()) fail(where + ".periodic", "must be nonempty");
    return p;
  }
  p.left = get_string(field(j, where, "left"), where + ".left");
  p.core = get_string(field(j, where, "core"), where + ".core");
  p.right = get_string(field(j, where, "right"), where + ".right");
  check_word(p.left, where + ".left");
  check_word(p.core, where + ".core");
  check_word(p.right, where + ".right");
  if (p.left.empty()) fail(where + ".left", "must be nonempty");
  if (p.right.empty()) fail(where + ".right", "must be nonempty");
  return p;
}

json point_json(const PointSpec& p) {
  if (p.periodic) return {{"periodic", p.core}};
  return {{"left", p.left}, {"core", p.core}, {"right", p.right}};
}

std::vector<PairSpec> parse_pairs(const json& j, const std::string& where) {
  std::vector<PairSpec> out;
  const json& a = get_array(j, where);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    check_keys(a[i], at, {"label", "x", "y"});
    out.push_back({get_string(field(a[i], at, "label"), at + ".label"), parse_point(field(a[i], at, "x"), at + ".x"),
                   parse_point(field(a[i], at, "y"), at + ".y")});
  }
  return out;
}

json pairs_json(const std::vector<PairSpec>& pairs) {
  json a = json::array();
  for (const auto& p : pairs) a.push_back({{"label", p.label}, {"x", point_json(p.x)}, {"y", point_json(p.y)}});
  return a;
}

EntropyExperiment parse_entropy(const json& j, const std::string& where) {
  EntropyExperiment e;
  const std::string op = get_string(field(j, where, "op"), where + ".op");
  if (op == "profile") {
    check_keys(j, where, {"id", "kind", "system", "seed", "op", "partition", "sequence", "n_max"});
    const json& part = field(j, where, "partition");
    if (part.is_string()) {
      if (part.get<std::string>() != "generators") fail(where + ".partition", "expected \"generators\" or a cylinder");
    } else {
      e.two_set = parse_cylinder(part, where + ".partition");
    }
    const json& seq = field(j, where, "sequence");
    if (seq.is_array()) {
      e.sequence = get_ints(seq, where + ".sequence");
      for (std::size_t i = 0; i < e.sequence.size(); ++i) {
        if (e.sequence[i] < 0 || (i > 0 && e.sequence[i] <= e.sequence[i - 1])) {
          fail(where + ".sequence[" + std::to_string(i) + "]", "must be nonnegative and strictly increasing");
        }
      }
    } else {
      check_keys(seq, where + ".sequence", {"start", "step"});
      const auto start = get_int(field(seq, where + ".sequence", "start"), where + ".sequence.start");
      const auto step = positive(get_int(field(seq, where + ".sequence", "step"), where + ".sequence.step"),
                                 where + ".sequence.step");
      if (start < 0) fail(where + ".sequence.start", "must be >= 0");
      e.arithmetic = {start, step};
    }
    e.n_max = positive(get_int(field(j, where, "n_max"), where + ".n_max"), where + ".n_max");
    if (!e.arithmetic && static_cast<std::int64_t>(e.sequence.size()) < e.n_max) {
      fail(where + ".sequence", "needs at least n_max terms");
    }
  } else if (op == "separation") {
    check_keys(j, where, {"id", "kind", "system", "seed", "op", "base", "horizons", "eps"});
    e.op = EntropyExperiment::Op::separation;
    e.base = parse_cylinder(field(j, where, "base"), where + ".base");
    e.horizons = get_ints(field(j, where, "horizons"), where + ".horizons");
    for (std::size_t i = 0; i < e.horizons.size(); ++i) positive(e.horizons[i], where + ".horizons[" + std::to_string(i) + "]");
    e.eps = get_rational(field(j, where, "eps"), where + ".eps");
    if (e.eps <= 0) fail(where + ".eps", "must be > 0");
  } else {
    fail(where + ".op", "expected \"profile\" or \"separation\"");
  }
  return e;
}

json entropy_json(const EntropyExperiment& e) {
  json j;
  if (e.op == EntropyExperiment::Op::profile) {
    j["op"] = "profile";
    j["partition"] = e.two_set ? cylinder_json(*e.two_set) : json("generators");
    if (e.arithmetic) {
      j["sequence"] = {{"start", e.arithmetic->first}, {"step", e.arithmetic->second}};
    } else {
      j["sequence"] = e.sequence;
    }
    j["n_max"] = e.n_max;
  } else {
    j["op"] = "separation";
    j["base"] = cylinder_json(*e.base);
    j["horizons"] = e.horizons;
    j["eps"] = to_fraction_string(e.eps);
  }
  return j;
}

IndependenceExperiment parse_independence(const json& j, const std::string& where) {
  check_keys(j, where, {"id", "kind", "system", "seed", "a1", "a2", "e", "n_list"});
  IndependenceExperiment e;
  e.a1 = parse_cylinder(field(j, where, "a1"), where + ".a1");
  e.a2 = parse_cylinder(field(j, where, "a2"), where + ".a2");
  if (const json* ej = optional_field(j, "e")) e.e = parse_cylinder(*ej, where + ".e");
  e.n_list = get_ints(field(j, where, "n_list"), where + ".n_list");
  if (e.n_list.empty()) fail(where + ".n_list", "must be nonempty");
  for (std::size_t i = 0; i < e.n_list.size(); ++i) positive(e.n_list[i], where + ".n_list[" + std::to_string(i) + "]");
  return e;
}

json independence_json(const IndependenceExperiment& e) {
  json j{{"a1", cylinder_json(e.a1)}, {"a2", cylinder_json(e.a2)}, {"n_list", e.n_list}};
  if (e.e) j["e"] = cylinder_json(*e.e);
  return j;
}

ClassifierGrids parse_grids(const json& j, const std::string& where) {
  ClassifierGrids g;
  if (const json* eg = optional_field(j, "eps_grid")) {
    const json& arr = get_array(*eg, where + ".eps_grid");
    if (arr.empty()) fail(where + ".eps_grid", "must be nonempty");
    std::vector<Rational> grid;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string at = where + ".eps_grid[" + std::to_string(i) + "]";
      grid.push_back(get_rational(arr[i], at));
      if (grid.back() <= 0 || grid.back() >= 1) fail(at, "must lie in (0, 1)");
    }
    g.eps_grid = std::move(grid);
  }
  if (const json* nl = optional_field(j, "n_list")) {
    std::vector<std::int64_t> n = get_ints(*nl, where + ".n_list");
    if (n.empty()) fail(where + ".n_list", "must be nonempty");
    for (std::size_t i = 0; i < n.size(); ++i) positive(n[i], where + ".n_list[" + std::to_string(i) + "]");
    g.n_list = std::move(n);
  }
  return g;
}

void grids_json(const ClassifierGrids& g, json& j) {
  if (g.eps_grid) {
    json arr = json::array();
    for (const auto& r : *g.eps_grid) arr.push_back(to_fraction_string(r));
    j["eps_grid"] = std::move(arr);
  }
  if (g.n_list) j["n_list"] = *g.n_list;
}

SensitivityExperiment parse_sensitivity(const json& j, const std::string& where) {
  SensitivityExperiment e;
  const std::string op = get_string(field(j, where, "op"), where + ".op");
  if (op == "witnesses") {
    check_keys(j, where, {"id", "kind", "system", "seed", "op", "a", "ux", "uy", "eps", "seeds", "horizon"});
    e.a = parse_cylinder(field(j, where, "a"), where + ".a");
    e.ux = parse_cylinder(field(j, where, "ux"), where + ".ux");
    e.uy = parse_cylinder(field(j, where, "uy"), where + ".uy");
    e.eps = get_rational(field(j, where, "eps"), where + ".eps");
    if (e.eps <= 0 || e.eps > 1) fail(where + ".eps", "must lie in (0, 1]");
    const json& seeds = get_array(field(j, where, "seeds"), where + ".seeds");
    if (seeds.empty()) fail(where + ".seeds", "must be nonempty");
    for (std::size_t i = 0; i < seeds.size(); ++i) e.seeds.push_back(get_uint(seeds[i], where + ".seeds[" + std::to_string(i) + "]"));
  } else if (op == "classify") {
    check_keys(j, where, {"id", "kind", "system", "seed", "op", "pairs", "depth", "cell_length", "classifiers", "horizon",
                          "eps_grid", "n_list"});
    e.op = SensitivityExperiment::Op::classify;
    e.grids = parse_grids(j, where);
    e.pairs = parse_pairs(field(j, where, "pairs"), where + ".pairs");
    if (e.pairs.empty()) fail(where + ".pairs", "must be nonempty");
    e.depth = get_int(field(j, where, "depth"), where + ".depth");
    if (e.depth < 0) fail(where + ".depth", "must be >= 0");
    e.cell_length = positive(get_int(field(j, where, "cell_length"), where + ".cell_length"), where + ".cell_length");
    const json& cl = get_array(field(j, where, "classifiers"), where + ".classifiers");
    for (std::size_t i = 0; i < cl.size(); ++i) {
      const std::string at = where + ".classifiers[" + std::to_string(i) + "]";
      e.classifiers.push_back(get_string(cl[i], at));
      if (e.classifiers.back() != "in" && e.classifiers.back() != "ms" && e.classifiers.back() != "diam") {
        fail(at, "expected \"in\", \"ms\" or \"diam\"");
      }
    }
    if (e.classifiers.empty()) fail(where + ".classifiers", "must be nonempty");
  } else {
    fail(where + ".op", "expected \"witnesses\" or \"classify\"");
  }
  if (const json* h = optional_field(j, "horizon")) {
    e.horizon = get_int(*h, where + ".horizon");
    if (e.horizon < 10) fail(where + ".horizon", "must be >= 10");
  }
  return e;
}

json sensitivity_json(const SensitivityExperiment& e) {
  json j;
  if (e.op == SensitivityExperiment::Op::witnesses) {
    j = {{"op", "witnesses"}, {"a", cylinder_json(e.a)}, {"ux", cylinder_json(e.ux)},
         {"uy", cylinder_json(e.uy)}, {"eps", to_fraction_string(e.eps)}, {"seeds", e.seeds}};
  } else {
    j = {{"op", "classify"},       {"pairs", pairs_json(e.pairs)},          {"depth", e.depth},
         {"cell_length", e.cell_length}, {"classifiers", e.classifiers}};
    grids_json(e.grids, j);
  }
  j["horizon"] = e.horizon;
  return j;
}

CrosscheckExperiment parse_crosscheck(const json& j, const std::string& where) {
  check_keys(j, where, {"id", "kind", "seed", "systems", "pairs", "depth", "cell_length", "horizon", "table_e_extras",
                        "eps_grid", "n_list"});
  CrosscheckExperiment e;
  e.grids = parse_grids(j, where);
  const json& systems = get_array(field(j, where, "systems"), where + ".systems");
  if (systems.empty()) fail(where + ".systems", "must be nonempty");
  for (std::size_t i = 0; i < systems.size(); ++i) e.systems.push_back(get_string(systems[i], where + ".systems[" + std::to_string(i) + "]"));
  const json& pairs = field(j, where, "pairs");
  if (pairs.is_string()) {
    if (pairs.get<std::string>() != "panel") fail(where + ".pairs", "expected \"panel\" or an object of pair lists");
  } else {
    if (!pairs.is_object()) fail(where + ".pairs", "expected \"panel\" or an object of pair lists");
    for (const auto& id : e.systems) {
      const json* list = optional_field(pairs, id.c_str());
      if (!list) fail(where + ".pairs." + id, "missing");
      e.pairs.emplace_back(id, parse_pairs(*list, where + ".pairs." + id));
    }
    if (pairs.size() != e.systems.size()) fail(where + ".pairs", "lists pairs for a system not in \"systems\"");
  }
  e.depth = get_int(field(j, where, "depth"), where + ".depth");
  if (e.depth < 0) fail(where + ".depth", "must be >= 0");
  e.cell_length = positive(get_int(field(j, where, "cell_length"), where + ".cell_length"), where + ".cell_length");
  if (const json* h = optional_field(j, "horizon")) {
    e.horizon = get_int(*h, where + ".horizon");
    if (e.horizon < 10) fail(where + ".horizon", "must be >= 10");
  }
  if (const json* t = optional_field(j, "table_e_extras")) {
    e.table_e_extras = get_int(*t, where + ".table_e_extras");
    if (e.table_e_extras < 0) fail(where + ".table_e_extras", "must be >= 0");
  }
  return e;
}

json crosscheck_json(const CrosscheckExperiment& e) {
  json j{{"systems", e.systems},
         {"depth", e.depth},
         {"cell_length", e.cell_length},
         {"horizon", e.horizon},
         {"table_e_extras", e.table_e_extras}};
  grids_json(e.grids, j);
  if (e.pairs.empty()) {
    j["pairs"] = "panel";
  } else {
    json p = json::object();
    for (const auto& [id, list] : e.pairs) p[id] = pairs_json(list);
    j["pairs"] = p;
  }
  return j;
}

DensityExperiment parse_density(const json& j, const std::string& where) {
  check_keys(j, where, {"id", "kind", "system", "seed", "op", "set", "n_list"});
  DensityExperiment e;
  const std::string op = get_string(field(j, where, "op"), where + ".op");
  if (op == "diam_mean") {
    e.op = DensityExperiment::Op::diam_mean;
  } else if (op != "birkhoff") {
    fail(where + ".op", "expected \"birkhoff\" or \"diam_mean\"");
  }
  e.set = parse_cylinder(field(j, where, "set"), where + ".set");
  e.n_list = get_ints(field(j, where, "n_list"), where + ".n_list");
  if (e.n_list.empty()) fail(where + ".n_list", "must be nonempty");
  for (std::size_t i = 0; i < e.n_list.size(); ++i) positive(e.n_list[i], where + ".n_list[" + std::to_string(i) + "]");
  return e;
}

json density_json(const DensityExperiment& e) {
  return {{"op", e.op == DensityExperiment::Op::birkhoff ? "birkhoff" : "diam_mean"},
          {"set", cylinder_json(e.set)},
          {"n_list", e.n_list}};
}

}  // namespace

MarkovMeasure SystemSpec::build() const {
  if (allowed) return MarkovMeasure(Sft(alphabet_size, *allowed), transition);
  return MarkovMeasure::from_transition(transition);
}

SystemSpec SystemSpec::from_measure(std::string id, const MarkovMeasure& m) {
  SystemSpec s;
  s.id = std::move(id);
  s.alphabet_size = m.alphabet_size();
  s.allowed = m.sft().allowed_matrix();
  s.transition = m.transition();
  return s;
}

CylinderUnion CylinderSpec::build(const Sft& sft) const {
  if (whole) return CylinderUnion::whole();
  std::vector<Word> ws;
  for (const auto& w : words) {
    ws.push_back(parse_word(w));
    for (Symbol s : ws.back()) {
      if (s >= sft.alphabet_size()) throw ConfigError("word \"" + w + "\" uses a letter outside the alphabet");
    }
  }
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return CylinderUnion::from_words(start, std::move(ws));
}

PointRep PointSpec::build(const Sft& sft) const {
  auto word = [&](const std::string& w) {
    Word out = parse_word(w);
    for (Symbol s : out) {
      if (s >= sft.alphabet_size()) throw ConfigError("point word \"" + w + "\" uses a letter outside the alphabet");
    }
    return out;
  };
  try {
    if (periodic) return PointRep::periodic(sft, word(core));
    return PointRep::eventually_periodic(sft, word(left), word(core), word(right));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("point is not admissible: ") + e.what());
  }
}

const char* Experiment::kind() const noexcept {
  switch (body.index()) {
    case 0:
      return "entropy";
    case 1:
      return "independence";
    case 2:
      return "sensitivity";
    case 3:
      return "crosscheck";
    default:
      return "density";
  }
}

const SystemSpec& ExperimentConfig::system(const std::string& id) const {
  for (const auto& s : systems) {
    if (s.id == id) return s;
  }
  throw ConfigError("unknown system \"" + id + "\"");
}

SystemSpec parse_system(const json& j, const std::string& where) {
  check_keys(j, where, {"id", "alphabet_size", "allowed", "transition"});
  SystemSpec s;
  s.id = get_string(field(j, where, "id"), where + ".id");
  s.alphabet_size = static_cast<int>(get_int(field(j, where, "alphabet_size"), where + ".alphabet_size"));
  if (s.alphabet_size < 1 || s.alphabet_size > 10) fail(where + ".alphabet_size", "must lie in [1, 10]");
  const auto k = static_cast<std::size_t>(s.alphabet_size);
  const json& rows = get_array(field(j, where, "transition"), where + ".transition");
  if (rows.size() != k) fail(where + ".transition", "needs alphabet_size rows");
  for (std::size_t i = 0; i < k; ++i) {
    const std::string at = where + ".transition[" + std::to_string(i) + "]";
    const json& row = get_array(rows[i], at);
    if (row.size() != k) fail(at, "needs alphabet_size entries");
    std::vector<Rational> r;
    for (std::size_t c = 0; c < k; ++c) {
      r.push_back(get_rational(row[c], at + "[" + std::to_string(c) + "]"));
      if (r.back() < 0) fail(at + "[" + std::to_string(c) + "]", "must be >= 0");
    }
    s.transition.push_back(std::move(r));
  }
  if (const json* a = optional_field(j, "allowed")) {
    const json& arows = get_array(*a, where + ".allowed");
    if (arows.size() != k) fail(where + ".allowed", "needs alphabet_size rows");
    std::vector<std::vector<bool>> allowed;
    for (std::size_t i = 0; i < k; ++i) {
      const std::string at = where + ".allowed[" + std::to_string(i) + "]";
      const json& row = get_array(arows[i], at);
      if (row.size() != k) fail(at, "needs alphabet_size entries");
      std::vector<bool> r;
      for (std::size_t c = 0; c < k; ++c) {
        const auto v = get_int(row[c], at + "[" + std::to_string(c) + "]");
        if (v != 0 && v != 1) fail(at + "[" + std::to_string(c) + "]", "must be 0 or 1");
        r.push_back(v == 1);
        if (!r.back() && s.transition[i][c] != 0) fail(at + "[" + std::to_string(c) + "]", "forbids a positive transition");
      }
      allowed.push_back(std::move(r));
    }
    s.allowed = std::move(allowed);
  }
  try {
    (void)s.build();
  } catch (const InvalidArgument& e) {
    fail(where + ".transition", e.what());
  }
  return s;
}

json to_json(const SystemSpec& s) {
  json rows = json::array();
  for (const auto& r : s.transition) {
    json row = json::array();
    for (const auto& q : r) row.push_back(to_fraction_string(q));
    rows.push_back(row);
  }
  json j{{"id", s.id}, {"alphabet_size", s.alphabet_size}, {"transition", rows}};
  if (s.allowed) {
    json a = json::array();
    for (const auto& r : *s.allowed) {
      json row = json::array();
      for (bool b : r) row.push_back(b ? 1 : 0);
      a.push_back(row);
    }
    j["allowed"] = a;
  }
  return j;
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "config", {"name", "seed", "record_runtime", "systems", "experiments", "output"});
  ExperimentConfig c;
  c.name = get_string(field(j, "config", "name"), "name");
  c.seed = get_uint(field(j, "config", "seed"), "seed");
  if (const json* r = optional_field(j, "record_runtime")) c.record_runtime = get_bool(*r, "record_runtime");

  const json& systems = get_array(field(j, "config", "systems"), "systems");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const std::string at = "systems[" + std::to_string(i) + "]";
    c.systems.push_back(parse_system(systems[i], at));
    if (!ids.insert(c.systems.back().id).second) fail(at + ".id", "duplicate system id");
  }

  const json& exps = get_array(field(j, "config", "experiments"), "experiments");
  if (exps.empty()) fail("experiments", "must be nonempty");
  std::set<std::string> exp_ids;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const std::string at = "experiments[" + std::to_string(i) + "]";
    const json& e = exps[i];
    Experiment x;
    x.id = get_string(field(e, at, "id"), at + ".id");
    if (!exp_ids.insert(x.id).second) fail(at + ".id", "duplicate experiment id");
    if (const json* s = optional_field(e, "seed")) x.seed = get_uint(*s, at + ".seed");
    const std::string kind = get_string(field(e, at, "kind"), at + ".kind");
    if (kind != "crosscheck") {
      x.system = get_string(field(e, at, "system"), at + ".system");
      if (!ids.count(x.system)) fail(at + ".system", "unknown system \"" + x.system + "\"");
    }
    if (kind == "entropy") {
      x.body = parse_entropy(e, at);
    } else if (kind == "independence") {
      x.body = parse_independence(e, at);
    } else if (kind == "sensitivity") {
      x.body = parse_sensitivity(e, at);
    } else if (kind == "crosscheck") {
      auto cc = parse_crosscheck(e, at);
      for (std::size_t k = 0; k < cc.systems.size(); ++k) {
        if (!ids.count(cc.systems[k])) fail(at + ".systems[" + std::to_string(k) + "]", "unknown system \"" + cc.systems[k] + "\"");
      }
      x.body = std::move(cc);
    } else if (kind == "density") {
      x.body = parse_density(e, at);
    } else {
      fail(at + ".kind", "expected entropy, independence, sensitivity, crosscheck or density");
    }
    c.experiments.push_back(std::move(x));
  }

  if (const json* out = optional_field(j, "output")) {
    check_keys(*out, "output", {"csv", "json"});
    if (const json* csv = optional_field(*out, "csv")) c.csv = get_string(*csv, "output.csv");
    if (const json* js = optional_field(*out, "json")) c.json = get_string(*js, "output.json");
    for (const auto* name : {&c.csv, &c.json}) {
      if (name->empty() || name->find('/') != std::string::npos) fail("output", "file names must be plain, nonempty names");
    }
  }

  // Cylinder and point letters must lie in the alphabet of the referenced system.
  for (std::size_t i = 0; i < c.experiments.size(); ++i) {
    const auto& x = c.experiments[i];
    const std::string at = "experiments[" + std::to_string(i) + "]";
    auto check = [&](const std::string& sys_id, auto&& fn) {
      const MarkovMeasure m = c.system(sys_id).build();
      try {
        fn(m.sft());
      } catch (const ConfigError& e) {
        fail(at, e.what());
      }
    };
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, CrosscheckExperiment>) {
            for (const auto& [id, list] : b.pairs) {
              check(id, [&](const Sft& s) {
                for (const auto& p : list) (void)p.x.build(s), (void)p.y.build(s);
              });
            }
          } else {
            check(x.system, [&](const Sft& s) {
              if constexpr (std::is_same_v<T, EntropyExperiment>) {
                if (b.two_set) (void)b.two_set->build(s);
                if (b.base) (void)b.base->build(s);
              } else if constexpr (std::is_same_v<T, IndependenceExperiment>) {
                (void)b.a1.build(s), (void)b.a2.build(s);
                if (b.e) (void)b.e->build(s);
              } else if constexpr (std::is_same_v<T, SensitivityExperiment>) {
                (void)b.a.build(s), (void)b.ux.build(s), (void)b.uy.build(s);
                for (const auto& p : b.pairs) (void)p.x.build(s), (void)p.y.build(s);
              } else {
                (void)b.set.build(s);
              }
            });
          }
        },
        x.body);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json systems = json::array();
  for (const auto& s : c.systems) systems.push_back(to_json(s));
  json exps = json::array();
  for (const auto& x : c.experiments) {
    json j = std::visit(
        [](const auto& b) -> json {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, EntropyExperiment>) return entropy_json(b);
          if constexpr (std::is_same_v<T, IndependenceExperiment>) return independence_json(b);
          if constexpr (std::is_same_v<T, SensitivityExperiment>) return sensitivity_json(b);
          if constexpr (std::is_same_v<T, CrosscheckExperiment>) return crosscheck_json(b);
          if constexpr (std::is_same_v<T, DensityExperiment>) return density_json(b);
        },
        x.body);
    j["id"] = x.id;
    j["kind"] = x.kind();
    if (!x.system.empty()) j["system"] = x.system;
    if (x.seed) j["seed"] = *x.seed;
    exps.push_back(j);
  }
  return {{"name", c.name},
          {"seed", c.seed},
          {"record_runtime", c.record_runtime},
          {"systems", systems},
          {"experiments", exps},
          {"output", {{"csv", c.csv}, {"json", c.json}}}};
}

}  // namespace seqent
