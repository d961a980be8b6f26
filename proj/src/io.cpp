#include "qunfold/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qunfold/error.hpp"

namespace qunfold::io {

namespace {

void dump_into(const Json& j, int indent, int level, std::string& out) {
  auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      std::string s(buf);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        dump_into(v, indent, level + 1, out);
      }
      newline(level);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(it.value(), indent, level + 1, out);
      }
      newline(level);
      out += '}';
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw Error(source + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& source) {
  if (!j.is_object()) fail(source, "expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) fail(source, std::string("missing field '") + key + "'");
  return *it;
}

std::string as_string(const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_string()) fail(source, where + " must be a string");
  return j.get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_array()) fail(source, where + " must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string(j[i], source, where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::pair<std::string, std::string>> pair_list(const Json& j, const std::string& source,
                                                           const std::string& where) {
  if (!j.is_array()) fail(source, where + " must be an array");
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) fail(source, at + " must be a two-element array");
    out.emplace_back(as_string(j[i][0], source, at), as_string(j[i][1], source, at));
  }
  return out;
}

double as_number(const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_number()) fail(source, where + " must be a number");
  return j.get<double>();
}

template <typename F>
auto with_source(const std::string& source, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    fail(source, e.what());
  }
}

std::string dot_id(const std::string& s) { return Json(s).dump(); }

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(source + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

Json load_json(const std::string& path) { return parse_json(read_file(path), path); }

SeedGraph seed_from_json(const Json& j, const std::string& source) {
  auto nodes = string_list(field(j, "nodes", source), source, "nodes");
  auto edges = pair_list(field(j, "edges", source), source, "edges");
  auto root = as_string(field(j, "root", source), source, "root");
  std::set<NodeId> atoms;
  if (j.contains("atoms")) {
    for (auto& a : string_list(j["atoms"], source, "atoms")) atoms.insert(std::move(a));
  }
  return with_source(source, [&] {
    return SeedGraph::build(std::move(nodes), std::move(edges), std::move(root), std::move(atoms));
  });
}

Json seed_to_json(const SeedGraph& g) {
  Json j;
  j["nodes"] = g.nodes();
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["root"] = g.root();
  j["atoms"] = Json(std::vector<std::string>(g.atoms().begin(), g.atoms().end()));
  return j;
}

KripkeModel model_from_json(const Json& j, const std::string& source) {
  auto worlds = string_list(field(j, "worlds", source), source, "worlds");
  auto access = j.contains("access") ? pair_list(j["access"], source, "access")
                                     : std::vector<std::pair<std::string, std::string>>{};
  std::map<WorldId, std::vector<AtomTag>> valuation;
  if (j.contains("valuation")) {
    const Json& v = j["valuation"];
    if (!v.is_object()) fail(source, "valuation must be an object");
    for (auto it = v.begin(); it != v.end(); ++it)
      valuation[it.key()] = string_list(it.value(), source, "valuation." + it.key());
  }
  std::optional<std::map<WorldId, double>> weights;
  if (j.contains("weights") && !j["weights"].is_null()) {
    const Json& w = j["weights"];
    if (!w.is_object()) fail(source, "weights must be an object");
    weights.emplace();
    for (auto it = w.begin(); it != w.end(); ++it)
      (*weights)[it.key()] = as_number(it.value(), source, "weights." + it.key());
  }
  return with_source(source, [&] { return KripkeModel::build(std::move(worlds), access, valuation, weights); });
}

Json model_to_json(const KripkeModel& m) {
  Json j;
  j["worlds"] = m.worlds();
  Json access = Json::array();
  for (const auto& [a, b] : m.access()) access.push_back({m.world(a), m.world(b)});
  j["access"] = std::move(access);
  Json val = Json::object();
  for (std::size_t w = 0; w < m.size(); ++w) val[m.world(w)] = m.valuation(w);
  j["valuation"] = std::move(val);
  if (m.has_weights()) {
    Json w = Json::object();
    for (std::size_t i = 0; i < m.size(); ++i) w[m.world(i)] = m.weight(i);
    j["weights"] = std::move(w);
  }
  return j;
}

ProximitySpace proximity_from_json(const Json& j, const std::string& source) {
  auto carrier = string_list(field(j, "carrier", source), source, "carrier");
  auto pairs = j.contains("pairs") ? pair_list(j["pairs"], source, "pairs")
                                   : std::vector<std::pair<std::string, std::string>>{};
  return with_source(source, [&] { return ProximitySpace::build(std::move(carrier), pairs); });
}

Json proximity_to_json(const ProximitySpace& s) {
  Json j;
  j["carrier"] = s.carrier();
  Json pairs = Json::array();
  for (const auto& [a, b] : s.pairs()) pairs.push_back({s.carrier()[a], s.carrier()[b]});
  j["pairs"] = std::move(pairs);
  return j;
}

BPA bpa_from_json(const Json& j, const std::string& source) {
  auto frame = string_list(field(j, "frame", source), source, "frame");
  const Json& masses = field(j, "masses", source);
  if (!masses.is_array()) fail(source, "masses must be an array");
  std::vector<std::pair<std::vector<std::string>, double>> m;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const std::string at = "masses[" + std::to_string(i) + "]";
    m.emplace_back(string_list(field(masses[i], "set", source), source, at + ".set"),
                   as_number(field(masses[i], "mass", source), source, at + ".mass"));
  }
  return with_source(source, [&] { return BPA::build(std::move(frame), m); });
}

Json bpa_to_json(const BPA& b) {
  Json j;
  j["frame"] = b.frame();
  Json masses = Json::array();
  for (const auto& [s, x] : b.masses()) {
    std::vector<std::string> tags;
    for (std::size_t i : s) tags.push_back(b.frame()[i]);
    masses.push_back({{"set", tags}, {"mass", x}});
  }
  j["masses"] = std::move(masses);
  return j;
}

std::vector<double> weights_from_json(const Json& j, const std::vector<WorldId>& worlds,
                                      const std::string& source) {
  if (!j.is_object()) fail(source, "expected an object mapping world keys to weights");
  std::vector<double> w;
  w.reserve(worlds.size());
  for (const auto& key : worlds) {
    auto it = j.find(key);
    if (it == j.end()) fail(source, "missing weight for '" + key + "'");
    w.push_back(as_number(*it, source, key));
  }
  if (j.size() != worlds.size()) fail(source, "weights name worlds outside the model");
  return w;
}

Json formula_to_json(Formula f) {
  if (f.text_size() <= kFormulaTextLimit) return render(f);
  char buf[32];
  std::snprintf(buf, sizeof buf, "#%016llx", static_cast<unsigned long long>(f.hash()));
  return std::string(buf);
}

Json tree_to_json(const StageModel& m) {
  Json j;
  j["alpha"] = m.tree.alpha();
  j["z_u"] = m.z_u;
  Json nodes = Json::array();
  for (const auto& n : m.tree.nodes()) {
    Json node;
    node["key"] = n.walk_key;
    node["depth"] = n.depth;
    node["parent"] = n.parent ? Json(m.tree.node(*n.parent).walk_key) : Json(nullptr);
    node["atom"] = n.atom;
    node["truncated"] = n.truncated;
    node["formula"] = formula_to_json(n.label);
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

std::string tree_to_dot(const StageModel& m) {
  std::ostringstream out;
  out << "digraph unfolding {\n";
  for (const auto& n : m.tree.nodes()) {
    out << "  " << dot_id(n.walk_key) << " [label=" << dot_id(n.walk_key) << (n.atom ? ", shape=box" : "")
        << "];\n";
  }
  for (std::size_t i = 0; i < m.tree.size(); ++i) {
    const auto& n = m.tree.node(i);
    out << "  " << dot_id(n.walk_key) << " -> " << dot_id(n.walk_key) << ";\n";
    for (std::size_t c : n.children)
      out << "  " << dot_id(n.walk_key) << " -> " << dot_id(m.tree.node(c).walk_key) << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string sigma_to_dot(const SigmaModel& s) {
  const KripkeModel& k = s.kripke;
  std::ostringstream out;
  out << "digraph sigma {\n";
  for (std::size_t w = 0; w < k.size(); ++w) out << "  " << dot_id(k.world(w)) << ";\n";
  for (const auto& [a, b] : s.plus)
    out << "  " << dot_id(k.world(a)) << " -> " << dot_id(k.world(b)) << " [class=plus];\n";
  for (const auto& [a, b] : s.minus)
    out << "  " << dot_id(k.world(a)) << " -> " << dot_id(k.world(b)) << " [class=minus, style=dashed];\n";
  out << "}\n";
  return out.str();
}

Json bisimulation_report_to_json(const BisimulationReport& r, const KripkeModel& g, const KripkeModel& h) {
  Json j;
  j["ok"] = r.ok;
  Json pairs = Json::array();
  for (const auto& [a, b] : r.pairs) pairs.push_back({g.world(a), h.world(b)});
  j["pairs"] = std::move(pairs);
  Json violations = Json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"pair", {g.world(v.g_world), h.world(v.h_world)}},
                          {"clause", std::string(1, v.clause)},
                          {"detail", v.detail}});
  j["violations"] = std::move(violations);
  return j;
}

Json bisimulation_to_json(const Bisimulation& b, const KripkeModel& g, const KripkeModel& h) {
  Json j;
  j["blocks"] = b.block_count();
  Json pairs = Json::array();
  for (const auto& [a, c] : b.pairs()) pairs.push_back({g.world(a), h.world(c)});
  j["pairs"] = std::move(pairs);
  return j;
}

Json quantum_set_to_json(const ProximitySpace& s, const QuantumSet& q) {
  auto names = [&](const ElementSet& e) {
    Json a = Json::array();
    for (std::size_t x = e.find_first(); x != ElementSet::npos; x = e.find_next(x)) a.push_back(s.carrier()[x]);
    return a;
  };
  return Json{{"members", names(q.members)}, {"witness", names(q.witness)}};
}

Json lattice_to_json(const ProximitySpace& s, const std::vector<QuantumSet>& sets) {
  Json j;
  j["space"] = proximity_to_json(s);
  Json qs = Json::array();
  for (const auto& q : sets) {
    Json entry = quantum_set_to_json(s, q);
    entry["ortho"] = quantum_set_to_json(s, ortho_p(s, q))["members"];
    qs.push_back(std::move(entry));
  }
  j["quantum_sets"] = std::move(qs);
  return j;
}

namespace {

std::string number(double x) { return dump(Json(x)); }

}  // namespace

std::string spectrum_csv(const Spectrum& s) {
  std::vector<bool> flagged(s.size(), false);
  for (const auto& [a, b] : s.degenerate_pairs) flagged[a] = flagged[b] = true;
  std::string out = "index,eigenvalue,degenerate\n";
  for (std::size_t k = 0; k < s.size(); ++k)
    out += std::to_string(k + 1) + "," + number(s.values(static_cast<Eigen::Index>(k))) + "," +
           (flagged[k] ? "1" : "0") + "\n";
  return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string codewords_text(const std::vector<Codeword>& words) {
  std::string out;
  for (const auto& w : words) {
    for (std::size_t b = 0; b < w.size(); ++b) out += w.test(b) ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string evidence_csv(const BPA& b) {
  const std::vector<double> table = bel_table(b);
  const std::size_t n = b.frame().size();
  const std::size_t full = table.size() - 1;
  std::string out = "set,mass,bel,pl\n";
  for (std::size_t mask = 0; mask < table.size(); ++mask) {
    Subset s;
    std::string name;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) {
        s.push_back(i);
        if (!name.empty()) name += ' ';
        name += b.frame()[i];
      }
    out += "\"{" + name + "}\"," + number(b.mass(s)) + "," + number(table[mask]) + "," +
           number(1.0 - table[full ^ mask]) + "\n";
  }
  return out;
}

Json record_to_json(const StageRecord& r) {
  Json j;
  j["alpha"] = r.alpha;
  j["n"] = r.n;
  j["selected"] = r.selected_world;
  j["selected_omega"] = r.selected_omega;
  j["omega"] = r.omega;
  j["eigenvalues"] = r.eigenvalues;
  j["flags"] = {{"degenerate", r.degenerate},
                {"schoenberg", r.schoenberg},
                {"bisimulation", r.bisimulation_ok},
                {"isometry", r.isometry_ok}};
  return j;
}

std::string trace_to_jsonl(const RunTrace& t) {
  std::string out;
  for (const auto& r : t) {
    out += dump(record_to_json(r));
    out += '\n';
  }
  return out;
}

Json diagnostics_to_json(const StageState& s) {
  const StageDiagnostics& d = s.diagnostics;
  Json j;
  j["alpha"] = s.alpha;
  j["n"] = s.dim();
  Json pairs = Json::array();
  for (const auto& [a, b] : d.degenerate_pairs) pairs.push_back({a, b});
  j["degenerate_pairs"] = std::move(pairs);
  j["nondegeneracy_violated"] = d.degenerate();
  j["schoenberg"] = {{"positive", d.schoenberg.positive},
                     {"applicable", d.schoenberg.applicable},
                     {"holds", d.schoenberg.holds}};
  j["bisimulation"] = {{"ok", d.bisimulation_ok}, {"violations", d.bisimulation_violations}};
  j["proximity_ok"] = d.proximity_ok;
  j["isometry_ok"] = d.isometry_ok;
  j["prefix_ok"] = d.prefix_ok;
  if (d.code)
    j["code"] = {{"word_length", d.code->word_length},
                 {"count", d.code->count},
                 {"min_distance", d.code->min_distance},
                 {"correction", d.code->correction}};
  else
    j["code"] = nullptr;
  j["max_residual"] = d.max_residual;
  j["orthonormality_error"] = d.orthonormality_error;
  j["born_sum"] = d.born_sum;
  j["sentence_mass_error"] = d.sentence_mass_error ? Json(*d.sentence_mass_error) : Json(nullptr);
  j["pairing"] = to_string(s.basis.rule);
  return j;
}

Json prediction_to_json(const StageState& s, const Prediction& p) {
  Json rows = Json::array();
  for (std::size_t w = 0; w < p.omega.size(); ++w)
    rows.push_back({{"world", s.stage_model.kripke.world(w)}, {"omega", p.omega[w]}, {"p_star", p.generalized[w]}});
  return Json{{"alpha", s.alpha}, {"worlds", std::move(rows)}};
}

Json explanation_to_json(const StageState& prev, const Explanation& e) {
  Json rows = Json::array();
  for (std::size_t w = 0; w < e.likelihoods.size(); ++w)
    rows.push_back({{"world", prev.stage_model.kripke.world(w)},
                    {"prior", e.prior[w]},
                    {"likelihood", e.likelihoods[w]},
                    {"bayes", e.bayes[w]},
                    {"belief", e.belief[w]}});
  return Json{{"alpha", prev.alpha}, {"likelihood_sum", e.likelihood_sum}, {"worlds", std::move(rows)}};
}

}  // namespace qunfold::io
