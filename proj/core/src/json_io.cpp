#include "bratteli/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "bratteli/error.hpp"

namespace bratteli {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& what) {
  if (!j.is_object()) schema_error(what + ": expected a JSON object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) schema_error(what + ": unknown key \"" + it.key() + "\"");
}

const json& member(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(what + ": missing key \"" + key + "\"");
  return *it;
}

std::int64_t as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) schema_error(what + ": expected an integer");
  return j.get<std::int64_t>();
}

std::size_t as_index(const json& j, const std::string& what) {
  std::int64_t v = as_int(j, what);
  if (v < 0) schema_error(what + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

const json& as_array(const json& j, const std::string& what) {
  if (!j.is_array()) schema_error(what + ": expected an array");
  return j;
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": JSON syntax error";
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    if (pos != std::string::npos) os << msg.substr(pos + std::string("syntax error").size());
    throw Error(ErrorCode::parse_error, os.str());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

json diagram_to_json(const OrderedBratteliDiagram& d) {
  json j;
  j["num_levels"] = d.num_levels();
  j["vertex_counts"] = d.vertex_counts();
  if (d.group_labels()) j["group_labels"] = *d.group_labels();
  else j["group_labels"] = nullptr;
  json edges = json::array();
  for (std::size_t n = 1; n <= d.num_levels(); ++n) {
    json level = json::array();
    for (const Edge& e : d.edges(n)) level.push_back({{"s", e.source}, {"r", e.range}});
    edges.push_back(std::move(level));
  }
  j["edges"] = std::move(edges);
  return j;
}

OrderedBratteliDiagram diagram_from_json(const json& j) {
  const std::string what = "diagram";
  only_keys(j, {"num_levels", "vertex_counts", "group_labels", "edges"}, what);
  std::size_t levels = as_index(member(j, "num_levels", what), what + ".num_levels");
  std::vector<std::size_t> counts;
  for (const auto& c : as_array(member(j, "vertex_counts", what), what + ".vertex_counts"))
    counts.push_back(as_index(c, what + ".vertex_counts"));
  if (counts.size() != levels + 1)
    schema_error(what + ": vertex_counts must have num_levels + 1 entries");
  std::vector<std::vector<Edge>> edges;
  const json& ej = as_array(member(j, "edges", what), what + ".edges");
  if (ej.size() != levels) schema_error(what + ": edges must have num_levels entries");
  for (std::size_t n = 0; n < ej.size(); ++n) {
    std::vector<Edge> level;
    const std::string where = what + ".edges[" + std::to_string(n) + "]";
    for (const auto& e : as_array(ej[n], where)) {
      only_keys(e, {"s", "r"}, where);
      level.push_back({as_index(member(e, "s", where), where + ".s"), as_index(member(e, "r", where), where + ".r")});
    }
    edges.push_back(std::move(level));
  }
  std::optional<GroupLabels> labels;
  auto it = j.find("group_labels");
  if (it != j.end() && !it->is_null()) {
    labels.emplace();
    for (const auto& level : as_array(*it, what + ".group_labels")) {
      std::vector<int> row;
      for (const auto& x : as_array(level, what + ".group_labels"))
        row.push_back(static_cast<int>(as_int(x, what + ".group_labels")));
      labels->push_back(std::move(row));
    }
  }
  return OrderedBratteliDiagram(std::move(counts), std::move(edges), std::move(labels));
}

json system_to_json(const FinitePermutationSystem& s) {
  return {{"n", s.n_points}, {"perm", s.perm}, {"fiber", s.fiber}};
}

FinitePermutationSystem system_from_json(const json& j) {
  const std::string what = "system";
  only_keys(j, {"n", "perm", "fiber"}, what);
  FinitePermutationSystem s;
  s.n_points = as_index(member(j, "n", what), what + ".n");
  for (const auto& x : as_array(member(j, "perm", what), what + ".perm")) s.perm.push_back(as_index(x, what + ".perm"));
  for (const auto& x : as_array(member(j, "fiber", what), what + ".fiber"))
    s.fiber.push_back(static_cast<int>(as_int(x, what + ".fiber")));
  return s;
}

CountMatrix matrix_from_json(const json& j) {
  const json* rows = &j;
  if (j.is_object()) {
    only_keys(j, {"matrix"}, "matrix");
    rows = &member(j, "matrix", "matrix");
  }
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& r : as_array(*rows, "matrix")) {
    std::vector<std::int64_t> row;
    for (const auto& x : as_array(r, "matrix row")) row.push_back(as_int(x, "matrix entry"));
    if (!out.empty() && row.size() != out.front().size()) schema_error("matrix rows have different lengths");
    out.push_back(std::move(row));
  }
  if (out.empty() || out.front().empty()) schema_error("matrix is empty");
  return CountMatrix::from_rows(out);
}

json matrix_to_json(const CountMatrix& m) { return m.to_rows(); }

json intertwining_to_json(const Intertwining& w) {
  json p = json::array(), q = json::array();
  for (const auto& m : w.p) p.push_back(matrix_to_json(m));
  for (const auto& m : w.q) q.push_back(matrix_to_json(m));
  return {{"P", p}, {"Q", q}};
}

Intertwining intertwining_from_json(const json& j) {
  only_keys(j, {"P", "Q"}, "intertwining");
  Intertwining w;
  for (const auto& m : as_array(member(j, "P", "intertwining"), "intertwining.P")) w.p.push_back(matrix_from_json(m));
  for (const auto& m : as_array(member(j, "Q", "intertwining"), "intertwining.Q")) w.q.push_back(matrix_from_json(m));
  return w;
}

TowerSequence towers_from_json(const json& j) {
  only_keys(j, {"systems", "refinements"}, "towers");
  TowerSequence seq;
  for (const auto& s : as_array(member(j, "systems", "towers"), "towers.systems")) {
    only_keys(s, {"heights", "top_group"}, "tower system");
    TowerSystem ts;
    for (const auto& g : as_array(member(s, "heights", "tower system"), "heights")) {
      std::vector<std::int64_t> row;
      for (const auto& h : as_array(g, "heights")) row.push_back(as_int(h, "height"));
      ts.heights.push_back(std::move(row));
    }
    auto it = s.find("top_group");
    if (it != s.end()) {
      for (const auto& g : as_array(*it, "top_group")) {
        std::vector<std::size_t> row;
        for (const auto& t : as_array(g, "top_group")) row.push_back(as_index(t, "top_group"));
        ts.top_group.push_back(std::move(row));
      }
    } else {
      for (std::size_t t = 0; t < ts.heights.size(); ++t) ts.top_group.emplace_back(ts.heights[t].size(), t);
    }
    seq.systems.push_back(std::move(ts));
  }
  for (const auto& r : as_array(member(j, "refinements", "towers"), "towers.refinements")) {
    only_keys(r, {"records"}, "refinement");
    TowerRefinement tr;
    for (const auto& group : as_array(member(r, "records", "refinement"), "records")) {
      std::vector<std::vector<TraversalRecord>> g;
      for (const auto& base : as_array(group, "records")) {
        std::vector<TraversalRecord> recs;
        for (const auto& rec : as_array(base, "records")) {
          only_keys(rec, {"group", "base", "offset"}, "record");
          recs.push_back({as_index(member(rec, "group", "record"), "group"),
                          as_index(member(rec, "base", "record"), "base"),
                          as_int(member(rec, "offset", "record"), "offset")});
        }
        g.push_back(std::move(recs));
      }
      tr.records.push_back(std::move(g));
    }
    seq.refinements.push_back(std::move(tr));
  }
  return seq;
}

json towers_to_json(const TowerSequence& seq) {
  json systems = json::array(), refinements = json::array();
  for (const auto& s : seq.systems) systems.push_back({{"heights", s.heights}, {"top_group", s.top_group}});
  for (const auto& r : seq.refinements) {
    json groups = json::array();
    for (const auto& g : r.records) {
      json bases = json::array();
      for (const auto& b : g) {
        json recs = json::array();
        for (const auto& rec : b) recs.push_back({{"group", rec.group}, {"base", rec.base}, {"offset", rec.offset}});
        bases.push_back(std::move(recs));
      }
      groups.push_back(std::move(bases));
    }
    refinements.push_back({{"records", groups}});
  }
  return {{"systems", systems}, {"refinements", refinements}};
}

}  // namespace bratteli
