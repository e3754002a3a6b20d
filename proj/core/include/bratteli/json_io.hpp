#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "bratteli/diagram.hpp"
#include "bratteli/generators.hpp"
#include "bratteli/ktheory.hpp"
#include "bratteli/soe.hpp"

namespace bratteli {

// Parses JSON text; syntax errors become Error(parse_error) with line and column.
nlohmann::json parse_json(const std::string& text, const std::string& source = "<input>");
nlohmann::json read_json_file(const std::string& path);

// {"num_levels", "vertex_counts", "group_labels", "edges": [[{"s","r"}...]...]}.
// Unknown keys and schema errors raise Error(parse_error).
nlohmann::json diagram_to_json(const OrderedBratteliDiagram& d);
OrderedBratteliDiagram diagram_from_json(const nlohmann::json& j);

// {"n", "perm", "fiber"}
nlohmann::json system_to_json(const FinitePermutationSystem& s);
FinitePermutationSystem system_from_json(const nlohmann::json& j);

// {"P": [matrix per level], "Q": [matrix per level]}
nlohmann::json intertwining_to_json(const Intertwining& w);
Intertwining intertwining_from_json(const nlohmann::json& j);

// Either a bare array of rows or {"matrix": rows}.
CountMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const CountMatrix& m);

// {"systems": [{"heights": [[..]], "top_group": [[..]]}],
//  "refinements": [{"records": [[[{"group","base","offset"}]]]}]}
TowerSequence towers_from_json(const nlohmann::json& j);
nlohmann::json towers_to_json(const TowerSequence& seq);

}  // namespace bratteli
