#include "doctest.h"
#include "support/oracles.hpp"

using namespace bratteli;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::count_mismatch;
}

}  // namespace

TEST_CASE("diagram JSON round trip") {
  for (const auto& d : {odometer(2, 3), disjoint_union({odometer(2, 3), odometer(3, 3)}),
                        stationary_adic(CountMatrix::from_rows({{1, 1}, {1, 0}}), OrderRule::reverse_source, 4)}) {
    json j = diagram_to_json(d);
    CHECK(diagram_from_json(j) == d);
    CHECK(diagram_from_json(parse_json(j.dump())) == d);
  }
  json j = diagram_to_json(odometer(2, 2));
  CHECK(j["num_levels"] == 2);
  CHECK(j["edges"][0][1]["s"] == 0);
}

TEST_CASE("diagram JSON schema errors") {
  json good = diagram_to_json(odometer(2, 2));
  json extra = good;
  extra["colour"] = "blue";
  CHECK(code_of([&] { diagram_from_json(extra); }) == ErrorCode::parse_error);
  json missing = good;
  missing.erase("edges");
  CHECK(code_of([&] { diagram_from_json(missing); }) == ErrorCode::parse_error);
  json wrong_type = good;
  wrong_type["vertex_counts"] = "three";
  CHECK(code_of([&] { diagram_from_json(wrong_type); }) == ErrorCode::parse_error);
  json null_labels = good;
  null_labels["group_labels"] = nullptr;
  CHECK_NOTHROW(diagram_from_json(null_labels));
  json bad_edge = good;
  bad_edge["edges"][0][0]["r"] = 7;
  CHECK(code_of([&] { diagram_from_json(bad_edge); }) == ErrorCode::malformed_diagram);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_json("{\n  \"a\": [1,\n  }", "sample.json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(std::string(e.what()).find("sample.json:3:") != std::string::npos);
  }
  CHECK(code_of([] { read_json_file("/nonexistent/file.json"); }) == ErrorCode::parse_error);
}

TEST_CASE("systems, intertwinings, matrices and towers") {
  FinitePermutationSystem s{3, {1, 2, 0}, {0, 0, 0}};
  auto back = system_from_json(system_to_json(s));
  CHECK(back.perm == s.perm);
  CHECK(back.fiber == s.fiber);
  CHECK(system_to_json(s)["n"] == 3);

  Intertwining w = constant_intertwining(CountMatrix(1, 1, 2), CountMatrix(1, 1, 3), 3);
  auto w2 = intertwining_from_json(intertwining_to_json(w));
  CHECK(w2.p.size() == 3);
  CHECK(w2.q.size() == 2);
  CHECK(w2.q[1] == CountMatrix(1, 1, 3));

  CHECK(matrix_from_json(json::parse("[[1,2],[3,4]]")) == CountMatrix::from_rows({{1, 2}, {3, 4}}));
  CHECK(matrix_from_json(json::parse("{\"matrix\": [[5]]}")) == CountMatrix(1, 1, 5));
  CHECK(code_of([] { matrix_from_json(json::parse("[[1,2],[3]]")); }) == ErrorCode::parse_error);

  TowerSequence seq = odometer_towers(2, 3);
  CHECK(towers_to_diagram(towers_from_json(towers_to_json(seq))) == towers_to_diagram(seq));
}
