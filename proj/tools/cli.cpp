#include "cli.hpp"

#include <cstdlib>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "bratteli/bratteli.hpp"

namespace bratteli::cli {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t max_depth() {
  if (const char* env = std::getenv("BRATTELI_MAX_DEPTH")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("BRATTELI_MAX_DEPTH must be a positive integer, got \"") + env + "\"");
  }
  return 16;
}

void check_depth(std::size_t depth, const char* what) {
  std::size_t cap = max_depth();
  if (depth > cap)
    throw UsageError(std::string(what) + " " + std::to_string(depth) + " exceeds BRATTELI_MAX_DEPTH=" +
                     std::to_string(cap));
}

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError(std::string("bad ") + what + " list \"" + text + "\"");
    out.push_back(std::stoul(item));
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
  return out;
}

json big_json(const BigInt& v) {
  if (v.fits_slong_p()) return json(v.get_si());
  return json(v.get_str());
}

json big_json(const BigVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(big_json(x));
  return out;
}

json big_json(const BigMatrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(big_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

OrderedBratteliDiagram load_diagram(const std::string& path) { return diagram_from_json(read_json_file(path)); }

json path_list(const std::vector<FinitePath>& paths) {
  json out = json::array();
  for (const auto& p : paths) out.push_back(p.to_string());
  return out;
}

json extremal_json(const ExtremalPathSet& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"depth", s.depth},
          {"paths", path_list(s.paths)},
          {"count", s.paths.size()},
          {"stabilized", s.stabilized}};
}

std::string text_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string CommandResult::render() const {
  if (format == "text") {
    std::ostringstream os;
    os << "status: " << (status == Status::ok ? "ok" : "error") << "\n";
    if (payload.is_object())
      for (auto it = payload.begin(); it != payload.end(); ++it) os << it.key() << ": " << text_value(*it) << "\n";
    for (const auto& d : diagnostics) os << "diagnostic: " << d << "\n";
    return os.str();
  }
  json out = {{"status", status == Status::ok ? "ok" : "error"}, {"payload", payload}, {"diagnostics", diagnostics}};
  return out.dump(2) + "\n";
}

CommandResult run(const std::vector<std::string>& args) {
  CommandResult result;
  CLI::App app{"Ordered Bratteli diagrams: Vershik maps, dimension groups, orbit equivalence", "bratteli"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));

  std::function<void()> action;
  std::string diagram_file;
  auto diagram_option = [&](CLI::App* sub) {
    sub->add_option("diagram,--diagram", diagram_file, "Diagram JSON file")->required();
  };

  // validate
  auto* validate = app.add_subcommand("validate", "Check the Bratteli axioms");
  diagram_option(validate);
  validate->callback([&] {
    action = [&] {
      OrderedBratteliDiagram d = load_diagram(diagram_file);
      json violations = json::array();
      for (const auto& v : validate_diagram(d).violations) {
        json item = {{"level", v.level}, {"axiom", v.axiom}, {"message", v.message}};
        item["vertex"] = v.vertex ? json(*v.vertex) : json(nullptr);
        item["edge"] = v.edge ? json(*v.edge) : json(nullptr);
        violations.push_back(item);
        result.diagnostics.push_back(v.message);
      }
      result.payload = {{"valid", violations.empty()}, {"violations", violations}};
      if (!violations.empty()) {
        result.status = Status::error;
        result.exit_code = 1;
      }
    };
  });

  // telescope
  std::string cuts_text;
  auto* tele = app.add_subcommand("telescope", "Telescope a diagram to the given cut levels");
  diagram_option(tele);
  tele->add_option("--cuts", cuts_text, "Comma-separated cut levels, ending at num_levels")->required();
  tele->callback([&] {
    action = [&] {
      OrderedBratteliDiagram d = load_diagram(diagram_file);
      TelescopedDiagram t = telescope(d, parse_list(cuts_text, "cut"));
      result.payload = diagram_to_json(t.diagram);
    };
  });

  // vershik
  std::string path_text;
  bool full = false;
  auto* vershik = app.add_subcommand("vershik", "Vershik successor of a finite path");
  diagram_option(vershik);
  vershik->add_option("--path", path_text, "Path e1,e2,...,ek")->required();
  vershik->add_flag("--full", full, "Extend to maximal paths via the perfect-ordering or group-label pairing");
  vershik->callback([&] {
    action = [&] {
      PathSpace space(load_diagram(diagram_file));
      FinitePath p = parse_path(space.diagram(), path_text);
      check_depth(p.depth(), "path depth");
      FinitePath next;
      if (full && space.is_max_path(p) && !space.is_min_path(p)) {
        MaxMinPairing pairing;
        PerfectOrderingResult perfect = space.check_perfect_ordering(p.depth());
        if (perfect.verdict == Verdict::pass) pairing = perfect.pairing;
        else if (space.diagram().group_labels()) pairing = pairing_from_labels(space, p.depth());
        next = space.full_successor(p, pairing);
      } else {
        next = space.successor(p);
      }
      result.payload = {{"path", p.to_string()},
                        {"rank", space.rank(p)},
                        {"successor", next.to_string()},
                        {"successor_rank", space.rank(next)}};
    };
  });

  // rank
  std::optional<std::uint64_t> unrank_value;
  std::size_t level = 0, vertex = 0;
  auto* rank = app.add_subcommand("rank", "Rank of a path among the paths to its terminal vertex, or unrank");
  diagram_option(rank);
  rank->add_option("--path", path_text, "Path e1,e2,...,ek");
  rank->add_option("--unrank", unrank_value, "Rank to convert back to a path");
  rank->add_option("--level", level, "Level of the terminal vertex (with --unrank)");
  rank->add_option("--vertex", vertex, "Terminal vertex (with --unrank)");
  rank->callback([&] {
    action = [&] {
      PathSpace space(load_diagram(diagram_file));
      if (unrank_value) {
        check_depth(level, "level");
        FinitePath p = space.unrank(level, vertex, *unrank_value);
        result.payload = {{"path", p.to_string()}, {"rank", *unrank_value}, {"terminal_vertex", vertex}};
        return;
      }
      if (path_text.empty() && rank->count("--path") == 0) throw UsageError("rank needs --path or --unrank");
      FinitePath p = parse_path(space.diagram(), path_text);
      check_depth(p.depth(), "path depth");
      result.payload = {{"path", p.to_string()},
                        {"rank", space.rank(p)},
                        {"terminal_vertex", p.terminal_vertex()},
                        {"paths_to_vertex", space.path_count(p.depth(), p.terminal_vertex())}};
    };
  });

  // orbit-shift
  std::string from_text, to_text;
  auto* shift = app.add_subcommand("orbit-shift", "N with successor^N(from) = to");
  diagram_option(shift);
  shift->add_option("--from", from_text, "Path e")->required();
  shift->add_option("--to", to_text, "Path f")->required();
  shift->callback([&] {
    action = [&] {
      PathSpace space(load_diagram(diagram_file));
      FinitePath e = parse_path(space.diagram(), from_text);
      FinitePath f = parse_path(space.diagram(), to_text);
      check_depth(e.depth(), "path depth");
      result.payload = {{"from", e.to_string()}, {"to", f.to_string()}, {"shift", space.orbit_shift(e, f)}};
    };
  });

  // extremal
  std::size_t depth = 0;
  auto* extremal = app.add_subcommand("extremal", "All-minimal and all-maximal paths at a depth");
  diagram_option(extremal);
  extremal->add_option("--depth", depth, "Depth")->required();
  extremal->callback([&] {
    action = [&] {
      check_depth(depth, "depth");
      PathSpace space(load_diagram(diagram_file));
      result.payload = {{"min", extremal_json(space.extremal_paths(depth, Extremity::min))},
                        {"max", extremal_json(space.extremal_paths(depth, Extremity::max))}};
    };
  });

  // perfect
  auto* perfect = app.add_subcommand("perfect", "Semi-decide whether the ordering is perfect");
  diagram_option(perfect);
  perfect->add_option("--depth", depth, "Depth budget")->required();
  perfect->callback([&] {
    action = [&] {
      check_depth(depth, "depth");
      PathSpace space(load_diagram(diagram_file));
      PerfectOrderingResult r = space.check_perfect_ordering(depth);
      json pairing = json::array();
      for (const auto& [mx, mn] : r.pairing) pairing.push_back({{"max", mx.to_string()}, {"min", mn.to_string()}});
      result.payload = {{"verdict", std::string(to_string(r.verdict))},
                        {"depth", r.depth},
                        {"pairing", pairing},
                        {"reason", r.reason}};
    };
  });

  // k0
  std::string heights_text;
  std::size_t push_levels = 0;
  auto* k0 = app.add_subcommand("k0", "Dimension group presentation with order unit");
  diagram_option(k0);
  k0->add_option("--heights", heights_text, "Level-1 tower heights (default: level-1 edge counts)");
  k0->add_option("--push", push_levels, "Also report the unit pushed forward to this level");
  k0->callback([&] {
    action = [&] {
      OrderedBratteliDiagram d = load_diagram(diagram_file);
      std::optional<BigVector> heights;
      if (!heights_text.empty()) {
        heights.emplace();
        for (std::size_t h : parse_list(heights_text, "height")) heights->push_back(BigInt(static_cast<unsigned long>(h)));
      }
      DimensionGroupPresentation pres = k0_presentation(d, heights);
      json maps = json::array();
      for (const auto& m : pres.maps) maps.push_back(big_json(m));
      json units = json::array();
      std::size_t upto = std::max(push_levels, pres.num_levels());
      if (pres.bounded()) upto = pres.num_levels();
      check_depth(upto, "push level");
      for (std::size_t n = 1; n <= upto; ++n) units.push_back(big_json(pres.unit_at(n)));
      auto free_rank = stable_free_rank(pres);
      result.payload = {{"sizes", pres.sizes},
                        {"maps", maps},
                        {"unit", big_json(pres.unit)},
                        {"unit_by_level", units},
                        {"stationary", pres.tail.has_value()},
                        {"stable_free_rank", free_rank ? json(*free_rank) : json(nullptr)}};
    };
  });

  // k1
  auto* k1 = app.add_subcommand("k1", "K1 rank from the stabilized minimal paths");
  diagram_option(k1);
  k1->add_option("--depth", depth, "Depth")->required();
  k1->callback([&] {
    action = [&] {
      check_depth(depth, "depth");
      K1Rank r = k1_rank(load_diagram(diagram_file), depth);
      result.payload = {{"rank", r.rank}, {"certified", r.certified}};
    };
  });

  // oracle
  std::string system_file;
  auto* oracle = app.add_subcommand("oracle", "K-groups of a finite permutation system via Smith normal form");
  oracle->add_option("system,--system", system_file, "System JSON file")->required();
  oracle->callback([&] {
    action = [&] {
      KOracleResult r = k_oracle_finite_system(system_from_json(read_json_file(system_file)));
      result.payload = {{"k0_rank", r.k0_rank},
                        {"k0_torsion", big_json(r.k0_torsion)},
                        {"k1_rank", r.k1_rank},
                        {"unit_image",
                         {{"free", big_json(r.unit_image.free)},
                          {"torsion", big_json(r.unit_image.torsion)},
                          {"content", big_json(r.unit_image.content)}}}};
    };
  });

  // soe
  std::string b1_file, b2_file, w_file;
  std::int64_t cap = 12;
  std::uint64_t seed = 0;
  auto* soe = app.add_subcommand("soe", "Strong orbit equivalence from an intertwining");
  soe->require_subcommand(1);
  auto* soe_check = soe->add_subcommand("check", "Run the interleaving pipeline");
  soe_check->add_option("--b1", b1_file, "First diagram")->required();
  soe_check->add_option("--b2", b2_file, "Second diagram")->required();
  soe_check->add_option("--intertwining", w_file, "Intertwining JSON")->required();
  soe_check->add_option("--depth", depth, "Depth for pairing and continuity")->required();
  soe_check->callback([&] {
    action = [&] {
      check_depth(depth + 1, "depth");
      OrderedBratteliDiagram b1 = load_diagram(b1_file), b2 = load_diagram(b2_file);
      Intertwining w = intertwining_from_json(read_json_file(w_file));
      json out = {{"interleaved_ok", false},
                  {"properties_ok", false},
                  {"pairing_ok", false},
                  {"bijection_ok", false},
                  {"continuity_ok", false},
                  {"cocycle_samples", json::array()}};
      auto fail = [&](const std::string& stage, const std::string& why) {
        result.diagnostics.push_back(stage + ": " + why);
        result.status = Status::error;
        result.exit_code = 1;
      };
      std::optional<InterleavedDiagram> b;
      try {
        b = build_interleaved(b1, b2, w);
        out["interleaved_ok"] = true;
      } catch (const Error& e) {
        fail("interleave", e.what());
      }
      if (b) {
        InterleavedReport props = check_interleaved_properties(*b);
        out["properties_ok"] = props.ok();
        for (const auto& f : props.failures)
          fail("properties", "(" + f.property + ") " + std::string(to_string(f.kind)) + " vertex " +
                                 std::to_string(f.vertex) + " at level " + std::to_string(f.level) + " has " +
                                 std::to_string(f.count) + " extremal neighbours");
        try {
          ExtremalPairing pairing = pair_extremal_paths(*b, depth);
          out["pairing_ok"] = true;
          OrbitMapRealization f = realize_orbit_map(*b, pairing);
          CylinderBijection bij = check_cylinder_bijection(f, depth);
          out["bijection_ok"] = bij.ok;
          if (!bij.ok) fail("bijection", bij.detail);
          ContinuityReport cont = check_cocycle_continuity(f, depth);
          out["continuity_ok"] = cont.ok();
          out["cylinders_checked"] = cont.cylinders_checked;
          for (const auto& [p, n] : cont.samples) out["cocycle_samples"].push_back({{"cylinder", p.to_string()}, {"n", n}});
          for (const auto& c : cont.failures)
            fail("continuity", std::string(c.direction == CocycleDirection::forward ? "forward" : "backward") +
                                   " cocycle not constant on " + c.cylinder.to_string());
          if (cont.unverified) fail("continuity", std::to_string(cont.unverified) + " values not confirmed by iteration");
        } catch (const Error& e) {
          fail("pairing", e.what());
        }
      }
      result.payload = out;
    };
  });
  auto* soe_search = soe->add_subcommand("search", "Bounded search for a stationary intertwining");
  soe_search->add_option("--b1", b1_file, "First diagram")->required();
  soe_search->add_option("--b2", b2_file, "Second diagram")->required();
  soe_search->add_option("--cap", cap, "Largest matrix entry tried");
  soe_search->add_option("--seed", seed, "Seed for the candidate order");
  soe_search->callback([&] {
    action = [&] {
      SearchResult r = search_stationary_intertwining(load_diagram(b1_file), load_diagram(b2_file), {cap, seed});
      json rejected = json::array();
      for (std::size_t i = 0; i < r.rejected.size() && i < 10; ++i)
        rejected.push_back({{"P", matrix_to_json(r.rejected[i].p)}, {"reason", r.rejected[i].reason}});
      result.payload = {{"found", r.found.has_value()},
                        {"candidates", r.candidates},
                        {"rejected", r.rejected.size()},
                        {"first_rejections", rejected}};
      if (r.found) result.payload["intertwining"] = intertwining_to_json(*r.found);
    };
  });

  // generate
  auto* generate = app.add_subcommand("generate", "Emit a diagram from a generator");
  generate->require_subcommand(1);
  std::size_t base = 2, levels = 4;
  auto* gen_odo = generate->add_subcommand("odometer", "d-odometer");
  gen_odo->add_option("--base", base, "Number of edges per level")->required();
  gen_odo->add_option("--levels", levels, "Number of levels");
  gen_odo->callback([&] {
    action = [&] {
      check_depth(levels, "levels");
      result.payload = diagram_to_json(odometer(base, levels));
    };
  });
  std::string matrix_file, order = "by_source";
  auto* gen_stat = generate->add_subcommand("stationary", "Stationary diagram from an incidence matrix");
  gen_stat->add_option("--matrix", matrix_file, "Matrix JSON file")->required();
  gen_stat->add_option("--order", order, "Edge order rule")->check(CLI::IsMember({"by_source", "reverse_source"}));
  gen_stat->add_option("--levels", levels, "Number of levels");
  gen_stat->callback([&] {
    action = [&] {
      check_depth(levels, "levels");
      CountMatrix m = matrix_from_json(read_json_file(matrix_file));
      OrderRule rule = order == "by_source" ? OrderRule::by_source : OrderRule::reverse_source;
      result.payload = diagram_to_json(stationary_adic(m, rule, levels));
    };
  });
  std::vector<std::string> part_files;
  std::string bases_text;
  auto* gen_union = generate->add_subcommand("union", "Disjoint union sharing the root");
  gen_union->add_option("parts", part_files, "Component diagram files");
  gen_union->add_option("--odometers", bases_text, "Comma-separated odometer bases instead of files");
  gen_union->add_option("--levels", levels, "Number of levels (with --odometers)");
  gen_union->callback([&] {
    action = [&] {
      std::vector<OrderedBratteliDiagram> parts;
      if (!bases_text.empty()) {
        check_depth(levels, "levels");
        for (std::size_t b : parse_list(bases_text, "base")) parts.push_back(odometer(b, levels));
      }
      for (const auto& f : part_files) parts.push_back(load_diagram(f));
      if (parts.empty()) throw UsageError("union needs component files or --odometers");
      result.payload = diagram_to_json(disjoint_union(parts));
    };
  });
  std::string lengths_text;
  bool emit_system = false;
  auto* gen_cycles = generate->add_subcommand("cycles", "Finite cycle system and its diagram");
  gen_cycles->add_option("lengths", lengths_text, "Comma-separated cycle lengths")->required();
  gen_cycles->add_option("--levels", levels, "Number of levels");
  gen_cycles->add_flag("--system", emit_system, "Emit the permutation system instead of the diagram");
  gen_cycles->callback([&] {
    action = [&] {
      check_depth(levels, "levels");
      CycleSystem cs = finite_cycle_system(parse_list(lengths_text, "length"), levels);
      result.payload = emit_system ? system_to_json(cs.system) : diagram_to_json(cs.diagram);
    };
  });
  std::string towers_file;
  auto* gen_towers = generate->add_subcommand("towers", "Diagram of a Kakutani-Rokhlin tower sequence");
  gen_towers->add_option("file", towers_file, "Tower sequence JSON")->required();
  gen_towers->callback([&] {
    action = [&] { result.payload = diagram_to_json(towers_to_diagram(towers_from_json(read_json_file(towers_file)))); };
  });

  // export-dot
  auto* dot = app.add_subcommand("export-dot", "Graphviz DOT text of a diagram");
  diagram_option(dot);
  dot->callback([&] {
    action = [&] { result.payload = {{"dot", to_dot(load_diagram(diagram_file))}}; };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    result.usage = app.help();
    return result;
  } catch (const CLI::CallForAllHelp&) {
    result.usage = app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::ParseError& e) {
    result.status = Status::error;
    result.exit_code = 2;
    result.diagnostics.push_back(e.what());
    result.usage = app.help();
    return result;
  }
  result.format = format;
  try {
    if (action) action();
  } catch (const UsageError& e) {
    result.status = Status::error;
    result.exit_code = 2;
    result.diagnostics.push_back(e.what());
  } catch (const Error& e) {
    result.status = Status::error;
    result.exit_code = e.code() == ErrorCode::parse_error ? 2 : 1;
    result.diagnostics.push_back(std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    result.status = Status::error;
    result.exit_code = 1;
    result.diagnostics.push_back(e.what());
  }
  return result;
}

}  // namespace bratteli::cli
