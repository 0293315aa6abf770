#include "treegrade/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace tg {
namespace {

using nlohmann::json;

// ---- line scanning ----

struct doc_line {
  int number = 0;                   // 1-based line number in the source text
  std::vector<std::string> tokens;  // whitespace-split, comments stripped
};

[[noreturn]] void complain(const std::string& origin, int line, const std::string& message) {
  fail(errc::schema_error, origin + ":" + std::to_string(line) + ": " + message);
}

// Splits text into token lines, dropping blanks and '#' comments.
std::vector<doc_line> scan_lines(const std::string& text) {
  std::vector<doc_line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream split(raw);
    doc_line line{number, {}};
    std::string token;
    while (split >> token) line.tokens.push_back(token);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

long long parse_int(const std::string& origin, const doc_line& line, std::size_t field,
                    long long min_value, long long max_value) {
  if (field >= line.tokens.size())
    complain(origin, line.number,
             "missing field " + std::to_string(field + 1) + " after '" + line.tokens[0] + "'");
  const std::string& tok = line.tokens[field];
  long long value = 0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || end != tok.data() + tok.size())
    complain(origin, line.number,
             "field " + std::to_string(field + 1) + ": expected an integer, got '" + tok + "'");
  if (value < min_value || value > max_value)
    complain(origin, line.number,
             "field " + std::to_string(field + 1) + ": value " + tok + " out of range [" +
                 std::to_string(min_value) + ", " + std::to_string(max_value) + "]");
  return value;
}

// Documents describe desk-scale instances; anything past this is a typo,
// and rejecting it here keeps parse errors cheap.
constexpr long long max_declared = 10'000'000;

void want_arity(const std::string& origin, const doc_line& line, std::size_t tokens) {
  if (line.tokens.size() != tokens)
    complain(origin, line.number,
             "'" + line.tokens[0] + "' takes " + std::to_string(tokens - 1) + " field(s), got " +
                 std::to_string(line.tokens.size() - 1));
}

void want_header(const std::string& origin, const std::vector<doc_line>& lines,
                 const std::string& middle) {
  if (lines.empty()) complain(origin, 1, "empty document, expected 'treegrade " + middle + " v1'");
  const doc_line& first = lines.front();
  if (first.tokens.size() != 3 || first.tokens[0] != "treegrade" || first.tokens[1] != middle ||
      first.tokens[2] != "v1")
    complain(origin, first.number, "expected header 'treegrade " + middle + " v1'");
}

// Rewraps construction-time complaints (duplicate edges, disconnected
// graphs, ...) as schema errors pointing at the document.
template <typename Fn>
auto lift_schema(const std::string& origin, Fn&& fn) {
  try {
    return fn();
  } catch (const error& e) {
    fail(errc::schema_error, origin + ": " + e.what());
  }
}

// ---- json helpers ----

json witness_json(const path_witness& w) { return json(w.vertices); }

json chain_json(const bottleneck_chain& chain) {
  json j;
  j["pieces"] = chain.piece_indices;
  j["source"] = chain.source;
  j["target"] = chain.target;
  j["witnesses"] = chain.witnesses;
  return j;
}

std::string finish(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---- graph documents ----

std::string write_graph_doc(const metric_graph& g) {
  std::ostringstream out;
  out << "treegrade graph v1\n";
  out << "vertices " << g.vertex_count() << "\n";
  for (const auto& [u, v] : g.edges()) out << "edge " << u << " " << v << "\n";
  return out.str();
}

metric_graph read_graph_doc(const std::string& text, const std::string& origin) {
  auto lines = scan_lines(text);
  want_header(origin, lines, "graph");

  vertex_id vertices = -1;
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const doc_line& line = lines[i];
    const std::string& kw = line.tokens[0];
    if (kw == "vertices") {
      want_arity(origin, line, 2);
      if (vertices >= 0) complain(origin, line.number, "duplicate 'vertices' line");
      vertices = static_cast<vertex_id>(parse_int(origin, line, 1, 1, max_declared));
    } else if (kw == "edge") {
      want_arity(origin, line, 3);
      if (vertices < 0) complain(origin, line.number, "'edge' before 'vertices'");
      auto u = static_cast<vertex_id>(parse_int(origin, line, 1, 0, vertices - 1));
      auto v = static_cast<vertex_id>(parse_int(origin, line, 2, 0, vertices - 1));
      edges.emplace_back(u, v);
    } else {
      complain(origin, line.number, "unknown keyword '" + kw + "' in a graph document");
    }
  }
  if (vertices < 0) complain(origin, lines.back().number, "missing 'vertices' line");
  return lift_schema(origin, [&] { return metric_graph(vertices, std::move(edges)); });
}

// ---- decomposition documents ----

std::string write_pieces_doc(const rbp_structure& s) {
  std::ostringstream out;
  out << "treegrade pieces v1\n";
  out << "m " << s.m << "\n";
  out << "base " << s.decomposition.base_piece << "\n";
  for (const point_set& piece : s.decomposition.pieces) {
    out << "piece";
    for (vertex_id v : piece) out << " " << v;
    out << "\n";
  }
  for (const auto& [key, chain] : s.certificates) {
    out << "chain " << chain.source << " " << chain.target << " pieces";
    for (int p : chain.piece_indices) out << " " << p;
    out << " witnesses";
    for (vertex_id w : chain.witnesses) out << " " << w;
    out << "\n";
  }
  return out.str();
}

pieces_document read_pieces_doc(const std::string& text, const std::string& origin) {
  auto lines = scan_lines(text);
  want_header(origin, lines, "pieces");

  pieces_document doc;
  bool saw_m = false;
  bool saw_base = false;
  constexpr long long big = std::numeric_limits<vertex_id>::max();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const doc_line& line = lines[i];
    const std::string& kw = line.tokens[0];
    if (kw == "m") {
      want_arity(origin, line, 2);
      if (saw_m) complain(origin, line.number, "duplicate 'm' line");
      saw_m = true;
      doc.m = parse_int(origin, line, 1, 1, std::numeric_limits<long long>::max() / 4);
    } else if (kw == "base") {
      want_arity(origin, line, 2);
      if (saw_base) complain(origin, line.number, "duplicate 'base' line");
      saw_base = true;
      doc.decomposition.base_piece = static_cast<int>(parse_int(origin, line, 1, 0, big));
    } else if (kw == "piece") {
      if (line.tokens.size() < 2)
        complain(origin, line.number,
                 "piece " + std::to_string(doc.decomposition.pieces.size()) + " is empty");
      std::vector<vertex_id> members;
      for (std::size_t f = 1; f < line.tokens.size(); ++f)
        members.push_back(static_cast<vertex_id>(parse_int(origin, line, f, 0, big)));
      doc.decomposition.pieces.push_back(point_set(std::move(members)));
    } else if (kw == "chain") {
      bottleneck_chain chain;
      chain.source = static_cast<int>(parse_int(origin, line, 1, 0, big));
      chain.target = static_cast<int>(parse_int(origin, line, 2, 0, big));
      if (line.tokens.size() < 4 || line.tokens[3] != "pieces")
        complain(origin, line.number, "expected 'pieces' as field 4 of a chain line");
      std::size_t f = 4;
      while (f < line.tokens.size() && line.tokens[f] != "witnesses")
        chain.piece_indices.push_back(static_cast<int>(parse_int(origin, line, f++, 0, big)));
      if (f == line.tokens.size())
        complain(origin, line.number, "chain line is missing the 'witnesses' marker");
      for (++f; f < line.tokens.size(); ++f)
        chain.witnesses.push_back(static_cast<vertex_id>(parse_int(origin, line, f, 0, big)));
      if (chain.piece_indices.empty())
        complain(origin, line.number, "chain lists no pieces");
      if (chain.witnesses.size() + 1 != chain.piece_indices.size())
        complain(origin, line.number,
                 "chain with " + std::to_string(chain.piece_indices.size()) +
                     " piece(s) needs " + std::to_string(chain.piece_indices.size() - 1) +
                     " witness(es), got " + std::to_string(chain.witnesses.size()));
      doc.chains.push_back(std::move(chain));
    } else {
      complain(origin, line.number, "unknown keyword '" + kw + "' in a pieces document");
    }
  }
  if (doc.decomposition.pieces.empty())
    complain(origin, lines.back().number, "document declares no pieces");
  return doc;
}

rbp_structure assemble_structure(metric_graph graph, const pieces_document& doc,
                                 long long m_override) {
  rbp_structure s;
  s.graph = std::move(graph);
  s.decomposition = doc.decomposition;
  s.m = m_override > 0 ? m_override : (doc.m > 0 ? doc.m : 1);
  lift_schema("<pieces>", [&] { s.decomposition.validate(s.graph); return 0; });
  const int pieces = s.piece_count();
  for (const bottleneck_chain& chain : doc.chains) {
    auto in_range = [&](int p) { return p >= 0 && p < pieces; };
    if (!in_range(chain.source) || !in_range(chain.target)) {
      fail(errc::schema_error, "<pieces>: chain " + std::to_string(chain.source) + " -> " +
                                   std::to_string(chain.target) + " names a missing piece");
    }
    for (int p : chain.piece_indices) {
      if (!in_range(p))
        fail(errc::schema_error, "<pieces>: chain " + std::to_string(chain.source) + " -> " +
                                     std::to_string(chain.target) + " runs through missing piece " +
                                     std::to_string(p));
    }
    s.store_chain(chain);
  }
  return s;
}

// ---- embedding documents ----

std::string write_embedding_doc(const std::vector<piece_tree_embedding>& embeddings) {
  std::ostringstream out;
  out << "treegrade embedding v1\n";
  for (const piece_tree_embedding& e : embeddings) {
    out << "piece " << e.piece << " k " << e.k << " c " << e.c << "\n";
    for (const metric_graph& tree : e.trees) {
      out << "tree " << tree.vertex_count() << "\n";
      for (const auto& [u, v] : tree.edges()) out << "edge " << u << " " << v << "\n";
    }
    for (std::size_t v = 0; v < e.image.size(); ++v) {
      out << "map " << v;
      for (vertex_id x : e.image[v]) out << " " << x;
      out << "\n";
    }
  }
  return out.str();
}

namespace {

// Accumulates one embedding block; flushed on the next 'piece' line or EOF.
struct embedding_block {
  std::string origin;
  int start_line = 0;
  piece_tree_embedding out;
  std::optional<vertex_id> pending_vertices;  // declared size of the open tree
  std::vector<std::pair<vertex_id, vertex_id>> pending_edges;
  bool maps_started = false;
  std::map<std::size_t, std::vector<vertex_id>> rows;

  void close_tree() {
    if (!pending_vertices) return;
    out.trees.push_back(lift_schema(
        origin, [&] { return metric_graph(*pending_vertices, std::move(pending_edges)); }));
    pending_vertices.reset();
    pending_edges.clear();
  }

  piece_tree_embedding flush() {
    close_tree();
    if (out.trees.empty())
      complain(origin, start_line,
               "piece " + std::to_string(out.piece) + " declares no coordinate trees");
    if (rows.empty())
      complain(origin, start_line,
               "piece " + std::to_string(out.piece) + " declares no image tuples");
    const std::size_t count = rows.rbegin()->first + 1;
    out.image.assign(count, {});
    for (std::size_t v = 0; v < count; ++v) {
      auto it = rows.find(v);
      if (it == rows.end())
        complain(origin, start_line, "piece " + std::to_string(out.piece) +
                                         " is missing the image tuple for vertex " +
                                         std::to_string(v));
      out.image[v] = std::move(it->second);
    }
    return std::move(out);
  }
};

}  // namespace

std::vector<piece_tree_embedding> read_embedding_doc(const std::string& text,
                                                     const std::string& origin) {
  auto lines = scan_lines(text);
  want_header(origin, lines, "embedding");

  std::vector<piece_tree_embedding> result;
  std::optional<embedding_block> block;
  constexpr long long big = std::numeric_limits<vertex_id>::max();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const doc_line& line = lines[i];
    const std::string& kw = line.tokens[0];
    if (kw == "piece") {
      want_arity(origin, line, 6);
      if (line.tokens[2] != "k" || line.tokens[4] != "c")
        complain(origin, line.number, "expected 'piece <index> k <k> c <c>'");
      if (block) result.push_back(block->flush());
      block.emplace();
      block->origin = origin;
      block->start_line = line.number;
      block->out.piece = static_cast<int>(parse_int(origin, line, 1, 0, big));
      block->out.k = parse_int(origin, line, 3, 1, big);
      block->out.c = parse_int(origin, line, 5, 0, big);
    } else if (kw == "tree") {
      want_arity(origin, line, 2);
      if (!block) complain(origin, line.number, "'tree' before any 'piece' line");
      if (block->maps_started)
        complain(origin, line.number, "'tree' after 'map'; declare all trees first");
      block->close_tree();
      block->pending_vertices = static_cast<vertex_id>(parse_int(origin, line, 1, 1, max_declared));
    } else if (kw == "edge") {
      want_arity(origin, line, 3);
      if (!block || !block->pending_vertices)
        complain(origin, line.number, "'edge' before any 'tree' line");
      const long long n = *block->pending_vertices;
      block->pending_edges.emplace_back(
          static_cast<vertex_id>(parse_int(origin, line, 1, 0, n - 1)),
          static_cast<vertex_id>(parse_int(origin, line, 2, 0, n - 1)));
    } else if (kw == "map") {
      if (!block) complain(origin, line.number, "'map' before any 'piece' line");
      block->close_tree();
      block->maps_started = true;
      if (line.tokens.size() != 2 + block->out.trees.size())
        complain(origin, line.number,
                 "map tuple needs " + std::to_string(block->out.trees.size()) +
                     " coordinate(s), got " + std::to_string(line.tokens.size() - 2));
      auto local = static_cast<std::size_t>(parse_int(origin, line, 1, 0, max_declared));
      if (block->rows.count(local))
        complain(origin, line.number, "duplicate map line for vertex " + std::to_string(local));
      std::vector<vertex_id> row;
      for (std::size_t j = 0; j < block->out.trees.size(); ++j)
        row.push_back(static_cast<vertex_id>(
            parse_int(origin, line, 2 + j, 0, block->out.trees[j].vertex_count() - 1)));
      block->rows.emplace(local, std::move(row));
    } else {
      complain(origin, line.number, "unknown keyword '" + kw + "' in an embedding document");
    }
  }
  if (block) result.push_back(block->flush());
  return result;
}

// ---- structured reports ----

std::string report_json(const verification_report& r) {
  json j;
  j["kind"] = "verification";
  j["all_verified"] = r.all_verified;
  j["m"] = r.m;
  j["verified"] = r.verified_count;
  j["refuted"] = r.refuted_count;
  j["unknown"] = r.unknown_count;
  json pairs = json::array();
  for (const pair_report& p : r.pairs) {
    json e;
    e["i"] = p.i;
    e["j"] = p.j;
    e["verdict"] = pair_verdict_name(p.verdict);
    e["degenerate"] = p.degenerate;
    if (p.chain) e["chain"] = chain_json(*p.chain);
    if (p.refutation) e["refutation"] = witness_json(*p.refutation);
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);
  return finish(j);
}

std::string report_json(const convexity_report& r, int piece) {
  json j;
  j["kind"] = "quasi_convexity";
  j["piece"] = piece;
  j["holds"] = r.holds;
  j["radius"] = r.radius;
  j["pairs_checked"] = r.pairs_checked;
  if (!r.holds) {
    j["worst_offender"] = r.worst_offender;
    j["worst_distance"] = r.worst_distance;
  }
  return finish(j);
}

std::string report_json(const tree_graded_report& r) {
  json j;
  j["kind"] = "tree_graded";
  j["passed"] = r.passed;
  j["single_point_gluing"] = r.single_point_gluing;
  j["underlying_acyclic"] = r.underlying_acyclic;
  j["cycles_in_pieces"] = r.cycles_in_pieces;
  j["detail"] = r.detail;
  return finish(j);
}

std::string report_json(const distortion_report& r) {
  json j;
  j["kind"] = "distortion";
  j["pairs_checked"] = r.pairs_checked;
  j["max_excess"] = r.max_excess;
  j["max_lipschitz_violation"] = r.max_lipschitz_violation;
  j["additive_bound"] = r.additive_bound;
  j["bound_satisfied"] = r.bound_satisfied;
  json histogram = json::array();
  for (const auto& [excess, count] : r.excess_histogram)
    histogram.push_back(json::array({excess, count}));
  j["excess_histogram"] = std::move(histogram);
  return finish(j);
}

std::string report_json(const embedding_report& r) {
  json j;
  j["kind"] = "embedding";
  j["passed"] = r.passed;
  j["coordinates"] = r.coordinates;
  j["piece_k"] = r.piece_k;
  j["piece_c"] = r.piece_c;
  j["pairs_checked"] = r.pairs_checked;
  j["lifted_pairs"] = r.lifted_pairs;
  j["unscaled_hits"] = r.unscaled_hits;
  j["step_lower"] = r.step_lower;
  j["composite_lower"] = r.composite_lower;
  j["composite_upper"] = r.composite_upper;
  return finish(j);
}

std::string report_json(const manning_report& r) {
  json j;
  j["kind"] = "bottleneck";
  j["passed"] = r.passed;
  j["delta"] = r.delta.str();
  j["pairs_checked"] = r.pairs_checked;
  json failures = json::array();
  for (const manning_failure& f : r.failures) {
    json e;
    e["x"] = f.x;
    e["y"] = f.y;
    e["midpoint"] = f.midpoint;
    e["avoiding_path"] = witness_json(f.avoiding_path);
    failures.push_back(std::move(e));
  }
  j["failures"] = std::move(failures);
  return finish(j);
}

std::string report_json(const cut_scan_report& r) {
  json j;
  j["kind"] = "cut_scan";
  j["ok"] = r.ok;
  j["balls_checked"] = r.balls_checked;
  if (!r.ok) {
    j["center"] = r.center;
    j["radius"] = r.radius;
    j["piece"] = r.piece;
  }
  return finish(j);
}

std::string trace_json(const construction_state& st) {
  json j;
  j["kind"] = "construction";
  j["basepoint"] = st.e;
  j["base_piece"] = st.e_piece;
  j["stratum_width"] = st.r;
  j["m"] = st.structure.m;
  j["basepoints"] = st.basepoints;
  j["levels"] = st.levels;
  j["c_points"] = st.c_points;
  j["parents"] = st.parents;
  j["classes"] = st.classes;
  json steps = json::array();
  for (const trace_entry& t : st.trace) {
    json e;
    e["check"] = t.check;
    e["pass"] = t.pass;
    e["detail"] = t.detail;
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  return finish(j);
}

// ---- human summaries ----

std::string report_text(const verification_report& r) {
  std::ostringstream out;
  out << "verification at m=" << r.m << ": " << (r.all_verified ? "all verified" : "NOT verified")
      << " (" << r.verified_count << " verified, " << r.refuted_count << " refuted, "
      << r.unknown_count << " unknown)\n";
  for (const pair_report& p : r.pairs) {
    if (p.verdict == pair_verdict::verified) continue;
    out << "  pair (" << p.i << ", " << p.j << "): " << pair_verdict_name(p.verdict);
    if (p.refutation) {
      out << ", avoiding path";
      for (vertex_id v : p.refutation->vertices) out << " " << v;
    }
    out << "\n";
  }
  return out.str();
}

std::string report_text(const tree_graded_report& r) {
  std::ostringstream out;
  out << "tree-graded axioms: " << (r.passed ? "pass" : "FAIL");
  if (!r.passed) out << " (" << r.detail << ")";
  out << "\n";
  return out.str();
}

std::string report_text(const distortion_report& r) {
  std::ostringstream out;
  out << "distortion over " << r.pairs_checked << " pair(s): max excess " << r.max_excess
      << " against bound " << r.additive_bound << ", "
      << (r.bound_satisfied && r.max_lipschitz_violation == 0 ? "within bounds" : "VIOLATED");
  if (r.max_lipschitz_violation > 0)
    out << " (collapse expands by " << r.max_lipschitz_violation << ")";
  out << "\n";
  return out.str();
}

std::string report_text(const embedding_report& r) {
  std::ostringstream out;
  out << "embedding into " << r.coordinates << " tree(s): " << (r.passed ? "pass" : "FAIL")
      << ", piece constants (" << r.piece_k << ", " << r.piece_c << "), " << r.pairs_checked
      << " product pair(s), " << r.lifted_pairs << " lifted pair(s), sup form exact on "
      << r.unscaled_hits << ", step lower factor " << r.step_lower << ", composite ["
      << r.composite_lower << ", " << r.composite_upper << "]\n";
  return out.str();
}

std::string report_text(const manning_report& r) {
  std::ostringstream out;
  out << "bottleneck property at delta=" << r.delta.str() << ": "
      << (r.passed ? "pass" : "FAIL") << " over " << r.pairs_checked << " pair(s)\n";
  for (const manning_failure& f : r.failures) {
    out << "  pair (" << f.x << ", " << f.y << ") midpoint " << f.midpoint << ", avoiding path";
    for (vertex_id v : f.avoiding_path.vertices) out << " " << v;
    out << "\n";
  }
  return out.str();
}

// ---- graphviz ----

std::string dot_graph(const metric_graph& g, const std::string& name) {
  std::ostringstream out;
  out << "graph " << name << " {\n  node [shape=circle];\n";
  for (vertex_id v = 0; v < g.vertex_count(); ++v) out << "  " << v << ";\n";
  for (const auto& [u, v] : g.edges()) out << "  " << u << " -- " << v << ";\n";
  out << "}\n";
  return out.str();
}

std::string dot_space(const tree_graded_space& t, const std::string& name) {
  std::ostringstream out;
  out << "graph " << name << " {\n  node [shape=circle];\n";
  for (int i = 0; i < t.piece_count(); ++i) {
    out << "  subgraph cluster_piece_" << i << " {\n    label=\"piece " << i << "\";\n";
    for (vertex_id v : t.copy_sets[i]) out << "    " << v << ";\n";
    out << "  }\n";
  }
  for (const auto& [u, v] : t.realized.edges()) out << "  " << u << " -- " << v << ";\n";
  out << "}\n";
  return out.str();
}

// ---- files ----

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) fail(errc::io_error, "read failure on '" + path + "'");
  return out.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(errc::io_error, "write failure on '" + path + "'");
}

}  // namespace tg
