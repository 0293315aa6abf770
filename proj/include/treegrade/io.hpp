#pragma once
// Versioned plain-text documents for graphs, piece decompositions, and
// tabulated piece embeddings; structured JSON renderings for every report
// the library produces; Graphviz export.  Parsers attach origin:line
// diagnostics to every complaint.  Writers are deterministic end to end --
// stable ordering, no timestamps, no environment-dependent content -- so
// equal inputs give byte-identical documents.

#include <string>
#include <vector>

#include "treegrade/construction.hpp"
#include "treegrade/embedding.hpp"
#include "treegrade/rbp.hpp"
#include "treegrade/treegraded.hpp"

namespace tg {

// ---- graph documents ----

// Header "treegrade graph v1", a vertex count, one edge per line.
std::string write_graph_doc(const metric_graph& g);
metric_graph read_graph_doc(const std::string& text, const std::string& origin = "<graph>");

// ---- decomposition documents ----

// Header "treegrade pieces v1": one line per piece, the base piece, the
// scale m when the document pins one, and any certificate chains shipped
// with the instance.
struct pieces_document {
  piece_decomposition decomposition;
  long long m = 0;  // 0 when the document leaves the scale to the caller
  std::vector<bottleneck_chain> chains;
};

std::string write_pieces_doc(const rbp_structure& s);
pieces_document read_pieces_doc(const std::string& text, const std::string& origin = "<pieces>");

// Joins a parsed graph with a parsed decomposition.  The scale is
// m_override when positive, else the documented m, else 1.  Cross-document
// inconsistencies (piece vertices or chain indices out of range, empty
// cover) surface as SchemaError.
rbp_structure assemble_structure(metric_graph graph, const pieces_document& doc,
                                 long long m_override = 0);

// ---- embedding documents ----

// Header "treegrade embedding v1".  Per piece block: constants k and c,
// every coordinate tree with its edges, then one image tuple per
// hull-local vertex.  Shape compatibility with a concrete space is the
// verifier's business, not the parser's.
std::string write_embedding_doc(const std::vector<piece_tree_embedding>& embeddings);
std::vector<piece_tree_embedding> read_embedding_doc(const std::string& text,
                                                     const std::string& origin = "<embedding>");

// ---- structured reports ----

// JSON with alphabetically ordered keys; a "kind" field names the report.
std::string report_json(const verification_report& r);
std::string report_json(const convexity_report& r, int piece);
std::string report_json(const tree_graded_report& r);
std::string report_json(const distortion_report& r);
std::string report_json(const embedding_report& r);
std::string report_json(const manning_report& r);
std::string report_json(const cut_scan_report& r);
// The full construction audit: trace entries plus the derived per-piece
// data (basepoints, levels, c-points, classes, parents).
std::string trace_json(const construction_state& st);

// Single-paragraph human summaries derived from the same structs; rendered
// output is never parsed back.
std::string report_text(const verification_report& r);
std::string report_text(const tree_graded_report& r);
std::string report_text(const distortion_report& r);
std::string report_text(const embedding_report& r);
std::string report_text(const manning_report& r);

// ---- graphviz ----

std::string dot_graph(const metric_graph& g, const std::string& name);
// Piece copies become labeled clusters; arc interiors stay bare.
std::string dot_space(const tree_graded_space& t, const std::string& name);

// ---- files ----

std::string slurp(const std::string& path);
void spill(const std::string& path, const std::string& text);

}  // namespace tg
