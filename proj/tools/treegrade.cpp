// Command-line front end: verify bottleneck structures, build their
// tree-graded companion spaces, measure distortion, run the product-of-trees
// embedding, generate seeded instances, and test the midpoint bottleneck
// property.  All reports are deterministic for a fixed input and
// configuration: stable ordering, no timestamps, thread count only ever
// changes wall time.
//
// Exit codes: 0 success (verify: all pairs verified), 1 a check refuted
// (verify: some pair refuted), 2 verify only: some pair unknown, 3 runtime
// error (I/O, schema, precondition), 4 usage error.

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "treegrade/construction.hpp"
#include "treegrade/embedding.hpp"
#include "treegrade/errors.hpp"
#include "treegrade/generators.hpp"
#include "treegrade/io.hpp"
#include "treegrade/metric_graph.hpp"
#include "treegrade/rbp.hpp"
#include "treegrade/treegraded.hpp"

namespace {

using namespace tg;

struct run_config {
  std::string input;      // graph document
  std::string pieces;     // decomposition document
  std::string out;        // report file, or artifact directory for build/gen
  std::string artifacts;  // optional artifact directory for embed
  std::string embedding;  // optional embedding document for embed
  long long m = 0;        // 0: use the scale documented in the pieces file
  long long r = 0;        // 0: default 160M
  long long b = 0;        // 0: default 15M
  long long basepoint = -1;  // -1: smallest vertex of the base piece
  std::string pairs_text = "all";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string format = "json";
  bool thicken_first = false;
  bool dot = false;
  bool certify = false;
  // generator knobs
  std::string family = "tree_of_pieces";
  std::string shape;
  int count = 4;
  int min_size = 3;
  int max_size = 8;
  int grid_n = 3;
  int k = 2;
  std::string delta = "2";
};

sample_spec make_pairs(const run_config& c) {
  sample_spec spec = sample_spec::parse(c.pairs_text, c.seed);
  if (spec.kind == sample_spec::mode::sample && !c.seed_set)
    fail(errc::invalid_argument, "--pairs sample:K needs an explicit --seed");
  return spec;
}

// Exhaustive scans honor the TREEGRADE_MAX_EXHAUSTIVE cap: exceeding it is
// a hard error rather than a silent downgrade, so output bytes never depend
// on the environment.
void enforce_cap(std::uint64_t items, const sample_spec& spec) {
  if (spec.kind != sample_spec::mode::all) return;
  const char* raw = std::getenv("TREEGRADE_MAX_EXHAUSTIVE");
  if (!raw) return;
  std::string text(raw);
  std::uint64_t cap = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
  if (ec != std::errc() || end != text.data() + text.size())
    fail(errc::invalid_argument, "TREEGRADE_MAX_EXHAUSTIVE is not an integer: '" + text + "'");
  const std::uint64_t pairs = items * (items - 1) / 2;
  if (pairs > cap)
    fail(errc::invalid_argument,
         "exhaustive scan over " + std::to_string(pairs) + " pairs exceeds TREEGRADE_MAX_EXHAUSTIVE=" +
             std::to_string(cap) + "; use --pairs sample:K with --seed");
}

rbp_structure load_structure(const run_config& c) {
  metric_graph graph = read_graph_doc(slurp(c.input), c.input);
  pieces_document doc = read_pieces_doc(slurp(c.pieces), c.pieces);
  return assemble_structure(std::move(graph), doc, c.m);
}

void emit(const run_config& c, const std::string& structured, const std::string& human) {
  const std::string& body = c.format == "text" ? human : structured;
  if (c.out.empty())
    std::cout << body;
  else
    spill(c.out, body);
}

std::filesystem::path artifact_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(errc::io_error, "cannot create '" + out + "': " + ec.message());
  return dir;
}

// Runs full verification, requires every pair verified, and stores the
// found chains so the construction can reuse them.
verification_report verify_and_harvest(rbp_structure& s, const sample_spec& spec, int threads) {
  verification_report report = verify_rbp(s, spec, threads);
  if (!report.all_verified) {
    for (const pair_report& p : report.pairs) {
      if (p.verdict == pair_verdict::verified) continue;
      fail(errc::missing_certificate,
           "piece pair (" + std::to_string(p.i) + ", " + std::to_string(p.j) + ") is " +
               pair_verdict_name(p.verdict) + " at m=" + std::to_string(s.m) +
               "; construction needs a fully verified structure");
    }
  }
  for (const pair_report& p : report.pairs)
    if (p.chain) s.store_chain(*p.chain);
  return report;
}

vertex_id pick_basepoint(const run_config& c, const rbp_structure& s) {
  if (c.basepoint >= 0) {
    if (c.basepoint >= s.graph.vertex_count())
      fail(errc::invalid_argument, "--basepoint " + std::to_string(c.basepoint) +
                                       " is not a vertex of the input graph");
    return static_cast<vertex_id>(c.basepoint);
  }
  // Default: the smallest base-piece vertex owned by that piece alone, so
  // the construction can locate it unambiguously.
  const point_set& base = s.piece(s.decomposition.base_piece);
  for (vertex_id v : base) {
    int owners = 0;
    for (const point_set& piece : s.decomposition.pieces) owners += piece.contains(v) ? 1 : 0;
    if (owners == 1) return v;
  }
  return base.items().front();
}

// ---- verify ----

int cmd_verify(const run_config& c) {
  rbp_structure s = load_structure(c);
  sample_spec spec = make_pairs(c);
  enforce_cap(static_cast<std::uint64_t>(s.piece_count()), spec);
  verification_report report = verify_rbp(s, spec, c.threads);
  emit(c, report_json(report), report_text(report));
  if (report.all_verified) return 0;
  return report.refuted_count > 0 ? 1 : 2;
}

// ---- build ----

int cmd_build(const run_config& c) {
  if (c.out.empty()) fail(errc::invalid_argument, "build needs --out <directory>");
  rbp_structure s = load_structure(c);
  const long long b = c.b > 0 ? c.b : 15 * s.m;

  vertex_id e = -1;
  if (c.thicken_first) {
    thicken_result th = thicken(s, b);
    s = std::move(th.structure);
    e = th.basepoint;
  } else {
    cut_scan_report scan = scan_small_cuts(s, b);
    if (!scan.ok)
      fail(errc::precondition_failed,
           "open ball B(" + std::to_string(scan.center) + "; " + std::to_string(scan.radius) +
               ") cuts piece " + std::to_string(scan.piece) +
               " while meeting it in diameter <= " + std::to_string(2 * b) +
               "; thicken the structure first (--thicken) or supply thick pieces");
    e = pick_basepoint(c, s);
  }
  if (c.thicken_first && c.basepoint >= 0)
    fail(errc::invalid_argument, "--basepoint conflicts with --thicken (the thickened space "
                                 "adjoins its own basepoint)");

  verify_and_harvest(s, make_pairs(c), c.threads);
  construction_state st = build_construction(s, e, c.r);
  tree_graded_space t = build_tree_graded(st);
  tree_graded_report space_report = verify_tree_graded(t);
  collapse(t, st);  // raises if the collapse is not 1-Lipschitz

  std::filesystem::path dir = artifact_dir(c.out);
  spill((dir / "realized.tg").string(), write_graph_doc(t.realized));
  spill((dir / "underlying.tg").string(), write_graph_doc(t.underlying_tree));
  spill((dir / "trace.json").string(), trace_json(st));
  spill((dir / "space.json").string(), report_json(space_report));
  if (c.dot) {
    spill((dir / "realized.dot").string(), dot_space(t, "realized"));
    spill((dir / "underlying.dot").string(), dot_graph(t.underlying_tree, "underlying"));
  }

  std::cout << "built tree-graded space: " << t.piece_count() << " piece cop"
            << (t.piece_count() == 1 ? "y" : "ies") << ", " << t.arcs.size() << " arc(s), "
            << t.realized.vertex_count() << " realized vertices, max level " << st.max_level()
            << "\n"
            << report_text(space_report) << "artifacts: " << c.out << "\n";
  return space_report.passed ? 0 : 1;
}

// ---- distort ----

int cmd_distort(const run_config& c) {
  rbp_structure s = load_structure(c);
  verify_and_harvest(s, sample_spec::all(), c.threads);
  construction_state st = build_construction(s, pick_basepoint(c, s), c.r);
  tree_graded_space t = build_tree_graded(st);
  sample_spec spec = make_pairs(c);
  enforce_cap(static_cast<std::uint64_t>(t.realized.vertex_count()), spec);
  distortion_report report = measure_distortion(t, st, spec);
  emit(c, report_json(report), report_text(report));
  return report.bound_satisfied && report.max_lipschitz_violation == 0 ? 0 : 1;
}

// ---- embed ----

int cmd_embed(const run_config& c) {
  rbp_structure s = load_structure(c);
  verify_and_harvest(s, sample_spec::all(), c.threads);
  construction_state st = build_construction(s, pick_basepoint(c, s), c.r);
  tree_graded_space t = build_tree_graded(st);

  std::vector<piece_tree_embedding> embeds =
      c.embedding.empty() ? bundled_embeddings(t)
                          : read_embedding_doc(slurp(c.embedding), c.embedding);
  product_space p = replace_pieces(t, std::move(embeds));
  coordinate_collapse cc = coordinate_trees(p);

  sample_spec spec = make_pairs(c);
  enforce_cap(static_cast<std::uint64_t>(p.space.realized.vertex_count()), spec);
  embedding_report report = measure_embedding(p, cc, spec);
  emit(c, report_json(report), report_text(report));

  if (!c.artifacts.empty()) {
    std::filesystem::path dir = artifact_dir(c.artifacts);
    spill((dir / "product.tg").string(), write_graph_doc(p.space.realized));
    spill((dir / "embedding.tg").string(), write_embedding_doc(p.embeddings));
    for (std::size_t j = 0; j < cc.trees.size(); ++j) {
      const std::string stem = "tree_" + std::to_string(j);
      spill((dir / (stem + ".tg")).string(), write_graph_doc(cc.trees[j]));
      if (c.dot) spill((dir / (stem + ".dot")).string(), dot_graph(cc.trees[j], stem));
    }
    if (c.dot) spill((dir / "product.dot").string(), dot_space(p.space, "product"));
  }
  return report.passed ? 0 : 1;
}

// ---- gen ----

piece_template::shape parse_shape(const std::string& name) {
  if (name == "cycle") return piece_template::shape::cycle;
  if (name == "path") return piece_template::shape::path;
  if (name == "complete") return piece_template::shape::complete;
  fail(errc::invalid_argument, "unknown piece shape '" + name + "'");
}

int cmd_gen(const run_config& c) {
  if (c.out.empty()) fail(errc::invalid_argument, "gen needs --out <directory>");
  generator_spec spec;
  spec.family = parse_gen_family(c.family);
  spec.pieces = c.count;
  spec.min_size = c.min_size;
  spec.max_size = c.max_size;
  spec.grid_n = c.grid_n;
  spec.k = c.k;
  spec.seed = c.seed;
  if (!c.shape.empty()) spec.templates.push_back({parse_shape(c.shape), c.min_size, c.max_size});
  spec.validate();

  std::filesystem::path dir = artifact_dir(c.out);
  metric_graph graph;
  rbp_structure s;
  bool with_pieces = true;

  if (spec.family == gen_family::grid) {
    auto [g, decomposition] = gen_grid(spec.grid_n);
    graph = std::move(g);
    s.decomposition = std::move(decomposition);
  } else if (spec.family == gen_family::subdivision) {
    if (c.input.empty()) fail(errc::invalid_argument, "gen --family subdivision needs --input");
    metric_graph base = read_graph_doc(slurp(c.input), c.input);
    graph = subdivide(base, spec.k).graph;
    with_pieces = false;
  } else {
    generated_instance instance = gen_tree_of_pieces(spec);
    graph = std::move(instance.graph);
    if (c.certify) {
      if (c.m > 0)
        fail(errc::invalid_argument, "--certify pins the scale itself; drop --M");
      s = tree_graded_certificate(graph, instance.decomposition);
    } else {
      s.decomposition = std::move(instance.decomposition);
    }
  }

  if (with_pieces) {
    s.graph = graph;
    if (!c.certify) s.m = c.m > 0 ? c.m : 2;
    spill((dir / "pieces.tg").string(), write_pieces_doc(s));
  }
  spill((dir / "graph.tg").string(), write_graph_doc(graph));
  if (c.dot) spill((dir / "graph.dot").string(), dot_graph(graph, "generated"));

  std::cout << "generated " << gen_family_name(spec.family) << ": " << graph.vertex_count()
            << " vertices, " << graph.edge_count() << " edges";
  if (with_pieces) std::cout << ", " << s.piece_count() << " pieces at m=" << s.m;
  std::cout << " -> " << c.out << "\n";
  return 0;
}

// ---- bp ----

int cmd_bp(const run_config& c) {
  metric_graph g = read_graph_doc(slurp(c.input), c.input);
  sample_spec spec = make_pairs(c);
  enforce_cap(static_cast<std::uint64_t>(g.vertex_count()), spec);
  manning_report report = check_manning_bp(g, rational::parse(c.delta), spec);
  emit(c, report_json(report), report_text(report));
  return report.passed ? 0 : 1;
}

// ---- wiring ----

void add_io_flags(CLI::App* sub, run_config& c, bool pieces_required) {
  sub->add_option("--input", c.input, "graph document")->required();
  auto* pieces = sub->add_option("--pieces", c.pieces, "piece decomposition document");
  if (pieces_required) pieces->required();
}

void add_check_flags(CLI::App* sub, run_config& c) {
  sub->add_option("--pairs", c.pairs_text, "pair selection: all or sample:K (default all)");
  sub->add_option("--seed", c.seed, "seed for sampled pair selection")
      ->each([&c](const std::string&) { c.seed_set = true; });
  sub->add_option("--threads", c.threads, "worker threads (wall time only, never output)")
      ->check(CLI::PositiveNumber);
}

void add_report_flags(CLI::App* sub, run_config& c) {
  sub->add_option("--format", c.format, "report format (default json)")
      ->check(CLI::IsMember({"json", "text"}));
  sub->add_option("--out", c.out, "report file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relative bottleneck verification and tree-graded companion spaces"};
  app.require_subcommand(1);
  run_config c;

  CLI::App* verify = app.add_subcommand(
      "verify", "check the relative bottleneck property over piece pairs");
  add_io_flags(verify, c, true);
  verify->add_option("--M", c.m, "bottleneck scale; overrides the documented m");
  add_check_flags(verify, c);
  add_report_flags(verify, c);

  CLI::App* build = app.add_subcommand(
      "build", "assemble the tree-graded companion space of a verified structure");
  add_io_flags(build, c, true);
  build->add_option("--M", c.m, "bottleneck scale; overrides the documented m");
  build->add_option("--R", c.r, "stratum width (default 160M)");
  build->add_option("--b", c.b, "cut-scan / thickening radius (default 15M)");
  build->add_option("--basepoint", c.basepoint,
                    "basepoint vertex (default: smallest vertex of the base piece)");
  build->add_flag("--thicken", c.thicken_first,
                  "thicken the structure first instead of running the cut-set scan");
  add_check_flags(build, c);
  build->add_option("--out", c.out, "artifact directory")->required();
  build->add_flag("--dot", c.dot, "also write graphviz renderings");

  CLI::App* distort = app.add_subcommand(
      "distort", "measure collapse distortion of the companion space");
  add_io_flags(distort, c, true);
  distort->add_option("--M", c.m, "bottleneck scale; overrides the documented m");
  distort->add_option("--R", c.r, "stratum width (default 160M)");
  distort->add_option("--basepoint", c.basepoint,
                      "basepoint vertex (default: smallest vertex of the base piece)");
  add_check_flags(distort, c);
  add_report_flags(distort, c);

  CLI::App* embed = app.add_subcommand(
      "embed", "embed pieces into products of trees and measure the coordinate collapse");
  add_io_flags(embed, c, true);
  embed->add_option("--M", c.m, "bottleneck scale; overrides the documented m");
  embed->add_option("--R", c.r, "stratum width (default 160M)");
  embed->add_option("--basepoint", c.basepoint,
                    "basepoint vertex (default: smallest vertex of the base piece)");
  embed->add_option("--embedding", c.embedding,
                    "embedding document (default: built-in tree/cycle embeddings)");
  add_check_flags(embed, c);
  add_report_flags(embed, c);
  embed->add_option("--artifacts", c.artifacts, "directory for product and coordinate trees");
  embed->add_flag("--dot", c.dot, "also write graphviz renderings");

  CLI::App* gen = app.add_subcommand("gen", "generate a seeded instance with ground truth");
  gen->add_option("--family", c.family,
                  "tree_of_pieces | cycle_chain | grid | random_tree_graded | subdivision");
  gen->add_option("--count", c.count, "number of pieces for glued families");
  gen->add_option("--min-size", c.min_size, "smallest piece size");
  gen->add_option("--max-size", c.max_size, "largest piece size");
  gen->add_option("--grid-n", c.grid_n, "grid side length");
  gen->add_option("--k", c.k, "subdivision factor");
  gen->add_option("--shape", c.shape, "piece template: cycle | path | complete");
  gen->add_option("--seed", c.seed, "generator seed")->each([&c](const std::string&) {
    c.seed_set = true;
  });
  gen->add_option("--M", c.m, "scale recorded in the pieces document (default 2)");
  gen->add_flag("--certify", c.certify,
                "emit thickened pieces with certificate chains (glued tree families)");
  gen->add_option("--input", c.input, "base graph document (subdivision family)");
  gen->add_option("--out", c.out, "artifact directory")->required();
  gen->add_flag("--dot", c.dot, "also write graphviz renderings");

  CLI::App* bp = app.add_subcommand("bp", "check the midpoint bottleneck property of one graph");
  bp->add_option("--input", c.input, "graph document")->required();
  bp->add_option("--delta", c.delta, "ball radius, e.g. 2 or 5/2 (default 2)");
  add_check_flags(bp, c);
  add_report_flags(bp, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (verify->parsed()) return cmd_verify(c);
    if (build->parsed()) return cmd_build(c);
    if (distort->parsed()) return cmd_distort(c);
    if (embed->parsed()) return cmd_embed(c);
    if (gen->parsed()) return cmd_gen(c);
    if (bp->parsed()) return cmd_bp(c);
  } catch (const tg::error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 4;
}
