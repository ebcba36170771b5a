#include "surfcert/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "surfcert/error.hpp"

namespace surfcert {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Parse, what); }

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("field \"") + key + "\": " + e.what());
  }
}

void expect_format(const json& j, std::string_view format) {
  if (get<std::string>(j, "format") != format) {
    bad("expected format " + std::string(format));
  }
}

json graph_json(const CoreGraph& g) {
  json j;
  json vertices = json::array();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) vertices.push_back(v);
  j["vertices"] = std::move(vertices);
  json edges = json::array();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    edges.push_back({{"id", e}, {"src", ed.src}, {"dst", ed.dst},
                     {"label", std::string(1, Letter(ed.generator, false).to_char())}});
  }
  j["edges"] = std::move(edges);
  if (g.basepoint()) j["basepoint"] = *g.basepoint();
  return j;
}

// Graph plus the maps from file ids to internal indices.
struct ParsedGraph {
  CoreGraph graph;
  std::map<std::int64_t, VertexId> vertex;
  std::map<std::int64_t, std::size_t> edge;
};

ParsedGraph parse_graph(const json& j) {
  ParsedGraph out;
  const auto ids = get<std::vector<std::int64_t>>(j, "vertices");
  for (std::int64_t id : ids) {
    if (!out.vertex.emplace(id, static_cast<VertexId>(out.vertex.size())).second) {
      bad("duplicate vertex id " + std::to_string(id));
    }
  }
  out.graph = CoreGraph(ids.size());
  auto vertex = [&](std::int64_t id) {
    auto it = out.vertex.find(id);
    if (it == out.vertex.end()) bad("unknown vertex id " + std::to_string(id));
    return it->second;
  };
  const json& edges = field(j, "edges");
  if (!edges.is_array()) bad("\"edges\" must be an array");
  for (const json& e : edges) {
    const auto label = get<std::string>(e, "label");
    if (label.size() != 1 || label[0] < 'a' || label[0] > 'z') bad("edge label must be one lowercase letter");
    const auto id = get<std::int64_t>(e, "id");
    const std::size_t index = out.graph.add_edge(vertex(get<std::int64_t>(e, "src")),
                                                 vertex(get<std::int64_t>(e, "dst")), label[0] - 'a');
    if (!out.edge.emplace(id, index).second) bad("duplicate edge id " + std::to_string(id));
  }
  if (j.contains("basepoint") && !j.at("basepoint").is_null()) {
    out.graph.set_basepoint(vertex(get<std::int64_t>(j, "basepoint")));
  }
  return out;
}

json fatgraph_json(const Fatgraph& y) {
  json j = graph_json(y.graph());
  j.erase("basepoint");
  json orders = json::object();
  for (std::size_t v = 0; v < y.vertex_count(); ++v) orders[std::to_string(v)] = y.cyclic_orders()[v];
  j["cyclic_orders"] = std::move(orders);
  return j;
}

Fatgraph parse_fatgraph(const json& j) {
  ParsedGraph pg = parse_graph(j);
  std::vector<std::vector<HalfEdge>> orders(pg.graph.vertex_count());
  const json& co = field(j, "cyclic_orders");
  if (!co.is_object()) bad("\"cyclic_orders\" must be an object");
  for (const auto& [key, list] : co.items()) {
    std::int64_t vid = 0;
    try {
      vid = std::stoll(key);
    } catch (const std::exception&) {
      bad("cyclic order key '" + key + "' is not a vertex id");
    }
    auto vit = pg.vertex.find(vid);
    if (vit == pg.vertex.end()) bad("cyclic order for unknown vertex " + key);
    if (!list.is_array()) bad("cyclic order must be an array");
    for (const json& h : list) {
      if (!h.is_number_integer()) bad("half-edge ids must be integers");
      const auto id = h.get<std::int64_t>();
      auto eit = pg.edge.find(id >= 0 ? id / 2 : -1);
      if (eit == pg.edge.end()) bad("unknown half-edge " + std::to_string(id));
      orders[vit->second].push_back(half_edge(eit->second, id % 2 == 1));
    }
  }
  try {
    return Fatgraph(std::move(pg.graph), std::move(orders));
  } catch (const Error& e) {
    bad(e.what());
  }
}

Word parse_word(const std::string& s, int rank) {
  try {
    return Word::parse(s, rank);
  } catch (const Error& e) {
    bad(e.what());
  }
}

json piece_json(const SurfacePiece& piece) {
  json j;
  j["format"] = kPieceFormat;
  j["fatgraph"] = fatgraph_json(piece.fatgraph);
  j["target_core"] = graph_json(piece.target_core);
  json boundary = json::array();
  for (const auto& b : piece.boundary) {
    json c;
    c["letters"] = letters_to_string(b.letters);
    c["half_edges"] = b.half_edges;
    c["lift_count"] = b.lift_count;
    c["lift"] = b.lift ? json(*b.lift) : json(nullptr);
    c["label"] = b.label ? json(b.label->to_string()) : json(nullptr);
    boundary.push_back(std::move(c));
  }
  j["boundary"] = std::move(boundary);
  json fv = json::array();
  for (const auto& p : piece.f_vertices) fv.push_back({p.component, p.index});
  j["f_vertices"] = std::move(fv);
  j["checks"] = {{"folded", piece.checks.folded},
                 {"boundary_in_Z", piece.checks.boundary_in_z},
                 {"f_folded", piece.checks.f_folded},
                 {"incompressible", piece.checks.incompressible}};
  return j;
}

SurfacePiece parse_piece(const json& j) {
  expect_format(j, kPieceFormat);
  SurfacePiece piece;
  piece.fatgraph = parse_fatgraph(field(j, "fatgraph"));
  piece.target_core = parse_graph(field(j, "target_core")).graph;
  const json& boundary = field(j, "boundary");
  if (!boundary.is_array()) bad("\"boundary\" must be an array");
  for (const json& c : boundary) {
    BoundaryComponent b;
    b.half_edges = get<std::vector<HalfEdge>>(c, "half_edges");
    for (HalfEdge h : b.half_edges) {
      if (edge_of(h) >= piece.fatgraph.edge_count()) bad("boundary half-edge out of range");
      b.letters.push_back(piece.fatgraph.graph().letter(h));
    }
    if (letters_to_string(b.letters) != get<std::string>(c, "letters")) bad("boundary letters disagree with half-edges");
    if (is_cyclically_reduced(b.letters) && !b.letters.empty()) b.word = CyclicWord::from_letters(b.letters);
    b.lift_count = get<std::size_t>(c, "lift_count");
    if (!field(c, "lift").is_null()) b.lift = get<VertexId>(c, "lift");
    if (!field(c, "label").is_null()) b.label = parse_word(get<std::string>(c, "label"), kMaxRank);
    piece.boundary.push_back(std::move(b));
  }
  for (const json& p : field(j, "f_vertices")) {
    if (!p.is_array() || p.size() != 2) bad("f-vertex must be [component, index]");
    piece.f_vertices.push_back({p[0].get<std::size_t>(), p[1].get<std::size_t>()});
  }
  const json& checks = field(j, "checks");
  piece.checks.folded = get<bool>(checks, "folded");
  piece.checks.boundary_in_z = get<bool>(checks, "boundary_in_Z");
  piece.checks.f_folded = get<bool>(checks, "f_folded");
  piece.checks.incompressible = get<bool>(checks, "incompressible");
  return piece;
}

json words_json(const std::vector<Word>& words) {
  json out = json::array();
  for (const Word& w : words) out.push_back(w.to_string());
  return out;
}

json spec_json(const GraphOfGroupsSpec& spec) {
  json j;
  j["format"] = kSpecFormat;
  j["kind"] = std::string(to_string(spec.kind));
  j["edge_rank"] = spec.edge_rank;
  j["vertex_ranks"] = spec.vertex_rank;
  j["phi1"] = words_json(spec.phi[0]);
  j["phi2"] = words_json(spec.phi[1]);
  if (spec.provenance.sampled) {
    j["provenance"] = {{"sampled", true}, {"seed", spec.provenance.seed}, {"length", spec.provenance.length}};
  } else {
    j["provenance"] = {{"sampled", false}};
  }
  return j;
}

GraphOfGroupsSpec parse_spec(const json& j) {
  expect_format(j, kSpecFormat);
  GraphOfGroupsSpec spec;
  spec.kind = parse_splitting_kind(get<std::string>(j, "kind"));
  spec.edge_rank = get<int>(j, "edge_rank");
  const auto ranks = get<std::vector<int>>(j, "vertex_ranks");
  if (ranks.size() != 2) bad("\"vertex_ranks\" needs two entries");
  spec.vertex_rank = {ranks[0], ranks[1]};
  for (std::size_t side = 0; side < 2; ++side) {
    const char* key = side == 0 ? "phi1" : "phi2";
    for (const auto& s : get<std::vector<std::string>>(j, key)) {
      if (spec.vertex_rank[side] < 1 || spec.vertex_rank[side] > kMaxRank) bad("vertex rank out of range");
      spec.phi[side].push_back(parse_word(s, spec.vertex_rank[side]));
    }
  }
  if (j.contains("provenance")) {
    const json& p = j.at("provenance");
    spec.provenance.sampled = get<bool>(p, "sampled");
    if (spec.provenance.sampled) {
      spec.provenance.seed = get<std::uint64_t>(p, "seed");
      spec.provenance.length = get<std::size_t>(p, "length");
    }
  }
  return spec;
}

json config_json(const BuilderConfig& c) {
  return {{"seed", c.seed},
          {"restarts", c.restarts},
          {"backtrack_limit", c.backtrack_limit},
          {"split_leaf", c.split_leaf},
          {"split_attempts", c.split_attempts},
          {"min_spacing", c.min_spacing ? json(*c.min_spacing) : json(nullptr)},
          {"admission", {{"T", c.admission.T}, {"epsilon", c.admission.epsilon}}},
          {"forbid_annuli", c.forbid_annuli}};
}

BuilderConfig parse_config(const json& j) {
  BuilderConfig c;
  c.seed = get<std::uint64_t>(j, "seed");
  c.restarts = get<std::size_t>(j, "restarts");
  c.backtrack_limit = get<std::uint64_t>(j, "backtrack_limit");
  c.split_leaf = get<std::size_t>(j, "split_leaf");
  c.split_attempts = get<std::size_t>(j, "split_attempts");
  if (!field(j, "min_spacing").is_null()) c.min_spacing = get<std::size_t>(j, "min_spacing");
  c.admission.T = get<int>(field(j, "admission"), "T");
  c.admission.epsilon = get<double>(field(j, "admission"), "epsilon");
  c.forbid_annuli = get<bool>(j, "forbid_annuli");
  return c;
}

json checklist_json(const std::vector<CheckItem>& items) {
  json out = json::array();
  for (const auto& c : items) out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return out;
}

json ref_json(const BoundaryRef& r) { return {{"piece", r.piece}, {"boundary", r.boundary}}; }

BoundaryRef parse_ref(const json& j) { return {get<std::size_t>(j, "piece"), get<std::size_t>(j, "boundary")}; }

}  // namespace

std::string graph_to_json(const CoreGraph& g) { return graph_json(g).dump(2); }
CoreGraph graph_from_json(std::string_view text) { return parse_graph(parse(text)).graph; }

std::string fatgraph_to_json(const Fatgraph& y) { return fatgraph_json(y).dump(2); }
Fatgraph fatgraph_from_json(std::string_view text) { return parse_fatgraph(parse(text)); }

std::string piece_to_json(const SurfacePiece& piece) { return piece_json(piece).dump(2); }
SurfacePiece piece_from_json(std::string_view text) { return parse_piece(parse(text)); }

std::string spec_to_json(const GraphOfGroupsSpec& spec) { return spec_json(spec).dump(2); }
GraphOfGroupsSpec spec_from_json(std::string_view text) { return parse_spec(parse(text)); }

std::string chain_to_json(const ChainFile& chain) {
  json j;
  j["format"] = kChainFormat;
  j["rank"] = chain.rank;
  json words = json::array();
  for (const auto& w : chain.words) words.push_back(w.to_string());
  j["words"] = std::move(words);
  return j.dump(2);
}

ChainFile chain_from_json(std::string_view text) {
  const json j = parse(text);
  expect_format(j, kChainFormat);
  ChainFile out;
  out.rank = get<int>(j, "rank");
  if (out.rank < 1 || out.rank > kMaxRank) bad("chain rank out of range");
  for (const auto& s : get<std::vector<std::string>>(j, "words")) {
    try {
      out.words.push_back(CyclicWord::parse(s, out.rank));
    } catch (const Error& e) {
      bad(e.what());
    }
  }
  return out;
}

std::string checklist_to_json(const std::vector<CheckItem>& items) { return checklist_json(items).dump(2); }

std::string certificate_to_json(const ClosedSurfaceCertificate& cert) {
  json j;
  j["format"] = kCertificateFormat;
  if (cert.context) {
    j["splitting"] = {{"spec", spec_json(cert.context->spec)},
                      {"sides", cert.context->sides},
                      {"chain", words_json(cert.context->chain)},
                      {"config", config_json(cert.context->config)}};
  } else {
    j["splitting"] = nullptr;
  }
  json pieces = json::array();
  for (const auto& p : cert.pieces) pieces.push_back(piece_json(p));
  j["pieces"] = std::move(pieces);
  json pairing = json::array();
  for (const auto& [a, b] : cert.pairing) pairing.push_back({ref_json(a), ref_json(b)});
  j["pairing"] = std::move(pairing);
  j["chi"] = cert.chi;
  j["genus"] = cert.genus;
  j["valid"] = cert.valid();
  j["checklist"] = checklist_json(cert.checklist);
  j["warnings"] = cert.warnings;
  return j.dump(2);
}

ClosedSurfaceCertificate certificate_from_json(std::string_view text) {
  const json j = parse(text);
  expect_format(j, kCertificateFormat);
  ClosedSurfaceCertificate cert;
  const json& split = field(j, "splitting");
  if (!split.is_null()) {
    SplittingContext ctx;
    ctx.spec = parse_spec(field(split, "spec"));
    ctx.sides = get<std::vector<int>>(split, "sides");
    const int edge_rank = ctx.spec.edge_rank >= 1 && ctx.spec.edge_rank <= kMaxRank ? ctx.spec.edge_rank : kMaxRank;
    for (const auto& s : get<std::vector<std::string>>(split, "chain")) ctx.chain.push_back(parse_word(s, edge_rank));
    ctx.config = parse_config(field(split, "config"));
    cert.context = std::move(ctx);
  }
  for (const json& p : field(j, "pieces")) cert.pieces.push_back(parse_piece(p));
  for (const json& pr : field(j, "pairing")) {
    if (!pr.is_array() || pr.size() != 2) bad("pairing entries must be [ref, ref]");
    cert.pairing.push_back({parse_ref(pr[0]), parse_ref(pr[1])});
  }
  cert.chi = get<long>(j, "chi");
  cert.genus = get<long>(j, "genus");
  for (const json& c : field(j, "checklist")) {
    cert.checklist.push_back({get<std::string>(c, "name"), get<bool>(c, "passed"), get<std::string>(c, "detail")});
  }
  cert.warnings = get<std::vector<std::string>>(j, "warnings");
  return cert;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace surfcert
