#include "surfcert/fatgraph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "surfcert/error.hpp"

namespace surfcert {

Fatgraph::Fatgraph(CoreGraph graph, std::vector<std::vector<HalfEdge>> cyclic_orders)
    : graph_(std::move(graph)), orders_(std::move(cyclic_orders)) {
  graph_.set_basepoint(std::nullopt);
  if (orders_.size() != graph_.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "one cyclic order per vertex required");
  }
  const std::size_t halves = 2 * graph_.edge_count();
  succ_.assign(halves, 0);
  std::vector<bool> seen(halves, false);
  for (VertexId v = 0; v < orders_.size(); ++v) {
    const auto& order = orders_[v];
    if (order.empty()) {
      throw Error(ErrorCode::InvalidArgument, "vertex " + std::to_string(v) + " has valence 0");
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      HalfEdge h = order[i];
      if (h >= halves || seen[h]) {
        throw Error(ErrorCode::InvalidArgument, "half-edge " + std::to_string(h) +
                                                    " missing from the graph or listed twice");
      }
      if (graph_.from(h) != v) {
        throw Error(ErrorCode::InvalidArgument,
                    "half-edge " + std::to_string(h) + " listed at the wrong vertex");
      }
      seen[h] = true;
      succ_[h] = order[(i + 1) % order.size()];
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::InvalidArgument, "some half-edge is in no cyclic order");
  }
}

std::vector<std::vector<HalfEdge>> trace_boundary_cycles(const Fatgraph& y) {
  const std::size_t halves = 2 * y.edge_count();
  std::vector<bool> seen(halves, false);
  std::vector<std::vector<HalfEdge>> cycles;
  for (HalfEdge start = 0; start < halves; ++start) {
    if (seen[start]) continue;
    std::vector<HalfEdge> cyc;
    HalfEdge h = start;
    do {
      seen[h] = true;
      cyc.push_back(h);
      h = y.successor(opposite(h));
    } while (h != start);
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

std::vector<std::vector<Letter>> boundary_letters(const Fatgraph& y) {
  std::vector<std::vector<Letter>> out;
  for (const auto& cyc : trace_boundary_cycles(y)) {
    std::vector<Letter> w;
    w.reserve(cyc.size());
    for (HalfEdge h : cyc) w.push_back(y.graph().letter(h));
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<CyclicWord> trace_boundary(const Fatgraph& y) {
  std::vector<CyclicWord> out;
  for (const auto& w : boundary_letters(y)) out.push_back(CyclicWord::from_letters(w));
  return out;
}

std::vector<SurfaceInvariants> component_invariants(const Fatgraph& y) {
  const auto comps = components(y.graph());
  std::vector<std::size_t> comp_of(y.vertex_count());
  std::vector<SurfaceInvariants> out(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (VertexId v : comps[c].vertex_origin) comp_of[v] = c;
    out[c].chi = static_cast<long>(comps[c].graph.vertex_count()) -
                 static_cast<long>(comps[c].graph.edge_count());
  }
  for (const auto& cyc : trace_boundary_cycles(y)) {
    ++out[comp_of[y.graph().from(cyc.front())]].boundary_count;
  }
  for (auto& inv : out) inv.genus = (2 - inv.chi - static_cast<long>(inv.boundary_count)) / 2;
  return out;
}

SurfaceInvariants euler_and_genus(const Fatgraph& y) {
  auto inv = component_invariants(y);
  if (inv.size() != 1) {
    throw Error(ErrorCode::DisconnectedFatgraph,
                "fatgraph has " + std::to_string(inv.size()) + " components");
  }
  return inv.front();
}

bool is_folded(const Fatgraph& y) { return is_folded(y.graph()); }

std::vector<VertexId> check_boundary_in_z(const Fatgraph& y, const CoreGraph& z) {
  TransitionTable t(z, y.graph().max_generator() + 1);
  std::vector<VertexId> out;
  for (const auto& w : boundary_letters(y)) {
    auto lifts = closed_lifts(w, t);
    if (lifts.empty()) {
      throw Error(ErrorCode::NoLift, "boundary " + letters_to_string(w) + " does not lift to Z");
    }
    if (lifts.size() > 1) {
      throw Error(ErrorCode::AmbiguousLift, "boundary " + letters_to_string(w) + " has " +
                                                std::to_string(lifts.size()) + " lifts to Z");
    }
    out.push_back(lifts.front());
  }
  return out;
}

namespace {

void require_lifts(const SurfacePiece& piece) {
  for (const auto& b : piece.boundary) {
    if (!b.lift) {
      throw Error(ErrorCode::RigidityRequired,
                  "boundary " + letters_to_string(b.letters) + " has no unique lift");
    }
  }
}

}  // namespace

std::vector<BoundaryPosition> locate_f_vertices(const SurfacePiece& piece) {
  require_lifts(piece);
  const auto valence = piece.target_core.valences();
  TransitionTable t(piece.target_core, piece.fatgraph.graph().max_generator() + 1);
  std::vector<BoundaryPosition> out;
  for (std::size_t c = 0; c < piece.boundary.size(); ++c) {
    const auto& b = piece.boundary[c];
    std::int64_t cur = *b.lift;
    for (std::size_t i = 0; i < b.letters.size(); ++i) {
      if (valence[static_cast<std::size_t>(cur)] >= 3) out.push_back({c, i});
      cur = t.target(static_cast<VertexId>(cur), b.letters[i]);
    }
  }
  return out;
}

bool is_f_folded(const SurfacePiece& piece) {
  std::set<VertexId> used;
  for (const BoundaryPosition& p : locate_f_vertices(piece)) {
    HalfEdge h = piece.boundary[p.component].half_edges[p.index];
    VertexId v = piece.fatgraph.graph().from(h);
    if (piece.fatgraph.valence(v) != 2) return false;
    if (!used.insert(v).second) return false;
  }
  return true;
}

bool verify_incompressible(const SurfacePiece& piece) {
  require_lifts(piece);
  const CoreGraph& y = piece.fatgraph.graph();
  const int rank = std::max(y.max_generator(), piece.target_core.max_generator()) + 1;
  const auto zcomps = components(piece.target_core);
  std::vector<std::size_t> zcomp_of(piece.target_core.vertex_count());
  std::vector<VertexId> zlocal(piece.target_core.vertex_count());
  for (std::size_t c = 0; c < zcomps.size(); ++c) {
    for (VertexId v = 0; v < zcomps[c].vertex_origin.size(); ++v) {
      zcomp_of[zcomps[c].vertex_origin[v]] = c;
      zlocal[zcomps[c].vertex_origin[v]] = v;
    }
  }

  using EdgeKey = std::pair<std::uint64_t, int>;  // (source vertex in Y x Z_c, generator)
  for (std::size_t c = 0; c < zcomps.size(); ++c) {
    const CoreGraph& zc = zcomps[c].graph;
    const std::uint64_t n2 = zc.vertex_count();
    const CoreGraph product = fiber_product(y, zc);
    const SubgraphMap cored = core_with_map(product, false);
    const auto parts = components(cored.graph);
    std::vector<std::int64_t> part_of(product.vertex_count(), -1);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      for (VertexId v : parts[k].vertex_origin) part_of[cored.vertex_origin[v]] = static_cast<std::int64_t>(k);
    }

    TransitionTable tz(zc, rank);
    std::map<std::size_t, std::vector<std::set<EdgeKey>>> lifts_in_part;
    for (const auto& b : piece.boundary) {
      if (zcomp_of[*b.lift] != c) continue;
      std::uint64_t zv = zlocal[*b.lift];
      std::set<EdgeKey> keys;
      std::int64_t part = -1;
      for (std::size_t i = 0; i < b.half_edges.size(); ++i) {
        const HalfEdge h = b.half_edges[i];
        const std::uint64_t from = y.from(h) * n2 + zv;
        const std::int64_t znext = tz.target(static_cast<VertexId>(zv), b.letters[i]);
        if (znext < 0) return false;
        const std::uint64_t to = y.to(h) * n2 + static_cast<std::uint64_t>(znext);
        const std::int64_t p = part_of[from];
        if (p < 0 || (part >= 0 && p != part)) return false;
        part = p;
        keys.insert(b.letters[i].is_inverse() ? EdgeKey{to, b.letters[i].generator()}
                                              : EdgeKey{from, b.letters[i].generator()});
        zv = static_cast<std::uint64_t>(znext);
      }
      lifts_in_part[static_cast<std::size_t>(part)].push_back(std::move(keys));
    }

    for (const auto& [k, lifts] : lifts_in_part) {
      const SubgraphMap& part = parts[k];
      if (part.graph.betti_number() > 1) return false;
      std::set<EdgeKey> part_keys;
      for (std::size_t e : part.edge_origin) {
        const Edge& pe = product.edge(cored.edge_origin[e]);
        part_keys.insert({pe.src, pe.generator});
      }
      for (const auto& keys : lifts) {
        if (keys != part_keys) return false;
      }
    }
  }
  return true;
}

SurfacePiece make_piece(Fatgraph y, CoreGraph z, std::vector<std::optional<Word>> labels) {
  SurfacePiece piece;
  piece.fatgraph = std::move(y);
  piece.target_core = std::move(z);
  piece.target_core.set_basepoint(std::nullopt);
  const auto cycles = trace_boundary_cycles(piece.fatgraph);
  if (!labels.empty() && labels.size() != cycles.size()) {
    throw Error(ErrorCode::InvalidArgument, "one label per boundary component required");
  }
  TransitionTable t(piece.target_core, piece.fatgraph.graph().max_generator() + 1);
  bool all_unique = true;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    BoundaryComponent b;
    b.half_edges = cycles[c];
    for (HalfEdge h : b.half_edges) b.letters.push_back(piece.fatgraph.graph().letter(h));
    if (is_cyclically_reduced(b.letters)) b.word = CyclicWord::from_letters(b.letters);
    auto lifts = closed_lifts(b.letters, t);
    b.lift_count = lifts.size();
    if (lifts.size() == 1 && b.word) {
      b.lift = lifts.front();
    } else {
      all_unique = false;
    }
    if (!labels.empty()) b.label = labels[c];
    piece.boundary.push_back(std::move(b));
  }
  piece.checks.folded = is_folded(piece.fatgraph);
  piece.checks.boundary_in_z = all_unique && !piece.boundary.empty();
  if (piece.checks.boundary_in_z) {
    piece.f_vertices = locate_f_vertices(piece);
    piece.checks.f_folded = is_f_folded(piece);
    piece.checks.incompressible = piece.checks.folded && verify_incompressible(piece);
  }
  return piece;
}

}  // namespace surfcert
