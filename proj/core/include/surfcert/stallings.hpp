#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfcert/random.hpp"
#include "surfcert/words.hpp"

namespace surfcert {

using VertexId = std::uint32_t;

// Every edge carries one positive generator; traversing it backwards reads
// the inverse letter.
struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  int generator = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Half-edge 2e leaves src(e) reading the generator, 2e+1 leaves dst(e)
// reading its inverse.
using HalfEdge = std::uint32_t;

inline constexpr std::size_t edge_of(HalfEdge h) { return h >> 1; }
inline constexpr HalfEdge opposite(HalfEdge h) { return h ^ 1u; }
inline constexpr HalfEdge half_edge(std::size_t e, bool reversed) {
  return static_cast<HalfEdge>(2 * e + (reversed ? 1 : 0));
}

// Finite graph over the rose: a labelled graph whose labels are single
// letters. Y-type cores keep a basepoint, Z-type cores do not.
class CoreGraph {
 public:
  CoreGraph() = default;
  explicit CoreGraph(std::size_t vertex_count, std::optional<VertexId> basepoint = std::nullopt)
      : vertex_count_(vertex_count), basepoint_(basepoint) {}

  VertexId add_vertex() { return static_cast<VertexId>(vertex_count_++); }
  std::size_t add_edge(VertexId src, VertexId dst, int generator);

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  std::optional<VertexId> basepoint() const { return basepoint_; }
  void set_basepoint(std::optional<VertexId> b) { basepoint_ = b; }

  VertexId from(HalfEdge h) const;
  VertexId to(HalfEdge h) const;
  Letter letter(HalfEdge h) const { return Letter(edges_[edge_of(h)].generator, (h & 1u) != 0); }

  // Half-edges leaving each vertex, in edge order.
  std::vector<std::vector<HalfEdge>> incidence() const;
  std::vector<int> valences() const;
  int max_generator() const;
  std::size_t component_count() const;
  // First Betti number E - V + (number of components).
  long betti_number() const;

  friend bool operator==(const CoreGraph&, const CoreGraph&) = default;

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::optional<VertexId> basepoint_;
};

// Dense (vertex, letter) -> vertex table of a folded graph; -1 when the letter
// cannot be read at the vertex.
class TransitionTable {
 public:
  explicit TransitionTable(const CoreGraph& g, int min_rank = 0);

  int rank() const { return rank_; }
  std::size_t vertex_count() const { return vertex_count_; }
  std::int64_t target(VertexId v, Letter l) const {
    if (l.generator() >= rank_) return -1;
    return table_[v * static_cast<std::size_t>(2 * rank_) + static_cast<std::size_t>(l.code())];
  }
  // Endpoint of the unique path reading `word` from v, or -1 when it dies.
  std::int64_t follow(VertexId v, std::span<const Letter> word) const;

 private:
  int rank_ = 0;
  std::size_t vertex_count_ = 0;
  std::vector<std::int64_t> table_;
};

// Wedge of subdivided loops at basepoint 0, one loop per word.
// Throws Error(TrivialGenerator) if some word is empty.
CoreGraph rose_of_words(std::span<const Word> words);

// Circle reading the cyclic word once, without basepoint.
CoreGraph circle_graph(const CyclicWord& w);

bool is_folded(const CoreGraph& g);

// Stallings folding. Vertices of the result are numbered by the smallest
// original vertex in each class; the basepoint follows its class.
CoreGraph fold(const CoreGraph& g);
// Same result up to isomorphism, performing elementary folds in a random order.
CoreGraph fold(const CoreGraph& g, Rng& rng);

struct SubgraphMap {
  CoreGraph graph;
  std::vector<VertexId> vertex_origin;   // new vertex -> vertex of the source
  std::vector<std::size_t> edge_origin;  // new edge -> edge of the source
};

// Prunes valence <= 1 vertices (the basepoint survives when kept).
SubgraphMap core_with_map(const CoreGraph& g, bool keep_basepoint);
inline CoreGraph core(const CoreGraph& g, bool keep_basepoint) {
  return core_with_map(g, keep_basepoint).graph;
}

// Pullback over the rose; vertex (v1, v2) has id v1 * |V2| + v2.
CoreGraph fiber_product(const CoreGraph& g1, const CoreGraph& g2);

std::vector<SubgraphMap> components(const CoreGraph& g);
CoreGraph disjoint_union(std::span<const CoreGraph> graphs);

// Word read along the unique reduced loop class of a non-tree edge; used to
// name a witness cycle. Requires a folded connected graph with betti >= 1.
CyclicWord some_cycle_word(const CoreGraph& g);

struct LiftReport {
  CyclicWord loop;
  std::vector<VertexId> lifts;  // starting vertices of closed lifts
  std::size_t periodic_points = 0;
  bool rigid = false;           // exactly one lift
  bool fully_rigid = false;     // exactly one periodic point of T_w
};

// Starting vertices v with T_w(v) = v for the letters as given (no rotation).
std::vector<VertexId> closed_lifts(std::span<const Letter> word, const TransitionTable& t);

LiftReport lifts_of_loop(const CyclicWord& w, const CoreGraph& z);
bool is_fully_rigid(const CyclicWord& w, const CoreGraph& z);

struct MalnormalWitness {
  std::size_t first = 0;
  std::size_t second = 0;
  CoreGraph component;  // off-diagonal piece of the fiber product with a cycle
  CyclicWord loop;      // a loop in that component
};

struct MalnormalityResult {
  bool malnormal = true;
  std::optional<MalnormalWitness> witness;
};

// Fiber-product criterion: every off-diagonal component of every
// core(z_i x z_j), i <= j, must be a forest. Inputs are folded basepoint-free
// cores.
MalnormalityResult is_malnormal_family(std::span<const CoreGraph> zs);

// Canonical encoding of a folded graph; equal encodings <=> label-preserving
// isomorphism (basepoint-preserving when present).
std::string canonical_form(const CoreGraph& g);
bool are_isomorphic(const CoreGraph& a, const CoreGraph& b);

}  // namespace surfcert
