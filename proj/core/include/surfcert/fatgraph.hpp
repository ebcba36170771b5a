#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surfcert/stallings.hpp"
#include "surfcert/words.hpp"

namespace surfcert {

// Graph over the rose together with a cyclic order of the half-edges at each
// vertex. The basepoint of the underlying graph is ignored.
class Fatgraph {
 public:
  Fatgraph() = default;
  // Throws InvalidArgument unless every half-edge appears exactly once, in the
  // order of the vertex it leaves, and no vertex is isolated.
  Fatgraph(CoreGraph graph, std::vector<std::vector<HalfEdge>> cyclic_orders);

  const CoreGraph& graph() const { return graph_; }
  const std::vector<std::vector<HalfEdge>>& cyclic_orders() const { return orders_; }
  std::size_t vertex_count() const { return graph_.vertex_count(); }
  std::size_t edge_count() const { return graph_.edge_count(); }
  std::size_t valence(VertexId v) const { return orders_[v].size(); }

  // Next half-edge after h in the cyclic order at h's vertex.
  HalfEdge successor(HalfEdge h) const { return succ_[h]; }

  friend bool operator==(const Fatgraph& a, const Fatgraph& b) {
    return a.graph_ == b.graph_ && a.orders_ == b.orders_;
  }

 private:
  CoreGraph graph_;
  std::vector<std::vector<HalfEdge>> orders_;
  std::vector<HalfEdge> succ_;
};

// Boundary components as half-edge cycles. Corner rule: after traversing h,
// leave along successor(opposite(h)). Each cycle starts at its smallest
// half-edge; cycles are ordered by that half-edge.
std::vector<std::vector<HalfEdge>> trace_boundary_cycles(const Fatgraph& y);
// Letters read along each traced cycle (may be unreduced for unfolded input).
std::vector<std::vector<Letter>> boundary_letters(const Fatgraph& y);
// Canonical cyclic words of the boundary; requires cyclically reduced
// boundary words (true for folded fatgraphs without valence-1 vertices).
std::vector<CyclicWord> trace_boundary(const Fatgraph& y);

struct SurfaceInvariants {
  long chi = 0;
  long genus = 0;
  std::size_t boundary_count = 0;
};

// Throws DisconnectedFatgraph unless the fatgraph is connected.
SurfaceInvariants euler_and_genus(const Fatgraph& y);
// One entry per connected component of the underlying graph.
std::vector<SurfaceInvariants> component_invariants(const Fatgraph& y);

bool is_folded(const Fatgraph& y);

// Vertex of a boundary cycle: the start of its index-th half-edge.
struct BoundaryPosition {
  std::size_t component = 0;
  std::size_t index = 0;

  friend auto operator<=>(const BoundaryPosition&, const BoundaryPosition&) = default;
};

struct BoundaryComponent {
  std::vector<HalfEdge> half_edges;   // traced order
  std::vector<Letter> letters;        // traced order
  std::optional<CyclicWord> word;     // canonical word when cyclically reduced
  std::size_t lift_count = 0;         // closed lifts into Z of the traced word
  std::optional<VertexId> lift;       // start vertex in Z when unique
  std::optional<Word> label;          // edge-group element it represents
};

struct PieceChecks {
  bool folded = false;
  bool boundary_in_z = false;
  bool f_folded = false;
  bool incompressible = false;

  bool all() const { return folded && boundary_in_z && f_folded && incompressible; }
  friend bool operator==(const PieceChecks&, const PieceChecks&) = default;
};

// A fatgraph mapped into the mapping cylinder of Z -> X, with its boundary
// lifted to Z.
struct SurfacePiece {
  Fatgraph fatgraph;
  CoreGraph target_core;
  std::vector<BoundaryComponent> boundary;
  std::vector<BoundaryPosition> f_vertices;
  PieceChecks checks;
};

// Lift of every traced boundary word into z. Throws NoLift when some word has
// no closed lift and AmbiguousLift when some word has more than one.
std::vector<VertexId> check_boundary_in_z(const Fatgraph& y, const CoreGraph& z);

// Boundary positions whose lift sits on a vertex of valence >= 3 in Z.
// Throws RigidityRequired when some boundary lift is not unique.
std::vector<BoundaryPosition> locate_f_vertices(const SurfacePiece& piece);
// Every f-vertex at a 2-valent fatgraph vertex, distinct f-vertices at
// distinct fatgraph vertices. Throws RigidityRequired like locate_f_vertices.
bool is_f_folded(const SurfacePiece& piece);

// Independent check of boundary incompressibility: in core(Y x Z_c) every
// component meeting a boundary lift must be a single circle carrying exactly
// that lift.
bool verify_incompressible(const SurfacePiece& piece);

// Traces the boundary, lifts it to z and runs every piece check. Failing
// checks are recorded in piece.checks, never thrown. labels, when given, are
// aligned with the traced boundary order.
SurfacePiece make_piece(Fatgraph y, CoreGraph z, std::vector<std::optional<Word>> labels = {});

}  // namespace surfcert
