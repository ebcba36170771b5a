#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "surfcert/fatgraph.hpp"
#include "surfcert/random.hpp"
#include "surfcert/stallings.hpp"
#include "surfcert/words.hpp"

namespace surfcert {

// Boundary chain to be filled by a fatgraph. Positions are letter occurrences;
// position (c, i) is the i-th letter of component c, and a mark at (c, i) is
// the boundary vertex just before that letter.
struct Chain {
  int rank = 1;
  std::vector<CyclicWord> components;
  std::vector<BoundaryPosition> marks;
  std::size_t min_spacing = 2;

  std::size_t total_length() const;
  // Flat index of (component, index).
  std::size_t flat(BoundaryPosition p) const;
};

// Partner of every flat position, -1 where still unpaired.
struct Pairing {
  std::vector<std::int64_t> partner;

  bool complete() const;
  std::size_t paired_count() const;
  friend bool operator==(const Pairing&, const Pairing&) = default;
};

struct BuilderConfig {
  std::size_t restarts = 64;
  std::uint64_t backtrack_limit = 20000;  // per search; 0 means unlimited
  // Chains {x, x^-1} with |x| above split_leaf are cut in two recursively;
  // 0 searches the whole chain at once.
  std::size_t split_leaf = 48;
  std::size_t split_attempts = 8;  // admissible cuts, and leaf searches, per strand
  std::uint64_t seed = 0;
  std::optional<std::size_t> min_spacing;  // default max(4T, 64)
  PseudorandomParams admission{3, 0.5};
  bool forbid_annuli = false;

  std::size_t effective_min_spacing() const;
};

struct Quotient {
  Fatgraph fatgraph;
  std::vector<HalfEdge> half_edge_of;  // flat position -> half-edge
};

struct BuildOutcome {
  SurfacePiece piece;
  Pairing pairing;
  std::size_t restarts_used = 0;
  std::uint64_t backtracks = 0;
  std::vector<std::string> warnings;
  std::vector<std::size_t> cycle_component;  // traced boundary cycle -> chain component
};

// Closed lifts of each component into z give the marks: positions whose lift
// sits on a vertex of valence >= 3. Throws RigidityRequired unless every
// component has exactly one lift.
std::vector<BoundaryPosition> f_vertex_marks(std::span<const CyclicWord> components,
                                             const CoreGraph& z);

// Smallest cyclic distance between two marks of the same component; nullopt
// when no component carries two marks.
std::optional<std::size_t> mark_spacing(const Chain& chain);

// Pairs the letters around every run of adjacent marks with a disjoint
// inverse arc whose interior vertices are unmarked, so that every mark
// becomes its own 2-valent vertex. Throws TagInfeasible.
Pairing tag_f_vertices(const Chain& chain, Rng& rng);

// Quotient of the chain's circles by a total pairing. The corner cycles of
// the chain become the vertices, so the boundary re-traces the chain.
Quotient pairing_to_fatgraph(const Chain& chain, const Pairing& pairing);

// Whether the vertex of every corner cycle reads pairwise distinct letters.
bool pairing_is_folded(const Chain& chain, const Pairing& pairing);

// Every fixed-point-free pairing of letters with inverse letters. Throws
// TooLarge beyond total length 14.
std::vector<Pairing> enumerate_pairings(const Chain& chain);

struct SearchStats {
  std::uint64_t backtracks = 0;
  bool exhausted = false;  // the whole tree was explored
};

// Depth-first completion of a partial pairing to a folded total pairing.
// Picks the position with fewest legal partners, tries partners that extend
// already-paired strips first, ties in random order. With forbid_annuli the
// quotient must have negative Euler characteristic in every component.
std::optional<Pairing> search_pairing(const Chain& chain, const Pairing& start,
                                      std::uint64_t backtrack_limit, bool forbid_annuli,
                                      Rng& rng, SearchStats* stats = nullptr);

// Folded fatgraph with the chain as boundary, marks ignored. Throws
// NotHomologicallyTrivial or SearchExhausted. The returned piece has an empty
// target core.
BuildOutcome build_folded(const Chain& chain, const BuilderConfig& config);

// Folded, f-folded fatgraph with boundary the chain whose components lift
// rigidly to z. Marks are recomputed from z. Throws NotHomologicallyTrivial,
// RigidityRequired, TagInfeasible or SearchExhausted.
BuildOutcome build_f_folded(const Chain& chain, const CoreGraph& z, const BuilderConfig& config);

}  // namespace surfcert
