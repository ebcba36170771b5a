#pragma once

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "surfcert/builder.hpp"
#include "surfcert/fatgraph.hpp"
#include "surfcert/splitting.hpp"

namespace surfcert {

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;

  friend bool operator==(const CheckItem&, const CheckItem&) = default;
};

struct BoundaryRef {
  std::size_t piece = 0;
  std::size_t boundary = 0;

  friend auto operator<=>(const BoundaryRef&, const BoundaryRef&) = default;
};

using BoundaryPair = std::pair<BoundaryRef, BoundaryRef>;

// Splitting data the pieces were built for: piece i lies in the vertex space
// of side sides[i], and its boundary labels are elements of G.
struct SplittingContext {
  GraphOfGroupsSpec spec;
  std::vector<int> sides;
  std::vector<Word> chain;
  BuilderConfig config;
};

// Closed surface glued from pieces along an orientation-reversing pairing of
// their boundary components. Valid exactly when every checklist item passed.
struct ClosedSurfaceCertificate {
  std::optional<SplittingContext> context;
  std::vector<SurfacePiece> pieces;
  std::vector<BoundaryPair> pairing;
  long chi = 0;
  long genus = 0;
  std::vector<CheckItem> checklist;
  std::vector<std::string> warnings;

  bool valid() const;
};

// Recomputes every check from the certificate's data alone (pieces are
// re-verified from their fatgraphs, cores and labels; stored flags are not
// consulted). Never throws on inconsistent data; it fails the matching item.
std::vector<CheckItem> certificate_checks(const ClosedSurfaceCertificate& cert);

// Throws UnmatchedBoundary when the pairing does not match every boundary
// component exactly once, WordMismatch when matched components are not
// inverse (labels when present, words otherwise), and FailedCheck naming the
// first failing item otherwise.
ClosedSurfaceCertificate glue(std::vector<SurfacePiece> pieces, std::vector<BoundaryPair> pairing,
                              std::optional<SplittingContext> context = std::nullopt);

}  // namespace surfcert
