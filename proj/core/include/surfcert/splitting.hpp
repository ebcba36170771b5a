#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "surfcert/words.hpp"

namespace surfcert {

enum class SplittingKind { Amalgam, HNN };

std::string_view to_string(SplittingKind kind) noexcept;
// "amalgam" or "hnn"; throws Error(Parse).
SplittingKind parse_splitting_kind(std::string_view text);

struct Provenance {
  bool sampled = false;
  std::uint64_t seed = 0;
  std::size_t length = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// F1 *_G F2 or F *_G, with G free of rank edge_rank and phi[j][i] the image of
// the i-th generator of G under the j-th inclusion. For HNN both inclusions
// land in F1 and vertex_rank[1] repeats vertex_rank[0].
struct GraphOfGroupsSpec {
  SplittingKind kind = SplittingKind::Amalgam;
  int edge_rank = 1;
  std::array<int, 2> vertex_rank{2, 2};
  std::array<std::vector<Word>, 2> phi;
  Provenance provenance;

  // Throws InvalidArgument (or TrivialGenerator for an empty image).
  void validate() const;
  // Image under phi[side] of a word in the generators of G.
  Word image(int side, const Word& g) const;

  friend bool operator==(const GraphOfGroupsSpec&, const GraphOfGroupsSpec&) = default;
};

}  // namespace surfcert
