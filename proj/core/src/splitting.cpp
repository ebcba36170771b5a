#include "surfcert/splitting.hpp"

#include "surfcert/error.hpp"

namespace surfcert {

std::string_view to_string(SplittingKind kind) noexcept {
  return kind == SplittingKind::Amalgam ? "amalgam" : "hnn";
}

SplittingKind parse_splitting_kind(std::string_view text) {
  if (text == "amalgam") return SplittingKind::Amalgam;
  if (text == "hnn") return SplittingKind::HNN;
  throw Error(ErrorCode::Parse, "splitting kind must be amalgam or hnn, got '" + std::string(text) + "'");
}

void GraphOfGroupsSpec::validate() const {
  if (edge_rank < 1 || edge_rank > kMaxRank) {
    throw Error(ErrorCode::InvalidArgument, "edge rank must be in 1..26");
  }
  for (int side = 0; side < 2; ++side) {
    const int rank = vertex_rank[static_cast<std::size_t>(side)];
    if (rank < 1 || rank > kMaxRank) {
      throw Error(ErrorCode::InvalidArgument, "vertex rank must be in 1..26");
    }
    const auto& images = phi[static_cast<std::size_t>(side)];
    if (images.size() != static_cast<std::size_t>(edge_rank)) {
      throw Error(ErrorCode::InvalidArgument, "side " + std::to_string(side + 1) + " lists " +
                                                  std::to_string(images.size()) + " images for edge rank " +
                                                  std::to_string(edge_rank));
    }
    for (const Word& w : images) {
      if (w.empty()) throw Error(ErrorCode::TrivialGenerator, "generator image is trivial");
      for (Letter l : w.letters()) {
        if (l.generator() >= rank) {
          throw Error(ErrorCode::InvalidArgument,
                      "image " + w.to_string() + " exceeds vertex rank " + std::to_string(rank));
        }
      }
    }
  }
  if (kind == SplittingKind::HNN && vertex_rank[0] != vertex_rank[1]) {
    throw Error(ErrorCode::InvalidArgument, "HNN extension needs one vertex group");
  }
}

Word GraphOfGroupsSpec::image(int side, const Word& g) const {
  const auto& images = phi[static_cast<std::size_t>(side)];
  Word out;
  for (Letter l : g.letters()) {
    if (l.generator() >= static_cast<int>(images.size())) {
      throw Error(ErrorCode::InvalidArgument, "element " + g.to_string() + " exceeds the edge rank");
    }
    const Word& x = images[static_cast<std::size_t>(l.generator())];
    out = out * (l.is_inverse() ? x.inverse() : x);
  }
  return out;
}

}  // namespace surfcert
