#include "surfcert/certificate.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "surfcert/error.hpp"
#include "surfcert/model.hpp"

namespace surfcert {

bool ClosedSurfaceCertificate::valid() const {
  return !checklist.empty() &&
         std::all_of(checklist.begin(), checklist.end(), [](const CheckItem& c) { return c.passed; });
}

namespace {

std::string side_name(int side) { return "side" + std::to_string(side + 1); }

// Component id of every vertex of g.
std::vector<std::size_t> vertex_components(const CoreGraph& g, std::size_t& count) {
  std::vector<std::size_t> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Edge& e : g.edges()) parent[find(e.src)] = find(e.dst);
  std::map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> out(g.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) {
    out[v] = ids.emplace(find(v), ids.size()).first->second;
  }
  count = ids.size();
  return out;
}

// Re-verified copy of a stored piece; false with the reason when the stored
// data is inconsistent.
bool recheck(const SurfacePiece& stored, SurfacePiece& out, std::string& error) {
  std::vector<std::optional<Word>> labels;
  for (const auto& b : stored.boundary) labels.push_back(b.label);
  try {
    out = make_piece(stored.fatgraph, stored.target_core, std::move(labels));
    return true;
  } catch (const Error& e) {
    error = e.what();
    return false;
  }
}

}  // namespace

std::vector<CheckItem> certificate_checks(const ClosedSurfaceCertificate& cert) {
  std::vector<CheckItem> items;
  auto add = [&](std::string name, bool passed, std::string detail) {
    items.push_back({std::move(name), passed, std::move(detail)});
  };
  const auto& ctx = cert.context;

  std::array<std::optional<CoreGraph>, 2> expected;
  if (ctx) {
    bool spec_ok = true;
    try {
      ctx->spec.validate();
      add("spec.valid", true, std::string(to_string(ctx->spec.kind)) + ", edge rank " +
                                  std::to_string(ctx->spec.edge_rank));
    } catch (const Error& e) {
      spec_ok = false;
      add("spec.valid", false, e.what());
    }
    bool ranks_ok = spec_ok;
    for (int side = 0; side < 2 && spec_ok; ++side) {
      try {
        const auto ic = image_core(ctx->spec.phi[static_cast<std::size_t>(side)]);
        add(side_name(side) + ".rank", true,
            "rank " + std::to_string(ic.y.betti_number()) + ", overlap " + std::to_string(ic.overlap));
      } catch (const Error& e) {
        ranks_ok = false;
        add(side_name(side) + ".rank", false, e.what());
      }
    }
    if (ranks_ok) {
      const auto mal = splitting_malnormal(ctx->spec);
      std::string detail = ctx->spec.kind == SplittingKind::Amalgam ? "each image" : "images jointly";
      if (mal.witness) {
        detail += ": members " + std::to_string(mal.witness->first + 1) + "," +
                  std::to_string(mal.witness->second + 1) + " share " + mal.witness->loop.to_string();
      }
      add("splitting.malnormal", mal.malnormal, detail);
      for (int side = 0; side < 2; ++side) expected[static_cast<std::size_t>(side)] = side_target(ctx->spec, side);
    }
    const bool nontrivial = !ctx->chain.empty() &&
                            std::none_of(ctx->chain.begin(), ctx->chain.end(), [](const Word& g) { return g.empty(); });
    add("chain.nontrivial", nontrivial, std::to_string(ctx->chain.size()) + " elements");
    add("pieces.sides", ctx->sides.size() == cert.pieces.size() &&
                            std::all_of(ctx->sides.begin(), ctx->sides.end(), [](int s) { return s == 0 || s == 1; }),
        std::to_string(ctx->sides.size()) + " sides for " + std::to_string(cert.pieces.size()) + " pieces");
  }

  std::vector<SurfacePiece> pieces(cert.pieces.size());
  std::vector<bool> rechecked(cert.pieces.size(), false);
  for (std::size_t i = 0; i < cert.pieces.size(); ++i) {
    const std::string pre = "piece" + std::to_string(i + 1) + ".";
    std::string error;
    rechecked[i] = recheck(cert.pieces[i], pieces[i], error);
    const SurfacePiece* piece = rechecked[i] ? &pieces[i] : nullptr;
    const int side = ctx && i < ctx->sides.size() ? ctx->sides[i] : -1;

    if (ctx) {
      const auto& want = side == 0 || side == 1 ? expected[static_cast<std::size_t>(side)] : std::nullopt;
      const bool same = want && are_isomorphic(cert.pieces[i].target_core, *want);
      add(pre + "target_core", same, same ? "matches " + side_name(side) : "differs from the splitting's core");
    } else {
      add(pre + "target_core", cert.pieces[i].target_core.edge_count() > 0,
          std::to_string(cert.pieces[i].target_core.edge_count()) + " edges");
    }

    if (!piece) {
      for (const char* name : {"labels", "folded", "boundary_in_Z", "f_folded", "incompressible", "hyperbolic"}) {
        add(pre + name, false, error);
      }
      continue;
    }

    bool labels_ok = true;
    std::string label_detail = std::to_string(piece->boundary.size()) + " boundary components";
    if (ctx) {
      for (std::size_t b = 0; b < piece->boundary.size() && labels_ok; ++b) {
        const auto& comp = piece->boundary[b];
        try {
          labels_ok = comp.label && comp.word && (side == 0 || side == 1) &&
                      cyclic_reduce(ctx->spec.image(side, *comp.label)).core == *comp.word;
        } catch (const Error&) {
          labels_ok = false;
        }
        if (!labels_ok) label_detail = "boundary " + std::to_string(b + 1) + " does not read its label";
      }
    } else {
      const auto labelled = std::count_if(piece->boundary.begin(), piece->boundary.end(),
                                          [](const BoundaryComponent& c) { return c.label.has_value(); });
      labels_ok = labelled == 0 || static_cast<std::size_t>(labelled) == piece->boundary.size();
      if (!labels_ok) label_detail = "some boundary components lack labels";
    }
    add(pre + "labels", labels_ok, label_detail);

    add(pre + "folded", piece->checks.folded, piece->checks.folded ? "ok" : "repeated letter at a vertex");
    add(pre + "boundary_in_Z", piece->checks.boundary_in_z,
        piece->checks.boundary_in_z ? "unique lifts" : "some boundary lacks a unique lift");
    add(pre + "f_folded", piece->checks.f_folded,
        std::to_string(piece->f_vertices.size()) + " f-vertices");
    add(pre + "incompressible", piece->checks.incompressible,
        piece->checks.incompressible ? "fiber product cores are the boundary lifts" : "extra cycle in a fiber product");
    const auto inv = component_invariants(piece->fatgraph);
    const bool hyperbolic =
        !inv.empty() && std::all_of(inv.begin(), inv.end(), [](const SurfaceInvariants& s) { return s.chi < 0; });
    long chi = 0;
    for (const auto& s : inv) chi += s.chi;
    add(pre + "hyperbolic", hyperbolic,
        "chi " + std::to_string(chi) + " over " + std::to_string(inv.size()) + " components");
  }

  // Pairing.
  std::map<BoundaryRef, int> seen;
  bool complete = true;
  auto in_range = [&](const BoundaryRef& r) {
    return r.piece < cert.pieces.size() && r.boundary < cert.pieces[r.piece].boundary.size();
  };
  for (const auto& [a, b] : cert.pairing) {
    if (!in_range(a) || !in_range(b) || a == b) complete = false;
    ++seen[a];
    ++seen[b];
  }
  std::size_t boundary_total = 0;
  for (std::size_t i = 0; i < cert.pieces.size(); ++i) {
    for (std::size_t b = 0; b < cert.pieces[i].boundary.size(); ++b) {
      ++boundary_total;
      auto it = seen.find({i, b});
      if (it == seen.end() || it->second != 1) complete = false;
    }
  }
  complete = complete && seen.size() == boundary_total;
  add("pairing.complete", complete,
      std::to_string(cert.pairing.size()) + " pairs over " + std::to_string(boundary_total) + " boundary components");

  auto component_of = [&](const BoundaryRef& r) -> const BoundaryComponent* {
    if (!in_range(r) || !rechecked[r.piece] || r.boundary >= pieces[r.piece].boundary.size()) return nullptr;
    return &pieces[r.piece].boundary[r.boundary];
  };
  bool inverse = complete;
  std::string inverse_detail = "matched components are inverse";
  for (std::size_t k = 0; k < cert.pairing.size() && inverse; ++k) {
    const auto* a = component_of(cert.pairing[k].first);
    const auto* b = component_of(cert.pairing[k].second);
    if (!a || !b) {
      inverse = false;
    } else if (a->label && b->label) {
      inverse = *a->label == b->label->inverse();
    } else {
      inverse = a->word && b->word && *a->word == b->word->inverse();
    }
    if (!inverse) inverse_detail = "pair " + std::to_string(k + 1) + " is not inverse";
  }
  add("pairing.inverse_labels", inverse, inverse_detail);

  if (ctx) {
    bool opposite = complete && ctx->sides.size() == cert.pieces.size();
    for (const auto& [a, b] : cert.pairing) {
      if (!opposite) break;
      opposite = ctx->sides[a.piece] != ctx->sides[b.piece];
    }
    add("pairing.opposite_sides", opposite, opposite ? "every pair crosses the edge space" : "a pair stays on one side");
  }

  // Surface.
  std::vector<std::size_t> base(cert.pieces.size() + 1, 0);
  std::vector<std::vector<std::size_t>> comp(cert.pieces.size());
  for (std::size_t i = 0; i < cert.pieces.size(); ++i) {
    std::size_t count = 0;
    comp[i] = vertex_components(cert.pieces[i].fatgraph.graph(), count);
    base[i + 1] = base[i] + count;
  }
  std::vector<std::size_t> parent(base.back());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  auto node_of = [&](const BoundaryRef& r) -> std::optional<std::size_t> {
    if (!in_range(r) || cert.pieces[r.piece].boundary[r.boundary].half_edges.empty()) return std::nullopt;
    const auto& g = cert.pieces[r.piece].fatgraph.graph();
    const HalfEdge h = cert.pieces[r.piece].boundary[r.boundary].half_edges.front();
    if (edge_of(h) >= g.edge_count()) return std::nullopt;
    return base[r.piece] + comp[r.piece][g.from(h)];
  };
  for (const auto& [a, b] : cert.pairing) {
    const auto na = node_of(a);
    const auto nb = node_of(b);
    if (na && nb) parent[find(*na)] = find(*nb);
  }
  std::size_t roots = 0;
  for (std::size_t v = 0; v < parent.size(); ++v) roots += find(v) == v ? 1 : 0;
  add("surface.connected", roots == 1, std::to_string(roots) + " components after gluing");

  long chi = 0;
  for (const auto& p : cert.pieces) {
    chi += static_cast<long>(p.fatgraph.vertex_count()) - static_cast<long>(p.fatgraph.edge_count());
  }
  const bool euler_ok = chi < 0 && chi % 2 == 0;
  add("surface.euler", euler_ok,
      "chi " + std::to_string(chi) + (euler_ok ? ", genus " + std::to_string((2 - chi) / 2) : ""));
  return items;
}

ClosedSurfaceCertificate glue(std::vector<SurfacePiece> pieces, std::vector<BoundaryPair> pairing,
                              std::optional<SplittingContext> context) {
  ClosedSurfaceCertificate cert;
  cert.context = std::move(context);
  cert.pieces = std::move(pieces);
  cert.pairing = std::move(pairing);
  cert.checklist = certificate_checks(cert);
  for (const auto& p : cert.pieces) {
    cert.chi += static_cast<long>(p.fatgraph.vertex_count()) - static_cast<long>(p.fatgraph.edge_count());
  }
  cert.genus = (2 - cert.chi) / 2;
  auto failed = [&](std::string_view name) {
    return std::any_of(cert.checklist.begin(), cert.checklist.end(),
                       [&](const CheckItem& c) { return c.name == name && !c.passed; });
  };
  if (failed("pairing.complete")) {
    throw Error(ErrorCode::UnmatchedBoundary, "pairing does not match every boundary component once");
  }
  if (failed("pairing.inverse_labels")) {
    throw Error(ErrorCode::WordMismatch, "matched boundary components are not inverse");
  }
  for (const auto& c : cert.checklist) {
    if (!c.passed) throw Error(ErrorCode::FailedCheck, c.name + " (" + c.detail + ")");
  }
  return cert;
}

}  // namespace surfcert
