#pragma once

// Brute-force reference implementations and random generators shared by the
// unit tests and the acceptance runner. Nothing here calls the library routine
// it is used to check.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "surfcert/fatgraph.hpp"
#include "surfcert/random.hpp"
#include "surfcert/stallings.hpp"
#include "surfcert/words.hpp"

namespace oracle {

using namespace surfcert;

inline bool cancels(char x, char y) { return x != y && std::tolower(x) == std::tolower(y); }

// Free reduction by repeated deletion of cancelling pairs.
inline std::string reduce_string(std::string s) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (cancels(s[i], s[i + 1])) {
        s.erase(i, 2);
        changed = true;
        break;
      }
    }
  }
  return s;
}

inline std::string invert_string(const std::string& s) {
  std::string out(s.rbegin(), s.rend());
  for (char& c : out) c = std::islower(static_cast<unsigned char>(c)) ? std::toupper(c) : std::tolower(c);
  return out;
}

inline std::string alphabet(int rank) {
  std::string out;
  for (int g = 0; g < rank; ++g) {
    out.push_back(static_cast<char>('a' + g));
    out.push_back(static_cast<char>('A' + g));
  }
  return out;
}

// Every cyclically reduced word of exactly this length, as strings.
inline std::vector<std::string> cyclically_reduced_words(int rank, std::size_t length) {
  std::vector<std::string> out;
  const std::string letters = alphabet(rank);
  std::string cur;
  std::function<void()> rec = [&] {
    if (cur.size() == length) {
      if (!cur.empty() && !cancels(cur.back(), cur.front())) out.push_back(cur);
      return;
    }
    for (char c : letters) {
      if (!cur.empty() && cancels(cur.back(), c)) continue;
      cur.push_back(c);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

inline std::string least_rotation_string(const std::string& s) {
  auto key = [](char c) { return 2 * (std::tolower(c) - 'a') + (std::isupper(static_cast<unsigned char>(c)) ? 1 : 0); };
  std::string best = s;
  for (std::size_t r = 1; r < s.size(); ++r) {
    std::string rot = s.substr(r) + s.substr(0, r);
    if (std::lexicographical_compare(rot.begin(), rot.end(), best.begin(), best.end(),
                                     [&](char x, char y) { return key(x) < key(y); })) {
      best = rot;
    }
  }
  return best;
}

// Adjacency as (vertex, letter char) -> set of targets.
using Moves = std::map<std::pair<std::uint32_t, char>, std::vector<std::uint32_t>>;

inline char edge_char(int generator, bool inverse) {
  return static_cast<char>((inverse ? 'A' : 'a') + generator);
}

inline Moves moves_of(const CoreGraph& g) {
  Moves m;
  for (const Edge& e : g.edges()) {
    m[{e.src, edge_char(e.generator, false)}].push_back(e.dst);
    m[{e.dst, edge_char(e.generator, true)}].push_back(e.src);
  }
  return m;
}

inline bool folded_by_moves(const CoreGraph& g) {
  for (const auto& [key, targets] : moves_of(g)) {
    if (targets.size() > 1) return false;
  }
  return true;
}

// Vertices v from which reading s in a folded graph returns to v.
inline std::size_t closed_walks(const Moves& m, std::size_t vertices, const std::string& s) {
  std::size_t count = 0;
  for (std::uint32_t v = 0; v < vertices; ++v) {
    std::uint32_t at = v;
    bool alive = true;
    for (char c : s) {
      auto it = m.find({at, c});
      if (it == m.end()) {
        alive = false;
        break;
      }
      at = it->second.front();
    }
    if (alive && at == v) ++count;
  }
  return count;
}

// Direct full-rigidity scan: every cyclically reduced loop of length <= max_len
// that closes up somewhere in the disjoint union must have exactly one lift,
// and so must each of its powers up to the vertex count.
inline bool rigidity_scan_malnormal(const std::vector<CoreGraph>& zs, int rank, std::size_t max_len) {
  const CoreGraph z = disjoint_union(zs);
  const Moves m = moves_of(z);
  const std::size_t vertices = z.vertex_count();
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (const auto& w : cyclically_reduced_words(rank, len)) {
      if (closed_walks(m, vertices, w) == 0) continue;
      std::string power;
      for (std::size_t k = 1; k <= std::max<std::size_t>(vertices, 1); ++k) {
        power += w;
        const std::size_t lifts = closed_walks(m, vertices, power);
        if (lifts != 1) return false;
      }
    }
  }
  return true;
}

// Folding by merging classes until every (class, letter) has one target class,
// then collapsing parallel equal-label edges.
inline CoreGraph fold_by_merging(const CoreGraph& g) {
  std::vector<std::uint32_t> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), 0u);
  std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<std::uint32_t, char>, std::uint32_t> seen;
    for (const Edge& e : g.edges()) {
      const std::pair<std::uint32_t, char> fwd{find(e.src), edge_char(e.generator, false)};
      const std::pair<std::uint32_t, char> bwd{find(e.dst), edge_char(e.generator, true)};
      for (auto [key, target] : {std::pair{fwd, find(e.dst)}, std::pair{bwd, find(e.src)}}) {
        auto [it, fresh] = seen.emplace(key, target);
        if (!fresh && find(it->second) != find(target)) {
          parent[find(it->second)] = find(target);
          changed = true;
        }
      }
    }
  }
  std::map<std::uint32_t, VertexId> index;
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) index.emplace(find(v), 0);
  VertexId next = 0;
  for (auto& [root, id] : index) id = next++;
  CoreGraph out(index.size());
  if (g.basepoint()) out.set_basepoint(index.at(find(*g.basepoint())));
  std::set<std::tuple<VertexId, VertexId, int>> edges;
  for (const Edge& e : g.edges()) {
    const auto key = std::tuple{index.at(find(e.src)), index.at(find(e.dst)), e.generator};
    if (edges.insert(key).second) out.add_edge(std::get<0>(key), std::get<1>(key), e.generator);
  }
  return out;
}

// Label-preserving isomorphism of folded graphs by search: fixing the image of
// one vertex forces its whole component, so only component anchors branch.
inline bool isomorphic_by_search(const CoreGraph& a, const CoreGraph& b) {
  if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
  if (a.basepoint().has_value() != b.basepoint().has_value()) return false;
  const Moves ma = moves_of(a), mb = moves_of(b);
  const std::size_t n = a.vertex_count();
  const std::string letters = alphabet(std::max(a.max_generator(), b.max_generator()) + 1);
  std::vector<std::int64_t> map(n, -1), used(n, -1);

  // Extends map from seed; returns the vertices assigned, or nullopt on conflict.
  auto propagate = [&](std::uint32_t va, std::uint32_t vb) -> std::optional<std::vector<std::uint32_t>> {
    std::vector<std::uint32_t> assigned, stack{va};
    if (map[va] != -1) return map[va] == vb ? std::optional(assigned) : std::nullopt;
    if (used[vb] != -1) return std::nullopt;
    map[va] = vb;
    used[vb] = va;
    assigned.push_back(va);
    bool ok = true;
    while (ok && !stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      for (char c : letters) {
        auto ia = ma.find({v, c});
        auto ib = mb.find({static_cast<std::uint32_t>(map[v]), c});
        if ((ia == ma.end()) != (ib == mb.end())) {
          ok = false;
          break;
        }
        if (ia == ma.end()) continue;
        const std::uint32_t ta = ia->second.front(), tb = ib->second.front();
        if (map[ta] == -1) {
          if (used[tb] != -1) {
            ok = false;
            break;
          }
          map[ta] = tb;
          used[tb] = ta;
          assigned.push_back(ta);
          stack.push_back(ta);
        } else if (map[ta] != tb) {
          ok = false;
        }
      }
    }
    if (!ok) {
      for (auto v : assigned) {
        used[map[v]] = -1;
        map[v] = -1;
      }
      return std::nullopt;
    }
    return assigned;
  };

  if (a.basepoint() && !propagate(*a.basepoint(), *b.basepoint())) return false;
  std::function<bool()> rec = [&]() -> bool {
    auto it = std::find(map.begin(), map.end(), -1);
    if (it == map.end()) return true;
    const auto va = static_cast<std::uint32_t>(it - map.begin());
    for (std::uint32_t vb = 0; vb < n; ++vb) {
      if (used[vb] != -1) continue;
      auto assigned = propagate(va, vb);
      if (!assigned) continue;
      if (rec()) return true;
      for (auto v : *assigned) {
        used[map[v]] = -1;
        map[v] = -1;
      }
    }
    return false;
  };
  return rec();
}

// Boundary words by explicit permutation composition: rho = sigma o tau where
// tau reverses a half-edge and sigma steps to the next one around its vertex.
inline std::multiset<std::string> boundary_words_by_permutation(const Fatgraph& y) {
  const std::size_t halves = 2 * y.edge_count();
  std::vector<HalfEdge> sigma(halves);
  for (const auto& order : y.cyclic_orders()) {
    for (std::size_t i = 0; i < order.size(); ++i) sigma[order[i]] = order[(i + 1) % order.size()];
  }
  std::vector<bool> seen(halves, false);
  std::multiset<std::string> out;
  for (HalfEdge h = 0; h < halves; ++h) {
    if (seen[h]) continue;
    std::string w;
    for (HalfEdge x = h; !seen[x]; x = sigma[x ^ 1u]) {
      seen[x] = true;
      w.push_back(edge_char(y.graph().edge(x / 2).generator, (x & 1u) != 0));
    }
    out.insert(least_rotation_string(w));
  }
  return out;
}

inline Word random_word(Rng& rng, int rank, std::size_t length) {
  return sample_reduced_word(length, rank, rng);
}

// Random multigraph with labelled edges over the given number of vertices.
inline CoreGraph random_graph(Rng& rng, std::size_t vertices, std::size_t edges, int rank,
                              bool basepoint = true) {
  CoreGraph g(vertices, basepoint ? std::optional<VertexId>(0) : std::nullopt);
  for (std::size_t e = 0; e < edges; ++e) {
    g.add_edge(static_cast<VertexId>(uniform_below(rng, vertices)), static_cast<VertexId>(uniform_below(rng, vertices)),
               static_cast<int>(uniform_below(rng, rank)));
  }
  return g;
}

// Explicit embedding of core(g1 x g2) into core(g1) x core(g2): vertices must
// land on surviving vertex pairs and every edge on an equally labelled edge.
inline bool core_embeds_in_product_of_cores(const CoreGraph& g1, const CoreGraph& g2) {
  const CoreGraph product = fiber_product(g1, g2);
  const SubgraphMap pc = core_with_map(product, false);
  const SubgraphMap c1 = core_with_map(g1, false), c2 = core_with_map(g2, false);
  std::vector<std::int64_t> in1(g1.vertex_count(), -1), in2(g2.vertex_count(), -1);
  for (std::size_t i = 0; i < c1.vertex_origin.size(); ++i) in1[c1.vertex_origin[i]] = static_cast<std::int64_t>(i);
  for (std::size_t i = 0; i < c2.vertex_origin.size(); ++i) in2[c2.vertex_origin[i]] = static_cast<std::int64_t>(i);
  const std::size_t n2 = g2.vertex_count();
  const std::size_t m2 = c2.graph.vertex_count();

  std::vector<std::int64_t> image(pc.graph.vertex_count());
  std::set<std::int64_t> hit;
  for (std::size_t v = 0; v < pc.graph.vertex_count(); ++v) {
    const std::size_t pv = pc.vertex_origin[v];
    const std::int64_t a = in1[pv / n2], b = in2[pv % n2];
    if (a < 0 || b < 0) return false;
    image[v] = a * static_cast<std::int64_t>(m2) + b;
    if (!hit.insert(image[v]).second) return false;
  }
  const CoreGraph target = fiber_product(c1.graph, c2.graph);
  std::multiset<std::tuple<std::int64_t, std::int64_t, int>> available;
  for (const Edge& e : target.edges()) available.insert({e.src, e.dst, e.generator});
  for (const Edge& e : pc.graph.edges()) {
    auto it = available.find({image[e.src], image[e.dst], e.generator});
    if (it == available.end()) return false;
    available.erase(it);
  }
  return true;
}

// Longest string occurring in both, by growing the length until no substring
// of a is found in b.
inline std::size_t longest_common_substring(const std::string& a, const std::string& b) {
  std::size_t len = 0;
  while (len < std::min(a.size(), b.size())) {
    bool found = false;
    for (std::size_t i = 0; i + len + 1 <= a.size() && !found; ++i) {
      found = b.find(a.substr(i, len + 1)) != std::string::npos;
    }
    if (!found) break;
    ++len;
  }
  return len;
}

// Longest string occurring at two different positions of s.
inline std::size_t longest_repeated_substring(const std::string& s) {
  std::size_t len = 0;
  while (len + 1 < s.size()) {
    std::set<std::string> seen;
    bool repeated = false;
    for (std::size_t i = 0; i + len + 1 <= s.size() && !repeated; ++i) {
      repeated = !seen.insert(s.substr(i, len + 1)).second;
    }
    if (!repeated) break;
    ++len;
  }
  return len;
}

inline double piece_ratio(const std::vector<std::string>& images) {
  std::vector<std::string> members;
  for (const auto& w : images) {
    members.push_back(w);
    members.push_back(invert_string(w));
  }
  double best = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    best = std::max(best, static_cast<double>(longest_repeated_substring(members[i])) / members[i].size());
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const double shorter = static_cast<double>(std::min(members[i].size(), members[j].size()));
      best = std::max(best, static_cast<double>(longest_common_substring(members[i], members[j])) / shorter);
    }
  }
  return best;
}

// Depth to which folding the rose identifies letters at the basepoint: the
// longest common prefix of two different members of {w, w^-1}.
inline std::size_t prefix_overlap(const std::vector<std::string>& images) {
  std::vector<std::string> members;
  for (const auto& w : images) {
    members.push_back(w);
    members.push_back(invert_string(w));
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto& a = members[i];
      const auto& b = members[j];
      std::size_t p = 0;
      while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
      best = std::max(best, p);
    }
  }
  return best;
}

}  // namespace oracle
