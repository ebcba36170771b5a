#include "surfcert/stallings.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>

#include "surfcert/error.hpp"

namespace surfcert {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void attach(std::size_t child_root, std::size_t root) { parent_[child_root] = root; }

 private:
  std::vector<std::size_t> parent_;
};

// Rebuilds a graph after folding: one vertex per class, surviving edges in
// their original order.
CoreGraph compact_folded(const CoreGraph& g, UnionFind& uf, const std::vector<bool>& alive) {
  std::vector<std::int64_t> id(g.vertex_count(), -1);
  std::size_t next = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    std::size_t r = uf.find(v);
    if (id[r] < 0) id[r] = static_cast<std::int64_t>(next++);
  }
  CoreGraph out(next);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!alive[e]) continue;
    const Edge& ed = g.edge(e);
    out.add_edge(static_cast<VertexId>(id[uf.find(ed.src)]),
                 static_cast<VertexId>(id[uf.find(ed.dst)]), ed.generator);
  }
  if (g.basepoint()) out.set_basepoint(static_cast<VertexId>(id[uf.find(*g.basepoint())]));
  return out;
}

}  // namespace

std::size_t CoreGraph::add_edge(VertexId src, VertexId dst, int generator) {
  if (src >= vertex_count_ || dst >= vertex_count_) {
    throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  }
  if (generator < 0 || generator >= kMaxRank) {
    throw Error(ErrorCode::InvalidArgument, "edge generator out of range");
  }
  edges_.push_back({src, dst, generator});
  return edges_.size() - 1;
}

VertexId CoreGraph::from(HalfEdge h) const {
  const Edge& e = edges_[edge_of(h)];
  return (h & 1u) ? e.dst : e.src;
}

VertexId CoreGraph::to(HalfEdge h) const {
  const Edge& e = edges_[edge_of(h)];
  return (h & 1u) ? e.src : e.dst;
}

std::vector<std::vector<HalfEdge>> CoreGraph::incidence() const {
  std::vector<std::vector<HalfEdge>> inc(vertex_count_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    inc[edges_[e].src].push_back(half_edge(e, false));
    inc[edges_[e].dst].push_back(half_edge(e, true));
  }
  return inc;
}

std::vector<int> CoreGraph::valences() const {
  std::vector<int> val(vertex_count_, 0);
  for (const Edge& e : edges_) {
    ++val[e.src];
    ++val[e.dst];
  }
  return val;
}

int CoreGraph::max_generator() const {
  int m = -1;
  for (const Edge& e : edges_) m = std::max(m, e.generator);
  return m;
}

std::size_t CoreGraph::component_count() const {
  UnionFind uf(vertex_count_);
  std::size_t count = vertex_count_;
  for (const Edge& e : edges_) {
    std::size_t a = uf.find(e.src), b = uf.find(e.dst);
    if (a != b) {
      uf.attach(a, b);
      --count;
    }
  }
  return count;
}

long CoreGraph::betti_number() const {
  return static_cast<long>(edges_.size()) - static_cast<long>(vertex_count_) +
         static_cast<long>(component_count());
}

TransitionTable::TransitionTable(const CoreGraph& g, int min_rank)
    : rank_(std::max(g.max_generator() + 1, min_rank)), vertex_count_(g.vertex_count()) {
  table_.assign(vertex_count_ * static_cast<std::size_t>(2 * rank_), -1);
  const auto stride = static_cast<std::size_t>(2 * rank_);
  for (const Edge& e : g.edges()) {
    table_[e.src * stride + static_cast<std::size_t>(2 * e.generator)] = e.dst;
    table_[e.dst * stride + static_cast<std::size_t>(2 * e.generator + 1)] = e.src;
  }
}

std::int64_t TransitionTable::follow(VertexId v, std::span<const Letter> word) const {
  std::int64_t cur = v;
  for (Letter l : word) {
    cur = target(static_cast<VertexId>(cur), l);
    if (cur < 0) return -1;
  }
  return cur;
}

CoreGraph rose_of_words(std::span<const Word> words) {
  CoreGraph g(1, VertexId{0});
  for (const Word& w : words) {
    if (w.empty()) throw Error(ErrorCode::TrivialGenerator, "rose generator is the empty word");
    VertexId cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      VertexId nxt = (i + 1 == w.size()) ? VertexId{0} : g.add_vertex();
      Letter l = w[i];
      if (l.is_inverse()) {
        g.add_edge(nxt, cur, l.generator());
      } else {
        g.add_edge(cur, nxt, l.generator());
      }
      cur = nxt;
    }
  }
  return g;
}

CoreGraph circle_graph(const CyclicWord& w) {
  CoreGraph g = rose_of_words(std::vector<Word>{w.as_word()});
  g.set_basepoint(std::nullopt);
  return g;
}

bool is_folded(const CoreGraph& g) {
  const auto inc = g.incidence();
  for (const auto& hs : inc) {
    std::array<bool, 2 * kMaxRank> seen{};
    for (HalfEdge h : hs) {
      int c = g.letter(h).code();
      if (seen[static_cast<std::size_t>(c)]) return false;
      seen[static_cast<std::size_t>(c)] = true;
    }
  }
  return true;
}

CoreGraph fold(const CoreGraph& g) {
  const std::size_t n = g.vertex_count();
  UnionFind uf(n);
  std::vector<bool> alive(g.edge_count(), true);
  auto adj = g.incidence();
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v) queue.push_back(v);
  std::array<std::int64_t, 2 * kMaxRank> seen;

  while (!queue.empty()) {
    std::size_t v = uf.find(queue.front());
    queue.pop_front();
    seen.fill(-1);
    HalfEdge keep = 0, drop = 0;
    bool conflict = false;
    auto& hs = adj[v];
    // Drop stale entries of dead edges while scanning.
    std::size_t w = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      HalfEdge h = hs[i];
      if (!alive[edge_of(h)]) continue;
      hs[w++] = h;
      if (conflict) continue;
      auto c = static_cast<std::size_t>(g.letter(h).code());
      if (seen[c] < 0) {
        seen[c] = h;
      } else {
        keep = static_cast<HalfEdge>(seen[c]);
        drop = h;
        conflict = true;
      }
    }
    hs.resize(w);
    if (!conflict) continue;

    alive[edge_of(drop)] = false;
    std::size_t a = uf.find(g.to(keep)), b = uf.find(g.to(drop));
    if (a != b) {
      if (adj[a].size() < adj[b].size()) std::swap(a, b);
      uf.attach(b, a);
      adj[a].insert(adj[a].end(), adj[b].begin(), adj[b].end());
      adj[b].clear();
      adj[b].shrink_to_fit();
    }
    queue.push_back(v);
    queue.push_back(a);
  }
  return compact_folded(g, uf, alive);
}

CoreGraph fold(const CoreGraph& g, Rng& rng) {
  const std::size_t n = g.vertex_count();
  UnionFind uf(n);
  std::vector<bool> alive(g.edge_count(), true);
  struct Candidate {
    HalfEdge keep, drop;
  };
  std::vector<Candidate> candidates;
  std::vector<std::vector<HalfEdge>> at(n);
  for (;;) {
    for (auto& hs : at) hs.clear();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (!alive[e]) continue;
      at[uf.find(g.edge(e).src)].push_back(half_edge(e, false));
      at[uf.find(g.edge(e).dst)].push_back(half_edge(e, true));
    }
    candidates.clear();
    for (const auto& hs : at) {
      for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = 0; j < hs.size(); ++j) {
          if (i != j && edge_of(hs[i]) != edge_of(hs[j]) &&
              g.letter(hs[i]) == g.letter(hs[j])) {
            candidates.push_back({hs[i], hs[j]});
          }
        }
      }
    }
    if (candidates.empty()) break;
    const Candidate c = candidates[uniform_below(rng, candidates.size())];
    alive[edge_of(c.drop)] = false;
    std::size_t a = uf.find(g.to(c.keep)), b = uf.find(g.to(c.drop));
    if (a != b) uf.attach(b, a);
  }
  return compact_folded(g, uf, alive);
}

SubgraphMap core_with_map(const CoreGraph& g, bool keep_basepoint) {
  const std::size_t n = g.vertex_count();
  auto val = g.valences();
  const auto inc = g.incidence();
  std::vector<bool> vertex_alive(n, true), edge_alive(g.edge_count(), true);
  const std::optional<VertexId> protect = keep_basepoint ? g.basepoint() : std::nullopt;
  std::vector<VertexId> stack;
  for (VertexId v = 0; v < n; ++v) {
    if (val[v] <= 1 && protect != v) stack.push_back(v);
  }
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    if (!vertex_alive[v] || val[v] > 1) continue;
    vertex_alive[v] = false;
    for (HalfEdge h : inc[v]) {
      std::size_t e = edge_of(h);
      if (!edge_alive[e]) continue;
      edge_alive[e] = false;
      VertexId u = g.to(h);
      --val[u];
      --val[v];
      if (vertex_alive[u] && val[u] <= 1 && protect != u) stack.push_back(u);
    }
  }
  SubgraphMap out;
  std::vector<std::int64_t> id(n, -1);
  for (VertexId v = 0; v < n; ++v) {
    if (!vertex_alive[v]) continue;
    id[v] = static_cast<std::int64_t>(out.vertex_origin.size());
    out.vertex_origin.push_back(v);
  }
  out.graph = CoreGraph(out.vertex_origin.size());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!edge_alive[e]) continue;
    const Edge& ed = g.edge(e);
    out.graph.add_edge(static_cast<VertexId>(id[ed.src]), static_cast<VertexId>(id[ed.dst]),
                       ed.generator);
    out.edge_origin.push_back(e);
  }
  if (protect) out.graph.set_basepoint(static_cast<VertexId>(id[*protect]));
  return out;
}

CoreGraph fiber_product(const CoreGraph& g1, const CoreGraph& g2) {
  const std::size_t n2 = g2.vertex_count();
  CoreGraph out(g1.vertex_count() * n2);
  std::vector<std::vector<std::size_t>> by_gen(static_cast<std::size_t>(kMaxRank));
  for (std::size_t e = 0; e < g2.edge_count(); ++e) {
    by_gen[static_cast<std::size_t>(g2.edge(e).generator)].push_back(e);
  }
  for (const Edge& a : g1.edges()) {
    for (std::size_t e2 : by_gen[static_cast<std::size_t>(a.generator)]) {
      const Edge& b = g2.edge(e2);
      out.add_edge(static_cast<VertexId>(a.src * n2 + b.src),
                   static_cast<VertexId>(a.dst * n2 + b.dst), a.generator);
    }
  }
  if (g1.basepoint() && g2.basepoint()) {
    out.set_basepoint(static_cast<VertexId>(*g1.basepoint() * n2 + *g2.basepoint()));
  }
  return out;
}

std::vector<SubgraphMap> components(const CoreGraph& g) {
  const std::size_t n = g.vertex_count();
  const auto inc = g.incidence();
  std::vector<std::int64_t> comp(n, -1);
  std::vector<SubgraphMap> out;
  std::vector<std::int64_t> local(n, -1);
  for (VertexId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const auto c = static_cast<std::int64_t>(out.size());
    out.emplace_back();
    SubgraphMap& m = out.back();
    std::vector<VertexId> order{s};
    comp[s] = c;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (HalfEdge h : inc[order[i]]) {
        VertexId u = g.to(h);
        if (comp[u] < 0) {
          comp[u] = c;
          order.push_back(u);
        }
      }
    }
    std::sort(order.begin(), order.end());
    for (VertexId v : order) {
      local[v] = static_cast<std::int64_t>(m.vertex_origin.size());
      m.vertex_origin.push_back(v);
    }
    m.graph = CoreGraph(order.size());
    if (g.basepoint() && comp[*g.basepoint()] == c) {
      m.graph.set_basepoint(static_cast<VertexId>(local[*g.basepoint()]));
    }
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    SubgraphMap& m = out[static_cast<std::size_t>(comp[ed.src])];
    m.graph.add_edge(static_cast<VertexId>(local[ed.src]), static_cast<VertexId>(local[ed.dst]),
                     ed.generator);
    m.edge_origin.push_back(e);
  }
  return out;
}

CoreGraph disjoint_union(std::span<const CoreGraph> graphs) {
  CoreGraph out;
  for (const CoreGraph& g : graphs) {
    const auto offset = static_cast<VertexId>(out.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) out.add_vertex();
    for (const Edge& e : g.edges()) out.add_edge(e.src + offset, e.dst + offset, e.generator);
  }
  return out;
}

CyclicWord some_cycle_word(const CoreGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0 || g.betti_number() < 1) {
    throw Error(ErrorCode::InvalidArgument, "graph has no cycle");
  }
  const auto inc = g.incidence();
  // BFS tree from vertex 0; path[v] reads the tree path from the root to v.
  std::vector<std::vector<Letter>> path(n);
  std::vector<bool> seen(n, false);
  std::vector<bool> tree_edge(g.edge_count(), false);
  std::vector<VertexId> order{0};
  seen[0] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    VertexId v = order[i];
    for (HalfEdge h : inc[v]) {
      VertexId u = g.to(h);
      if (seen[u]) continue;
      seen[u] = true;
      tree_edge[edge_of(h)] = true;
      path[u] = path[v];
      path[u].push_back(g.letter(h));
      order.push_back(u);
    }
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (tree_edge[e] || !seen[g.edge(e).src]) continue;
    std::vector<Letter> loop = path[g.edge(e).src];
    loop.push_back(Letter(g.edge(e).generator, false));
    Word back = Word::reduce(path[g.edge(e).dst]).inverse();
    loop.insert(loop.end(), back.letters().begin(), back.letters().end());
    Word w = Word::reduce(loop);
    if (!w.empty()) return cyclic_reduce(w).core;
  }
  throw Error(ErrorCode::InvalidArgument, "no nontrivial cycle found (graph not folded?)");
}

std::vector<VertexId> closed_lifts(std::span<const Letter> word, const TransitionTable& t) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    if (t.follow(v, word) == static_cast<std::int64_t>(v)) out.push_back(v);
  }
  return out;
}

namespace {

// Number of periodic points of a partial self-map given as a table (-1 = undefined).
std::size_t count_periodic(const std::vector<std::int64_t>& f) {
  const std::size_t n = f.size();
  std::vector<std::uint8_t> state(n, 0);  // 0 new, 1 on current walk, 2 done
  std::size_t periodic = 0;
  std::vector<std::size_t> walk;
  for (std::size_t s = 0; s < n; ++s) {
    if (state[s] != 0) continue;
    walk.clear();
    std::int64_t cur = static_cast<std::int64_t>(s);
    while (cur >= 0 && state[static_cast<std::size_t>(cur)] == 0) {
      state[static_cast<std::size_t>(cur)] = 1;
      walk.push_back(static_cast<std::size_t>(cur));
      cur = f[static_cast<std::size_t>(cur)];
    }
    if (cur >= 0 && state[static_cast<std::size_t>(cur)] == 1) {
      // Closed a new cycle: everything on the walk from cur onwards.
      auto it = std::find(walk.begin(), walk.end(), static_cast<std::size_t>(cur));
      periodic += static_cast<std::size_t>(walk.end() - it);
    }
    for (std::size_t v : walk) state[v] = 2;
  }
  return periodic;
}

}  // namespace

LiftReport lifts_of_loop(const CyclicWord& w, const CoreGraph& z) {
  TransitionTable t(z, w[0].generator() + 1);
  std::vector<std::int64_t> f(z.vertex_count());
  LiftReport r{w, {}, 0, false, false};
  for (VertexId v = 0; v < z.vertex_count(); ++v) {
    f[v] = t.follow(v, w.letters());
    if (f[v] == static_cast<std::int64_t>(v)) r.lifts.push_back(v);
  }
  r.periodic_points = count_periodic(f);
  r.rigid = r.lifts.size() == 1;
  r.fully_rigid = r.periodic_points == 1;
  return r;
}

bool is_fully_rigid(const CyclicWord& w, const CoreGraph& z) { return lifts_of_loop(w, z).fully_rigid; }

MalnormalityResult is_malnormal_family(std::span<const CoreGraph> zs) {
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t j = i; j < zs.size(); ++j) {
      const std::size_t n2 = zs[j].vertex_count();
      SubgraphMap c = core_with_map(fiber_product(zs[i], zs[j]), false);
      for (SubgraphMap& comp : components(c.graph)) {
        if (comp.graph.betti_number() < 1) continue;
        bool diagonal = (i == j);
        for (VertexId v : comp.vertex_origin) {
          VertexId pv = c.vertex_origin[v];
          if (pv / n2 != pv % n2) {
            diagonal = false;
            break;
          }
        }
        if (diagonal) continue;
        CyclicWord loop = some_cycle_word(comp.graph);
        return {false, MalnormalWitness{i, j, std::move(comp.graph), std::move(loop)}};
      }
    }
  }
  return {true, std::nullopt};
}

namespace {

// BFS encoding from `start` within its component.
std::vector<std::int64_t> encode_from(const TransitionTable& t, VertexId start,
                                      std::vector<std::int64_t>& index) {
  std::vector<VertexId> order{start};
  std::vector<std::int64_t> code;
  index[start] = 0;
  const int letters = 2 * t.rank();
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int c = 0; c < letters; ++c) {
      std::int64_t u = t.target(order[i], Letter::from_code(c));
      if (u < 0) {
        code.push_back(-1);
        continue;
      }
      if (index[static_cast<std::size_t>(u)] < 0) {
        index[static_cast<std::size_t>(u)] = static_cast<std::int64_t>(order.size());
        order.push_back(static_cast<VertexId>(u));
      }
      code.push_back(index[static_cast<std::size_t>(u)]);
    }
  }
  for (VertexId v : order) index[v] = -1;
  return code;
}

}  // namespace

std::string canonical_form(const CoreGraph& g) {
  if (!is_folded(g)) throw Error(ErrorCode::InvalidArgument, "canonical_form needs a folded graph");
  std::vector<std::string> parts;
  for (const SubgraphMap& comp : components(g)) {
    TransitionTable t(comp.graph, g.max_generator() + 1);
    std::vector<std::int64_t> index(comp.graph.vertex_count(), -1);
    std::vector<std::int64_t> best;
    bool has_base = comp.graph.basepoint().has_value();
    for (VertexId s = 0; s < comp.graph.vertex_count(); ++s) {
      if (has_base && s != *comp.graph.basepoint()) continue;
      auto code = encode_from(t, s, index);
      if (best.empty() || code < best) best = std::move(code);
    }
    std::string part = has_base ? "*" : "";
    part += std::to_string(comp.graph.vertex_count()) + ":";
    for (std::int64_t x : best) part += std::to_string(x) + ",";
    parts.push_back(std::move(part));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += p + "|";
  return out;
}

bool are_isomorphic(const CoreGraph& a, const CoreGraph& b) {
  if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
  return canonical_form(a) == canonical_form(b);
}

}  // namespace surfcert
