#include "surfcert/builder.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

#include "surfcert/error.hpp"

namespace surfcert {

std::size_t Chain::total_length() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.size();
  return n;
}

std::size_t Chain::flat(BoundaryPosition p) const {
  std::size_t base = 0;
  for (std::size_t c = 0; c < p.component; ++c) base += components[c].size();
  return base + p.index;
}

bool Pairing::complete() const {
  return std::none_of(partner.begin(), partner.end(), [](std::int64_t q) { return q < 0; });
}

std::size_t Pairing::paired_count() const {
  return static_cast<std::size_t>(
      std::count_if(partner.begin(), partner.end(), [](std::int64_t q) { return q >= 0; }));
}

std::size_t BuilderConfig::effective_min_spacing() const {
  if (min_spacing) return *min_spacing;
  return std::max<std::size_t>(4 * static_cast<std::size_t>(admission.T), 64);
}

namespace {

// Letters, cyclic neighbours and component of every flat position.
struct Layout {
  std::vector<Letter> letter;
  std::vector<std::uint32_t> next;
  std::vector<std::uint32_t> prev;
  std::vector<std::uint32_t> component;
  std::vector<std::size_t> offset;

  explicit Layout(const Chain& chain) {
    for (std::uint32_t c = 0; c < chain.components.size(); ++c) {
      const auto& w = chain.components[c];
      const auto base = static_cast<std::uint32_t>(letter.size());
      const auto m = static_cast<std::uint32_t>(w.size());
      offset.push_back(base);
      for (std::uint32_t i = 0; i < m; ++i) {
        letter.push_back(w[i]);
        next.push_back(base + (i + 1) % m);
        prev.push_back(base + (i + m - 1) % m);
        component.push_back(c);
      }
    }
  }
  std::size_t size() const { return letter.size(); }
  std::uint32_t at(std::size_t c, std::size_t i) const {
    const std::size_t m = (c + 1 < offset.size() ? offset[c + 1] : letter.size()) - offset[c];
    return static_cast<std::uint32_t>(offset[c] + i % m);
  }
};

// Partial pairing together with the partial corner cycles it induces: after
// pairing p with q the corner of p continues at next(q).
class PairingState {
 public:
  PairingState(const Layout& layout, int rank)
      : lay_(layout),
        limit_(4 * rank + 4),
        partner_(layout.size(), -1),
        succ_(layout.size(), -1),
        pred_(layout.size(), -1) {}

  const Layout& layout() const { return lay_; }
  bool paired(std::size_t p) const { return partner_[p] >= 0; }
  std::int64_t succ(std::size_t p) const { return succ_[p]; }
  std::int64_t pred(std::size_t p) const { return pred_[p]; }
  std::int64_t partner(std::size_t p) const { return partner_[p]; }
  const std::vector<std::int64_t>& partners() const { return partner_; }

  void pair(std::uint32_t p, std::uint32_t q) {
    partner_[p] = q;
    partner_[q] = p;
    succ_[p] = lay_.next[q];
    pred_[lay_.next[q]] = p;
    succ_[q] = lay_.next[p];
    pred_[lay_.next[p]] = q;
  }

  void unpair(std::uint32_t p, std::uint32_t q) {
    pred_[lay_.next[p]] = -1;
    pred_[lay_.next[q]] = -1;
    succ_[p] = succ_[q] = -1;
    partner_[p] = partner_[q] = -1;
  }

  bool compatible(std::uint32_t p, std::uint32_t q) const {
    return lay_.letter[q] == lay_.letter[p].inverse() && !paired(p) && !paired(q);
  }

  // Pairs p, q when the corners through them keep distinct letters.
  bool try_pair(std::uint32_t p, std::uint32_t q) {
    pair(p, q);
    if (corner_ok(p) && corner_ok(q)) return true;
    unpair(p, q);
    return false;
  }

  bool legal(std::uint32_t p, std::uint32_t q) {
    if (!compatible(p, q)) return false;
    if (!try_pair(p, q)) return false;
    unpair(p, q);
    return true;
  }

 private:
  bool corner_ok(std::uint32_t x) const {
    std::int64_t start = x;
    int steps = 0;
    while (pred_[start] >= 0 && pred_[start] != x) {
      start = pred_[start];
      if (++steps > limit_) return false;
    }
    std::uint64_t seen = 0;
    std::int64_t cur = start;
    steps = 0;
    do {
      const std::uint64_t bit = std::uint64_t{1} << lay_.letter[cur].code();
      if (seen & bit) return false;
      seen |= bit;
      cur = succ_[cur];
      if (++steps > limit_) return false;
    } while (cur >= 0 && cur != start);
    return true;
  }

  const Layout& lay_;
  int limit_;
  std::vector<std::int64_t> partner_;
  std::vector<std::int64_t> succ_;
  std::vector<std::int64_t> pred_;
};

Quotient quotient_of(const Layout& lay, const std::vector<std::int64_t>& partner) {
  const std::size_t n = lay.size();
  CoreGraph g;
  Quotient out;
  out.half_edge_of.assign(n, 0);
  std::vector<std::uint32_t> vertex(n, UINT32_MAX);
  std::vector<std::vector<HalfEdge>> orders;
  for (std::size_t p = 0; p < n; ++p) {
    if (vertex[p] != UINT32_MAX) continue;
    const auto v = static_cast<std::uint32_t>(orders.size());
    orders.emplace_back();
    std::size_t q = p;
    do {
      vertex[q] = v;
      orders.back().push_back(static_cast<HalfEdge>(q));  // patched below
      q = lay.next[static_cast<std::size_t>(partner[q])];
    } while (q != p);
  }
  g = CoreGraph(orders.size());
  for (std::size_t p = 0; p < n; ++p) {
    if (lay.letter[p].is_inverse()) continue;
    const auto q = static_cast<std::size_t>(partner[p]);
    const std::size_t e = g.add_edge(vertex[p], vertex[q], lay.letter[p].generator());
    out.half_edge_of[p] = half_edge(e, false);
    out.half_edge_of[q] = half_edge(e, true);
  }
  for (auto& order : orders) {
    for (auto& h : order) h = out.half_edge_of[h];
  }
  out.fatgraph = Fatgraph(std::move(g), std::move(orders));
  return out;
}

void require_total(const Layout& lay, const Pairing& pairing) {
  if (pairing.partner.size() != lay.size()) {
    throw Error(ErrorCode::InvalidArgument, "pairing size does not match the chain");
  }
  for (std::size_t p = 0; p < lay.size(); ++p) {
    const std::int64_t q = pairing.partner[p];
    if (q < 0 || static_cast<std::size_t>(q) >= lay.size() ||
        pairing.partner[static_cast<std::size_t>(q)] != static_cast<std::int64_t>(p) ||
        lay.letter[static_cast<std::size_t>(q)] != lay.letter[p].inverse()) {
      throw Error(ErrorCode::InvalidArgument,
                  "pairing is not a total letter-inverse involution at " + std::to_string(p));
    }
  }
}

bool all_hyperbolic(const Fatgraph& y) {
  for (const auto& inv : component_invariants(y)) {
    if (inv.chi >= 0) return false;
  }
  return true;
}

struct Cluster {
  std::size_t component;
  std::size_t first;  // index of the first marked vertex
  std::size_t run;    // number of consecutive marks
};

std::vector<Cluster> mark_clusters(const Chain& chain) {
  std::vector<std::vector<bool>> marked(chain.components.size());
  for (std::size_t c = 0; c < chain.components.size(); ++c) {
    marked[c].assign(chain.components[c].size(), false);
  }
  for (const auto& m : chain.marks) {
    if (m.component >= chain.components.size() || m.index >= chain.components[m.component].size()) {
      throw Error(ErrorCode::InvalidArgument, "mark outside the chain");
    }
    marked[m.component][m.index] = true;
  }
  std::vector<Cluster> out;
  for (std::size_t c = 0; c < marked.size(); ++c) {
    const auto& row = marked[c];
    const std::size_t m = row.size();
    auto free_it = std::find(row.begin(), row.end(), false);
    if (free_it == row.end()) {
      if (m > 0 && !chain.marks.empty()) {
        throw Error(ErrorCode::TagInfeasible, "every vertex of component " + std::to_string(c) + " is marked");
      }
      continue;
    }
    const std::size_t start = static_cast<std::size_t>(free_it - row.begin());
    std::size_t i = 0;
    while (i < m) {
      const std::size_t idx = (start + i) % m;
      if (!row[idx]) {
        ++i;
        continue;
      }
      std::size_t run = 0;
      while (i < m && row[(start + i) % m]) {
        ++run;
        ++i;
      }
      out.push_back({c, idx, run});
    }
  }
  return out;
}

void tag_into(PairingState& st, const Chain& chain, Rng& rng) {
  const Layout& lay = st.layout();
  std::vector<bool> marked(lay.size(), false);
  for (const auto& m : chain.marks) marked[lay.at(m.component, m.index)] = true;

  for (const Cluster& cl : mark_clusters(chain)) {
    const std::size_t len = chain.components[cl.component].size();
    const std::size_t arc_len = cl.run + 1;
    if (arc_len > len) {
      throw Error(ErrorCode::TagInfeasible, "marks cover a whole component");
    }
    std::vector<std::uint32_t> arc(arc_len);
    for (std::size_t t = 0; t < arc_len; ++t) arc[t] = lay.at(cl.component, cl.first + len - 1 + t);
    if (std::any_of(arc.begin(), arc.end(), [&](std::uint32_t p) { return st.paired(p); })) {
      throw Error(ErrorCode::TagInfeasible, "arc around a mark was consumed by another tag");
    }

    std::vector<std::pair<std::size_t, std::size_t>> starts;
    for (std::size_t c = 0; c < chain.components.size(); ++c) {
      if (chain.components[c].size() < arc_len) continue;
      for (std::size_t j = 0; j < chain.components[c].size(); ++j) starts.emplace_back(c, j);
    }
    shuffle(starts, rng);

    bool placed = false;
    std::vector<std::uint32_t> inv(arc_len);
    for (const auto& [c, j] : starts) {
      bool ok = true;
      for (std::size_t t = 0; t < arc_len && ok; ++t) {
        inv[t] = lay.at(c, j + t);
        ok = !st.paired(inv[t]) && lay.letter[inv[t]] == lay.letter[arc[arc_len - 1 - t]].inverse() &&
             std::find(arc.begin(), arc.end(), inv[t]) == arc.end() && (t == 0 || !marked[inv[t]]);
      }
      if (!ok) continue;
      std::size_t done = 0;
      for (; done < arc_len; ++done) {
        if (!st.try_pair(arc[done], inv[arc_len - 1 - done])) break;
      }
      if (done == arc_len) {
        placed = true;
        break;
      }
      while (done-- > 0) st.unpair(arc[done], inv[arc_len - 1 - done]);
    }
    if (!placed) {
      throw Error(ErrorCode::TagInfeasible,
                  "no free inverse arc for the mark at component " + std::to_string(cl.component) +
                      ", index " + std::to_string(cl.first));
    }
  }
}

// Depth-first completion: the open position with fewest legal partners goes
// first, partners extending an already-paired strip are tried first.
class Searcher {
 public:
  Searcher(PairingState& st, std::uint64_t limit, bool forbid_annuli, Rng& rng)
      : st_(st), limit_(limit), forbid_(forbid_annuli), rng_(rng), by_code_(2 * kMaxRank) {
    const Layout& lay = st.layout();
    order_.resize(lay.size());
    std::iota(order_.begin(), order_.end(), 0u);
    shuffle(order_, rng_);
    for (std::uint32_t p : order_) by_code_[static_cast<std::size_t>(lay.letter[p].code())].push_back(p);
  }

  bool run() {
    std::size_t open = 0;
    for (std::uint32_t p : order_) open += st_.paired(p) ? 0 : 1;
    return dfs(open);
  }

  std::uint64_t backtracks() const { return backtracks_; }
  bool aborted() const { return aborted_; }

 private:
  const std::vector<std::uint32_t>& partners_for(std::uint32_t p) const {
    return by_code_[static_cast<std::size_t>(st_.layout().letter[p].inverse().code())];
  }

  bool dfs(std::size_t open) {
    if (open == 0) {
      return !forbid_ || all_hyperbolic(quotient_of(st_.layout(), st_.partners()).fatgraph);
    }
    const Layout& lay = st_.layout();
    std::uint32_t best = 0;
    std::size_t best_count = SIZE_MAX;
    for (std::uint32_t p : order_) {
      if (st_.paired(p)) continue;
      std::size_t count = 0;
      for (std::uint32_t q : partners_for(p)) {
        if (st_.legal(p, q) && ++count >= best_count) break;
      }
      if (count == 0) return false;
      if (count < best_count) {
        best_count = count;
        best = p;
      }
    }

    std::vector<std::pair<int, std::uint32_t>> cands;
    for (std::uint32_t q : partners_for(best)) {
      if (!st_.legal(best, q)) continue;
      int score = 0;
      if (st_.partner(lay.prev[best]) == lay.next[q]) ++score;
      if (st_.partner(lay.next[best]) == lay.prev[q]) ++score;
      cands.emplace_back(score, q);
    }
    shuffle(cands, rng_);
    std::stable_sort(cands.begin(), cands.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    for (const auto& [score, q] : cands) {
      st_.pair(best, q);
      if (dfs(open - 2)) return true;
      st_.unpair(best, q);
      if (aborted_) return false;
      if (limit_ != 0 && ++backtracks_ >= limit_) {
        aborted_ = true;
        return false;
      }
    }
    return false;
  }

  PairingState& st_;
  std::uint64_t limit_;
  bool forbid_;
  Rng& rng_;
  std::vector<std::uint32_t> order_;
  std::vector<std::vector<std::uint32_t>> by_code_;
  std::uint64_t backtracks_ = 0;
  bool aborted_ = false;
};

std::vector<Letter> mirror(std::span<const Letter> x) {
  std::vector<Letter> out(x.rbegin(), x.rend());
  for (Letter& l : out) l = l.inverse();
  return out;
}

// A circle x together with its inverse X, X[j] = x[m-1-j]^-1, and the marked
// vertices on both. Local positions: x[i] is i, X[j] is m + j.
struct Strand {
  std::vector<Letter> x;
  std::vector<bool> mark_x;
  std::vector<bool> mark_X;

  std::size_t size() const { return x.size(); }

  // The arc x[c, c+len) with its inverse arc, marked at both wrap vertices.
  Strand arc(std::size_t c, std::size_t len) const {
    const std::size_t m = size();
    const std::size_t k0 = (2 * m - c - len) % m;
    Strand t;
    for (std::size_t i = 0; i < len; ++i) {
      t.x.push_back(x[(c + i) % m]);
      t.mark_x.push_back(i == 0 || mark_x[(c + i) % m]);
      t.mark_X.push_back(i == 0 || mark_X[(k0 + i) % m]);
    }
    return t;
  }
};

bool strand_folded(const std::vector<std::int64_t>& partner, std::span<const Letter> x) {
  const std::size_t m = x.size();
  const auto X = mirror(x);
  auto letter = [&](std::size_t p) { return p < m ? x[p] : X[p - m]; };
  auto next = [&](std::size_t p) { return p < m ? (p + 1) % m : m + (p - m + 1) % m; };
  std::vector<bool> seen(2 * m, false);
  for (std::size_t p = 0; p < 2 * m; ++p) {
    if (seen[p]) continue;
    std::uint64_t letters = 0;
    std::size_t q = p;
    do {
      if (partner[q] < 0) return false;
      seen[q] = true;
      const std::uint64_t bit = std::uint64_t{1} << letter(q).code();
      if (letters & bit) return false;
      letters |= bit;
      q = next(static_cast<std::size_t>(partner[q]));
    } while (q != p);
  }
  return true;
}

// Divide and conquer for chains {x, x^-1}. Cutting x into arcs u, v and
// filling {u, u^-1} and {v, v^-1} separately, with the wrap vertices of each
// kept 2-valent and apart, the union of the two pairings fills {x, x^-1}: the
// four wrap corners of each circle fuse into two 4-valent vertices, folded
// when the four letters meeting there differ. Euler characteristic drops by 2.
class Splitter {
 public:
  Splitter(int rank, std::size_t leaf, std::uint64_t limit, std::size_t attempts)
      : rank_(rank), leaf_(leaf), limit_(limit), attempts_(attempts) {}

  std::optional<std::vector<std::int64_t>> solve(const Strand& s, Rng& rng) {
    const std::size_t m = s.size();
    if (m <= leaf_) return solve_leaf(s, rng);
    auto clear = [&](std::size_t c) {
      for (std::size_t d : {m - 1, std::size_t{0}, std::size_t{1}}) {
        if (s.mark_x[(c + d) % m] || s.mark_X[(2 * m - c + d) % m]) return false;
      }
      return true;
    };
    std::size_t tried = 0;
    for (std::size_t draw = 0; draw < 64 * attempts_ && tried < attempts_; ++draw) {
      const std::size_t c1 = uniform_below(rng, m);
      const std::size_t a = m / 2 - m / 8 + uniform_below(rng, m / 4 + 1);
      const std::size_t c2 = (c1 + a) % m;
      if (!clear(c1) || !clear(c2)) continue;
      const std::array<Letter, 4> junction{s.x[c1], s.x[c2], s.x[(c2 + m - 1) % m].inverse(),
                                           s.x[(c1 + m - 1) % m].inverse()};
      std::uint64_t seen = 0;
      for (Letter l : junction) seen |= std::uint64_t{1} << l.code();
      if (std::popcount(seen) != 4) continue;
      ++tried;

      auto pa = solve(s.arc(c1, a), rng);
      if (!pa) continue;
      auto pb = solve(s.arc(c2, m - a), rng);
      if (!pb) continue;
      std::vector<std::int64_t> out(2 * m, -1);
      place(out, *pa, m, c1, a);
      place(out, *pb, m, c2, m - a);
      if (strand_folded(out, s.x)) return out;
    }
    return std::nullopt;
  }

  std::uint64_t backtracks() const { return backtracks_; }

 private:
  static void place(std::vector<std::int64_t>& out, const std::vector<std::int64_t>& part,
                    std::size_t m, std::size_t c, std::size_t len) {
    const std::size_t k0 = (2 * m - c - len) % m;
    auto up = [&](std::int64_t i) -> std::int64_t {
      const auto u = static_cast<std::size_t>(i);
      return static_cast<std::int64_t>(u < len ? (c + u) % m : m + (k0 + u - len) % m);
    };
    for (std::size_t i = 0; i < part.size(); ++i) out[static_cast<std::size_t>(up(static_cast<std::int64_t>(i)))] = up(part[i]);
  }

  std::optional<std::vector<std::int64_t>> solve_leaf(const Strand& s, Rng& rng) {
    const std::size_t m = s.size();
    const auto X = mirror(s.x);
    Chain chain;
    chain.rank = rank_;
    chain.components = {CyclicWord::from_letters(s.x), CyclicWord::from_letters(X)};
    const std::size_t rx = least_rotation(s.x);
    const std::size_t rX = least_rotation(X);
    for (std::size_t i = 0; i < m; ++i) {
      if (s.mark_x[i]) chain.marks.push_back({0, (i + m - rx) % m});
      if (s.mark_X[i]) chain.marks.push_back({1, (i + m - rX) % m});
    }
    const Layout lay(chain);
    auto local = [&](std::int64_t f) -> std::int64_t {
      const auto u = static_cast<std::size_t>(f);
      return static_cast<std::int64_t>(u < m ? (u + rx) % m : m + (u - m + rX) % m);
    };
    for (std::size_t attempt = 0; attempt < attempts_; ++attempt) {
      PairingState st(lay, rank_);
      try {
        tag_into(st, chain, rng);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TagInfeasible) throw;
        continue;
      }
      Searcher search(st, limit_, false, rng);
      const bool found = search.run();
      backtracks_ += search.backtracks();
      if (!found) continue;
      std::vector<std::int64_t> out(2 * m);
      for (std::size_t f = 0; f < 2 * m; ++f) {
        out[static_cast<std::size_t>(local(static_cast<std::int64_t>(f)))] = local(st.partner(f));
      }
      return out;
    }
    return std::nullopt;
  }

  int rank_;
  std::size_t leaf_;
  std::uint64_t limit_;
  std::size_t attempts_;
  std::uint64_t backtracks_ = 0;
};

// Rotation r with component 1 reading mirror(component 0) from r, when the
// chain is {x, x^-1}.
std::optional<std::size_t> mirror_rotation(const Chain& chain) {
  if (chain.components.size() != 2 || chain.components[1] != chain.components[0].inverse()) {
    return std::nullopt;
  }
  return least_rotation(mirror(chain.components[0].letters()));
}

std::optional<std::vector<std::int64_t>> split_search(const Chain& chain, std::size_t r1,
                                                      Splitter& splitter, Rng& rng) {
  const auto x = chain.components[0].letters();
  const std::size_t m = x.size();
  Strand s;
  s.x.assign(x.begin(), x.end());
  s.mark_x.assign(m, false);
  s.mark_X.assign(m, false);
  for (const auto& mk : chain.marks) {
    if (mk.component == 0) {
      s.mark_x[mk.index] = true;
    } else {
      s.mark_X[(mk.index + r1) % m] = true;
    }
  }
  auto local = splitter.solve(s, rng);
  if (!local) return std::nullopt;
  auto flat = [&](std::int64_t p) -> std::int64_t {
    const auto u = static_cast<std::size_t>(p);
    return static_cast<std::int64_t>(u < m ? u : m + (u - m + m - r1) % m);
  };
  std::vector<std::int64_t> out(2 * m);
  for (std::size_t p = 0; p < 2 * m; ++p) {
    out[static_cast<std::size_t>(flat(static_cast<std::int64_t>(p)))] = flat((*local)[p]);
  }
  return out;
}

void require_trivial(const Chain& chain) {
  if (chain.components.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty chain");
  }
  if (!is_homologically_trivial(std::span<const CyclicWord>(chain.components), chain.rank)) {
    throw Error(ErrorCode::NotHomologicallyTrivial, "chain has nonzero abelianization");
  }
}

std::vector<std::size_t> cycle_components(const Layout& lay, const Quotient& q, const SurfacePiece& piece) {
  std::vector<std::size_t> position_of(q.half_edge_of.size());
  for (std::size_t p = 0; p < q.half_edge_of.size(); ++p) position_of[q.half_edge_of[p]] = p;
  std::vector<std::size_t> out;
  for (const auto& b : piece.boundary) out.push_back(lay.component[position_of[b.half_edges.front()]]);
  return out;
}

}  // namespace

std::vector<BoundaryPosition> f_vertex_marks(std::span<const CyclicWord> components,
                                             const CoreGraph& z) {
  int rank = z.max_generator() + 1;
  for (const auto& w : components) {
    for (Letter l : w.letters()) rank = std::max(rank, l.generator() + 1);
  }
  const TransitionTable t(z, rank);
  const auto valence = z.valences();
  std::vector<BoundaryPosition> out;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto letters = components[c].letters();
    const auto lifts = closed_lifts(letters, t);
    if (lifts.size() != 1) {
      throw Error(ErrorCode::RigidityRequired, "component " + components[c].to_string() + " has " +
                                                   std::to_string(lifts.size()) + " lifts");
    }
    std::int64_t cur = lifts.front();
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (valence[static_cast<std::size_t>(cur)] >= 3) out.push_back({c, i});
      cur = t.target(static_cast<VertexId>(cur), letters[i]);
    }
  }
  return out;
}

std::optional<std::size_t> mark_spacing(const Chain& chain) {
  std::vector<std::vector<std::size_t>> per(chain.components.size());
  for (const auto& m : chain.marks) per[m.component].push_back(m.index);
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < per.size(); ++c) {
    auto& idx = per[c];
    if (idx.size() < 2) continue;
    std::sort(idx.begin(), idx.end());
    std::size_t gap = chain.components[c].size() - idx.back() + idx.front();
    for (std::size_t i = 1; i < idx.size(); ++i) gap = std::min(gap, idx[i] - idx[i - 1]);
    best = best ? std::min(*best, gap) : gap;
  }
  return best;
}

Pairing tag_f_vertices(const Chain& chain, Rng& rng) {
  const Layout lay(chain);
  PairingState st(lay, chain.rank);
  tag_into(st, chain, rng);
  return Pairing{st.partners()};
}

Quotient pairing_to_fatgraph(const Chain& chain, const Pairing& pairing) {
  const Layout lay(chain);
  require_total(lay, pairing);
  return quotient_of(lay, pairing.partner);
}

bool pairing_is_folded(const Chain& chain, const Pairing& pairing) {
  const Layout lay(chain);
  require_total(lay, pairing);
  std::vector<bool> seen(lay.size(), false);
  for (std::size_t p = 0; p < lay.size(); ++p) {
    if (seen[p]) continue;
    std::uint64_t letters = 0;
    std::size_t q = p;
    do {
      seen[q] = true;
      const std::uint64_t bit = std::uint64_t{1} << lay.letter[q].code();
      if (letters & bit) return false;
      letters |= bit;
      q = lay.next[static_cast<std::size_t>(pairing.partner[q])];
    } while (q != p);
  }
  return true;
}

std::vector<Pairing> enumerate_pairings(const Chain& chain) {
  constexpr std::size_t kMaxLength = 14;
  const Layout lay(chain);
  if (lay.size() > kMaxLength) {
    throw Error(ErrorCode::TooLarge, "pairing enumeration is limited to total length 14");
  }
  std::vector<Pairing> out;
  std::vector<std::int64_t> partner(lay.size(), -1);
  auto rec = [&](auto&& self) -> void {
    auto it = std::find(partner.begin(), partner.end(), -1);
    if (it == partner.end()) {
      out.push_back(Pairing{partner});
      return;
    }
    const auto p = static_cast<std::size_t>(it - partner.begin());
    for (std::size_t q = p + 1; q < lay.size(); ++q) {
      if (partner[q] >= 0 || lay.letter[q] != lay.letter[p].inverse()) continue;
      partner[p] = static_cast<std::int64_t>(q);
      partner[q] = static_cast<std::int64_t>(p);
      self(self);
      partner[p] = partner[q] = -1;
    }
  };
  rec(rec);
  return out;
}

std::optional<Pairing> search_pairing(const Chain& chain, const Pairing& start,
                                      std::uint64_t backtrack_limit, bool forbid_annuli,
                                      Rng& rng, SearchStats* stats) {
  const Layout lay(chain);
  if (!start.partner.empty() && start.partner.size() != lay.size()) {
    throw Error(ErrorCode::InvalidArgument, "partial pairing size does not match the chain");
  }
  PairingState st(lay, chain.rank);
  for (std::size_t p = 0; p < start.partner.size(); ++p) {
    const std::int64_t q = start.partner[p];
    if (q < 0 || static_cast<std::size_t>(q) < p) continue;
    if (!st.compatible(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(q)) ||
        !st.try_pair(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(q))) {
      throw Error(ErrorCode::InvalidArgument, "partial pairing is not folded");
    }
  }
  Searcher s(st, backtrack_limit, forbid_annuli, rng);
  const bool found = s.run();
  if (stats) {
    stats->backtracks = s.backtracks();
    stats->exhausted = !found && !s.aborted();
  }
  if (!found) return std::nullopt;
  return Pairing{st.partners()};
}

namespace {

struct Attempt {
  std::optional<std::vector<std::int64_t>> partner;
  std::uint64_t backtracks = 0;
  bool exhausted = false;
};

// One seeded try at a folded pairing respecting the chain's marks. Throws
// TagInfeasible from tagging.
Attempt attempt_pairing(const Chain& chain, const Layout& lay, const BuilderConfig& config, Rng& rng) {
  Attempt out;
  const auto r1 = mirror_rotation(chain);
  if (r1 && config.split_leaf > 0 && chain.components[0].size() > config.split_leaf) {
    Splitter splitter(chain.rank, config.split_leaf, config.backtrack_limit, config.split_attempts);
    out.partner = split_search(chain, *r1, splitter, rng);
    out.backtracks = splitter.backtracks();
    if (out.partner && config.forbid_annuli &&
        !all_hyperbolic(quotient_of(lay, *out.partner).fatgraph)) {
      out.partner.reset();
    }
    return out;
  }
  PairingState st(lay, chain.rank);
  tag_into(st, chain, rng);
  Searcher search(st, config.backtrack_limit, config.forbid_annuli, rng);
  if (search.run()) out.partner = st.partners();
  out.backtracks = search.backtracks();
  out.exhausted = !out.partner && !search.aborted();
  return out;
}

}  // namespace

BuildOutcome build_folded(const Chain& chain, const BuilderConfig& config) {
  require_trivial(chain);
  Chain plain = chain;
  plain.marks.clear();
  const Layout lay(plain);
  BuildOutcome out;
  const std::size_t restarts = std::max<std::size_t>(config.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(config.seed, r));
    Attempt a = attempt_pairing(plain, lay, config, rng);
    out.backtracks += a.backtracks;
    out.restarts_used = r + 1;
    if (a.partner) {
      Quotient q = quotient_of(lay, *a.partner);
      out.piece = make_piece(q.fatgraph, CoreGraph{});
      out.cycle_component = cycle_components(lay, q, out.piece);
      out.pairing = Pairing{std::move(*a.partner)};
      return out;
    }
    if (a.exhausted) {
      throw Error(ErrorCode::SearchExhausted, "complete search found no folded pairing");
    }
  }
  throw Error(ErrorCode::SearchExhausted,
              "no folded pairing within " + std::to_string(restarts) + " restarts");
}

BuildOutcome build_f_folded(const Chain& chain, const CoreGraph& z, const BuilderConfig& config) {
  require_trivial(chain);
  Chain marked = chain;
  marked.marks = f_vertex_marks(chain.components, z);
  marked.min_spacing = config.effective_min_spacing();
  const Layout lay(marked);

  BuildOutcome out;
  if (auto gap = mark_spacing(marked); gap && *gap < marked.min_spacing) {
    out.warnings.push_back("f-vertices " + std::to_string(*gap) + " apart, below spacing " +
                           std::to_string(marked.min_spacing));
  }
  if (!is_pseudorandom(chain.components, chain.rank, config.admission).pseudorandom) {
    out.warnings.push_back("chain is not (" + std::to_string(config.admission.T) + "," +
                           std::to_string(config.admission.epsilon) + ")-pseudorandom");
  }

  std::size_t tag_failures = 0;
  std::string last_tag_error;
  const std::size_t restarts = std::max<std::size_t>(config.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(config.seed, r));
    out.restarts_used = r + 1;
    Attempt a;
    try {
      a = attempt_pairing(marked, lay, config, rng);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TagInfeasible) throw;
      ++tag_failures;
      last_tag_error = e.what();
      continue;
    }
    out.backtracks += a.backtracks;
    if (!a.partner) continue;
    Quotient q = quotient_of(lay, *a.partner);
    SurfacePiece piece = make_piece(q.fatgraph, z);
    if (!piece.checks.all()) {
      out.warnings.push_back("restart " + std::to_string(r) + " produced a piece failing verification");
      continue;
    }
    out.cycle_component = cycle_components(lay, q, piece);
    out.piece = std::move(piece);
    out.pairing = Pairing{std::move(*a.partner)};
    return out;
  }
  if (tag_failures == restarts) throw Error(ErrorCode::TagInfeasible, last_tag_error);
  throw Error(ErrorCode::SearchExhausted,
              "no f-folded pairing within " + std::to_string(restarts) + " restarts");
}

}  // namespace surfcert
