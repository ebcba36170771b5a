#include "doctest.h"
#include "support.hpp"
#include "surfcert/builder.hpp"
#include "surfcert/error.hpp"
#include "surfcert/model.hpp"

using namespace surfcert;

namespace {

Chain chain_of(std::initializer_list<const char*> ws, int rank = 2) {
  Chain c;
  c.rank = rank;
  for (const char* w : ws) c.components.push_back(CyclicWord::parse(w, rank));
  return c;
}

std::multiset<std::string> chain_words(const Chain& c) {
  std::multiset<std::string> out;
  for (const auto& w : c.components) out.insert(w.to_string());
  return out;
}

std::multiset<std::string> traced(const Fatgraph& y) {
  std::multiset<std::string> out;
  for (const auto& w : trace_boundary(y)) out.insert(w.to_string());
  return out;
}

std::uint64_t factorial(std::uint64_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

// Number of letter-to-inverse-letter bijections.
std::uint64_t pairing_count(const Chain& c) {
  std::map<int, std::uint64_t> count;
  for (const auto& w : c.components) {
    for (Letter l : w.letters()) ++count[l.code()];
  }
  std::uint64_t out = 1;
  for (int g = 0; g < c.rank; ++g) {
    const auto pos = count[2 * g], neg = count[2 * g + 1];
    if (pos != neg) return 0;
    out *= factorial(pos);
  }
  return out;
}

bool valid_pairing(const Chain& c, const Pairing& p) {
  std::vector<Letter> flat;
  for (const auto& w : c.components) flat.insert(flat.end(), w.letters().begin(), w.letters().end());
  if (p.partner.size() != flat.size()) return false;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto j = p.partner[i];
    if (j < 0 || static_cast<std::size_t>(j) >= flat.size() || static_cast<std::size_t>(j) == i) return false;
    if (p.partner[static_cast<std::size_t>(j)] != static_cast<std::int64_t>(i)) return false;
    if (flat[static_cast<std::size_t>(j)] != flat[i].inverse()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("enumerate_pairings") {
  CHECK(enumerate_pairings(chain_of({"a", "A"})).size() == 1);
  CHECK(enumerate_pairings(chain_of({"aa", "AA"})).size() == 2);
  CHECK(enumerate_pairings(chain_of({"ab"})).empty());
  CHECK_THROWS_AS(enumerate_pairings(chain_of({"aaaaaaaa", "AAAAAAAA"})), Error);

  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Word w = sample_reduced_word(1 + uniform_below(rng, 6), 2, rng);
    Chain c;
    c.rank = 2;
    c.components = {cyclic_reduce(w).core, cyclic_reduce(w).core.inverse()};
    const auto all = enumerate_pairings(c);
    CHECK(all.size() == pairing_count(c));
    for (const auto& p : all) CHECK(valid_pairing(c, p));
    std::set<std::vector<std::int64_t>> distinct;
    for (const auto& p : all) distinct.insert(p.partner);
    CHECK(distinct.size() == all.size());
  }
}

TEST_CASE("pairing_to_fatgraph") {
  const Chain annulus = chain_of({"a", "A"});
  const auto q = pairing_to_fatgraph(annulus, enumerate_pairings(annulus).front());
  CHECK(q.fatgraph.edge_count() == 1);
  CHECK(q.fatgraph.vertex_count() == 1);
  CHECK(euler_and_genus(q.fatgraph).chi == 0);

  const Chain commutator = chain_of({"abAB"});
  const auto pairings = enumerate_pairings(commutator);
  REQUIRE(pairings.size() == 1);
  const auto t = pairing_to_fatgraph(commutator, pairings.front());
  CHECK(t.fatgraph.vertex_count() == 1);
  CHECK(t.fatgraph.edge_count() == 2);
  CHECK(euler_and_genus(t.fatgraph).chi == -1);

  const Chain squares = chain_of({"aa", "AA"});
  for (const auto& p : enumerate_pairings(squares)) {
    CHECK(traced(pairing_to_fatgraph(squares, p).fatgraph) == chain_words(squares));
  }
}

TEST_CASE("every pairing quotient re-traces its chain") {
  Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    Chain c;
    c.rank = 2;
    const Word w = sample_reduced_word(1 + uniform_below(rng, 5), 2, rng);
    c.components = {cyclic_reduce(w).core, cyclic_reduce(w).core.inverse()};
    for (const auto& p : enumerate_pairings(c)) {
      const auto q = pairing_to_fatgraph(c, p);
      std::multiset<std::string> got;
      for (const auto& l : boundary_letters(q.fatgraph)) got.insert(oracle::least_rotation_string(letters_to_string(l)));
      CHECK(got == chain_words(c));
      CHECK(pairing_is_folded(c, p) == is_folded(q.fatgraph));
    }
  }
}

TEST_CASE("tag_f_vertices") {
  Rng rng(43);
  const Chain plain = chain_of({"abAB"});
  const Pairing none = tag_f_vertices(plain, rng);
  CHECK(none.paired_count() == 0);

  // Mark between the two a's; the only inverse arc AA is in the second component.
  Chain marked = chain_of({"aabb", "BBAA"});
  REQUIRE(marked.components[1].to_string() == "AABB");
  marked.marks = {{0, 1}};
  const Pairing tag = tag_f_vertices(marked, rng);
  CHECK(tag.paired_count() == 4);
  CHECK(tag.partner[marked.flat({0, 0})] == static_cast<std::int64_t>(marked.flat({1, 1})));
  CHECK(tag.partner[marked.flat({0, 1})] == static_cast<std::int64_t>(marked.flat({1, 0})));

  // The only arc reading BA has its middle vertex marked.
  Chain blocked = chain_of({"ab", "BA"});
  blocked.marks = {{0, 1}, {1, 0}};
  try {
    tag_f_vertices(blocked, rng);
    FAIL("expected TagInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TagInfeasible);
  }
}

TEST_CASE("tags become two-valent vertices of the completed surface") {
  Rng rng(44);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Word w = sample_reduced_word(60, 2, rng);
    Chain c;
    c.rank = 2;
    c.components = {cyclic_reduce(w).core, cyclic_reduce(w).core.inverse()};
    c.marks = {{0, 3}, {0, 17}, {1, 9}};
    Pairing tag;
    try {
      tag = tag_f_vertices(c, rng);
    } catch (const Error&) {
      continue;
    }
    const auto done = search_pairing(c, tag, 2000000, false, rng);
    if (!done) continue;
    ++checked;
    for (std::size_t i = 0; i < tag.partner.size(); ++i) {
      if (tag.partner[i] >= 0) CHECK(done->partner[i] == tag.partner[i]);
    }
    const Quotient q = pairing_to_fatgraph(c, *done);
    std::set<VertexId> vertices;
    for (const auto& m : c.marks) {
      const VertexId v = q.fatgraph.graph().from(q.half_edge_of[c.flat(m)]);
      CHECK(q.fatgraph.valence(v) == 2);
      vertices.insert(v);
    }
    CHECK(vertices.size() == c.marks.size());
  }
  CHECK(checked > 20);
}

TEST_CASE("build_f_folded examples") {
  BuilderConfig config;
  config.seed = 1;
  const BuildOutcome out = build_f_folded(chain_of({"abAB"}), circle_graph(CyclicWord::parse("abAB")), config);
  CHECK(out.piece.checks.all());
  CHECK(euler_and_genus(out.piece.fatgraph).chi == -1);
  CHECK(out.piece.f_vertices.empty());
  try {
    build_f_folded(chain_of({"ab"}), circle_graph(CyclicWord::parse("ab")), config);
    FAIL("expected NotHomologicallyTrivial");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHomologicallyTrivial);
  }
}

TEST_CASE("builder outputs are verified, re-trace the chain and are deterministic") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto spec = sample_graph_of_groups(SplittingKind::Amalgam, 1 + seed % 2, 2, 60, seed);
    ImageCore ic;
    try {
      ic = image_core(spec.phi[0]);
    } catch (const Error&) {
      continue;
    }
    Chain c;
    c.rank = 2;
    c.components = side_chain(spec, 0, default_chain());
    BuilderConfig config;
    config.seed = seed;
    config.forbid_annuli = true;
    BuildOutcome out;
    try {
      out = build_f_folded(c, ic.z, config);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SearchExhausted);
      continue;
    }
    CHECK(out.piece.checks.all());
    CHECK(verify_incompressible(out.piece));
    CHECK(traced(out.piece.fatgraph) == chain_words(c));
    std::size_t total = 0;
    for (const auto& b : out.piece.boundary) total += b.letters.size();
    CHECK(total == 2 * out.piece.fatgraph.edge_count());
    const BuildOutcome again = build_f_folded(c, ic.z, config);
    CHECK(again.piece.fatgraph == out.piece.fatgraph);
    CHECK(again.pairing == out.pairing);
  }
}

TEST_CASE("build_folded matches the pairing oracle on small chains") {
  Rng rng(45);
  BuilderConfig exhaustive;
  exhaustive.backtrack_limit = 0;
  exhaustive.restarts = 1;
  for (int trial = 0; trial < 150; ++trial) {
    Chain c;
    c.rank = 2;
    const Word w = sample_reduced_word(1 + uniform_below(rng, 4), 2, rng);
    c.components = {cyclic_reduce(w).core, cyclic_reduce(w).core.inverse()};
    if (uniform_below(rng, 2)) {
      const Word u = sample_reduced_word(1 + uniform_below(rng, 2), 2, rng);
      const Word commutator = w * u * w.inverse() * u.inverse();
      if (commutator.empty() || commutator.size() > 12) continue;
      c.components = {cyclic_reduce(commutator).core};
    }
    bool any = false;
    for (const auto& p : enumerate_pairings(c)) any |= pairing_is_folded(c, p);
    bool built = false;
    try {
      const auto out = build_folded(c, exhaustive);
      built = true;
      CHECK(out.piece.checks.folded);
      CHECK(traced(out.piece.fatgraph) == chain_words(c));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SearchExhausted);
    }
    CHECK(built == any);
  }
}

TEST_CASE("mark_spacing") {
  Chain c = chain_of({"aabbAABB"});
  CHECK_FALSE(mark_spacing(c).has_value());
  c.marks = {{0, 1}, {0, 6}};
  CHECK(mark_spacing(c) == std::size_t{3});
}

TEST_CASE("random amalgam chains at n = 200 build in at least 95 of 100 trials") {
  int success = 0, attempted = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto spec = sample_graph_of_groups(SplittingKind::Amalgam, 1, 2, 200, 1000 + seed);
    const ImageCore ic = image_core(spec.phi[0]);
    Chain c;
    c.rank = 2;
    c.components = side_chain(spec, 0, default_chain());
    BuilderConfig config;
    config.seed = seed;
    config.forbid_annuli = true;
    ++attempted;
    try {
      const auto out = build_f_folded(c, ic.z, config);
      success += out.piece.checks.all() ? 1 : 0;
    } catch (const Error&) {
    }
  }
  CHECK(attempted == 100);
  CHECK(success >= 95);
}
