#include <filesystem>

#include "doctest.h"
#include "support.hpp"
#include "surfcert/error.hpp"
#include "surfcert/io.hpp"
#include "surfcert/model.hpp"

using namespace surfcert;

namespace {

Fatgraph torus() {
  CoreGraph g(1);
  g.add_edge(0, 0, 0);
  g.add_edge(0, 0, 1);
  return Fatgraph(g, {{0, 2, 1, 3}});
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("graphs round trip") {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const bool based = uniform_below(rng, 2) != 0;
    const CoreGraph g = oracle::random_graph(rng, 1 + uniform_below(rng, 8), uniform_below(rng, 14), 3, based);
    const std::string text = graph_to_json(g);
    const CoreGraph back = graph_from_json(text);
    CHECK(back == g);
    CHECK(back.basepoint() == g.basepoint());
    CHECK(graph_to_json(back) == text);
  }
}

TEST_CASE("fatgraphs and pieces round trip") {
  const Fatgraph y = torus();
  CHECK(fatgraph_from_json(fatgraph_to_json(y)) == y);

  const SurfacePiece piece = make_piece(y, circle_graph(CyclicWord::parse("abAB")));
  const std::string text = piece_to_json(piece);
  const SurfacePiece back = piece_from_json(text);
  CHECK(back.fatgraph == piece.fatgraph);
  CHECK(back.target_core == piece.target_core);
  CHECK(back.checks == piece.checks);
  REQUIRE(back.boundary.size() == piece.boundary.size());
  CHECK(back.boundary[0].letters == piece.boundary[0].letters);
  CHECK(back.boundary[0].half_edges == piece.boundary[0].half_edges);
  CHECK(back.boundary[0].lift == piece.boundary[0].lift);
  CHECK(piece_to_json(back) == text);
}

TEST_CASE("specs and chains round trip") {
  for (auto kind : {SplittingKind::Amalgam, SplittingKind::HNN}) {
    const auto spec = sample_graph_of_groups(kind, 2, 3, 25, 8);
    CHECK(spec_from_json(spec_to_json(spec)) == spec);
  }
  GraphOfGroupsSpec manual;
  manual.phi[0] = {Word::parse("abAAB")};
  manual.phi[1] = {Word::parse("bbab")};
  CHECK(spec_from_json(spec_to_json(manual)) == manual);

  ChainFile chain;
  chain.rank = 2;
  chain.words = {CyclicWord::parse("abAB"), CyclicWord::parse("aab")};
  const ChainFile back = chain_from_json(chain_to_json(chain));
  CHECK(back.rank == 2);
  CHECK(back.words == chain.words);
}

TEST_CASE("certificates round trip and re-verify to the same checklist") {
  for (auto kind : {SplittingKind::Amalgam, SplittingKind::HNN}) {
    const auto spec = sample_graph_of_groups(kind, 1, 2, 80, 12);
    BuilderConfig config;
    config.seed = 12;
    const auto cert = build_certificate(spec, default_chain(), config);
    REQUIRE(cert.valid());
    const std::string text = certificate_to_json(cert);
    const auto back = certificate_from_json(text);
    CHECK(certificate_to_json(back) == text);
    CHECK(checklist_to_json(certificate_checks(back)) == checklist_to_json(cert.checklist));
    CHECK(back.chi == cert.chi);
    CHECK(back.genus == cert.genus);
    REQUIRE(back.context.has_value());
    CHECK(back.context->spec == spec);
    CHECK(back.context->config.seed == 12);
  }
}

TEST_CASE("tampered certificates fail re-verification") {
  const auto spec = sample_graph_of_groups(SplittingKind::Amalgam, 1, 2, 80, 13);
  BuilderConfig config;
  config.seed = 13;
  const auto cert = build_certificate(spec, default_chain(), config);
  auto back = certificate_from_json(certificate_to_json(cert));
  back.pairing.pop_back();
  auto items = certificate_checks(back);
  back.checklist = items;
  CHECK_FALSE(back.valid());

  back = certificate_from_json(certificate_to_json(cert));
  auto orders = back.pieces[0].fatgraph.cyclic_orders();
  const auto branch = std::find_if(orders.begin(), orders.end(), [](const auto& o) { return o.size() >= 3; });
  REQUIRE(branch != orders.end());
  std::swap((*branch)[0], (*branch)[1]);
  back.pieces[0].fatgraph = Fatgraph(back.pieces[0].fatgraph.graph(), orders);
  back.checklist = certificate_checks(back);
  CHECK_FALSE(back.valid());
}

TEST_CASE("malformed input is a parse error") {
  CHECK(code_of([] { graph_from_json("{"); }) == ErrorCode::Parse);
  CHECK(code_of([] { graph_from_json("[]"); }) == ErrorCode::Parse);
  CHECK(code_of([] { graph_from_json(R"({"vertices":[0],"edges":[{"id":0,"src":0,"dst":3,"label":"a"}]})"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { graph_from_json(R"({"vertices":[0],"edges":[{"id":0,"src":0,"dst":0,"label":"?"}]})"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { spec_from_json(R"({"format":"surfcert-chain/1"})"); }) == ErrorCode::Parse);
  CHECK(code_of([] { chain_from_json(R"({"format":"surfcert-chain/1","rank":2,"words":[7]})"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { certificate_from_json("null"); }) == ErrorCode::Parse);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "surfcert_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "graph.json";
  const CoreGraph g = circle_graph(CyclicWord::parse("abAB"));
  write_file(path, graph_to_json(g));
  CHECK(graph_from_json(read_file(path)) == g);
  CHECK(code_of([&] { read_file(dir / "missing.json"); }) == ErrorCode::Io);
  CHECK(code_of([&] { write_file(dir / "no" / "such" / "dir.json", "x"); }) == ErrorCode::Io);
  std::filesystem::remove_all(dir);
}
