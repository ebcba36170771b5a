#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "surfcert/builder.hpp"
#include "surfcert/certificate.hpp"
#include "surfcert/error.hpp"
#include "surfcert/fatgraph.hpp"
#include "surfcert/io.hpp"
#include "surfcert/model.hpp"
#include "surfcert/stallings.hpp"
#include "surfcert/words.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace surfcert;

namespace {

constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kUsage = 2;

struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<int> rank_l;
  int rank_k = 1;
  std::size_t length = 0;
  std::vector<std::size_t> lengths;
  std::optional<int> T;
  std::optional<double> epsilon;
  std::optional<std::size_t> spacing;
  std::optional<std::uint64_t> budget;
  std::size_t jobs = 1;
  bool oracle = false;
  std::string out;

  std::string kind = "amalgam";
  std::vector<std::string> words;
  std::vector<std::string> files;
  std::string graph;
  std::string chain;
  std::string core;
  std::string spec;
  std::string loop;
  std::vector<std::string> pairs;
  std::size_t trials = 10;
  bool keep_basepoint = false;
  bool no_build = false;
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

class SidecarLog {
 public:
  explicit SidecarLog(const fs::path& artifact) : out_(artifact.string() + ".log") {}
  void line(const std::string& text) {
    if (out_) out_ << timestamp() << ' ' << text << '\n' << std::flush;
  }

 private:
  std::ofstream out_;
};

std::uint64_t seed_or_fresh(const Flags& f) {
  if (f.seed) return *f.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

fs::path out_path(const Flags& f, const std::string& fallback) { return f.out.empty() ? fs::path(fallback) : fs::path(f.out); }

void emit(const fs::path& path, const std::string& text) { write_file(path, text); }

void emit_report(const fs::path& path, const json& report) { write_file(path, report.dump(2)); }

int inferred_rank(const std::vector<std::string>& words, const Flags& f) {
  if (f.rank_l) return *f.rank_l;
  int rank = 2;
  for (const auto& w : words) {
    for (Letter l : parse_letters(w)) rank = std::max(rank, l.generator() + 1);
  }
  return rank;
}

CoreGraph load_graph(const std::string& path) { return graph_from_json(read_file(path)); }

CoreGraph folded_core(const CoreGraph& g) { return core(fold(g), false); }

std::string graph_summary(const CoreGraph& g) {
  std::ostringstream ss;
  ss << g.vertex_count() << " vertices, " << g.edge_count() << " edges, rank " << g.betti_number();
  return ss.str();
}

// Words given on the command line or read from a chain file.
ChainFile load_chain(const Flags& f) {
  if (!f.chain.empty()) return chain_from_json(read_file(f.chain));
  if (f.words.empty()) throw Error(ErrorCode::InvalidArgument, "give --chain or --words");
  ChainFile c;
  c.rank = inferred_rank(f.words, f);
  for (const auto& w : f.words) c.words.push_back(cyclic_reduce(Word::parse(w, c.rank)).core);
  return c;
}

std::vector<Word> raw_words(const Flags& f, int& rank) {
  std::vector<Word> out;
  if (!f.chain.empty()) {
    ChainFile c = chain_from_json(read_file(f.chain));
    rank = c.rank;
    for (const auto& w : c.words) out.push_back(w.as_word());
    return out;
  }
  if (f.words.empty()) throw Error(ErrorCode::InvalidArgument, "give --chain or --words");
  rank = inferred_rank(f.words, f);
  for (const auto& w : f.words) out.push_back(Word::parse(w, rank));
  return out;
}

BuilderConfig builder_config(const Flags& f, std::uint64_t seed) {
  BuilderConfig c;
  c.seed = seed;
  if (f.budget) c.backtrack_limit = *f.budget;
  if (f.spacing) c.min_spacing = *f.spacing;
  if (f.T) c.admission.T = *f.T;
  if (f.epsilon) c.admission.epsilon = *f.epsilon;
  return c;
}

int cmd_sample(const Flags& f) {
  const std::uint64_t seed = seed_or_fresh(f);
  const GraphOfGroupsSpec spec =
      sample_graph_of_groups(parse_splitting_kind(f.kind), f.rank_k, f.rank_l.value_or(2), f.length, seed);
  emit(out_path(f, "sample.spec.json"), spec_to_json(spec));
  std::cout << "sampled " << to_string(spec.kind) << ": k=" << spec.edge_rank << " l=" << spec.vertex_rank[0]
            << " n=" << f.length << " seed=" << seed << '\n';
  return kTrue;
}

int cmd_fold(const Flags& f) {
  CoreGraph g;
  if (!f.graph.empty()) {
    g = load_graph(f.graph);
  } else {
    int rank = 0;
    g = rose_of_words(raw_words(f, rank));
  }
  const CoreGraph folded = fold(g);
  emit(out_path(f, "fold.graph.json"), graph_to_json(folded));
  std::cout << "folded: " << graph_summary(folded) << '\n';
  return kTrue;
}

int cmd_core(const Flags& f) {
  const CoreGraph g = load_graph(f.graph);
  const CoreGraph c = core(g, f.keep_basepoint);
  emit(out_path(f, "core.graph.json"), graph_to_json(c));
  std::cout << "core: " << graph_summary(c) << '\n';
  return kTrue;
}

int cmd_fiber_product(const Flags& f) {
  if (f.files.size() != 2) throw Error(ErrorCode::InvalidArgument, "fiber-product takes two graph files");
  const CoreGraph p = fiber_product(load_graph(f.files[0]), load_graph(f.files[1]));
  const CoreGraph c = core(p, false);
  emit(out_path(f, "fiber-product.graph.json"), graph_to_json(p));
  std::cout << "fiber product: " << p.vertex_count() << " vertices, " << p.edge_count() << " edges, "
            << p.component_count() << " components; core rank " << c.betti_number() << '\n';
  return kTrue;
}

int cmd_malnormal(const Flags& f) {
  MalnormalityResult r;
  json report;
  if (!f.spec.empty()) {
    const GraphOfGroupsSpec spec = spec_from_json(read_file(f.spec));
    r = splitting_malnormal(spec);
    report["spec"] = f.spec;
  } else {
    if (f.files.empty()) throw Error(ErrorCode::InvalidArgument, "give --cores or --spec");
    std::vector<CoreGraph> zs;
    for (const auto& p : f.files) zs.push_back(folded_core(load_graph(p)));
    r = is_malnormal_family(zs);
    report["cores"] = f.files;
  }
  report["malnormal"] = r.malnormal;
  if (r.witness) {
    report["witness"] = {{"first", r.witness->first},
                         {"second", r.witness->second},
                         {"loop", r.witness->loop.to_string()},
                         {"component", json::parse(graph_to_json(r.witness->component))}};
  }
  emit_report(out_path(f, "malnormal.json"), report);
  if (r.malnormal) {
    std::cout << "malnormal\n";
    return kTrue;
  }
  std::cout << "not malnormal: members " << r.witness->first << " and " << r.witness->second
            << " share loop " << r.witness->loop.to_string() << '\n';
  return kFalse;
}

int cmd_rigid(const Flags& f) {
  const CoreGraph z = folded_core(load_graph(f.core));
  const int rank = std::max(z.max_generator() + 1, inferred_rank({f.loop}, f));
  const CyclicWord w = cyclic_reduce(Word::parse(f.loop, rank)).core;
  const LiftReport r = lifts_of_loop(w, z);
  emit_report(out_path(f, "rigid.json"), {{"loop", w.to_string()},
                                          {"lifts", r.lifts},
                                          {"periodic_points", r.periodic_points},
                                          {"rigid", r.rigid},
                                          {"fully_rigid", r.fully_rigid}});
  std::cout << r.lifts.size() << (r.lifts.size() == 1 ? " lift; " : " lifts; ")
            << (r.fully_rigid ? "fully rigid" : r.rigid ? "rigid, not fully rigid" : "not rigid") << '\n';
  return r.rigid ? kTrue : kFalse;
}

int cmd_pseudorandom(const Flags& f) {
  const ChainFile c = load_chain(f);
  PseudorandomParams params;
  if (f.T) params.T = *f.T;
  if (f.epsilon) params.epsilon = *f.epsilon;
  const int rank = f.rank_l.value_or(c.rank);
  const PseudorandomReport r = is_pseudorandom(c.words, rank, params);
  emit_report(out_path(f, "pseudorandom.json"), {{"T", params.T},
                                                 {"epsilon", params.epsilon},
                                                 {"rank", rank},
                                                 {"pseudorandom", r.pseudorandom},
                                                 {"worst", r.worst.to_string()},
                                                 {"worst_ratio", r.worst_ratio}});
  std::ostringstream ratio;
  ratio << std::setprecision(6) << r.worst_ratio;
  std::cout << (r.pseudorandom ? "" : "not ") << "(" << params.T << ", " << params.epsilon
            << ")-pseudorandom; worst subword " << r.worst.to_string() << " at ratio " << ratio.str() << '\n';
  return r.pseudorandom ? kTrue : kFalse;
}

int cmd_chain_check(const Flags& f) {
  int rank = 0;
  const std::vector<Word> words = raw_words(f, rank);
  std::vector<long> total(static_cast<std::size_t>(rank), 0);
  for (const auto& w : words) {
    const auto a = abelianize(w, rank);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += a[i];
  }
  const bool trivial = is_homologically_trivial(std::span<const Word>(words), rank);
  emit_report(out_path(f, "chain-check.json"), {{"homologically_trivial", trivial}, {"abelianization", total}});
  if (trivial) {
    std::cout << "homologically trivial\n";
    return kTrue;
  }
  std::cout << "not homologically trivial: abelianization (";
  for (std::size_t i = 0; i < total.size(); ++i) std::cout << (i ? ", " : "") << total[i];
  std::cout << ")\n";
  return kFalse;
}

int cmd_build_surface(const Flags& f) {
  const ChainFile cf = load_chain(f);
  const CoreGraph z = folded_core(load_graph(f.core));
  Chain chain;
  chain.rank = std::max(cf.rank, z.max_generator() + 1);
  chain.components = cf.words;
  const fs::path out = out_path(f, "build-surface.piece.json");

  if (f.oracle) {
    chain.marks = f_vertex_marks(chain.components, z);
    const auto pairings = enumerate_pairings(chain);
    std::size_t folded = 0;
    for (const auto& p : pairings) {
      if (!pairing_is_folded(chain, p)) continue;
      ++folded;
      SurfacePiece piece = make_piece(pairing_to_fatgraph(chain, p).fatgraph, z);
      if (!piece.checks.all()) continue;
      emit(out, piece_to_json(piece));
      std::cout << "oracle: " << pairings.size() << " pairings, piece with chi "
                << euler_and_genus(piece.fatgraph).chi << '\n';
      return kTrue;
    }
    std::cout << "oracle: " << pairings.size() << " pairings, " << folded << " folded, none f-folded\n";
    return kFalse;
  }

  const std::uint64_t seed = seed_or_fresh(f);
  const BuildOutcome outcome = build_f_folded(chain, z, builder_config(f, seed));
  emit(out, piece_to_json(outcome.piece));
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
  const long chi = static_cast<long>(outcome.piece.fatgraph.vertex_count()) -
                   static_cast<long>(outcome.piece.fatgraph.edge_count());
  std::cout << "built f-folded piece: chi " << chi << ", " << outcome.piece.boundary.size()
            << " boundary components, seed " << seed << '\n';
  return kTrue;
}

int verify_piece(const SurfacePiece& stored, const fs::path& out) {
  std::vector<std::optional<Word>> labels;
  for (const auto& b : stored.boundary) labels.push_back(b.label);
  const SurfacePiece again = make_piece(stored.fatgraph, stored.target_core, labels);
  bool same_boundary = again.boundary.size() == stored.boundary.size();
  for (std::size_t i = 0; same_boundary && i < again.boundary.size(); ++i) {
    same_boundary = again.boundary[i].letters == stored.boundary[i].letters;
  }
  const bool ok = again.checks.all() && again.checks == stored.checks && same_boundary;
  emit_report(out, {{"kind", "piece"},
                    {"valid", ok},
                    {"checks",
                     {{"folded", again.checks.folded},
                      {"boundary_in_Z", again.checks.boundary_in_z},
                      {"f_folded", again.checks.f_folded},
                      {"incompressible", again.checks.incompressible}}},
                    {"matches_stored", again.checks == stored.checks && same_boundary}});
  std::cout << (ok ? "piece verified" : "piece failed verification") << '\n';
  return ok ? kTrue : kFalse;
}

int verify_certificate(const ClosedSurfaceCertificate& stored, const fs::path& out) {
  ClosedSurfaceCertificate again = stored;
  again.checklist = certificate_checks(stored);
  const std::string recomputed = checklist_to_json(again.checklist);
  const bool identical = recomputed == checklist_to_json(stored.checklist);
  long chi = 0;
  for (const auto& p : stored.pieces) {
    chi += static_cast<long>(p.fatgraph.vertex_count()) - static_cast<long>(p.fatgraph.edge_count());
  }
  const bool invariants = chi == stored.chi && stored.genus == (2 - chi) / 2;
  const bool ok = again.valid() && identical && invariants;
  json report = {{"kind", "certificate"},
                 {"valid", again.valid()},
                 {"checklist_identical", identical},
                 {"invariants_match", invariants},
                 {"checklist", json::parse(recomputed)}};
  emit_report(out, report);
  if (ok) {
    std::cout << "certificate verified: chi " << chi << ", genus " << (2 - chi) / 2 << ", "
              << again.checklist.size() << " checks reproduced\n";
    return kTrue;
  }
  auto failed = std::find_if(again.checklist.begin(), again.checklist.end(), [](const CheckItem& c) { return !c.passed; });
  if (failed != again.checklist.end()) {
    std::cout << "certificate failed check " << failed->name << ": " << failed->detail << '\n';
  } else if (!identical) {
    std::cout << "certificate failed: stored checklist differs from recomputed\n";
  } else {
    std::cout << "certificate failed: stored chi/genus differ from recomputed\n";
  }
  return kFalse;
}

int cmd_verify(const Flags& f) {
  if (f.files.size() != 1) throw Error(ErrorCode::InvalidArgument, "verify takes one file");
  const std::string text = read_file(f.files[0]);
  std::string format;
  try {
    format = json::parse(text).at("format").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  const fs::path out = out_path(f, "verify.json");
  if (format == kPieceFormat) return verify_piece(piece_from_json(text), out);
  if (format == kCertificateFormat) return verify_certificate(certificate_from_json(text), out);
  throw Error(ErrorCode::Parse, "cannot verify format " + format);
}

BoundaryRef parse_ref(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::Parse, "boundary reference must be piece:boundary");
  try {
    return {std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "bad boundary reference " + text);
  }
}

bool inverse_boundaries(const BoundaryComponent& a, const BoundaryComponent& b) {
  if (a.label && b.label) return *a.label == b.label->inverse();
  return a.word && b.word && *a.word == b.word->inverse();
}

// Matches every boundary with the first later unmatched boundary reading its inverse.
std::vector<BoundaryPair> match_boundaries(const std::vector<SurfacePiece>& pieces) {
  std::vector<BoundaryRef> open;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    for (std::size_t b = 0; b < pieces[p].boundary.size(); ++b) open.push_back({p, b});
  }
  std::vector<bool> used(open.size(), false);
  std::vector<BoundaryPair> out;
  for (std::size_t i = 0; i < open.size(); ++i) {
    if (used[i]) continue;
    const auto& bi = pieces[open[i].piece].boundary[open[i].boundary];
    for (std::size_t j = i + 1; j < open.size(); ++j) {
      if (used[j] || !inverse_boundaries(bi, pieces[open[j].piece].boundary[open[j].boundary])) continue;
      used[i] = used[j] = true;
      out.push_back({open[i], open[j]});
      break;
    }
  }
  return out;
}

int cmd_glue(const Flags& f) {
  if (f.files.empty()) throw Error(ErrorCode::InvalidArgument, "glue takes piece files");
  std::vector<SurfacePiece> pieces;
  for (const auto& p : f.files) pieces.push_back(piece_from_json(read_file(p)));
  std::vector<BoundaryPair> pairing;
  for (const auto& text : f.pairs) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Parse, "pair must be p:b=q:c");
    pairing.push_back({parse_ref(text.substr(0, eq)), parse_ref(text.substr(eq + 1))});
  }
  if (f.pairs.empty()) pairing = match_boundaries(pieces);
  const ClosedSurfaceCertificate cert = glue(std::move(pieces), std::move(pairing));
  emit(out_path(f, "glue.cert.json"), certificate_to_json(cert));
  std::cout << "glued closed surface: chi " << cert.chi << ", genus " << cert.genus << '\n';
  return kTrue;
}

int cmd_certify(const Flags& f) {
  const GraphOfGroupsSpec spec = spec_from_json(read_file(f.spec));
  std::vector<Word> chain = default_chain();
  if (!f.chain.empty()) {
    chain.clear();
    for (const auto& w : chain_from_json(read_file(f.chain)).words) chain.push_back(w.as_word());
  }
  const std::uint64_t seed = seed_or_fresh(f);
  const fs::path out = f.out.empty() ? fs::path(fs::path(f.spec).stem().string() + ".cert.json") : fs::path(f.out);
  SidecarLog log(out);
  log.line("certify " + f.spec + " seed " + std::to_string(seed));
  try {
    const auto start = std::chrono::steady_clock::now();
    const ClosedSurfaceCertificate cert = build_certificate(spec, chain, builder_config(f, seed));
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    emit(out, certificate_to_json(cert));
    for (const auto& w : cert.warnings) log.line("warning " + w);
    log.line("certificate written to " + out.string() + " after " + std::to_string(ms.count()) + " ms");
    std::cout << "valid certificate: " << to_string(spec.kind) << ", chi " << cert.chi << ", genus " << cert.genus
              << ", seed " << seed << '\n';
    return kTrue;
  } catch (const Error& e) {
    log.line(std::string("failed ") + e.what());
    throw;
  }
}

int cmd_experiment(const Flags& f) {
  ExperimentGrid grid;
  grid.lengths = f.lengths;
  if (grid.lengths.empty() && f.length > 0) grid.lengths = {f.length};
  grid.trials = f.trials;
  grid.k = f.rank_k;
  grid.l = f.rank_l.value_or(2);
  grid.kind = parse_splitting_kind(f.kind);
  grid.seed = seed_or_fresh(f);
  if (f.T) grid.pseudorandom.T = *f.T;
  if (f.epsilon) grid.pseudorandom.epsilon = *f.epsilon;
  grid.build = !f.no_build;
  grid.builder = builder_config(f, grid.seed);
  grid.validate();
  const fs::path out = out_path(f, "experiment.csv");
  SidecarLog log(out);
  log.line("experiment seed " + std::to_string(grid.seed) + " jobs " + std::to_string(f.jobs));
  const auto rows = run_experiment(grid, std::max<std::size_t>(f.jobs, 1));
  emit(out, experiment_csv(rows));
  log.line("wrote " + std::to_string(rows.size()) + " rows");
  std::size_t built = 0;
  for (const auto& r : rows) built += r.builder_success ? 1 : 0;
  std::cout << "experiment complete: " << rows.size() << " trials over " << grid.lengths.size() << " lengths, "
            << built << " certificates, seed " << grid.seed << '\n';
  return kTrue;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::Io:
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyWord:
    case ErrorCode::TrivialGenerator:
    case ErrorCode::TooLarge:
      return kUsage;
    default:
      return kFalse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify closed surface subgroups in one-edge splittings of free groups"};
  app.require_subcommand(1);
  Flags f;

  auto seed = [&](CLI::App* s) { s->add_option("--seed", f.seed, "Seed (u64); a fresh one is recorded if absent"); };
  auto out = [&](CLI::App* s) { s->add_option("--out", f.out, "Output path"); };
  auto ranks = [&](CLI::App* s) {
    s->add_option("--rank-k", f.rank_k, "Rank of the edge group")->check(CLI::PositiveNumber);
    s->add_option("--rank-l", f.rank_l, "Rank of the vertex groups")->check(CLI::Range(1, kMaxRank));
  };
  auto admission = [&](CLI::App* s) {
    s->add_option("--T", f.T, "Subword length")->check(CLI::PositiveNumber);
    s->add_option("--epsilon", f.epsilon, "Relative tolerance")->check(CLI::NonNegativeNumber);
  };
  auto builder = [&](CLI::App* s) {
    s->add_option("--spacing", f.spacing, "Minimum f-vertex spacing (advisory)");
    s->add_option("--budget", f.budget, "Backtrack limit per search, 0 for unlimited");
  };
  auto kind = [&](CLI::App* s) {
    s->add_option("--kind", f.kind, "amalgam or hnn")->check(CLI::IsMember({"amalgam", "hnn"}));
  };
  auto words = [&](CLI::App* s) {
    s->add_option("--words", f.words, "Words over a..z with inverses A..Z");
    s->add_option("--chain", f.chain, "Chain file");
    s->add_option("--rank-l", f.rank_l, "Rank of the free group")->check(CLI::Range(1, kMaxRank));
  };

  std::vector<std::pair<CLI::App*, int (*)(const Flags&)>> commands;

  auto* sample = app.add_subcommand("sample", "Sample a random splitting into a spec file");
  kind(sample), ranks(sample), seed(sample), out(sample);
  sample->add_option("--length", f.length, "Image length")->required()->check(CLI::PositiveNumber);
  commands.push_back({sample, cmd_sample});

  auto* fold_cmd = app.add_subcommand("fold", "Fold a graph, or the rose of some words");
  fold_cmd->add_option("--graph", f.graph, "Graph file")->check(CLI::ExistingFile);
  words(fold_cmd), out(fold_cmd);
  commands.push_back({fold_cmd, cmd_fold});

  auto* core_cmd = app.add_subcommand("core", "Prune a graph to its core");
  core_cmd->add_option("--graph", f.graph, "Graph file")->required()->check(CLI::ExistingFile);
  core_cmd->add_flag("--keep-basepoint", f.keep_basepoint, "Keep the basepoint");
  out(core_cmd);
  commands.push_back({core_cmd, cmd_core});

  auto* fp = app.add_subcommand("fiber-product", "Pullback of two graphs over the rose");
  fp->add_option("graphs", f.files, "Two graph files")->required()->expected(2)->check(CLI::ExistingFile);
  out(fp);
  commands.push_back({fp, cmd_fiber_product});

  auto* mal = app.add_subcommand("malnormal", "Malnormality of a family of cores or of a splitting");
  mal->add_option("--cores", f.files, "Core graph files")->check(CLI::ExistingFile);
  mal->add_option("--spec", f.spec, "Spec file")->check(CLI::ExistingFile);
  out(mal);
  commands.push_back({mal, cmd_malnormal});

  auto* rigid = app.add_subcommand("rigid", "Lifts of a loop into a core");
  rigid->add_option("--loop", f.loop, "Loop word")->required();
  rigid->add_option("--core", f.core, "Core graph file")->required()->check(CLI::ExistingFile);
  rigid->add_option("--rank-l", f.rank_l, "Rank of the free group")->check(CLI::Range(1, kMaxRank));
  out(rigid);
  commands.push_back({rigid, cmd_rigid});

  auto* pr = app.add_subcommand("pseudorandom", "(T, epsilon)-pseudorandomness of a chain");
  words(pr), admission(pr), out(pr);
  commands.push_back({pr, cmd_pseudorandom});

  auto* cc = app.add_subcommand("chain-check", "Homological triviality of a chain");
  words(cc), out(cc);
  commands.push_back({cc, cmd_chain_check});

  auto* bs = app.add_subcommand("build-surface", "Build an f-folded piece bounding a chain");
  words(bs);
  bs->add_option("--core", f.core, "Core graph file the boundary lifts to")->required()->check(CLI::ExistingFile);
  bs->add_flag("--oracle", f.oracle, "Enumerate every pairing (total length <= 14)");
  seed(bs), builder(bs), admission(bs), out(bs);
  commands.push_back({bs, cmd_build_surface});

  auto* verify = app.add_subcommand("verify", "Re-check a piece or certificate file");
  verify->add_option("file", f.files, "Piece or certificate file")->required()->expected(1)->check(CLI::ExistingFile);
  out(verify);
  commands.push_back({verify, cmd_verify});

  auto* gl = app.add_subcommand("glue", "Glue pieces into a closed surface");
  gl->add_option("pieces", f.files, "Piece files")->required()->check(CLI::ExistingFile);
  gl->add_option("--pair", f.pairs, "Boundary pair p:b=q:c; inverse boundaries are matched if absent");
  out(gl);
  commands.push_back({gl, cmd_glue});

  auto* cert = app.add_subcommand("certify", "Build and check a closed surface certificate");
  cert->add_option("--spec", f.spec, "Spec file")->required()->check(CLI::ExistingFile);
  cert->add_option("--chain", f.chain, "Chain in the edge group (default x1, x1^-1)")->check(CLI::ExistingFile);
  seed(cert), builder(cert), admission(cert), out(cert);
  commands.push_back({cert, cmd_certify});

  auto* ex = app.add_subcommand("experiment", "Monte Carlo grid to CSV");
  kind(ex), ranks(ex), seed(ex), builder(ex), admission(ex), out(ex);
  ex->add_option("--length", f.lengths, "Image lengths")->required()->delimiter(',')->check(CLI::PositiveNumber);
  ex->add_option("--trials", f.trials, "Trials per length")->check(CLI::PositiveNumber);
  ex->add_option("--jobs", f.jobs, "Parallel trials")->check(CLI::PositiveNumber);
  ex->add_flag("--no-build", f.no_build, "Skip certificate construction");
  commands.push_back({ex, cmd_experiment});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (const auto& [sub, run] : commands) {
    if (!sub->parsed()) continue;
    try {
      return run(f);
    } catch (const Error& e) {
      const char* verdict = exit_code_for(e.code()) == kUsage         ? "error: "
                            : e.code() == ErrorCode::SearchExhausted ? "inconclusive: "
                                                                     : "failed: ";
      std::cout << verdict << e.what() << '\n';
      return exit_code_for(e.code());
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << '\n';
      return kUsage;
    }
  }
  return kUsage;
}
