#include "surfcert/model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "surfcert/error.hpp"

namespace surfcert {

std::vector<Word> sample_homomorphism(const RandomHomSpec& spec) {
  if (spec.k < 1 || spec.l < 2 || spec.l > kMaxRank || spec.n < 1) {
    throw Error(ErrorCode::InvalidArgument, "random homomorphism needs k >= 1, 2 <= l <= 26, n >= 1");
  }
  Rng rng(spec.seed);
  std::vector<Word> out;
  for (int i = 0; i < spec.k; ++i) out.push_back(sample_reduced_word(spec.n, spec.l, rng));
  return out;
}

GraphOfGroupsSpec sample_graph_of_groups(SplittingKind kind, int k, int l, std::size_t n,
                                         std::uint64_t seed) {
  GraphOfGroupsSpec spec;
  spec.kind = kind;
  spec.edge_rank = k;
  spec.vertex_rank = {l, l};
  for (std::size_t side = 0; side < 2; ++side) {
    spec.phi[side] = sample_homomorphism({k, l, n, derive_seed(seed, side + 1)});
  }
  spec.provenance = {true, seed, n};
  return spec;
}

std::size_t folding_overlap(std::span<const Word> images) {
  std::vector<Word> members;
  for (const Word& w : images) {
    members.push_back(w);
    members.push_back(w.inverse());
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto a = members[i].letters();
      const auto b = members[j].letters();
      const auto end = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
      best = std::max(best, static_cast<std::size_t>(end.first - a.begin()));
    }
  }
  return best;
}

ImageCore image_core(std::span<const Word> images) {
  ImageCore out;
  out.y = core(fold(rose_of_words(images)), true);
  if (out.y.betti_number() != static_cast<long>(images.size())) {
    throw Error(ErrorCode::RankDrop, "folded images span a subgroup of rank " +
                                         std::to_string(out.y.betti_number()) + " < " +
                                         std::to_string(images.size()));
  }
  out.z = core(out.y, false);
  out.overlap = folding_overlap(images);
  return out;
}

CoreGraph side_target(const GraphOfGroupsSpec& spec, int side) {
  if (spec.kind == SplittingKind::Amalgam) return image_core(spec.phi[static_cast<std::size_t>(side)]).z;
  const std::array<CoreGraph, 2> both{image_core(spec.phi[0]).z, image_core(spec.phi[1]).z};
  return disjoint_union(both);
}

MalnormalityResult splitting_malnormal(const GraphOfGroupsSpec& spec) {
  if (spec.kind == SplittingKind::HNN) {
    const std::array<CoreGraph, 2> zs{image_core(spec.phi[0]).z, image_core(spec.phi[1]).z};
    return is_malnormal_family(zs);
  }
  for (std::size_t side = 0; side < 2; ++side) {
    const std::array<CoreGraph, 1> z{image_core(spec.phi[side]).z};
    auto res = is_malnormal_family(z);
    if (!res.malnormal) {
      if (res.witness) res.witness->first = res.witness->second = side;
      return res;
    }
  }
  return {};
}

namespace {

std::size_t longest_common_subword(std::span<const Letter> a, std::span<const Letter> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

// Longest subword occurring at two different offsets of a.
std::size_t longest_repeat(std::span<const Letter> a) {
  std::vector<std::size_t> prev(a.size() + 1, 0), cur(a.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= a.size(); ++j) {
      cur[j] = i != j && a[i - 1] == a[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

double piece_ratio(std::span<const Word> images) {
  std::vector<Word> members;
  for (const Word& w : images) {
    members.push_back(w);
    members.push_back(w.inverse());
  }
  double best = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto a = members[i].letters();
    if (a.empty()) continue;
    best = std::max(best, static_cast<double>(longest_repeat(a)) / static_cast<double>(a.size()));
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto b = members[j].letters();
      if (b.empty()) continue;
      const double shorter = static_cast<double>(std::min(a.size(), b.size()));
      best = std::max(best, static_cast<double>(longest_common_subword(a, b)) / shorter);
    }
  }
  return best;
}

}  // namespace

double small_cancellation_ratio(const GraphOfGroupsSpec& spec) {
  if (spec.kind == SplittingKind::HNN) {
    std::vector<Word> pooled(spec.phi[0]);
    pooled.insert(pooled.end(), spec.phi[1].begin(), spec.phi[1].end());
    return piece_ratio(pooled);
  }
  return std::max(piece_ratio(spec.phi[0]), piece_ratio(spec.phi[1]));
}

std::vector<Word> default_chain() { return {Word::parse("a"), Word::parse("A")}; }

std::vector<CyclicWord> side_chain(const GraphOfGroupsSpec& spec, int side, std::span<const Word> chain) {
  std::vector<CyclicWord> out;
  for (const Word& g : chain) {
    const Word w = side == 0 ? spec.image(0, g) : spec.image(1, g.inverse());
    if (w.empty()) {
      throw Error(ErrorCode::InvalidArgument, "chain element " + g.to_string() + " maps to the identity");
    }
    out.push_back(cyclic_reduce(w).core);
  }
  return out;
}

ClosedSurfaceCertificate build_certificate(const GraphOfGroupsSpec& spec, std::vector<Word> chain,
                                           BuilderConfig config) {
  spec.validate();
  for (std::size_t side = 0; side < 2; ++side) image_core(spec.phi[side]);
  if (const auto mal = splitting_malnormal(spec); !mal.malnormal) {
    std::string what = std::string(to_string(spec.kind)) + " images are not malnormal";
    if (mal.witness) what += "; loop " + mal.witness->loop.to_string() + " is shared";
    throw Error(ErrorCode::MalnormalityFailed, what);
  }
  if (chain.empty() || std::any_of(chain.begin(), chain.end(), [](const Word& g) { return g.empty(); })) {
    throw Error(ErrorCode::InvalidArgument, "chain must consist of nontrivial elements");
  }
  config.forbid_annuli = true;

  std::vector<SurfacePiece> pieces;
  std::vector<std::vector<std::size_t>> cycle_component;
  std::vector<std::string> warnings;
  for (int side = 0; side < 2; ++side) {
    const CoreGraph target = side_target(spec, side);
    Chain boundary;
    boundary.rank = spec.vertex_rank[static_cast<std::size_t>(side)];
    boundary.components = side_chain(spec, side, chain);
    for (const auto& w : boundary.components) {
      const auto report = lifts_of_loop(w, target);
      if (!report.rigid) {
        throw Error(ErrorCode::RigidityFailed, "side " + std::to_string(side + 1) + ": " + w.to_string() +
                                                   " has " + std::to_string(report.lifts.size()) + " lifts");
      }
    }
    BuilderConfig side_config = config;
    side_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(side));
    BuildOutcome out = build_f_folded(boundary, target, side_config);
    std::vector<std::optional<Word>> labels;
    for (std::size_t comp : out.cycle_component) {
      labels.emplace_back(side == 0 ? chain[comp] : chain[comp].inverse());
    }
    for (const auto& w : out.warnings) warnings.push_back("side" + std::to_string(side + 1) + ": " + w);
    pieces.push_back(make_piece(std::move(out.piece.fatgraph), target, std::move(labels)));
    cycle_component.push_back(std::move(out.cycle_component));
  }

  std::vector<BoundaryPair> pairing;
  std::vector<bool> used(cycle_component[1].size(), false);
  for (std::size_t a = 0; a < cycle_component[0].size(); ++a) {
    for (std::size_t b = 0; b < cycle_component[1].size(); ++b) {
      if (used[b] || cycle_component[1][b] != cycle_component[0][a]) continue;
      used[b] = true;
      pairing.push_back({{0, a}, {1, b}});
      break;
    }
  }
  auto cert = glue(std::move(pieces), std::move(pairing),
                   SplittingContext{spec, {0, 1}, std::move(chain), config});
  cert.warnings = std::move(warnings);
  return cert;
}

void ExperimentGrid::validate() const {
  if (lengths.empty() || trials < 1 || k < 1 || l < 2 || l > kMaxRank ||
      std::any_of(lengths.begin(), lengths.end(), [](std::size_t n) { return n < 1; })) {
    throw Error(ErrorCode::InvalidArgument,
                "experiment grid needs lengths >= 1, trials >= 1, k >= 1 and 2 <= l <= 26");
  }
}

namespace {

ExperimentRow run_trial(const ExperimentGrid& grid, std::size_t n, std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRow row;
  row.n = n;
  row.trial = trial;
  const std::uint64_t seed = derive_seed(grid.seed, n, trial);
  const auto spec = sample_graph_of_groups(grid.kind, grid.k, grid.l, n, seed);
  row.lambda_hat = small_cancellation_ratio(spec);
  row.overlap_max = std::max(folding_overlap(spec.phi[0]), folding_overlap(spec.phi[1]));
  auto finish = [&]() {
    row.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return row;
  };
  try {
    image_core(spec.phi[0]);
    image_core(spec.phi[1]);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDrop) throw;
    row.failure = "RankDrop";
    return finish();
  }
  row.malnormal = splitting_malnormal(spec).malnormal;
  const auto chain = default_chain();
  row.rigid = true;
  row.pseudorandom_pass = true;
  for (int side = 0; side < 2; ++side) {
    const CoreGraph target = side_target(spec, side);
    const auto words = side_chain(spec, side, chain);
    for (const auto& w : words) row.rigid = row.rigid && lifts_of_loop(w, target).rigid;
    row.pseudorandom_pass = row.pseudorandom_pass &&
                            is_pseudorandom(words, spec.vertex_rank[static_cast<std::size_t>(side)],
                                            grid.pseudorandom).pseudorandom;
  }
  if (!row.malnormal) {
    row.failure = "MalnormalityFailed";
  } else if (!row.rigid) {
    row.failure = "RigidityFailed";
  } else if (grid.build) {
    BuilderConfig config = grid.builder;
    config.seed = seed;
    try {
      const auto cert = build_certificate(spec, chain, config);
      row.builder_success = cert.valid();
      row.chi = cert.chi;
      row.genus = cert.genus;
    } catch (const Error& e) {
      row.failure = std::string(to_string(e.code()));
    }
  }
  return finish();
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentGrid& grid, std::size_t jobs) {
  grid.validate();
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t n : grid.lengths) {
    for (std::size_t t = 0; t < grid.trials; ++t) tasks.emplace_back(n, t);
  }
  std::vector<ExperimentRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      rows[i] = run_trial(grid, tasks[i].first, tasks[i].second);
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(tasks.size(), 1));
  if (jobs == 1) {
    worker();
    return rows;
  }
  std::vector<std::jthread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  pool.clear();
  return rows;
}

std::vector<ExperimentSummary> summarize(std::span<const ExperimentRow> rows) {
  std::vector<ExperimentSummary> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ExperimentSummary& s) { return s.n == r.n; });
    if (it == out.end()) {
      out.push_back({});
      it = out.end() - 1;
      it->n = r.n;
    }
    ++it->trials;
    it->malnormal_rate += r.malnormal;
    it->rigid_rate += r.rigid;
    it->mean_overlap += static_cast<double>(r.overlap_max);
    it->max_overlap = std::max(it->max_overlap, r.overlap_max);
    it->pseudorandom_rate += r.pseudorandom_pass;
    it->mean_lambda += r.lambda_hat;
    it->max_lambda = std::max(it->max_lambda, r.lambda_hat);
    it->builder_rate += r.builder_success;
    it->mean_millis += r.millis;
  }
  for (auto& s : out) {
    const double t = static_cast<double>(s.trials);
    s.malnormal_rate /= t;
    s.rigid_rate /= t;
    s.mean_overlap /= t;
    s.pseudorandom_rate /= t;
    s.mean_lambda /= t;
    s.builder_rate /= t;
    s.mean_millis /= t;
  }
  return out;
}

std::string experiment_csv(std::span<const ExperimentRow> rows) {
  std::string out = kExperimentHeader;
  out += '\n';
  char buf[256];
  for (const auto& r : rows) {
    const std::string chi = r.chi ? std::to_string(*r.chi) : "";
    const std::string genus = r.genus ? std::to_string(*r.genus) : "";
    std::snprintf(buf, sizeof buf, "%zu,%zu,%d,%d,%zu,%d,%.6f,%d,%s,%s,%.3f\n", r.n, r.trial, r.malnormal ? 1 : 0,
                  r.rigid ? 1 : 0, r.overlap_max, r.pseudorandom_pass ? 1 : 0, r.lambda_hat,
                  r.builder_success ? 1 : 0, chi.c_str(), genus.c_str(), r.millis);
    out += buf;
  }
  return out;
}

}  // namespace surfcert
