#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfcert/builder.hpp"
#include "surfcert/certificate.hpp"
#include "surfcert/splitting.hpp"
#include "surfcert/stallings.hpp"

namespace surfcert {

struct RandomHomSpec {
  int k = 1;  // rank of the edge group
  int l = 2;  // rank of the vertex group
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

// k independent uniform reduced words of length n.
std::vector<Word> sample_homomorphism(const RandomHomSpec& spec);

// Side j is sampled from derive_seed(seed, j + 1).
GraphOfGroupsSpec sample_graph_of_groups(SplittingKind kind, int k, int l, std::size_t n,
                                         std::uint64_t seed);

struct ImageCore {
  CoreGraph y;  // folded rose, basepoint kept
  CoreGraph z;  // basepoint-free core
  std::size_t overlap = 0;
};

// Longest common prefix between two distinct members of {w_i, w_i^-1}: the
// letters the fold identifies next to the basepoint.
std::size_t folding_overlap(std::span<const Word> images);

// Throws TrivialGenerator for an empty image and RankDrop when folding the
// rose loses rank.
ImageCore image_core(std::span<const Word> images);

// Basepoint-free core every boundary of a side-j piece must lift to: Z_j for
// an amalgam, Z_1 + Z_2 for an HNN extension.
CoreGraph side_target(const GraphOfGroupsSpec& spec, int side);

// Malnormality as the splitting needs it: each image alone for an amalgam,
// the pair of images jointly for an HNN extension.
MalnormalityResult splitting_malnormal(const GraphOfGroupsSpec& spec);

// Longest subword shared by two distinct words of {phi_j(x_i)^{+-1}} or
// repeated inside one of them, over the length of the shorter word involved;
// maximised over sides (both sides pooled for HNN).
double small_cancellation_ratio(const GraphOfGroupsSpec& spec);

// {x1, x1^-1}.
std::vector<Word> default_chain();

// Image chain of side j as cyclic words: phi_1(g_i), or phi_2(g_i^-1).
std::vector<CyclicWord> side_chain(const GraphOfGroupsSpec& spec, int side,
                                   std::span<const Word> chain);

// Full pipeline. Throws RankDrop, MalnormalityFailed, RigidityFailed,
// NotHomologicallyTrivial, TagInfeasible or SearchExhausted naming the stage.
ClosedSurfaceCertificate build_certificate(const GraphOfGroupsSpec& spec,
                                           std::vector<Word> chain = default_chain(),
                                           BuilderConfig config = {});

struct ExperimentGrid {
  std::vector<std::size_t> lengths;
  std::size_t trials = 1;
  int k = 1;
  int l = 2;
  SplittingKind kind = SplittingKind::Amalgam;
  std::uint64_t seed = 0;
  PseudorandomParams pseudorandom{3, 0.1};
  bool build = true;
  BuilderConfig builder;

  void validate() const;
};

struct ExperimentRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  bool malnormal = false;
  bool rigid = false;
  std::size_t overlap_max = 0;
  bool pseudorandom_pass = false;
  double lambda_hat = 0;
  bool builder_success = false;
  std::optional<long> chi;
  std::optional<long> genus;
  double millis = 0;
  std::string failure;  // stage that ended the trial, empty on success
};

// Trial t at length n uses derive_seed(grid.seed, n, t); rows come back in
// (n, trial) order whatever the number of jobs.
std::vector<ExperimentRow> run_experiment(const ExperimentGrid& grid, std::size_t jobs = 1);

struct ExperimentSummary {
  std::size_t n = 0;
  std::size_t trials = 0;
  double malnormal_rate = 0;
  double rigid_rate = 0;
  double mean_overlap = 0;
  std::size_t max_overlap = 0;
  double pseudorandom_rate = 0;
  double mean_lambda = 0;
  double max_lambda = 0;
  double builder_rate = 0;
  double mean_millis = 0;
};

std::vector<ExperimentSummary> summarize(std::span<const ExperimentRow> rows);

inline constexpr const char* kExperimentHeader =
    "n,trial,malnormal,rigid,overlap_max,pseudorandom_pass,lambda_hat,builder_success,chi,genus,millis";

std::string experiment_csv(std::span<const ExperimentRow> rows);

}  // namespace surfcert
