#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riasec/corpus.hpp"
#include "riasec/embedding.hpp"
#include "riasec/ranker.hpp"

namespace riasec {

/// Every tunable of the pipeline. Unset optionals take the per-stage default
/// (epochs and learning rate differ between embedding and ranker training).
struct PipelineConfig {
  int dim = 300;
  int window = 5;
  std::optional<int> epochs;
  std::optional<double> lr;
  int negatives = 5;
  int walks_per_node = 40;
  int walk_len = 10;
  double restart_prob = 0.5;
  double max_ndf = 0.10;
  double beta = 0.6;
  std::string beta_grid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::string loss = "list";
  double temperature = 1.0;
  double split_frac = 0.5;
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<double> subsample;
  std::string features = "node";  // node | text
  int top = 5;
  std::string filter = "all";
  double min_coverage = 0.0;

  std::string in;
  std::string out;
  std::string config;
  std::string vectors;
  std::string model;
  std::string init;
  std::string occupations;
  std::string profiles;
  std::string query;
  std::vector<std::string> crosswalks;
};

/// Applies flat `key = value` lines (`#` starts a comment) to `cfg`. Keys are
/// the long flag names without the leading dashes.
void apply_config_text(PipelineConfig& cfg, const std::string& text, const std::string& source);

std::vector<double> parse_beta_grid(const std::string& text);

/// Resolved `key = value` lines for provenance output.
std::vector<std::pair<std::string, std::string>> describe(const PipelineConfig& cfg,
                                                          const std::string& command);

struct OccupationFeatures {
  FeatureMap features;
  std::vector<std::string> skipped;  // labeled occupations with no representation
};

/// `node`: the occupation's own vector (`occ::<id>`); `text`: the beta blend
/// of title and description word means.
OccupationFeatures occupation_features(const OccupationSet& occs, const EmbeddingTable& table,
                                       const std::string& mode, double beta);

/// Adds `occ::<id>` entries holding the mean title-word vector of each
/// occupation to a copy of a word table.
EmbeddingTable with_occupation_means(const EmbeddingTable& words, const OccupationSet& occs);

/// Entry point of the command-line tool. Exit codes: 0 success,
/// 2 validation error, 3 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riasec
