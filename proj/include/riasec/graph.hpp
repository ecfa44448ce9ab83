#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riasec/corpus.hpp"

namespace riasec {

/// Word or occupation node. Words order before occupations.
struct NodeId {
  enum class Kind : std::uint8_t { Word, Occ };

  Kind kind = Kind::Word;
  std::string name;

  static NodeId word(std::string w) { return {Kind::Word, std::move(w)}; }
  static NodeId occ(std::string id) { return {Kind::Occ, std::move(id)}; }

  bool is_occ() const { return kind == Kind::Occ; }

  /// Serialized form: `occ::<id>` for occupations, the bare token for words.
  std::string token() const;
  static NodeId from_token(std::string_view token);

  auto operator<=>(const NodeId&) const = default;
};

inline constexpr std::string_view kOccPrefix = "occ::";

inline std::string occ_token(std::string_view id) { return std::string(kOccPrefix) + std::string(id); }

/// Undirected word/occupation graph. Node indices follow NodeId order and
/// every adjacency list is sorted and duplicate-free.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(std::vector<NodeId> nodes, const std::vector<std::pair<int, int>>& edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const NodeId& node(int i) const { return nodes_[i]; }
  const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
  std::optional<int> index_of(const NodeId& n) const;

  std::size_t occupation_edge_count() const;
  std::size_t occupation_node_count() const;

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::vector<int>> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Occupation-occupation edges from similarity links plus occupation-word
/// edges for every discriminative word in the occupation's title or
/// description. Words without any edge are omitted; occupations are always
/// present.
KnowledgeGraph build_graph(const OccupationSet& occs, const Vocabulary& vocab);

/// Homophily ratio on the occupation-occupation subgraph: the fraction of
/// edges joining equally labeled occupations over the sum of squared label
/// frequencies. `labels` is keyed by occupation id and must cover every
/// occupation node.
double affinity(const KnowledgeGraph& g, const std::map<std::string, int>& labels);

/// Top-dimension label for every labeled occupation.
std::map<std::string, int> top_dimension_labels(const OccupationSet& occs);

struct WalkParams {
  int walks_per_node = 40;
  int walk_length = 10;
  double restart_prob = 0.5;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

/// Node sequences over a token table. `walks[i]` holds indices into `tokens`.
struct WalkSet {
  std::vector<std::string> tokens;
  std::vector<std::vector<int>> walks;
  WalkParams params;

  std::size_t step_count() const;
};

/// Restart-to-root walks: each node roots `walks_per_node` walks; each step
/// jumps back to the root with `restart_prob` and otherwise moves to a
/// uniformly chosen neighbor. Every root draws from its own stream seeded by
/// (seed, root index), so the result does not depend on `threads`.
WalkSet generate_walks(const KnowledgeGraph& g, const WalkParams& params);

struct WalkSummary {
  std::size_t walks = 0;
  std::size_t nodes_covered = 0;
  double coverage = 0.0;
  double mean_length = 0.0;
  double root_return_rate = 0.0;  // fraction of steps landing on the walk's root
};

WalkSummary walk_stats(const WalkSet& ws);

void write_walks(std::ostream& out, const WalkSet& ws);
WalkSet read_walks(std::istream& in, const std::string& source);

}  // namespace riasec
