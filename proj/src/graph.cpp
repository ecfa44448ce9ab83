#include "riasec/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include "tsv.hpp"

namespace riasec {

std::string NodeId::token() const { return is_occ() ? occ_token(name) : name; }

NodeId NodeId::from_token(std::string_view token) {
  if (token.starts_with(kOccPrefix)) return occ(std::string(token.substr(kOccPrefix.size())));
  return word(std::string(token));
}

KnowledgeGraph::KnowledgeGraph(std::vector<NodeId> nodes,
                               const std::vector<std::pair<int, int>>& edges)
    : nodes_(std::move(nodes)), adjacency_(nodes_.size()) {
  if (!std::is_sorted(nodes_.begin(), nodes_.end()) ||
      std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
    throw ValidationError("graph nodes must be sorted and unique");
  }
  const int n = static_cast<int>(nodes_.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw ValidationError("edge endpoint out of range");
    if (a == b) continue;
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    edge_count_ += adj.size();
  }
  edge_count_ /= 2;
}

std::optional<int> KnowledgeGraph::index_of(const NodeId& n) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
  if (it == nodes_.end() || *it != n) return std::nullopt;
  return static_cast<int>(it - nodes_.begin());
}

std::size_t KnowledgeGraph::occupation_edge_count() const {
  std::size_t count = 0;
  for (std::size_t u = 0; u < nodes_.size(); ++u) {
    if (!nodes_[u].is_occ()) continue;
    for (int v : adjacency_[u]) {
      if (nodes_[v].is_occ() && static_cast<std::size_t>(v) > u) ++count;
    }
  }
  return count;
}

std::size_t KnowledgeGraph::occupation_node_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const NodeId& n) { return n.is_occ(); }));
}

KnowledgeGraph build_graph(const OccupationSet& occs, const Vocabulary& vocab) {
  std::set<std::pair<NodeId, NodeId>> edges;
  std::set<NodeId> nodes;
  for (const auto& o : occs) {
    NodeId self = NodeId::occ(o.id);
    nodes.insert(self);
    for (const auto& s : o.similar_ids) {
      if (!occs.contains(s)) throw ValidationError("unknown similar occupation '" + s + "'");
      if (s == o.id) continue;
      NodeId other = NodeId::occ(s);
      edges.insert(self < other ? std::pair{self, other} : std::pair{other, self});
    }
    for (const Tokens* part : {&o.title_tokens, &o.desc_tokens}) {
      for (const auto& w : *part) {
        if (!vocab.contains(w)) continue;
        NodeId word = NodeId::word(w);
        nodes.insert(word);
        edges.insert({word, self});  // words order before occupations
      }
    }
  }

  std::vector<NodeId> sorted(nodes.begin(), nodes.end());
  auto index = [&](const NodeId& n) {
    return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), n) - sorted.begin());
  };
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(edges.size());
  for (const auto& [a, b] : edges) pairs.emplace_back(index(a), index(b));
  return KnowledgeGraph(std::move(sorted), pairs);
}

double affinity(const KnowledgeGraph& g, const std::map<std::string, int>& labels) {
  std::vector<int> node_label(g.node_count(), -1);
  std::map<int, std::size_t> label_counts;
  std::size_t occ_nodes = 0;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    const NodeId& n = g.node(static_cast<int>(u));
    if (!n.is_occ()) continue;
    auto it = labels.find(n.name);
    if (it == labels.end()) throw ValidationError("no label for occupation '" + n.name + "'");
    node_label[u] = it->second;
    ++label_counts[it->second];
    ++occ_nodes;
  }
  if (occ_nodes == 0) throw ValidationError("graph has no occupation nodes");

  std::size_t edges = 0, same = 0;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    if (node_label[u] < 0) continue;
    for (int v : g.neighbors(static_cast<int>(u))) {
      if (static_cast<std::size_t>(v) <= u || node_label[v] < 0) continue;
      ++edges;
      if (node_label[u] == node_label[v]) ++same;
    }
  }
  if (edges == 0) throw ValidationError("affinity undefined: no occupation-occupation edges");

  double expected = 0.0;
  for (const auto& [label, count] : label_counts) {
    double p = static_cast<double>(count) / static_cast<double>(occ_nodes);
    expected += p * p;
  }
  double observed = static_cast<double>(same) / static_cast<double>(edges);
  return observed / expected;
}

std::map<std::string, int> top_dimension_labels(const OccupationSet& occs) {
  std::map<std::string, int> labels;
  for (const auto& o : occs) {
    if (o.profile) labels[o.id] = index_of(top_dimension(*o.profile));
  }
  return labels;
}

void WalkParams::validate() const {
  if (walks_per_node < 0) throw ValidationError("walks_per_node must be >= 0");
  if (walk_length < 1) throw ValidationError("walk_length must be >= 1");
  if (!(restart_prob >= 0.0 && restart_prob <= 1.0)) {
    throw ValidationError("restart_prob must lie in [0,1], got " + std::to_string(restart_prob));
  }
  if (threads < 1) throw ValidationError("threads must be >= 1");
}

std::size_t WalkSet::step_count() const {
  std::size_t n = 0;
  for (const auto& w : walks) n += w.size();
  return n;
}

namespace {

std::mt19937_64 root_stream(std::uint64_t seed, std::uint64_t root) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32)};
  return std::mt19937_64(seq);
}

void walks_from_root(const KnowledgeGraph& g, const WalkParams& p, int root,
                     std::vector<std::vector<int>>& out) {
  auto rng = root_stream(p.seed, static_cast<std::uint64_t>(root));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const bool isolated = g.neighbors(root).empty();
  for (int w = 0; w < p.walks_per_node; ++w) {
    std::vector<int> walk{root};
    if (!isolated) {
      walk.reserve(static_cast<std::size_t>(p.walk_length));
      int cur = root;
      while (static_cast<int>(walk.size()) < p.walk_length) {
        if (coin(rng) < p.restart_prob) {
          cur = root;
        } else {
          const auto& adj = g.neighbors(cur);
          std::uniform_int_distribution<std::size_t> pick(0, adj.size() - 1);
          cur = adj[pick(rng)];
        }
        walk.push_back(cur);
      }
    }
    out.push_back(std::move(walk));
  }
}

}  // namespace

WalkSet generate_walks(const KnowledgeGraph& g, const WalkParams& params) {
  params.validate();
  if (g.node_count() == 0) throw ValidationError("cannot walk an empty graph");

  WalkSet ws;
  ws.params = params;
  ws.tokens.reserve(g.node_count());
  for (const auto& n : g.nodes()) ws.tokens.push_back(n.token());

  const int n = static_cast<int>(g.node_count());
  std::vector<std::vector<std::vector<int>>> per_root(g.node_count());
  const int workers = std::min(params.threads, n);
  if (workers <= 1) {
    for (int r = 0; r < n; ++r) walks_from_root(g, params, r, per_root[r]);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (int r = t; r < n; r += workers) walks_from_root(g, params, r, per_root[r]);
      });
    }
    for (auto& th : pool) th.join();
  }
  ws.walks.reserve(g.node_count() * static_cast<std::size_t>(params.walks_per_node));
  for (auto& walks : per_root) {
    for (auto& w : walks) ws.walks.push_back(std::move(w));
  }
  return ws;
}

WalkSummary walk_stats(const WalkSet& ws) {
  WalkSummary s;
  s.walks = ws.walks.size();
  if (ws.walks.empty()) return s;
  std::vector<char> seen(ws.tokens.size(), 0);
  std::size_t steps = 0, returns = 0, total = 0;
  for (const auto& w : ws.walks) {
    total += w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      seen[w[i]] = 1;
      if (i > 0) {
        ++steps;
        if (w[i] == w[0]) ++returns;
      }
    }
  }
  s.nodes_covered = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
  s.coverage = ws.tokens.empty() ? 0.0
                                 : static_cast<double>(s.nodes_covered) /
                                       static_cast<double>(ws.tokens.size());
  s.mean_length = static_cast<double>(total) / static_cast<double>(ws.walks.size());
  s.root_return_rate = steps ? static_cast<double>(returns) / static_cast<double>(steps) : 0.0;
  return s;
}

void write_walks(std::ostream& out, const WalkSet& ws) {
  for (const auto& w : ws.walks) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out << ' ';
      out << ws.tokens[w[i]];
    }
    out << '\n';
  }
}

WalkSet read_walks(std::istream& in, const std::string& source) {
  WalkSet ws;
  std::unordered_map<std::string, int> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    std::vector<int> walk;
    for (auto tok : detail::split(line, ' ')) {
      if (tok.empty()) continue;
      auto [it, inserted] = index.emplace(std::string(tok), static_cast<int>(ws.tokens.size()));
      if (inserted) ws.tokens.emplace_back(tok);
      walk.push_back(it->second);
    }
    if (walk.empty()) throw ValidationError(detail::where(source, line_no) + "empty walk");
    ws.walks.push_back(std::move(walk));
  }
  return ws;
}

}  // namespace riasec
