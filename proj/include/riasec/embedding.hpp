#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "riasec/corpus.hpp"
#include "riasec/graph.hpp"

namespace riasec {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Token -> k-dimensional vector. Rows keep insertion order.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 0) : dim_(dim) {}
  EmbeddingTable(int dim, std::vector<std::string> keys, RowMatrix vectors);

  int dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  const std::vector<std::string>& keys() const { return keys_; }
  const RowMatrix& matrix() const { return vectors_; }
  std::optional<std::size_t> find(const std::string& key) const;
  bool contains(const std::string& key) const { return find(key).has_value(); }
  Eigen::Ref<const Vector> row(std::size_t i) const { return vectors_.row(i).transpose(); }

  /// Inserts or overwrites; returns true when the key was already present.
  bool set(const std::string& key, const Eigen::Ref<const Vector>& v);

  bool operator==(const EmbeddingTable& other) const;

 private:
  int dim_ = 0;
  std::vector<std::string> keys_;
  RowMatrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Text vector format: a `<count> <dim>` header, then `<token> <f1> ... <fk>`.
void write_vectors(std::ostream& out, const EmbeddingTable& table);

struct VectorFile {
  EmbeddingTable table;
  std::size_t duplicate_rows = 0;  // later rows replaced earlier ones
};

VectorFile read_vectors(std::istream& in, const std::string& source);
VectorFile load_pretrained(const std::string& path);

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u,
                                 const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar nu = u.norm(), nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(0);
  return u.dot(v) / (nu * nv);
}

struct MeanVector {
  Vector value;
  std::size_t used = 0;  // tokens found in the table
  bool empty() const { return used == 0; }
};

/// Mean of the table vectors of in-table tokens. Unknown tokens are skipped;
/// with none known the result is the zero vector and `empty()` is true.
MeanVector mean_representation(const Tokens& tokens, const EmbeddingTable& table);

enum class NeighborFilter { All, Words, Occupations };

struct Neighbor {
  std::string key;
  double cosine = 0.0;
};

using Query = std::variant<std::string, Vector>;

/// Top entries by cosine similarity, ties broken by key. A token query is
/// excluded from its own result list.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, const Query& query,
                                        std::size_t top_n,
                                        NeighborFilter filter = NeighborFilter::All);

struct SkipGramConfig {
  int dim = 300;
  int window = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  int negatives = 5;
  std::optional<double> subsample;  // frequency subsampling threshold, off when unset
  std::uint64_t seed = 1;
  int threads = 1;  // 1 = deterministic; >1 = lock-free shared updates

  void validate() const;
};

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Negative-sampling loss for one center vector against `targets`, whose
/// first row is the observed context and remaining rows are noise samples:
///   -log s(c.t0) - sum_i log s(-c.ti)
/// Gradients with respect to the center and to each target row are written
/// to the output arguments.
double sgns_loss_and_gradient(const Eigen::Ref<const Vector>& center,
                              const Eigen::Ref<const RowMatrix>& targets,
                              Eigen::Ref<Vector> d_center, Eigen::Ref<RowMatrix> d_targets);

/// Stateful skip-gram trainer over a walk corpus. The vocabulary is the set of
/// distinct tokens in the walks, in lexicographic order, so the result does
/// not depend on the token table order of the WalkSet.
class SkipGramTrainer {
 public:
  SkipGramTrainer(const WalkSet& walks, const SkipGramConfig& cfg,
                  const EmbeddingTable* init = nullptr);

  /// Runs one pass over all walks and returns the mean pair loss.
  double run_epoch();
  int epochs_done() const { return epochs_done_; }

  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::optional<int> index_of(const std::string& token) const;
  const RowMatrix& input_vectors() const { return input_; }
  const RowMatrix& output_vectors() const { return output_; }

  /// log s(input[center] . output[context]) for diagnostics.
  double pair_log_score(int center, int context) const;

  EmbeddingTable table() const;

 private:
  double train_walks(std::size_t begin, std::size_t end, std::size_t stride,
                     std::mt19937_64& rng, std::size_t& processed);
  int draw_negative(std::mt19937_64& rng) const;
  double current_rate(std::size_t processed) const;
  void check_finite() const;

  SkipGramConfig cfg_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> corpus_;
  std::vector<double> keep_prob_;
  std::vector<double> noise_cdf_;
  RowMatrix input_;
  RowMatrix output_;
  std::mt19937_64 rng_;
  std::size_t pairs_per_epoch_ = 0;
  std::size_t processed_ = 0;
  int epochs_done_ = 0;
};

/// One input vector per distinct walk token. Tokens present in `init` start
/// from its vectors; others from uniform noise in [-0.5/dim, 0.5/dim].
EmbeddingTable train_skipgram(const WalkSet& walks, const SkipGramConfig& cfg,
                              const EmbeddingTable* init = nullptr,
                              std::vector<double>* epoch_loss = nullptr);

}  // namespace riasec
