#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riasec/corpus.hpp"
#include "riasec/profile.hpp"
#include "riasec/ranker.hpp"

namespace riasec {

using Grades = std::array<int, kDims>;

/// floor(score / 20) per dimension, each in 0..5.
Grades relevance_grades(const RiasecProfile& y);

/// A permutation of the six dimensions; position 0 is ranked highest.
class Ranking {
 public:
  Ranking() : order_(kAllDims) {}
  /// Throws ValidationError unless `order` holds every dimension once.
  explicit Ranking(const std::array<Dim, kDims>& order);

  Dim at(int position) const { return order_[static_cast<std::size_t>(position)]; }
  const std::array<Dim, kDims>& order() const { return order_; }
  std::string letters() const;

  bool operator==(const Ranking&) const = default;

 private:
  std::array<Dim, kDims> order_;
};

/// Descending by score; equal scores keep canonical R,I,A,S,E,C order.
template <typename Derived>
Ranking ranking_from_scores(const Eigen::MatrixBase<Derived>& scores) {
  std::array<Dim, kDims> order = kAllDims;
  std::stable_sort(order.begin(), order.end(), [&](Dim a, Dim b) {
    return scores[index_of(a)] > scores[index_of(b)];
  });
  return Ranking(order);
}

/// Graded gain sum_l (2^grade - 1) / log2(1 + l) over positions l = 1..6.
double dcg(const Ranking& r, const Grades& grades);

/// DCG normalized by the ideal (grade-sorted) DCG; 1.0 when every grade is 0.
double ndcg_at_6(const Ranking& r, const RiasecProfile& y);

/// Dimensions scoring above 50, highest first, at most three; when none
/// exceeds 50 the single top dimension.
std::vector<Dim> holland_codes(const RiasecProfile& y);

std::string dims_to_string(const std::vector<Dim>& dims);

struct Correlation {
  double value = 0.0;
  bool zero_variance = false;  // value is 0 when set
};

/// Pearson correlation of average-tied ranks.
Correlation spearman(std::span<const double> xs, std::span<const double> ys);

struct DimensionTable {
  Eigen::Matrix<double, kDims, kDims> rho;
  Eigen::Matrix<bool, kDims, kDims> zero_variance;
  Vec6<double> proportions;  // share of occupations whose top dimension is d
  std::size_t n = 0;
};

DimensionTable dimension_correlation_table(const OccupationSet& occs);

struct EvalReport {
  double mean_ndcg = 0.0;
  std::map<std::string, double> per_item;
  std::size_t n = 0;
  std::uint64_t split_seed = 0;
};

/// Mean NDCG@6 of the model's logit ranking over the given ids.
EvalReport evaluate_model(const RankingModel& m, const FeatureMap& features,
                          const LabelMap& labels);

struct SplitEvaluation {
  EvalReport report;
  TrainResult training;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

/// Seeded shuffle of the labeled ids; the first ceil(n * split_frac) train
/// the ranker and the rest are scored.
SplitEvaluation split_eval(const OccupationSet& occs, const FeatureMap& features,
                           const TrainConfig& cfg, double split_frac, std::uint64_t split_seed);

/// `id<TAB>ndcg` rows and a trailing `#mean<TAB>value` line, six decimals.
void write_report(std::ostream& out, const EvalReport& report);

}  // namespace riasec
