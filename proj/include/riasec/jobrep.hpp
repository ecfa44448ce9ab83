#pragma once

#include <iosfwd>
#include <vector>

#include "riasec/corpus.hpp"
#include "riasec/embedding.hpp"
#include "riasec/ranker.hpp"

namespace riasec {

enum class RepFlag { Blended, TitleOnly, DescriptionOnly, Empty };

const char* rep_flag_name(RepFlag flag);

struct JobVector {
  Vector value;
  RepFlag flag = RepFlag::Blended;
};

/// beta * mean(title) + (1 - beta) * mean(description). When one side has no
/// known token the other side is used alone; with neither, the zero vector.
JobVector text_representation(const Tokens& title, const Tokens& description,
                              const EmbeddingTable& table, double beta);

JobVector job_representation(const JobPost& job, const EmbeddingTable& table, double beta);

struct BetaPoint {
  double beta = 0.0;
  double ndcg = 0.0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
};

struct BetaCurve {
  std::vector<BetaPoint> points;
  double best_beta = 0.0;  // smallest beta attaining the best ndcg
};

/// 0.0, 0.1, ..., 1.0
std::vector<double> default_beta_grid();

/// Mean NDCG@6 of the model's predictions against the jobs' weak profiles at
/// each beta. Jobs with an empty representation are excluded and counted.
BetaCurve grid_search_beta(const JobSet& jobs, const EmbeddingTable& table,
                           const RankingModel& model, const std::vector<double>& grid);

/// `beta<TAB>ndcg<TAB>n_evaluated<TAB>n_excluded`, six decimals.
void write_curve(std::ostream& out, const BetaCurve& curve);

}  // namespace riasec
