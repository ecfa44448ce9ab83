#include "riasec/jobrep.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "riasec/metrics.hpp"

namespace riasec {

const char* rep_flag_name(RepFlag flag) {
  switch (flag) {
    case RepFlag::Blended: return "OK";
    case RepFlag::TitleOnly: return "TITLE_ONLY";
    case RepFlag::DescriptionOnly: return "DESC_ONLY";
    case RepFlag::Empty: return "EMPTY";
  }
  return "?";
}

JobVector text_representation(const Tokens& title, const Tokens& description,
                              const EmbeddingTable& table, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ValidationError("beta must lie in [0,1], got " + std::to_string(beta));
  }
  MeanVector t = mean_representation(title, table);
  MeanVector d = mean_representation(description, table);
  if (t.empty() && d.empty()) return {Vector::Zero(table.dim()), RepFlag::Empty};
  if (d.empty()) return {std::move(t.value), RepFlag::TitleOnly};
  if (t.empty()) return {std::move(d.value), RepFlag::DescriptionOnly};
  return {beta * t.value + (1.0 - beta) * d.value, RepFlag::Blended};
}

JobVector job_representation(const JobPost& job, const EmbeddingTable& table, double beta) {
  return text_representation(job.title_tokens, job.desc_tokens, table, beta);
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

BetaCurve grid_search_beta(const JobSet& jobs, const EmbeddingTable& table,
                           const RankingModel& model, const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("beta grid must not be empty");
  for (double b : grid) {
    if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("beta grid value outside [0,1]");
  }
  if (jobs.empty()) throw ValidationError("no labeled jobs for the beta search");
  for (const auto& j : jobs) {
    if (!j.weak_profile) throw ValidationError("job '" + j.id + "' has no weak profile");
  }
  if (table.dim() != model.k()) {
    throw ValidationError("embedding dim " + std::to_string(table.dim()) +
                          " does not match model k=" + std::to_string(model.k()));
  }

  std::vector<double> betas = grid;
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

  BetaCurve curve;
  double best = -1.0;
  for (double beta : betas) {
    BetaPoint p{beta, 0.0, 0, 0};
    double sum = 0.0;
    for (const auto& j : jobs) {
      const JobVector v = job_representation(j, table, beta);
      if (v.flag == RepFlag::Empty) {
        ++p.excluded;
        continue;
      }
      sum += ndcg_at_6(ranking_from_scores(model.logits(v.value)), *j.weak_profile);
      ++p.evaluated;
    }
    p.ndcg = p.evaluated ? sum / static_cast<double>(p.evaluated) : 0.0;
    if (p.ndcg > best) {
      best = p.ndcg;
      curve.best_beta = beta;
    }
    curve.points.push_back(p);
  }
  return curve;
}

void write_curve(std::ostream& out, const BetaCurve& curve) {
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%zu\t%zu", p.beta, p.ndcg, p.evaluated, p.excluded);
    out << buf << '\n';
  }
}

}  // namespace riasec
