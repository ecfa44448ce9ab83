#include "riasec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace riasec {

Grades relevance_grades(const RiasecProfile& y) {
  if (!profile_in_range(y)) {
    throw ValidationError("profile " + format_profile(y) + " outside [0,100]");
  }
  Grades g{};
  for (int d = 0; d < kDims; ++d) g[static_cast<std::size_t>(d)] = static_cast<int>(std::floor(y[d] / 20.0));
  return g;
}

Ranking::Ranking(const std::array<Dim, kDims>& order) : order_(order) {
  std::array<bool, kDims> seen{};
  for (Dim d : order_) {
    const int i = index_of(d);
    if (i < 0 || i >= kDims || seen[static_cast<std::size_t>(i)]) {
      throw ValidationError("ranking is not a permutation of the six dimensions");
    }
    seen[static_cast<std::size_t>(i)] = true;
  }
}

std::string Ranking::letters() const {
  std::string s;
  for (Dim d : order_) s.push_back(dim_letter(d));
  return s;
}

double dcg(const Ranking& r, const Grades& grades) {
  double sum = 0.0;
  for (int l = 1; l <= kDims; ++l) {
    const int g = grades[static_cast<std::size_t>(index_of(r.at(l - 1)))];
    sum += (std::exp2(g) - 1.0) / std::log2(1.0 + l);
  }
  return sum;
}

double ndcg_at_6(const Ranking& r, const RiasecProfile& y) {
  const Grades grades = relevance_grades(y);
  Grades sorted = grades;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double ideal = 0.0;
  for (int l = 1; l <= kDims; ++l) {
    ideal += (std::exp2(sorted[static_cast<std::size_t>(l - 1)]) - 1.0) / std::log2(1.0 + l);
  }
  if (ideal == 0.0) return 1.0;
  return dcg(r, grades) / ideal;
}

std::vector<Dim> holland_codes(const RiasecProfile& y) {
  const Ranking r = ranking_from_scores(y);
  std::vector<Dim> codes;
  for (Dim d : r.order()) {
    if (codes.size() == 3 || !(y[index_of(d)] > 50.0)) break;
    codes.push_back(d);
  }
  if (codes.empty()) codes.push_back(r.at(0));
  return codes;
}

std::string dims_to_string(const std::vector<Dim>& dims) {
  std::string s;
  for (Dim d : dims) s.push_back(dim_letter(d));
  return s;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

Correlation spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("spearman inputs differ in length");
  if (xs.size() < 2) throw ValidationError("spearman needs at least two observations");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const auto n = static_cast<Eigen::Index>(rx.size());
  Eigen::Map<const Eigen::VectorXd> a(rx.data(), n), b(ry.data(), n);
  const Eigen::VectorXd ca = a.array() - a.mean();
  const Eigen::VectorXd cb = b.array() - b.mean();
  const double na = ca.norm(), nb = cb.norm();
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  return {std::clamp(ca.dot(cb) / (na * nb), -1.0, 1.0), false};
}

DimensionTable dimension_correlation_table(const OccupationSet& occs) {
  std::vector<std::vector<double>> columns(kDims);
  DimensionTable t;
  t.proportions.setZero();
  for (const auto& o : occs) {
    if (!o.profile) continue;
    for (int d = 0; d < kDims; ++d) columns[static_cast<std::size_t>(d)].push_back((*o.profile)[d]);
    t.proportions[index_of(top_dimension(*o.profile))] += 1.0;
    ++t.n;
  }
  if (t.n < 2) throw ValidationError("dimension correlations need at least two labeled occupations");
  t.proportions /= static_cast<double>(t.n);
  for (int d = 0; d < kDims; ++d) {
    for (int e = 0; e < kDims; ++e) {
      const Correlation c = spearman(columns[static_cast<std::size_t>(d)], columns[static_cast<std::size_t>(e)]);
      t.rho(d, e) = c.value;
      t.zero_variance(d, e) = c.zero_variance;
    }
  }
  return t;
}

EvalReport evaluate_model(const RankingModel& m, const FeatureMap& features,
                          const LabelMap& labels) {
  EvalReport report;
  double sum = 0.0;
  for (const auto& [id, y] : labels) {
    auto it = features.find(id);
    if (it == features.end()) throw ValidationError("no features for '" + id + "'");
    if (it->second.size() != m.k()) throw ValidationError("feature length mismatch for '" + id + "'");
    const double v = ndcg_at_6(ranking_from_scores(m.logits(it->second)), y);
    report.per_item.emplace(id, v);
    sum += v;
  }
  report.n = labels.size();
  report.mean_ndcg = report.n ? sum / static_cast<double>(report.n) : 0.0;
  return report;
}

SplitEvaluation split_eval(const OccupationSet& occs, const FeatureMap& features,
                           const TrainConfig& cfg, double split_frac, std::uint64_t split_seed) {
  if (!(split_frac > 0.0 && split_frac < 1.0)) {
    throw ValidationError("split fraction must lie in (0,1), got " + std::to_string(split_frac));
  }
  std::vector<std::string> ids;
  for (const auto& o : occs) {
    if (o.profile) ids.push_back(o.id);
  }
  if (ids.size() < 2) throw ValidationError("split evaluation needs at least two labeled occupations");
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(split_seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(ids.size()) * split_frac));
  if (n_train == 0 || n_train >= ids.size()) {
    throw ValidationError("split leaves one side empty (" + std::to_string(ids.size()) +
                          " labeled, fraction " + std::to_string(split_frac) + ")");
  }
  SplitEvaluation out;
  out.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());

  LabelMap train_labels, test_labels;
  for (const auto& id : out.train_ids) train_labels.emplace(id, *occs.find(id)->profile);
  for (const auto& id : out.test_ids) test_labels.emplace(id, *occs.find(id)->profile);

  out.training = train(features, train_labels, cfg);
  out.report = evaluate_model(out.training.model, features, test_labels);
  out.report.split_seed = split_seed;
  return out;
}

void write_report(std::ostream& out, const EvalReport& report) {
  char buf[64];
  for (const auto& [id, v] : report.per_item) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out << id << '\t' << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.6f", report.mean_ndcg);
  out << "#mean\t" << buf << '\n';
}

}  // namespace riasec
