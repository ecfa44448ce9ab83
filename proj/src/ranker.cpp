#include "riasec/ranker.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "tsv.hpp"

namespace riasec {

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::Point: return "point";
    case LossKind::Pair: return "pair";
    case LossKind::List: return "list";
  }
  return "?";
}

LossKind parse_loss(const std::string& name) {
  if (name == "point") return LossKind::Point;
  if (name == "pair") return LossKind::Pair;
  if (name == "list") return LossKind::List;
  throw ValidationError("unknown loss '" + name + "' (expected point, pair or list)");
}

LossEval evaluate_loss(LossKind kind, const RiasecProfile& y, const Vec6<double>& logits,
                       double temperature) {
  LossEval out;
  switch (kind) {
    case LossKind::Point:
      out.loss = pointwise_loss<double>(y, logits);
      out.grad = pointwise_gradient<double>(y, logits);
      break;
    case LossKind::Pair:
      out.loss = pairwise_loss<double>(y, logits);
      out.grad = pairwise_gradient<double>(y, logits);
      break;
    case LossKind::List: {
      const Vec6<double> target = target_top_one<double>(y, temperature);
      out.loss = listwise_loss<double>(target, softmax<double>(logits));
      out.grad = listwise_gradient<double>(target, logits);
      break;
    }
  }
  return out;
}

ParameterGradient parameter_gradient(const RankingModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const RiasecProfile& y, LossKind kind, double temperature) {
  const LossEval ev = evaluate_loss(kind, y, m.logits(x), temperature);
  return {ev.loss, ev.grad * x.transpose(), ev.grad};
}

Vec6<double> predict_profile(const RankingModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != m.k()) {
    throw ValidationError("feature length " + std::to_string(x.size()) +
                          " does not match model k=" + std::to_string(m.k()));
  }
  if (!x.allFinite()) throw ValidationError("non-finite feature vector");
  return softmax<double>(m.logits(x));
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning rate must be a finite value >= 0");
  }
  if (!(temperature > 0.0)) throw ValidationError("temperature must be > 0");
}

TrainResult train(const FeatureMap& features, const LabelMap& labels, const TrainConfig& cfg) {
  cfg.validate();
  if (labels.empty()) throw ValidationError("no labeled examples to train on");

  std::vector<const Eigen::VectorXd*> xs;
  std::vector<const RiasecProfile*> ys;
  std::vector<std::string> missing;
  for (const auto& [id, y] : labels) {
    auto it = features.find(id);
    if (it == features.end()) {
      missing.push_back(id);
      continue;
    }
    xs.push_back(&it->second);
    ys.push_back(&y);
  }
  if (!missing.empty()) {
    std::string msg = "labeled ids without features:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ... (" + std::to_string(missing.size()) + " total)";
    throw ValidationError(msg);
  }
  const auto k = static_cast<int>(xs.front()->size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i]->size() != k) throw ValidationError("feature vectors differ in length");
    if (!xs[i]->allFinite()) throw ValidationError("non-finite feature vector");
  }

  TrainResult result{RankingModel(k), {}};
  RankingModel& m = result.model;
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t i : order) {
      const auto& x = *xs[i];
      const ParameterGradient g = parameter_gradient(m, x, *ys[i], cfg.loss, cfg.temperature);
      total += g.loss;
      m.A -= cfg.learning_rate * g.A;
      m.b -= cfg.learning_rate * g.b;
    }
    if (!m.A.allFinite() || !m.b.allFinite()) {
      throw RuntimeError("ranker training diverged at epoch " + std::to_string(epoch + 1));
    }
    result.epoch_loss.push_back(total / static_cast<double>(order.size()));
  }
  return result;
}

ModelCorrelations model_correlations(const RankingModel& m) {
  if (m.k() < 2) throw ValidationError("row correlations need k >= 2");
  ModelCorrelations out;
  out.bias = m.b;
  Eigen::Matrix<double, kDims, Eigen::Dynamic> centered = m.A.colwise() - m.A.rowwise().mean();
  Vec6<double> norms = centered.rowwise().norm();
  for (int d = 0; d < kDims; ++d) out.zero_variance[d] = norms[d] == 0.0;
  for (int d = 0; d < kDims; ++d) {
    for (int e = 0; e < kDims; ++e) {
      if (out.zero_variance[d] || out.zero_variance[e]) {
        out.corr(d, e) = 0.0;
      } else if (d == e) {
        out.corr(d, e) = 1.0;
      } else {
        out.corr(d, e) = centered.row(d).dot(centered.row(e)) / (norms[d] * norms[e]);
      }
    }
  }
  return out;
}

namespace {

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  char buf[32];
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%s%.9g", c ? " " : "", row[c]);
    out << buf;
  }
  out << '\n';
}

Eigen::RowVectorXd read_row(std::istream& in, const std::string& source, std::size_t line_no,
                            Eigen::Index expected) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(detail::where(source, line_no) + "unexpected end of model file");
  }
  detail::chomp(line);
  std::vector<std::string_view> cells;
  for (auto c : detail::split(line, ' ')) {
    if (!c.empty()) cells.push_back(c);
  }
  if (static_cast<Eigen::Index>(cells.size()) != expected) {
    throw ValidationError(detail::where(source, line_no) + "expected " + std::to_string(expected) +
                          " values, found " + std::to_string(cells.size()));
  }
  Eigen::RowVectorXd row(expected);
  for (Eigen::Index c = 0; c < expected; ++c) {
    if (!detail::parse_double(cells[static_cast<std::size_t>(c)], row[c]) || !std::isfinite(row[c])) {
      throw ValidationError(detail::where(source, line_no) + "bad value '" +
                            std::string(cells[static_cast<std::size_t>(c)]) + "'");
    }
  }
  return row;
}

}  // namespace

void write_model(std::ostream& out, const RankingModel& m) {
  out << "riasec-ranker v1 k=" << m.k() << '\n';
  for (int d = 0; d < kDims; ++d) write_row(out, m.A.row(d));
  write_row(out, m.b.transpose());
}

RankingModel read_model(std::istream& in, const std::string& source) {
  std::string header;
  if (!std::getline(in, header)) throw ValidationError(source + ": empty model file");
  detail::chomp(header);
  const std::string prefix = "riasec-ranker v1 k=";
  double k = 0;
  if (!header.starts_with(prefix) || !detail::parse_double(header.substr(prefix.size()), k) ||
      k < 1 || k != std::floor(k)) {
    throw ValidationError(detail::where(source, 1) + "expected 'riasec-ranker v1 k=<k>'");
  }
  RankingModel m(static_cast<int>(k));
  for (int d = 0; d < kDims; ++d) {
    m.A.row(d) = read_row(in, source, static_cast<std::size_t>(d) + 2, m.k());
  }
  m.b = read_row(in, source, 8, kDims).transpose();
  return m;
}

}  // namespace riasec
