#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riasec/profile.hpp"

namespace riasec {

// Loss functions over the six per-dimension logits. Every loss is minimized;
// `*_gradient` returns dLoss/dlogits. Templated on the scalar so tests can
// evaluate the same expressions in extended precision.

inline constexpr double kLogClamp = 1e-12;

template <typename Scalar>
Vec6<Scalar> softmax(const Vec6<Scalar>& z) {
  Vec6<Scalar> e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <typename Scalar>
Scalar logistic(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

/// Top-one probabilities of a score vector: softmax(y / temperature).
template <typename Scalar>
Vec6<Scalar> target_top_one(const Vec6<Scalar>& y, Scalar temperature = Scalar(1)) {
  if (!(temperature > Scalar(0))) throw ValidationError("temperature must be > 0");
  return softmax<Scalar>(y / temperature);
}

/// -sum_d [P_d log(yhat_d) + (1 - P_d) log(1 - yhat_d)], log arguments
/// clamped below at 1e-12.
template <typename Scalar>
Scalar listwise_loss(const Vec6<Scalar>& target, const Vec6<Scalar>& predicted) {
  using std::log;
  using std::max;
  const Scalar eps(kLogClamp);
  Scalar loss(0);
  for (int d = 0; d < kDims; ++d) {
    loss -= target[d] * log(max(predicted[d], eps)) +
            (Scalar(1) - target[d]) * log(max(Scalar(1) - predicted[d], eps));
  }
  return loss;
}

/// Gradient of listwise_loss(P, softmax(z)) with respect to z.
template <typename Scalar>
Vec6<Scalar> listwise_gradient(const Vec6<Scalar>& target, const Vec6<Scalar>& logits) {
  using std::max;
  const Vec6<Scalar> p = softmax<Scalar>(logits);
  const Scalar eps(kLogClamp);
  // u_d * p_d where u = dL/dp
  Vec6<Scalar> up;
  for (int d = 0; d < kDims; ++d) {
    const Scalar q = max(Scalar(1) - p[d], eps);
    up[d] = -target[d] * p[d] / max(p[d], eps) + (Scalar(1) - target[d]) * p[d] / q;
  }
  return up - p * up.sum();
}

/// Binary targets for the pointwise baseline: score > 50.
template <typename Scalar>
Vec6<Scalar> interest_code_targets(const Vec6<Scalar>& y) {
  Vec6<Scalar> t;
  for (int d = 0; d < kDims; ++d) t[d] = y[d] > Scalar(50) ? Scalar(1) : Scalar(0);
  return t;
}

/// Independent per-dimension sigmoid with binary cross entropy.
template <typename Scalar>
Scalar pointwise_loss(const Vec6<Scalar>& y, const Vec6<Scalar>& logits) {
  const Vec6<Scalar> t = interest_code_targets(y);
  Scalar loss(0);
  for (int d = 0; d < kDims; ++d) {
    loss += t[d] > Scalar(0) ? softplus(-logits[d]) : softplus(logits[d]);
  }
  return loss;
}

template <typename Scalar>
Vec6<Scalar> pointwise_gradient(const Vec6<Scalar>& y, const Vec6<Scalar>& logits) {
  const Vec6<Scalar> t = interest_code_targets(y);
  Vec6<Scalar> g;
  for (int d = 0; d < kDims; ++d) g[d] = logistic(logits[d]) - t[d];
  return g;
}

/// RankNet: sum over pairs with y_d > y_e of log(1 + exp(-(s_d - s_e))).
template <typename Scalar>
Scalar pairwise_loss(const Vec6<Scalar>& y, const Vec6<Scalar>& logits) {
  Scalar loss(0);
  for (int d = 0; d < kDims; ++d) {
    for (int e = 0; e < kDims; ++e) {
      if (y[d] > y[e]) loss += softplus(-(logits[d] - logits[e]));
    }
  }
  return loss;
}

template <typename Scalar>
Vec6<Scalar> pairwise_gradient(const Vec6<Scalar>& y, const Vec6<Scalar>& logits) {
  Vec6<Scalar> g = Vec6<Scalar>::Zero();
  for (int d = 0; d < kDims; ++d) {
    for (int e = 0; e < kDims; ++e) {
      if (!(y[d] > y[e])) continue;
      const Scalar w = logistic(-(logits[d] - logits[e]));
      g[d] -= w;
      g[e] += w;
    }
  }
  return g;
}

enum class LossKind { Point, Pair, List };

const char* loss_name(LossKind kind);
LossKind parse_loss(const std::string& name);

/// Loss and logit gradient for one labeled example under `kind`.
struct LossEval {
  double loss = 0.0;
  Vec6<double> grad;
};

LossEval evaluate_loss(LossKind kind, const RiasecProfile& y, const Vec6<double>& logits,
                       double temperature);

/// Linear head: logits = A x + b, one row of A per dimension in canonical order.
struct RankingModel {
  Eigen::Matrix<double, kDims, Eigen::Dynamic> A;
  Vec6<double> b = Vec6<double>::Zero();

  RankingModel() = default;
  explicit RankingModel(int k) : A(Eigen::Matrix<double, kDims, Eigen::Dynamic>::Zero(kDims, k)) {}

  int k() const { return static_cast<int>(A.cols()); }

  template <typename Derived>
  Vec6<double> logits(const Eigen::MatrixBase<Derived>& x) const {
    return A * x + b;
  }

  bool operator==(const RankingModel& o) const { return A == o.A && b == o.b; }
};

/// Loss of one example under the linear head and its gradient with respect
/// to A and b.
struct ParameterGradient {
  double loss = 0.0;
  Eigen::Matrix<double, kDims, Eigen::Dynamic> A;
  Vec6<double> b;
};

ParameterGradient parameter_gradient(const RankingModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const RiasecProfile& y, LossKind kind, double temperature);

/// softmax(A x + b). Throws ValidationError on a length mismatch or a
/// non-finite input.
Vec6<double> predict_profile(const RankingModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);

struct TrainConfig {
  LossKind loss = LossKind::List;
  int epochs = 100;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  double temperature = 1.0;
  bool shuffle = true;

  void validate() const;
};

struct TrainResult {
  RankingModel model;
  std::vector<double> epoch_loss;  // mean of per-example losses seen during each epoch
};

using FeatureMap = std::map<std::string, Eigen::VectorXd>;
using LabelMap = std::map<std::string, RiasecProfile>;

/// Per-example SGD from a zero-initialized model over the labeled ids, in a
/// seeded shuffled order per epoch.
TrainResult train(const FeatureMap& features, const LabelMap& labels, const TrainConfig& cfg);

struct ModelCorrelations {
  Eigen::Matrix<double, kDims, kDims> corr;
  Vec6<double> bias;
  std::array<bool, kDims> zero_variance{};
};

/// Pearson correlation between every pair of rows of A.
ModelCorrelations model_correlations(const RankingModel& m);

void write_model(std::ostream& out, const RankingModel& m);
RankingModel read_model(std::istream& in, const std::string& source);

}  // namespace riasec
