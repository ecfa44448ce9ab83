#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "riasec/ranker.hpp"

using namespace riasec;

namespace {

Vec6<double> v6(double a, double b, double c, double d, double e, double f) {
  Vec6<double> v;
  v << a, b, c, d, e, f;
  return v;
}

oracle::Profile arr(const Vec6<double>& v) {
  oracle::Profile p;
  for (int d = 0; d < 6; ++d) p[d] = v[d];
  return p;
}

Vec6<double> random_profile(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 100);
  Vec6<double> y;
  for (auto& x : y) x = u(rng);
  return y;
}

Vec6<double> random_logits(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 2);
  Vec6<double> z;
  for (auto& x : z) x = g(rng);
  return z;
}

}  // namespace

TEST_CASE("predict_profile") {
  SUBCASE("zero model is uniform") {
    RankingModel m(3);
    const Vec6<double> p = predict_profile(m, Eigen::Vector3d(1, -2, 5));
    for (int d = 0; d < 6; ++d) CHECK(p[d] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  }
  SUBCASE("bias on R") {
    RankingModel m(2);
    m.b[0] = 1.0;
    const Vec6<double> p = predict_profile(m, Eigen::Vector2d(0, 0));
    // e / (e + 5) and 1 / (e + 5)
    CHECK(p[0] == doctest::Approx(0.3521874283517515).epsilon(1e-12));
    for (int d = 1; d < 6; ++d) CHECK(p[d] == doctest::Approx(0.12956251432964971).epsilon(1e-12));
  }
  SUBCASE("errors") {
    RankingModel m(3);
    CHECK_THROWS_AS(predict_profile(m, Eigen::Vector2d(1, 1)), ValidationError);
    CHECK_THROWS_AS(predict_profile(m, Eigen::Vector3d(1, NAN, 1)), ValidationError);
  }
}

TEST_CASE("predict_profile matches an extended-precision softmax and lies on the simplex") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 8);
    RankingModel m(k);
    for (int d = 0; d < 6; ++d) {
      m.b[d] = g(rng);
      for (int c = 0; c < k; ++c) m.A(d, c) = g(rng);
    }
    Eigen::VectorXd x(k);
    for (auto& v : x) v = 3 * g(rng);
    const Vec6<double> p = predict_profile(m, x);
    const auto ref = oracle::softmax_linear(m.A, m.b, x);
    for (int d = 0; d < 6; ++d) {
      CHECK(std::abs(p[d] - static_cast<double>(ref[d])) <= 1e-12);
      CHECK(p[d] > 0.0);
    }
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("top-one targets") {
  const Vec6<double> equal = Vec6<double>::Constant(40);
  CHECK(target_top_one(equal).isApprox(Vec6<double>::Constant(1.0 / 6)));
  const Vec6<double> p = target_top_one(v6(100, 0, 0, 0, 0, 0));
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(target_top_one(equal, 0.0), ValidationError);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> shift(-50, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec6<double> y = random_profile(rng);
    const double c = shift(rng);
    const Vec6<double> a = target_top_one(y, 7.0);
    const Vec6<double> b = target_top_one(Vec6<double>((y.array() + c).matrix()), 7.0);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(a.sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("listwise loss") {
  const Vec6<double> uniform = Vec6<double>::Constant(1.0 / 6);
  // -(log(1/6) + 5 log(5/6))
  CHECK(listwise_loss(uniform, uniform) == doctest::Approx(2.7033672531978277).epsilon(1e-12));

  SUBCASE("clamped logs keep saturated predictions finite") {
    const double l = listwise_loss(v6(1, 0, 0, 0, 0, 0), v6(0, 1, 0, 0, 0, 0));
    CHECK(std::isfinite(l));
    CHECK(l == doctest::Approx(-2 * std::log(1e-12)));
  }
  SUBCASE("loss is smallest at yhat = P along a line through P") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec6<double> P = target_top_one(random_profile(rng), 25.0);
      const Vec6<double> dir = (softmax(random_logits(rng)) - P);
      double best_t = 1.0, best = 1e300;
      for (int i = 0; i <= 200; ++i) {
        const double t = -1.0 + i * 0.01;
        const Vec6<double> q = P + t * dir;
        if ((q.array() <= 0).any() || (q.array() >= 1).any()) continue;
        const double l = listwise_loss(P, q);
        if (l < best) best = l, best_t = t;
      }
      CHECK(std::abs(best_t) <= 0.01 + 1e-9);
    }
  }
}

TEST_CASE("pointwise loss") {
  CHECK(pointwise_loss(v6(80, 60, 10, 70, 20, 30), Vec6<double>::Zero().eval()) ==
        doctest::Approx(4.1588830833596715).epsilon(1e-12));
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec6<double> y = random_profile(rng), z = random_logits(rng);
    std::array<double, 6> zz;
    for (int d = 0; d < 6; ++d) zz[d] = z[d];
    CHECK(std::abs(pointwise_loss(y, z) - static_cast<double>(oracle::bce(arr(y), zz))) <= 1e-12);
  }
}

TEST_CASE("pairwise loss") {
  SUBCASE("equal scores contribute no pairs") {
    CHECK(pairwise_loss(Vec6<double>::Constant(50).eval(), v6(1, 2, 3, 4, 5, 6)) == 0.0);
  }
  SUBCASE("one ordered pair at equal logits costs ln 2") {
    CHECK(pairwise_loss(v6(90, 0, 0, 0, 0, 0), Vec6<double>::Zero().eval()) ==
          doctest::Approx(5 * std::log(2.0)));
  }
  SUBCASE("agrees with explicit pair enumeration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      Vec6<double> y = random_profile(rng);
      y[3] = y[1];  // force a tie
      const Vec6<double> z = random_logits(rng);
      std::array<double, 6> zz;
      for (int d = 0; d < 6; ++d) zz[d] = z[d];
      CHECK(std::abs(pairwise_loss(y, z) - static_cast<double>(oracle::ranknet(arr(y), zz))) <= 1e-11);
    }
  }
}

TEST_CASE("loss gradients match central differences") {
  std::mt19937_64 rng(13);
  for (const LossKind kind : {LossKind::Point, LossKind::Pair, LossKind::List}) {
    CAPTURE(loss_name(kind));
    for (int trial = 0; trial < 100; ++trial) {
      const Vec6<double> y = random_profile(rng), z = random_logits(rng);
      const double tau = 5.0 + trial % 20;
      const LossEval ev = evaluate_loss(kind, y, z, tau);
      auto f = [&](const Eigen::VectorXd& zz) {
        return evaluate_loss(kind, y, Vec6<double>(zz), tau).loss;
      };
      const Eigen::VectorXd numeric = oracle::central_difference(f, Eigen::VectorXd(z));
      CHECK(oracle::relative_error(Eigen::VectorXd(ev.grad), numeric) < 1e-5);
    }
  }
}

TEST_CASE("loss names") {
  CHECK(parse_loss("list") == LossKind::List);
  CHECK(parse_loss("pair") == LossKind::Pair);
  CHECK(parse_loss("point") == LossKind::Point);
  CHECK(std::string(loss_name(LossKind::Pair)) == "pair");
  CHECK_THROWS_AS(parse_loss("listwise"), ValidationError);
}

namespace {

struct Toy {
  FeatureMap features;
  LabelMap labels;
};

// Each item's top dimension is encoded as a one-hot feature.
Toy one_hot_toy() {
  Toy t;
  for (int i = 0; i < 60; ++i) {
    const int top = i % 6;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
    x[top] = 1.0;
    RiasecProfile y = RiasecProfile::Constant(20.0);
    y[top] = 90.0;
    y[(top + 1) % 6] = 60.0;
    const std::string id = "i" + std::to_string(i);
    t.features[id] = x;
    t.labels[id] = y;
  }
  return t;
}

}  // namespace

TEST_CASE("training") {
  const Toy toy = one_hot_toy();
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.learning_rate = 0.5;
  cfg.temperature = 10.0;

  SUBCASE("loss decreases and the top dimension is recovered") {
    const TrainResult r = train(toy.features, toy.labels, cfg);
    REQUIRE(r.epoch_loss.size() == 60);
    CHECK(r.epoch_loss.back() < r.epoch_loss.front());
    for (const auto& [id, x] : toy.features) {
      Eigen::Index best;
      r.model.logits(x).maxCoeff(&best);
      CHECK(x[best] == 1.0);
    }
  }
  SUBCASE("zero learning rate keeps the zero model") {
    cfg.learning_rate = 0.0;
    const TrainResult r = train(toy.features, toy.labels, cfg);
    CHECK(r.model == RankingModel(6));
  }
  SUBCASE("same seed gives an identical model") {
    cfg.epochs = 5;
    CHECK(train(toy.features, toy.labels, cfg).model == train(toy.features, toy.labels, cfg).model);
  }
  SUBCASE("errors") {
    LabelMap extra = toy.labels;
    extra["ghost"] = RiasecProfile::Constant(10);
    CHECK_THROWS_AS(train(toy.features, extra, cfg), ValidationError);
    CHECK_THROWS_AS(train(toy.features, LabelMap{}, cfg), ValidationError);
    cfg.temperature = 0;
    CHECK_THROWS_AS(train(toy.features, toy.labels, cfg), ValidationError);
  }
  SUBCASE("every loss trains") {
    for (const LossKind kind : {LossKind::Point, LossKind::Pair}) {
      cfg.loss = kind;
      const TrainResult r = train(toy.features, toy.labels, cfg);
      CHECK(r.epoch_loss.back() < r.epoch_loss.front());
    }
  }
}

TEST_CASE("row correlations of the weight matrix") {
  RankingModel m(3);
  m.A.row(0) << 1, 2, 3;
  m.A.row(1) << 2, 4, 6;
  m.A.row(2) << 3, 2, 1;
  m.A.row(3) << 1, 1, 1;
  m.A.row(4) << 0, 1, 0;
  m.A.row(5) << 5, 0, 5;
  const ModelCorrelations c = model_correlations(m);
  CHECK(c.corr(0, 1) == doctest::Approx(1.0));
  CHECK(c.corr(0, 2) == doctest::Approx(-1.0));
  CHECK(c.zero_variance[3]);
  CHECK(c.corr(0, 3) == 0.0);
  CHECK(c.corr(4, 5) == doctest::Approx(-1.0));
  CHECK(c.corr(2, 2) == doctest::Approx(1.0));
  CHECK(c.corr == c.corr.transpose());
  CHECK_THROWS_AS(model_correlations(RankingModel(1)), ValidationError);
}

TEST_CASE("model file round trip") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  RankingModel m(4);
  for (int d = 0; d < 6; ++d) {
    m.b[d] = g(rng);
    for (int c = 0; c < 4; ++c) m.A(d, c) = g(rng);
  }
  std::stringstream ss;
  write_model(ss, m);
  const RankingModel back = read_model(ss, "model.txt");
  CHECK(back.k() == 4);
  CHECK((back.A - m.A).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((back.b - m.b).cwiseAbs().maxCoeff() <= 1e-8);

  std::istringstream bad("riasec-ranker v1 k=2\n1 2\n");
  CHECK_THROWS_AS(read_model(bad, "bad"), ValidationError);
}
