#include <doctest.h>

#include <random>
#include <sstream>

#include "riasec/jobrep.hpp"
#include "synthetic.hpp"

using namespace riasec;

namespace {

EmbeddingTable two_words() {
  EmbeddingTable t(2);
  t.set("chef", Vector::Unit(2, 0));
  t.set("kitchen", Vector::Unit(2, 1));
  return t;
}

}  // namespace

TEST_CASE("text representation") {
  const EmbeddingTable t = two_words();
  const Tokens title{"chef"}, desc{"kitchen"};
  CHECK(text_representation(title, desc, t, 1.0).value == Vector::Unit(2, 0));
  CHECK(text_representation(title, desc, t, 0.0).value == Vector::Unit(2, 1));
  const JobVector mid = text_representation(title, desc, t, 0.6);
  CHECK(mid.value.isApprox((Vector(2) << 0.6, 0.4).finished()));
  CHECK(mid.flag == RepFlag::Blended);

  SUBCASE("one empty side is replaced by the other") {
    const JobVector t_only = text_representation(title, {"unknown"}, t, 0.3);
    CHECK(t_only.flag == RepFlag::TitleOnly);
    CHECK(t_only.value == Vector::Unit(2, 0));
    const JobVector d_only = text_representation({}, desc, t, 0.9);
    CHECK(d_only.flag == RepFlag::DescriptionOnly);
    CHECK(d_only.value == Vector::Unit(2, 1));
    const JobVector none = text_representation({"x"}, {"y"}, t, 0.5);
    CHECK(none.flag == RepFlag::Empty);
    CHECK(none.value == Vector::Zero(2));
  }
  SUBCASE("beta outside [0,1]") {
    CHECK_THROWS_AS(text_representation(title, desc, t, 1.2), ValidationError);
    CHECK_THROWS_AS(text_representation(title, desc, t, -0.1), ValidationError);
  }
  CHECK(std::string(rep_flag_name(RepFlag::Empty)) == "EMPTY");
  CHECK(std::string(rep_flag_name(RepFlag::Blended)) == "OK");
}

TEST_CASE("representation is linear in beta") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  EmbeddingTable t(5);
  for (int i = 0; i < 8; ++i) {
    Vector v(5);
    for (auto& x : v) x = g(rng);
    t.set("w" + std::to_string(i), v);
  }
  const Tokens title{"w0", "w1", "w2"}, desc{"w3", "w4", "w5", "w6", "w7"};
  const Vector v0 = text_representation(title, desc, t, 0.0).value;
  const Vector v1 = text_representation(title, desc, t, 1.0).value;
  for (int i = 0; i <= 20; ++i) {
    const double beta = i / 20.0;
    const Vector vb = text_representation(title, desc, t, beta).value;
    CHECK((vb - (beta * v1 + (1 - beta) * v0)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("beta grid search") {
  SUBCASE("title signal peaks at 1") {
    const auto c = synthetic::job_corpus(120, synthetic::SignalSide::Title, 3);
    const BetaCurve curve = grid_search_beta(c.jobs, c.table, c.model, default_beta_grid());
    CHECK(curve.best_beta == 1.0);
    CHECK(curve.points.back().ndcg == doctest::Approx(1.0));
    for (const auto& p : curve.points) CHECK(p.evaluated + p.excluded == c.jobs.size());
  }
  SUBCASE("description signal peaks at 0") {
    const auto c = synthetic::job_corpus(120, synthetic::SignalSide::Description, 4);
    CHECK(grid_search_beta(c.jobs, c.table, c.model, default_beta_grid()).best_beta == 0.0);
  }
  SUBCASE("single grid value") {
    const auto c = synthetic::job_corpus(20, synthetic::SignalSide::Title, 5);
    const BetaCurve curve = grid_search_beta(c.jobs, c.table, c.model, {0.4});
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.best_beta == 0.4);
  }
  SUBCASE("grid order and duplicates do not matter") {
    const auto c = synthetic::job_corpus(30, synthetic::SignalSide::Title, 6);
    const BetaCurve a = grid_search_beta(c.jobs, c.table, c.model, {0.0, 0.5, 1.0});
    const BetaCurve b = grid_search_beta(c.jobs, c.table, c.model, {1.0, 0.0, 0.5, 0.5});
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].beta == b.points[i].beta);
      CHECK(a.points[i].ndcg == b.points[i].ndcg);
    }
    CHECK(a.best_beta == b.best_beta);
  }
  SUBCASE("equal ndcg resolves to the smaller beta") {
    auto c = synthetic::job_corpus(10, synthetic::SignalSide::Title, 7);
    JobSet same_sides;
    for (JobPost j : c.jobs) {
      j.desc_tokens = j.title_tokens;  // beta has no effect
      same_sides.add(j);
    }
    c.jobs = same_sides;
    CHECK(grid_search_beta(c.jobs, c.table, c.model, default_beta_grid()).best_beta == 0.0);
  }
  SUBCASE("empty representations are excluded and counted") {
    auto c = synthetic::job_corpus(10, synthetic::SignalSide::Title, 8);
    JobPost blank;
    blank.id = "blank";
    blank.title_tokens = {"nothing"};
    blank.weak_profile = RiasecProfile::Constant(50);
    c.jobs.add(blank);
    const BetaCurve curve = grid_search_beta(c.jobs, c.table, c.model, {0.5});
    CHECK(curve.points[0].excluded == 1);
    CHECK(curve.points[0].evaluated == 10);
  }
  SUBCASE("errors") {
    const auto c = synthetic::job_corpus(5, synthetic::SignalSide::Title, 9);
    CHECK_THROWS_AS(grid_search_beta(c.jobs, c.table, c.model, {}), ValidationError);
    CHECK_THROWS_AS(grid_search_beta(c.jobs, c.table, c.model, {1.5}), ValidationError);
    CHECK_THROWS_AS(grid_search_beta(c.jobs, c.table, RankingModel(3), {0.5}), ValidationError);
    JobSet unlabeled;
    JobPost j;
    j.id = "u";
    j.title_tokens = {"sig0"};
    unlabeled.add(j);
    CHECK_THROWS_AS(grid_search_beta(unlabeled, c.table, c.model, {0.5}), ValidationError);
  }
}

TEST_CASE("curve output format") {
  BetaCurve curve;
  curve.points.push_back({0.5, 0.87654321, 9, 1});
  std::ostringstream out;
  write_curve(out, curve);
  CHECK(out.str() == "0.500000\t0.876543\t9\t1\n");
}
