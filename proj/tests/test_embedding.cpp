#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "riasec/embedding.hpp"

using namespace riasec;

namespace {

VectorFile parse(const std::string& text) {
  std::istringstream in(text);
  return read_vectors(in, "vec.txt");
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

WalkSet walks_from(const std::vector<std::vector<std::string>>& seqs) {
  WalkSet ws;
  std::map<std::string, int> index;
  for (const auto& s : seqs) {
    std::vector<int> w;
    for (const auto& t : s) {
      auto [it, inserted] = index.emplace(t, static_cast<int>(ws.tokens.size()));
      if (inserted) ws.tokens.push_back(t);
      w.push_back(it->second);
    }
    ws.walks.push_back(w);
  }
  return ws;
}

}  // namespace

TEST_CASE("vector file reader") {
  SUBCASE("small file") {
    auto vf = parse("2 3\na 1 0 0\nb 0 1 0\n");
    CHECK(vf.table.size() == 2);
    CHECK(vf.table.dim() == 3);
    CHECK(vf.table.row(*vf.table.find("b"))[1] == 1.0);
  }
  SUBCASE("short row names its line") {
    try {
      parse("2 3\na 1 0 0\nb 0 1\n");
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("vec.txt:3") != std::string::npos);
    }
  }
  SUBCASE("empty file") { CHECK_THROWS_AS(parse(""), ValidationError); }
  SUBCASE("row count differs from header") { CHECK_THROWS_AS(parse("3 1\na 1\n"), ValidationError); }
  SUBCASE("duplicates keep the last row") {
    auto vf = parse("2 1\na 1\na 2\n");
    CHECK(vf.duplicate_rows == 1);
    CHECK(vf.table.size() == 1);
    CHECK(vf.table.row(0)[0] == 2.0);
  }
}

TEST_CASE("vector file round trip keeps nine significant digits") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 10);
  EmbeddingTable t(7);
  for (int i = 0; i < 50; ++i) {
    Vector v(7);
    for (auto& x : v) x = g(rng);
    t.set("w" + std::to_string(i), v);
  }
  t.set("occ::15-1252", Vector::Ones(7) * 1e-30);
  std::stringstream ss;
  write_vectors(ss, t);
  const EmbeddingTable back = read_vectors(ss, "rt").table;
  REQUIRE(back.keys() == t.keys());
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (int c = 0; c < 7; ++c) {
      const double a = t.row(i)[c], b = back.row(i)[c];
      CHECK(std::abs(a - b) <= 5e-9 * std::abs(a));
    }
  }
}

TEST_CASE("mean representation") {
  EmbeddingTable t(2);
  t.set("computer", vec({1, 0}));
  t.set("programmer", vec({0, 1}));
  auto m = mean_representation({"computer", "programmer"}, t);
  CHECK(m.value.isApprox(vec({0.5, 0.5})));
  CHECK(m.used == 2);
  CHECK(mean_representation({"computer"}, t).value == vec({1, 0}));
  auto unknown = mean_representation({"zzz", "qqq"}, t);
  CHECK(unknown.empty());
  CHECK(unknown.value == Vector::Zero(2));
  CHECK(mean_representation({"computer", "zzz"}, t).value == vec({1, 0}));
}

TEST_CASE("mean representation ignores token order") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  EmbeddingTable t(5);
  for (int i = 0; i < 10; ++i) {
    Vector v(5);
    for (auto& x : v) x = g(rng);
    t.set("w" + std::to_string(i), v);
  }
  Tokens tokens;
  for (int i = 0; i < 25; ++i) tokens.push_back("w" + std::to_string(static_cast<int>(rng() % 12)));
  const Vector base = mean_representation(tokens, t).value;
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(tokens.begin(), tokens.end(), rng);
    CHECK((mean_representation(tokens, t).value - base).norm() <= 1e-12);
  }
}

TEST_CASE("cosine properties") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    Vector u(6), v(6);
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(u, v) == cosine(v, u));
    CHECK(std::abs(cosine(u, v)) <= 1.0 + 1e-12);
  }
  CHECK(cosine(vec({1, 0}), vec({0, 3})) == 0.0);
}

TEST_CASE("nearest neighbors") {
  EmbeddingTable t(3);
  t.set("alpha", vec({1, 0, 0}));
  t.set("beta", vec({0.9, 0.1, 0}));
  t.set("occ::x", vec({0.2, 1, 0}));
  t.set("delta", vec({0, 0, 1}));

  SUBCASE("raw vector query finds itself at cosine 1") {
    auto r = nearest_neighbors(t, Query{vec({1, 0, 0})}, 1);
    CHECK(r[0].key == "alpha");
    CHECK(r[0].cosine == doctest::Approx(1.0));
  }
  SUBCASE("token query excludes itself and matches a brute-force ranking") {
    auto r = nearest_neighbors(t, Query{std::string("alpha")}, 10);
    std::vector<std::pair<double, std::string>> brute;
    const std::vector<std::string> keys{"beta", "occ::x", "delta"};
    const std::vector<std::vector<double>> vs{{0.9, 0.1, 0}, {0.2, 1, 0}, {0, 0, 1}};
    for (std::size_t i = 0; i < keys.size(); ++i) {
      brute.emplace_back(-oracle::cosine({1, 0, 0}, vs[i]), keys[i]);
    }
    std::sort(brute.begin(), brute.end());
    REQUIRE(r.size() == brute.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r[i].key == brute[i].second);
      CHECK(r[i].cosine == doctest::Approx(-brute[i].first).epsilon(1e-12));
    }
    CHECK(r.back().cosine == 0.0);  // orthogonal
  }
  SUBCASE("filters") {
    auto occs = nearest_neighbors(t, Query{std::string("alpha")}, 5, NeighborFilter::Occupations);
    REQUIRE(occs.size() == 1);
    CHECK(occs[0].key == "occ::x");
    auto ws = nearest_neighbors(t, Query{std::string("alpha")}, 5, NeighborFilter::Words);
    CHECK(ws.size() == 2);
  }
  SUBCASE("ties break by key") {
    EmbeddingTable s(2);
    s.set("q", vec({1, 0}));
    s.set("zz", vec({1, 1}));
    s.set("aa", vec({1, 1}));
    auto r = nearest_neighbors(s, Query{std::string("q")}, 2);
    CHECK(r[0].key == "aa");
    CHECK(r[1].key == "zz");
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(nearest_neighbors(t, Query{std::string("nope")}, 3), ValidationError);
    CHECK_THROWS_AS(nearest_neighbors(t, Query{Vector(Vector::Zero(3))}, 3), ValidationError);
    CHECK_THROWS_AS(nearest_neighbors(t, Query{std::string("alpha")}, 0), ValidationError);
  }
}

TEST_CASE("negative-sampling gradient matches central differences") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0, 0.7);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 4, rows = 1 + static_cast<int>(rng() % 4);
    Vector center(dim);
    RowMatrix targets(rows, dim);
    for (auto& x : center) x = g(rng);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < dim; ++c) targets(r, c) = g(rng);
    Vector d_center(dim);
    RowMatrix d_targets(rows, dim);
    sgns_loss_and_gradient(center, targets, d_center, d_targets);

    // flatten center and targets into one parameter vector
    Vector params(dim + rows * dim), analytic(dim + rows * dim);
    params << center, Eigen::Map<const Vector>(targets.data(), rows * dim);
    analytic << d_center, Eigen::Map<const Vector>(d_targets.data(), rows * dim);
    auto loss = [&](const Vector& p) {
      long double l = 0;
      for (int r = 0; r < rows; ++r) {
        long double dot = 0;
        for (int c = 0; c < dim; ++c) dot += p[c] * p[dim + r * dim + c];
        const long double s = 1.0L / (1.0L + std::exp(-dot));
        l -= r == 0 ? std::log(s) : std::log(1.0L - s);
      }
      return static_cast<double>(l);
    };
    CHECK(oracle::relative_error(analytic, oracle::central_difference(loss, params)) < 1e-5);
  }
}

TEST_CASE("skip-gram trainer contracts") {
  const WalkSet ws = walks_from({{"a", "b", "c"}, {"c", "d"}});
  SkipGramConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 0;

  SUBCASE("zero epochs returns the init restricted to walk tokens") {
    EmbeddingTable init(4);
    init.set("a", vec({1, 2, 3, 4}));
    init.set("c", vec({5, 6, 7, 8}));
    init.set("unused", vec({0, 0, 0, 1}));
    const EmbeddingTable out = train_skipgram(ws, cfg, &init);
    CHECK(out.size() == 4);
    CHECK_FALSE(out.contains("unused"));
    CHECK(out.row(*out.find("a")) == init.row(*init.find("a")));
    CHECK(out.row(*out.find("c")) == init.row(*init.find("c")));
    const Vector b = out.row(*out.find("b"));
    CHECK(b.cwiseAbs().maxCoeff() <= 0.5 / 4);
  }
  SUBCASE("errors") {
    EmbeddingTable wrong(3);
    CHECK_THROWS_AS(train_skipgram(ws, cfg, &wrong), ValidationError);
    CHECK_THROWS_AS(train_skipgram(WalkSet{}, cfg), ValidationError);
    cfg.window = 0;
    CHECK_THROWS_AS(train_skipgram(ws, cfg), ValidationError);
  }
  SUBCASE("vocabulary ignores token table order") {
    WalkSet shuffled = ws;
    // same walks, different token table
    shuffled.tokens = {"d", "c", "b", "a"};
    shuffled.walks = {{3, 2, 1}, {1, 0}};
    cfg.epochs = 3;
    CHECK(train_skipgram(ws, cfg) == train_skipgram(shuffled, cfg));
  }
}

TEST_CASE("positive pair score rises every epoch without negatives") {
  std::vector<std::vector<std::string>> seqs(50, {"a", "b"});
  const WalkSet ws = walks_from(seqs);
  SkipGramConfig cfg;
  cfg.dim = 8;
  cfg.negatives = 0;
  cfg.window = 1;
  cfg.epochs = 6;
  cfg.learning_rate = 0.05;
  SkipGramTrainer trainer(ws, cfg);
  const int a = *trainer.index_of("a"), b = *trainer.index_of("b");
  double before = trainer.pair_log_score(a, b);
  for (int e = 0; e < cfg.epochs; ++e) {
    trainer.run_epoch();
    const double after = trainer.pair_log_score(a, b);
    CHECK(after > before);
    before = after;
  }
}

TEST_CASE("always-adjacent tokens end up closer than random pairs") {
  // Ordinary tokens sit on a ring and appear in consecutive runs, so each has
  // its own context. x and y are spliced in together, as often as a ring token
  // appears; a pair present in every walk would dominate the noise
  // distribution and pull every rare token onto one shared direction.
  const int ring = 200;
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> start(0, ring - 1), slot(0, 8);
  std::vector<std::vector<std::string>> seqs;
  for (int w = 0; w < 1000; ++w) {
    std::vector<std::string> s;
    const int s0 = start(rng);
    for (int i = 0; i < 8; ++i) s.push_back("t" + std::to_string((s0 + i) % ring));
    if (w % 20 == 0) {
      s.insert(s.begin() + slot(rng), {"x", "y"});
    } else {
      s.push_back("t" + std::to_string((s0 + 8) % ring));
      s.push_back("t" + std::to_string((s0 + 9) % ring));
    }
    seqs.push_back(s);
  }
  const WalkSet ws = walks_from(seqs);
  SkipGramConfig cfg;
  cfg.dim = 24;
  cfg.window = 5;
  cfg.epochs = 5;
  cfg.seed = 8;
  SkipGramTrainer trainer(ws, cfg);
  for (int e = 0; e < cfg.epochs; ++e) {
    trainer.run_epoch();
    CHECK(trainer.input_vectors().allFinite());
  }
  const EmbeddingTable t = trainer.table();
  const double xy = cosine(t.row(*t.find("x")), t.row(*t.find("y")));
  double random_mean = 0;
  for (int p = 0; p < 100; ++p) {
    int i = start(rng), j = start(rng);
    while (j == i) j = start(rng);
    random_mean += cosine(t.row(*t.find("t" + std::to_string(i))), t.row(*t.find("t" + std::to_string(j))));
  }
  random_mean /= 100;
  MESSAGE("cos(x,y)=" << xy << " mean random=" << random_mean);
  CHECK(xy - random_mean >= 0.2);

  SUBCASE("deterministic mode is bit-reproducible") {
    CHECK(train_skipgram(ws, cfg) == t);
  }
}

TEST_CASE("parallel training stays finite and covers the vocabulary") {
  std::vector<std::vector<std::string>> seqs;
  for (int w = 0; w < 200; ++w) seqs.push_back({"a" + std::to_string(w % 7), "b" + std::to_string(w % 5), "c"});
  SkipGramConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 3;
  cfg.threads = 4;
  const EmbeddingTable t = train_skipgram(walks_from(seqs), cfg);
  CHECK(t.size() == 13);
  CHECK(t.matrix().allFinite());
}
