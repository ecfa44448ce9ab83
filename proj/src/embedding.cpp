#include "riasec/embedding.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "tsv.hpp"

namespace riasec {

EmbeddingTable::EmbeddingTable(int dim, std::vector<std::string> keys, RowMatrix vectors)
    : dim_(dim), keys_(std::move(keys)), vectors_(std::move(vectors)) {
  if (vectors_.rows() != static_cast<Eigen::Index>(keys_.size()) ||
      (vectors_.rows() > 0 && vectors_.cols() != dim_)) {
    throw ValidationError("embedding table shape does not match its keys");
  }
  vectors_.conservativeResize(vectors_.rows(), dim_);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!index_.emplace(keys_[i], i).second) {
      throw ValidationError("duplicate embedding key '" + keys_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool EmbeddingTable::set(const std::string& key, const Eigen::Ref<const Vector>& v) {
  if (v.size() != dim_) {
    throw ValidationError("vector for '" + key + "' has length " + std::to_string(v.size()) +
                          ", table dim is " + std::to_string(dim_));
  }
  if (auto i = find(key)) {
    vectors_.row(*i) = v.transpose();
    return true;
  }
  index_.emplace(key, keys_.size());
  keys_.push_back(key);
  vectors_.conservativeResize(static_cast<Eigen::Index>(keys_.size()), dim_);
  vectors_.row(vectors_.rows() - 1) = v.transpose();
  return false;
}

bool EmbeddingTable::operator==(const EmbeddingTable& other) const {
  return dim_ == other.dim_ && keys_ == other.keys_ && vectors_ == other.vectors_;
}

void write_vectors(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.keys()[i];
    for (int c = 0; c < table.dim(); ++c) {
      std::snprintf(buf, sizeof buf, " %.9g", table.matrix()(static_cast<Eigen::Index>(i), c));
      out << buf;
    }
    out << '\n';
  }
}

VectorFile read_vectors(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ValidationError(source + ": empty vector file");
  detail::chomp(line);
  auto header = detail::split(detail::trim(line), ' ');
  double count_d = 0, dim_d = 0;
  if (header.size() != 2 || !detail::parse_double(header[0], count_d) ||
      !detail::parse_double(header[1], dim_d) || dim_d < 1 || count_d < 0 ||
      count_d != std::floor(count_d) || dim_d != std::floor(dim_d)) {
    throw ValidationError(detail::where(source, 1) + "expected header '<count> <dim>'");
  }
  const auto count = static_cast<std::size_t>(count_d);
  const int dim = static_cast<int>(dim_d);

  VectorFile result{EmbeddingTable(dim), 0};
  std::size_t rows = 0;
  Vector v(dim);
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (detail::trim(line).empty()) continue;
    std::vector<std::string_view> cells;
    for (auto c : detail::split(line, ' ')) {
      if (!c.empty()) cells.push_back(c);
    }
    if (cells.size() != static_cast<std::size_t>(dim) + 1) {
      throw ValidationError(detail::where(source, line_no) + "expected token plus " +
                            std::to_string(dim) + " values, found " +
                            std::to_string(cells.size() ? cells.size() - 1 : 0));
    }
    for (int c = 0; c < dim; ++c) {
      if (!detail::parse_double(cells[c + 1], v[c]) || !std::isfinite(v[c])) {
        throw ValidationError(detail::where(source, line_no) + "bad value '" +
                              std::string(cells[c + 1]) + "'");
      }
    }
    if (result.table.set(std::string(cells[0]), v)) ++result.duplicate_rows;
    ++rows;
  }
  if (rows != count) {
    throw ValidationError(source + ": header declares " + std::to_string(count) +
                          " rows, found " + std::to_string(rows));
  }
  return result;
}

VectorFile load_pretrained(const std::string& path) {
  auto in = detail::open_input(path);
  return read_vectors(in, path);
}

MeanVector mean_representation(const Tokens& tokens, const EmbeddingTable& table) {
  MeanVector m{Vector::Zero(table.dim()), 0};
  for (const auto& t : tokens) {
    if (auto i = table.find(t)) {
      m.value += table.row(*i);
      ++m.used;
    }
  }
  if (m.used > 0) m.value /= static_cast<double>(m.used);
  return m;
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, const Query& query,
                                        std::size_t top_n, NeighborFilter filter) {
  if (top_n < 1) throw ValidationError("top_n must be >= 1");
  Vector q;
  std::optional<std::size_t> self;
  if (const auto* key = std::get_if<std::string>(&query)) {
    self = table.find(*key);
    if (!self) throw ValidationError("unknown query '" + *key + "'");
    q = table.row(*self);
  } else {
    q = std::get<Vector>(query);
    if (q.size() != table.dim()) throw ValidationError("query vector has the wrong length");
  }
  if (q.norm() == 0.0) throw ValidationError("query vector has zero norm");

  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (self && *self == i) continue;
    const bool is_occ = std::string_view(table.keys()[i]).starts_with(kOccPrefix);
    if (filter == NeighborFilter::Words && is_occ) continue;
    if (filter == NeighborFilter::Occupations && !is_occ) continue;
    all.push_back({table.keys()[i], cosine(q, table.row(i))});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.key < b.key;
  };
  const std::size_t n = std::min(top_n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), better);
  all.resize(n);
  return all;
}

void SkipGramConfig::validate() const {
  if (dim < 1) throw ValidationError("dim must be >= 1");
  if (window < 1) throw ValidationError("window must be >= 1");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (negatives < 0) throw ValidationError("negatives must be >= 0");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (subsample && !(*subsample > 0.0)) throw ValidationError("subsample threshold must be > 0");
  if (threads < 1) throw ValidationError("threads must be >= 1");
}

double sgns_loss_and_gradient(const Eigen::Ref<const Vector>& center,
                              const Eigen::Ref<const RowMatrix>& targets,
                              Eigen::Ref<Vector> d_center, Eigen::Ref<RowMatrix> d_targets) {
  d_center.setZero();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < targets.rows(); ++i) {
    const double label = i == 0 ? 1.0 : 0.0;
    const double score = targets.row(i).dot(center.transpose());
    // -log s(x) for the positive, -log s(-x) = -log(1 - s(x)) for noise
    const double x = i == 0 ? score : -score;
    loss += x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
    const double g = sigmoid(score) - label;
    d_center += g * targets.row(i).transpose();
    d_targets.row(i) = g * center.transpose();
  }
  return loss;
}

SkipGramTrainer::SkipGramTrainer(const WalkSet& walks, const SkipGramConfig& cfg,
                                 const EmbeddingTable* init)
    : cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  if (walks.walks.empty()) throw ValidationError("cannot train on an empty walk set");
  if (init && init->dim() != cfg_.dim) {
    throw ValidationError("init table dim " + std::to_string(init->dim()) +
                          " does not match configured dim " + std::to_string(cfg_.dim));
  }

  std::set<int> used;
  for (const auto& w : walks.walks) used.insert(w.begin(), w.end());
  std::set<std::string> distinct;
  for (int t : used) distinct.insert(walks.tokens.at(static_cast<std::size_t>(t)));
  vocab_.assign(distinct.begin(), distinct.end());
  for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], static_cast<int>(i));

  std::vector<std::size_t> counts(vocab_.size(), 0);
  corpus_.reserve(walks.walks.size());
  for (const auto& w : walks.walks) {
    std::vector<int> mapped;
    mapped.reserve(w.size());
    for (int t : w) {
      int v = index_.at(walks.tokens[static_cast<std::size_t>(t)]);
      mapped.push_back(v);
      ++counts[static_cast<std::size_t>(v)];
    }
    const std::size_t len = mapped.size();
    for (std::size_t i = 0; i < len; ++i) {
      pairs_per_epoch_ += std::min<std::size_t>(i, static_cast<std::size_t>(cfg_.window)) +
                          std::min<std::size_t>(len - 1 - i, static_cast<std::size_t>(cfg_.window));
    }
    corpus_.push_back(std::move(mapped));
  }

  const double total = static_cast<double>(walks.step_count());
  noise_cdf_.resize(vocab_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += std::pow(static_cast<double>(counts[i]), 0.75);
    noise_cdf_[i] = acc;
  }
  for (auto& c : noise_cdf_) c /= acc;

  if (cfg_.subsample) {
    const double t = *cfg_.subsample;
    keep_prob_.resize(vocab_.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double f = static_cast<double>(counts[i]) / total;
      keep_prob_[i] = std::min(1.0, (std::sqrt(f / t) + 1.0) * t / f);
    }
  }

  const auto n = static_cast<Eigen::Index>(vocab_.size());
  input_.resize(n, cfg_.dim);
  output_ = RowMatrix::Zero(n, cfg_.dim);
  const double half = 0.5 / cfg_.dim;
  std::uniform_real_distribution<double> uni(-half, half);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::optional<std::size_t> from;
    if (init) from = init->find(vocab_[static_cast<std::size_t>(i)]);
    if (from) {
      input_.row(i) = init->row(*from).transpose();
    } else {
      for (int c = 0; c < cfg_.dim; ++c) input_(i, c) = uni(rng_);
    }
  }
}

std::optional<int> SkipGramTrainer::index_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int SkipGramTrainer::draw_negative(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), uni(rng));
  if (it == noise_cdf_.end()) --it;
  return static_cast<int>(it - noise_cdf_.begin());
}

double SkipGramTrainer::current_rate(std::size_t processed) const {
  const double total = static_cast<double>(pairs_per_epoch_) * std::max(cfg_.epochs, 1);
  const double frac = total > 0 ? 1.0 - static_cast<double>(processed) / total : 1.0;
  return cfg_.learning_rate * std::max(1e-4, frac);
}

double SkipGramTrainer::train_walks(std::size_t begin, std::size_t end, std::size_t stride,
                                    std::mt19937_64& rng, std::size_t& processed) {
  const auto rows = static_cast<Eigen::Index>(1 + cfg_.negatives);
  RowMatrix targets(rows, cfg_.dim), d_targets(rows, cfg_.dim);
  Vector center(cfg_.dim), d_center(cfg_.dim);
  std::vector<int> target_ids(static_cast<std::size_t>(rows));
  std::vector<int> walk;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double loss = 0.0;
  const std::size_t shared_scale = stride;

  for (std::size_t wi = begin; wi < end; wi += stride) {
    const auto& raw = corpus_[wi];
    if (keep_prob_.empty()) {
      walk = raw;
    } else {
      walk.clear();
      for (int t : raw) {
        if (uni(rng) < keep_prob_[static_cast<std::size_t>(t)]) walk.push_back(t);
      }
    }
    const auto len = static_cast<std::ptrdiff_t>(walk.size());
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      const int c = walk[static_cast<std::size_t>(i)];
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - cfg_.window);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + cfg_.window);
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const int ctx = walk[static_cast<std::size_t>(j)];
        Eigen::Index m = 0;
        target_ids[0] = ctx;
        targets.row(m++) = output_.row(ctx);
        for (int k = 0; k < cfg_.negatives; ++k) {
          int neg = draw_negative(rng);
          if (neg == ctx) continue;
          target_ids[static_cast<std::size_t>(m)] = neg;
          targets.row(m++) = output_.row(neg);
        }
        center = input_.row(c).transpose();
        loss += sgns_loss_and_gradient(center, targets.topRows(m), d_center, d_targets.topRows(m));
        const double rate = current_rate(processed_ + processed * shared_scale);
        for (Eigen::Index r = 0; r < m; ++r) {
          output_.row(target_ids[static_cast<std::size_t>(r)]) -= rate * d_targets.row(r);
        }
        input_.row(c) -= rate * d_center.transpose();
        ++processed;
      }
    }
  }
  return loss;
}

double SkipGramTrainer::run_epoch() {
  double loss = 0.0;
  std::size_t processed = 0;
  if (cfg_.threads <= 1) {
    loss = train_walks(0, corpus_.size(), 1, rng_, processed);
  } else {
    const auto workers = static_cast<std::size_t>(cfg_.threads);
    std::vector<double> losses(workers, 0.0);
    std::vector<std::size_t> counts(workers, 0);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        std::mt19937_64 rng(cfg_.seed + 0x9e3779b97f4a7c15ULL * (t + 1) +
                            static_cast<std::uint64_t>(epochs_done_));
        losses[t] = train_walks(t, corpus_.size(), workers, rng, counts[t]);
      });
    }
    for (auto& th : pool) th.join();
    for (std::size_t t = 0; t < workers; ++t) {
      loss += losses[t];
      processed += counts[t];
    }
  }
  processed_ += processed;
  ++epochs_done_;
  check_finite();
  return processed ? loss / static_cast<double>(processed) : 0.0;
}

void SkipGramTrainer::check_finite() const {
  if (!input_.allFinite() || !output_.allFinite()) {
    throw RuntimeError("skip-gram training diverged (non-finite vectors after epoch " +
                       std::to_string(epochs_done_) + ")");
  }
}

double SkipGramTrainer::pair_log_score(int center, int context) const {
  const double x = input_.row(center).dot(output_.row(context));
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

EmbeddingTable SkipGramTrainer::table() const { return EmbeddingTable(cfg_.dim, vocab_, input_); }

EmbeddingTable train_skipgram(const WalkSet& walks, const SkipGramConfig& cfg,
                              const EmbeddingTable* init, std::vector<double>* epoch_loss) {
  SkipGramTrainer trainer(walks, cfg, init);
  for (int e = 0; e < cfg.epochs; ++e) {
    double l = trainer.run_epoch();
    if (epoch_loss) epoch_loss->push_back(l);
  }
  return trainer.table();
}

}  // namespace riasec
