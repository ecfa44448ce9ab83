#include "riasec/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "riasec/graph.hpp"
#include "riasec/jobrep.hpp"
#include "riasec/metrics.hpp"
#include "tsv.hpp"

namespace riasec {

namespace {

constexpr int kDefaultEmbedEpochs = 5;
constexpr double kDefaultEmbedRate = 0.025;
constexpr int kDefaultRankerEpochs = 100;
constexpr double kDefaultRankerRate = 0.05;

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  double v = 0;
  if (!detail::parse_double(value, v)) {
    throw ValidationError("config key '" + key + "': '" + value + "' is not a number");
  }
  if constexpr (std::is_integral_v<T>) {
    if (v != std::floor(v)) throw ValidationError("config key '" + key + "' expects an integer");
  }
  return static_cast<T>(v);
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& config_setters() {
  static const std::map<std::string, Setter> setters = [] {
    std::map<std::string, Setter> s;
    auto integer = [](int PipelineConfig::*field) -> Setter {
      return [field](PipelineConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_number<int>(k, v);
      };
    };
    auto real = [](double PipelineConfig::*field) -> Setter {
      return [field](PipelineConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_number<double>(k, v);
      };
    };
    auto text = [](std::string PipelineConfig::*field) -> Setter {
      return [field](PipelineConfig& c, const std::string&, const std::string& v) { c.*field = v; };
    };
    s["dim"] = integer(&PipelineConfig::dim);
    s["window"] = integer(&PipelineConfig::window);
    s["epochs"] = [](PipelineConfig& c, const std::string& k, const std::string& v) {
      c.epochs = parse_number<int>(k, v);
    };
    s["lr"] = [](PipelineConfig& c, const std::string& k, const std::string& v) {
      c.lr = parse_number<double>(k, v);
    };
    s["negatives"] = integer(&PipelineConfig::negatives);
    s["walks-per-node"] = integer(&PipelineConfig::walks_per_node);
    s["walk-len"] = integer(&PipelineConfig::walk_len);
    s["restart-prob"] = real(&PipelineConfig::restart_prob);
    s["max-ndf"] = real(&PipelineConfig::max_ndf);
    s["beta"] = real(&PipelineConfig::beta);
    s["beta-grid"] = text(&PipelineConfig::beta_grid);
    s["loss"] = text(&PipelineConfig::loss);
    s["temperature"] = real(&PipelineConfig::temperature);
    s["split-frac"] = real(&PipelineConfig::split_frac);
    s["seed"] = [](PipelineConfig& c, const std::string& k, const std::string& v) {
      c.seed = parse_number<std::uint64_t>(k, v);
    };
    s["threads"] = integer(&PipelineConfig::threads);
    s["subsample"] = [](PipelineConfig& c, const std::string& k, const std::string& v) {
      c.subsample = parse_number<double>(k, v);
    };
    s["features"] = text(&PipelineConfig::features);
    s["top"] = integer(&PipelineConfig::top);
    s["filter"] = text(&PipelineConfig::filter);
    s["min-coverage"] = real(&PipelineConfig::min_coverage);
    s["in"] = text(&PipelineConfig::in);
    s["out"] = text(&PipelineConfig::out);
    s["vectors"] = text(&PipelineConfig::vectors);
    s["model"] = text(&PipelineConfig::model);
    s["init"] = text(&PipelineConfig::init);
    s["occupations"] = text(&PipelineConfig::occupations);
    s["profiles"] = text(&PipelineConfig::profiles);
    s["query"] = text(&PipelineConfig::query);
    s["crosswalk"] = [](PipelineConfig& c, const std::string&, const std::string& v) {
      c.crosswalks.push_back(v);
    };
    return s;
  }();
  return setters;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  return out;
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ValidationError("missing required " + flag);
}

void check_max_ndf(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError("--max-ndf must lie in [0,1], got " + fmt(v));
  }
}

void check_beta(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("--beta must lie in [0,1], got " + fmt(v));
}

WalkParams walk_params(const PipelineConfig& c) {
  WalkParams p;
  p.walks_per_node = c.walks_per_node;
  p.walk_length = c.walk_len;
  p.restart_prob = c.restart_prob;
  p.seed = c.seed;
  p.threads = c.threads;
  p.validate();
  return p;
}

SkipGramConfig skipgram_config(const PipelineConfig& c) {
  SkipGramConfig s;
  s.dim = c.dim;
  s.window = c.window;
  s.epochs = c.epochs.value_or(kDefaultEmbedEpochs);
  s.learning_rate = c.lr.value_or(kDefaultEmbedRate);
  s.negatives = c.negatives;
  s.subsample = c.subsample;
  s.seed = c.seed;
  s.threads = c.threads;
  s.validate();
  return s;
}

TrainConfig train_config(const PipelineConfig& c) {
  TrainConfig t;
  t.loss = parse_loss(c.loss);
  t.epochs = c.epochs.value_or(kDefaultRankerEpochs);
  t.learning_rate = c.lr.value_or(kDefaultRankerRate);
  t.seed = c.seed;
  t.temperature = c.temperature;
  t.validate();
  if (!(t.learning_rate > 0.0)) throw ValidationError("--lr must be > 0");
  return t;
}

EmbeddingTable load_table(const std::string& path, std::ostream& err) {
  VectorFile vf = load_pretrained(path);
  if (vf.duplicate_rows) {
    err << "warning: " << vf.duplicate_rows << " duplicate rows in " << path
        << " (last occurrence kept)\n";
  }
  return std::move(vf.table);
}

RankingModel load_model(const std::string& path) {
  auto in = detail::open_input(path);
  return read_model(in, path);
}

void print_config(std::ostream& out, const PipelineConfig& cfg, const std::string& command) {
  for (const auto& [k, v] : describe(cfg, command)) out << "# " << k << " = " << v << '\n';
}

void print_matrix(std::ostream& out, const std::string& title,
                  const Eigen::Matrix<double, kDims, kDims>& m) {
  out << title;
  for (Dim d : kAllDims) out << '\t' << dim_letter(d);
  out << '\n';
  for (int r = 0; r < kDims; ++r) {
    out << dim_letter(static_cast<Dim>(r));
    for (int c = 0; c < kDims; ++c) out << '\t' << fixed6(m(r, c));
    out << '\n';
  }
}

// Subcommands -------------------------------------------------------------

int cmd_build_graph(const PipelineConfig& c, std::ostream& out) {
  require(c.in, "occupations file (--in)");
  check_max_ndf(c.max_ndf);
  const OccupationSet occs = load_occupations(c.in);
  const Vocabulary vocab = select_discriminative_words(occs, c.max_ndf);
  const KnowledgeGraph g = build_graph(occs, vocab);
  const std::size_t occ_nodes = g.occupation_node_count();
  const std::size_t occ_edges = g.occupation_edge_count();
  out << "nodes\t" << g.node_count() << '\n'
      << "occupation_nodes\t" << occ_nodes << '\n'
      << "word_nodes\t" << g.node_count() - occ_nodes << '\n'
      << "edges\t" << g.edge_count() << '\n'
      << "occupation_edges\t" << occ_edges << '\n'
      << "word_edges\t" << g.edge_count() - occ_edges << '\n';
  if (!c.out.empty()) {
    auto f = open_output(c.out);
    for (std::size_t u = 0; u < g.node_count(); ++u) {
      for (int v : g.neighbors(static_cast<int>(u))) {
        if (static_cast<std::size_t>(v) > u) {
          f << g.node(static_cast<int>(u)).token() << '\t' << g.node(v).token() << '\n';
        }
      }
    }
  }
  return 0;
}

int cmd_walk(const PipelineConfig& c, std::ostream& out) {
  require(c.in, "occupations file (--in)");
  require(c.out, "--out");
  check_max_ndf(c.max_ndf);
  const WalkParams params = walk_params(c);
  const OccupationSet occs = load_occupations(c.in);
  const KnowledgeGraph g = build_graph(occs, select_discriminative_words(occs, c.max_ndf));
  const WalkSet ws = generate_walks(g, params);
  {
    auto f = open_output(c.out);
    write_walks(f, ws);
  }
  const WalkSummary s = walk_stats(ws);
  out << "walks\t" << s.walks << '\n'
      << "nodes_covered\t" << s.nodes_covered << '\n'
      << "coverage\t" << fixed6(s.coverage) << '\n'
      << "mean_length\t" << fixed6(s.mean_length) << '\n'
      << "root_return_rate\t" << fixed6(s.root_return_rate) << '\n';
  return 0;
}

int cmd_train_embed(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  require(c.in, "walks file (--in)");
  require(c.out, "--out");
  const SkipGramConfig sg = skipgram_config(c);
  WalkSet ws;
  {
    auto f = detail::open_input(c.in);
    ws = read_walks(f, c.in);
  }
  std::optional<EmbeddingTable> init;
  if (!c.init.empty()) {
    init = load_table(c.init, err);
    if (!c.occupations.empty()) init = with_occupation_means(*init, load_occupations(c.occupations));
  }
  SkipGramTrainer trainer(ws, sg, init ? &*init : nullptr);
  for (int e = 0; e < sg.epochs; ++e) {
    const double loss = trainer.run_epoch();
    out << "epoch\t" << e + 1 << "\tloss\t" << fixed6(loss) << '\n';
  }
  auto f = open_output(c.out);
  write_vectors(f, trainer.table());
  out << "vectors\t" << trainer.vocabulary().size() << '\n';
  return 0;
}

struct RankerInputs {
  OccupationSet occs;
  FeatureMap features;
};

RankerInputs ranker_inputs(const PipelineConfig& c, std::ostream& err) {
  require(c.in, "occupations file (--in)");
  require(c.vectors, "--vectors");
  check_beta(c.beta);
  if (c.features != "node" && c.features != "text") {
    throw ValidationError("--features must be node or text, got '" + c.features + "'");
  }
  OccupationSet occs = load_occupations(c.in);
  const EmbeddingTable table = load_table(c.vectors, err);
  OccupationFeatures f = occupation_features(occs, table, c.features, c.beta);
  if (!f.skipped.empty()) {
    err << "warning: " << f.skipped.size() << " labeled occupations have no representation\n";
  }
  OccupationSet usable;
  for (const auto& o : occs) {
    if (!o.profile || f.features.count(o.id)) usable.add(o);
  }
  return {std::move(usable), std::move(f.features)};
}

int cmd_train_ranker(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  require(c.out, "--out");
  const TrainConfig tc = train_config(c);
  RankerInputs in = ranker_inputs(c, err);
  LabelMap labels;
  for (const auto& o : in.occs) {
    if (o.profile) labels.emplace(o.id, *o.profile);
  }
  const TrainResult r = train(in.features, labels, tc);
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
    out << "epoch\t" << e + 1 << "\tloss\t" << fixed6(r.epoch_loss[e]) << '\n';
  }
  auto f = open_output(c.out);
  write_model(f, r.model);
  return 0;
}

int cmd_eval(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  const TrainConfig tc = train_config(c);
  if (!(c.split_frac > 0.0 && c.split_frac < 1.0)) {
    throw ValidationError("--split-frac must lie in (0,1), got " + fmt(c.split_frac));
  }
  RankerInputs in = ranker_inputs(c, err);
  const SplitEvaluation ev = split_eval(in.occs, in.features, tc, c.split_frac, c.seed);
  if (!c.out.empty()) {
    auto f = open_output(c.out);
    write_report(f, ev.report);
  }
  out << "train\t" << ev.train_ids.size() << '\n'
      << "test\t" << ev.test_ids.size() << '\n'
      << "mean_ndcg\t" << fixed6(ev.report.mean_ndcg) << '\n';
  return 0;
}

int cmd_beta_sweep(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  require(c.in, "jobs file (--in)");
  require(c.vectors, "--vectors");
  require(c.model, "--model");
  require(c.profiles, "--profiles");
  if (c.crosswalks.empty()) throw ValidationError("at least one --crosswalk is required");
  const std::vector<double> grid = parse_beta_grid(c.beta_grid);

  const JobSet jobs = load_jobs(c.in);
  CrosswalkChain chain;
  for (const auto& p : c.crosswalks) chain.push_back(load_crosswalk(p));
  const ProfileTable targets = load_target_profiles(c.profiles);
  const EmbeddingTable table = load_table(c.vectors, err);
  const RankingModel model = load_model(c.model);

  const WeakLabeling weak = weak_label_jobs(jobs, chain, targets);
  out << "labeled\t" << weak.labeled << '\n' << "coverage\t" << fixed6(weak.coverage) << '\n';
  if (weak.coverage < c.min_coverage) {
    throw RuntimeError("weak-label coverage " + fixed6(weak.coverage) + " below --min-coverage " +
                       fixed6(c.min_coverage));
  }
  JobSet labeled;
  for (const auto& j : weak.jobs) {
    if (j.weak_profile) labeled.add(j);
  }
  const BetaCurve curve = grid_search_beta(labeled, table, model, grid);
  if (!c.out.empty()) {
    auto f = open_output(c.out);
    write_curve(f, curve);
  } else {
    write_curve(out, curve);
  }
  out << "best_beta\t" << fixed6(curve.best_beta) << '\n';
  return 0;
}

int cmd_profile_jobs(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  require(c.in, "jobs file (--in)");
  require(c.vectors, "--vectors");
  require(c.model, "--model");
  check_beta(c.beta);
  const JobSet jobs = load_jobs(c.in);
  const EmbeddingTable table = load_table(c.vectors, err);
  const RankingModel model = load_model(c.model);
  if (table.dim() != model.k()) throw ValidationError("vector dim does not match model k");

  std::ofstream file;
  if (!c.out.empty()) file = open_output(c.out);
  std::ostream& dst = c.out.empty() ? out : file;
  dst << "id\tR\tI\tA\tS\tE\tC\tranking\tholland\tflag\n";
  std::size_t empty = 0;
  for (const auto& j : jobs) {
    const JobVector v = job_representation(j, table, c.beta);
    dst << j.id;
    if (v.flag == RepFlag::Empty) {
      ++empty;
      dst << "\t\t\t\t\t\t\t-\t-";
    } else {
      const Vec6<double> p = predict_profile(model, v.value);
      for (int d = 0; d < kDims; ++d) dst << '\t' << fixed6(p[d]);
      const Ranking r = ranking_from_scores(p);
      dst << '\t' << r.letters() << '\t' << r.letters().substr(0, 3);
    }
    dst << '\t' << rep_flag_name(v.flag) << '\n';
  }
  if (!c.out.empty()) out << "jobs\t" << jobs.size() << "\nempty\t" << empty << '\n';
  return 0;
}

int cmd_neighbors(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  require(c.vectors, "--vectors");
  require(c.query, "--query");
  NeighborFilter filter = NeighborFilter::All;
  if (c.filter == "words") {
    filter = NeighborFilter::Words;
  } else if (c.filter == "occupations") {
    filter = NeighborFilter::Occupations;
  } else if (c.filter != "all") {
    throw ValidationError("--filter must be all, words or occupations");
  }
  if (c.top < 1) throw ValidationError("--top must be >= 1");
  const EmbeddingTable table = load_table(c.vectors, err);
  const auto result =
      nearest_neighbors(table, Query{c.query}, static_cast<std::size_t>(c.top), filter);
  std::ofstream file;
  if (!c.out.empty()) file = open_output(c.out);
  std::ostream& dst = c.out.empty() ? out : file;
  for (const auto& n : result) dst << n.key << '\t' << fixed6(n.cosine) << '\n';
  return 0;
}

int cmd_stats(const PipelineConfig& c, std::ostream& out) {
  require(c.in, "occupations file (--in)");
  const OccupationSet occs = load_occupations(c.in);
  const OccupationSet labeled = labeled_subset(occs);
  std::optional<RankingModel> model;
  if (!c.model.empty()) model = load_model(c.model);

  std::ofstream file;
  if (!c.out.empty()) file = open_output(c.out);
  std::ostream& dst = c.out.empty() ? out : file;

  dst << "occupations\t" << occs.size() << '\n' << "labeled\t" << labeled.size() << '\n';
  if (labeled.empty()) {
    dst << "affinity\tNA\n";
  } else {
    const KnowledgeGraph network = build_graph(labeled, Vocabulary{});
    dst << "occupation_edges\t" << network.occupation_edge_count() << '\n';
    if (network.occupation_edge_count() == 0) {
      dst << "affinity\tNA\n";
    } else {
      dst << "affinity\t" << fixed6(affinity(network, top_dimension_labels(labeled))) << '\n';
    }
  }
  if (labeled.size() >= 2) {
    const DimensionTable t = dimension_correlation_table(labeled);
    print_matrix(dst, "spearman", t.rho);
    dst << "proportion";
    for (int d = 0; d < kDims; ++d) dst << '\t' << fixed6(t.proportions[d]);
    dst << '\n';
  }
  if (model) {
    const ModelCorrelations mc = model_correlations(*model);
    print_matrix(dst, "model_rows", mc.corr);
    dst << "bias";
    for (int d = 0; d < kDims; ++d) dst << '\t' << fixed6(mc.bias[d]);
    dst << '\n';
  }
  return 0;
}

// Flag registration --------------------------------------------------------

struct Bindings {
  int epochs = 0;
  double lr = 0.0;
  double subsample = 0.0;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* subsample_opt = nullptr;
};

void add_io(CLI::App* sub, PipelineConfig& c) {
  sub->add_option("--in,in", c.in, "Primary input file");
  sub->add_option("--out", c.out, "Output file");
  sub->add_option("--config", c.config, "Flat key = value config file");
  sub->add_option("--seed", c.seed, "Random seed");
}

void add_graph_flags(CLI::App* sub, PipelineConfig& c) {
  sub->add_option("--max-ndf", c.max_ndf, "Discriminative-word document frequency bound");
}

void add_walk_flags(CLI::App* sub, PipelineConfig& c) {
  sub->add_option("--walks-per-node", c.walks_per_node, "Walks rooted at each node");
  sub->add_option("--walk-len", c.walk_len, "Nodes per walk");
  sub->add_option("--restart-prob", c.restart_prob, "Per-step probability of jumping to the root");
  sub->add_option("--threads", c.threads, "Worker threads");
}

void add_epoch_flags(CLI::App* sub, Bindings& b) {
  b.epochs_opt = sub->add_option("--epochs", b.epochs, "Training epochs");
  b.lr_opt = sub->add_option("--lr", b.lr, "Initial learning rate");
}

void add_embed_flags(CLI::App* sub, PipelineConfig& c, Bindings& b) {
  sub->add_option("--dim", c.dim, "Embedding size");
  sub->add_option("--window", c.window, "Skip-gram window");
  sub->add_option("--negatives", c.negatives, "Noise samples per pair");
  sub->add_option("--threads", c.threads, "Worker threads (1 = deterministic)");
  b.subsample_opt = sub->add_option("--subsample", b.subsample, "Frequency subsampling threshold");
  sub->add_option("--init", c.init, "Pretrained vectors for warm start");
  sub->add_option("--occupations", c.occupations,
                  "Occupations TSV; adds occ:: title means to the warm start");
  add_epoch_flags(sub, b);
}

void add_ranker_flags(CLI::App* sub, PipelineConfig& c, Bindings& b) {
  sub->add_option("--vectors", c.vectors, "Vector file");
  sub->add_option("--loss", c.loss, "point | pair | list");
  sub->add_option("--temperature", c.temperature, "Target softmax temperature");
  sub->add_option("--features", c.features, "node | text");
  sub->add_option("--beta", c.beta, "Title weight for text features");
  add_epoch_flags(sub, b);
}

}  // namespace

void apply_config_text(PipelineConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  const auto& setters = config_setters();
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto body = detail::trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(detail::where(source, line_no) + "expected 'key = value'");
    }
    std::string key(detail::trim(body.substr(0, eq)));
    std::string value(detail::trim(body.substr(eq + 1)));
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw ValidationError(detail::where(source, line_no) + "unknown key '" + key + "'");
    }
    try {
      it->second(cfg, key, value);
    } catch (const ValidationError& e) {
      throw ValidationError(detail::where(source, line_no) + e.what());
    }
  }
}

std::vector<double> parse_beta_grid(const std::string& text) {
  std::vector<double> grid;
  for (auto cell : detail::split(text, ',')) {
    double v = 0;
    if (!detail::parse_double(cell, v) || !(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("--beta-grid entry '" + std::string(detail::trim(cell)) +
                            "' is not a value in [0,1]");
    }
    grid.push_back(v);
  }
  return grid;
}

std::vector<std::pair<std::string, std::string>> describe(const PipelineConfig& c,
                                                          const std::string& command) {
  const bool embed = command == "train-embed";
  std::vector<std::pair<std::string, std::string>> kv = {
      {"command", command},
      {"dim", std::to_string(c.dim)},
      {"window", std::to_string(c.window)},
      {"epochs", std::to_string(c.epochs.value_or(embed ? kDefaultEmbedEpochs : kDefaultRankerEpochs))},
      {"lr", fmt(c.lr.value_or(embed ? kDefaultEmbedRate : kDefaultRankerRate))},
      {"negatives", std::to_string(c.negatives)},
      {"subsample", c.subsample ? fmt(*c.subsample) : "off"},
      {"walks-per-node", std::to_string(c.walks_per_node)},
      {"walk-len", std::to_string(c.walk_len)},
      {"restart-prob", fmt(c.restart_prob)},
      {"max-ndf", fmt(c.max_ndf)},
      {"beta", fmt(c.beta)},
      {"beta-grid", c.beta_grid},
      {"loss", c.loss},
      {"temperature", fmt(c.temperature)},
      {"split-frac", fmt(c.split_frac)},
      {"seed", std::to_string(c.seed)},
      {"threads", std::to_string(c.threads)},
      {"features", c.features},
      {"top", std::to_string(c.top)},
      {"filter", c.filter},
      {"min-coverage", fmt(c.min_coverage)},
      {"in", c.in},
      {"out", c.out},
      {"config", c.config},
      {"vectors", c.vectors},
      {"model", c.model},
      {"init", c.init},
      {"occupations", c.occupations},
      {"profiles", c.profiles},
      {"query", c.query},
  };
  std::string cw;
  for (const auto& p : c.crosswalks) cw += (cw.empty() ? "" : ",") + p;
  kv.emplace_back("crosswalk", cw);
  return kv;
}

OccupationFeatures occupation_features(const OccupationSet& occs, const EmbeddingTable& table,
                                       const std::string& mode, double beta) {
  OccupationFeatures out;
  for (const auto& o : occs) {
    if (mode == "node") {
      if (auto i = table.find(occ_token(o.id))) {
        out.features.emplace(o.id, Vector(table.row(*i)));
        continue;
      }
    } else if (mode == "text") {
      JobVector v = text_representation(o.title_tokens, o.desc_tokens, table, beta);
      if (v.flag != RepFlag::Empty) {
        out.features.emplace(o.id, std::move(v.value));
        continue;
      }
    } else {
      throw ValidationError("unknown feature mode '" + mode + "'");
    }
    if (o.profile) out.skipped.push_back(o.id);
  }
  return out;
}

EmbeddingTable with_occupation_means(const EmbeddingTable& words, const OccupationSet& occs) {
  EmbeddingTable out = words;
  for (const auto& o : occs) {
    MeanVector m = mean_representation(o.title_tokens, words);
    if (!m.empty()) out.set(occ_token(o.id), m.value);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  Bindings b;

  // Config file values go in first so explicit flags override them.
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
    }
    if (path.empty()) continue;
    try {
      std::ifstream f(path);
      if (!f) throw ValidationError("cannot open config '" + path + "'");
      std::stringstream ss;
      ss << f.rdbuf();
      apply_config_text(cfg, ss.str(), path);
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }

  CLI::App app{"Occupation knowledge-graph embeddings and RIASEC profile ranking"};
  app.require_subcommand(1);
  auto* build = app.add_subcommand("build-graph", "Build the word/occupation graph and report its size");
  auto* walk = app.add_subcommand("walk", "Generate restart random walks over the graph");
  auto* embed = app.add_subcommand("train-embed", "Train skip-gram vectors on a walks file");
  auto* ranker = app.add_subcommand("train-ranker", "Train the RIASEC ranking model");
  auto* eval = app.add_subcommand("eval", "Train on a split of occupations and report NDCG@6");
  auto* sweep = app.add_subcommand("beta-sweep", "Grid-search the title/description weight on job posts");
  auto* jobs = app.add_subcommand("profile-jobs", "Predict RIASEC profiles for job posts");
  auto* nn = app.add_subcommand("neighbors", "Cosine nearest neighbors of a token");
  auto* stats = app.add_subcommand("stats", "Affinity, dimension correlations and model parameters");

  for (auto* s : {build, walk, embed, ranker, eval, sweep, jobs, nn, stats}) add_io(s, cfg);
  add_graph_flags(build, cfg);
  add_graph_flags(walk, cfg);
  add_walk_flags(walk, cfg);
  add_embed_flags(embed, cfg, b);
  add_ranker_flags(ranker, cfg, b);
  add_ranker_flags(eval, cfg, b);
  eval->add_option("--split-frac", cfg.split_frac, "Training share of labeled occupations");
  sweep->add_option("--vectors", cfg.vectors, "Vector file");
  sweep->add_option("--model", cfg.model, "Model file");
  sweep->add_option("--crosswalk", cfg.crosswalks, "Crosswalk TSV; repeat to chain");
  sweep->add_option("--profiles", cfg.profiles, "Target-profiles TSV");
  sweep->add_option("--beta-grid", cfg.beta_grid, "Comma-separated beta values");
  sweep->add_option("--min-coverage", cfg.min_coverage, "Fail when weak-label coverage is lower");
  jobs->add_option("--vectors", cfg.vectors, "Vector file");
  jobs->add_option("--model", cfg.model, "Model file");
  jobs->add_option("--beta", cfg.beta, "Title weight");
  nn->add_option("--vectors", cfg.vectors, "Vector file");
  nn->add_option("--query", cfg.query, "Token or occ::<id>");
  nn->add_option("--top", cfg.top, "Number of neighbors");
  nn->add_option("--filter", cfg.filter, "all | words | occupations");
  stats->add_option("--model", cfg.model, "Model file");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (b.epochs_opt && b.epochs_opt->count()) cfg.epochs = b.epochs;
  if (b.lr_opt && b.lr_opt->count()) cfg.lr = b.lr;
  if (b.subsample_opt && b.subsample_opt->count()) cfg.subsample = b.subsample;
  const std::string command = app.get_subcommands().front()->get_name();
  print_config(out, cfg, command);
  try {
    if (command == "build-graph") return cmd_build_graph(cfg, out);
    if (command == "walk") return cmd_walk(cfg, out);
    if (command == "train-embed") return cmd_train_embed(cfg, out, err);
    if (command == "train-ranker") return cmd_train_ranker(cfg, out, err);
    if (command == "eval") return cmd_eval(cfg, out, err);
    if (command == "beta-sweep") return cmd_beta_sweep(cfg, out, err);
    if (command == "profile-jobs") return cmd_profile_jobs(cfg, out, err);
    if (command == "neighbors") return cmd_neighbors(cfg, out, err);
    if (command == "stats") return cmd_stats(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace riasec
