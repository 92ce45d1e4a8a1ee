// claimrank: check-worthiness ranking experiments over debate transcripts.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>

#include "claimrank/corpus.hpp"
#include "claimrank/errors.hpp"
#include "claimrank/eval.hpp"
#include "claimrank/features.hpp"
#include "claimrank/resources.hpp"
#include "claimrank/strings.hpp"
#include "claimrank/topics.hpp"

namespace fs = std::filesystem;
using namespace claimrank;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string transcript;
  std::string metadata;
  std::string resources;
  std::string embeddings;
  std::string topic_model;
  std::string out;
  std::string model = "fnn";
  std::string models = "random,tfidf,svm,fnn";
  std::string groups = "all";
  std::string sources = "all";
  std::uint64_t seed = 1;
  TrainConfig train;
  int topic_sweeps = kDefaultInferenceSweeps;
  // train-lda
  std::string docs;
  std::string stopwords;
  LdaConfig lda;
  int min_count = 5;
  // rank / extract / train
  std::string debate;
  std::string exclude;
  std::string model_file;
  int top = 0;
};

// Writes through a temporary file and renames it into place.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is required");
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path);
}

LabeledDataset load_dataset(const RunConfig& cfg) {
  require_file(cfg.transcript, "--transcript");
  require_file(cfg.metadata, "--metadata");
  return read_dataset(cfg.transcript, cfg.metadata);
}

std::string resource_root(const RunConfig& cfg) {
  if (!cfg.resources.empty()) return cfg.resources;
  if (const char* env = std::getenv("CLAIMRANK_RESOURCES")) return env;
  return "resources";
}

// Loads what the selected groups need and reports everything missing at once.
ResourceBundle load_resources(const RunConfig& cfg, const LabeledDataset& dataset, const GroupSelection& groups) {
  const auto root = resource_root(cfg);
  ResourceBundle r = fs::is_directory(root) ? ResourceBundle::load_directory(root) : ResourceBundle{};
  r.add_participants(dataset);
  r.topic_sweeps = cfg.topic_sweeps;
  r.topic_seed = derive_seed(cfg.seed, "topic-inference");
  std::vector<std::string> problems;
  if (groups.has(FeatureGroup::Embeddings)) {
    if (cfg.embeddings.empty() || !fs::exists(cfg.embeddings)) {
      problems.push_back("word embeddings (--embeddings" + (cfg.embeddings.empty() ? "" : " " + cfg.embeddings) + ")");
    } else {
      std::unordered_set<std::string> vocab;
      for (const auto& d : dataset.debates)
        for (const auto& s : d.sentences)
          for (const auto& t : tokenize(s.text)) {
            vocab.insert(t.normalized);
            vocab.insert(t.surface);
          }
      EmbeddingLoadOptions opts;
      opts.vocabulary = &vocab;
      r.embeddings = std::make_shared<EmbeddingTable>(load_embeddings(cfg.embeddings, opts));
    }
  }
  if (groups.has(FeatureGroup::Topics)) {
    if (cfg.topic_model.empty() || !fs::exists(cfg.topic_model))
      problems.push_back("topic model (--topic-model" + (cfg.topic_model.empty() ? "" : " " + cfg.topic_model) + ")");
    else
      r.topics = std::make_shared<TopicModel>(TopicModel::load_file(cfg.topic_model));
  }
  GroupSelection rest = groups;
  rest.groups.reset(static_cast<std::size_t>(FeatureGroup::Embeddings));
  rest.groups.reset(static_cast<std::size_t>(FeatureGroup::Topics));
  for (auto& m : r.missing_for(rest)) problems.push_back(m + " under " + root);
  if (!problems.empty()) throw ConfigError("missing resources:\n  " + join(problems, "\n  "));
  return r;
}

Experiment base_experiment(const RunConfig& cfg) {
  Experiment ex;
  ex.groups = GroupSelection::parse(cfg.groups);
  ex.train = cfg.train;
  ex.seed = cfg.seed;
  ex.train.validate();
  return ex;
}

void write_reports(const RunConfig& cfg, const std::string& stem, const std::vector<EvalReport>& reports) {
  const fs::path dir(cfg.out);
  write_atomic(dir / (stem + ".tsv"), [&](std::ostream& o) { write_report_tsv(o, reports); });
  write_atomic(dir / (stem + ".txt"), [&](std::ostream& o) { write_report_text(o, reports); });
  write_atomic(dir / (stem + ".json"), [&](std::ostream& o) { write_report_json(o, reports); });
  write_report_text(std::cout, reports);
}

void echo_config(const CLI::App& app, const RunConfig& cfg) {
  if (cfg.out.empty()) return;
  fs::path dir(cfg.out);
  // Commands whose output is a single file echo next to it.
  if (fs::path(cfg.out).has_extension()) dir = dir.parent_path();
  if (dir.empty()) dir = ".";
  const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
  write_atomic(dir / "run_config.ini", [&](std::ostream& o) {
    o << "# resolved configuration of: claimrank " << sub->get_name() << '\n';
    o << "resources=" << resource_root(cfg) << '\n';
    o << sub->config_to_str(true, false);
  });
}

// -------------------------------------------------------------- commands

int cmd_ingest(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto dataset = load_dataset(cfg);
  if (dataset.sentence_count() == 0) throw ConfigError("the transcript contains no sentences");
  const fs::path dir(cfg.out);
  write_atomic(dir / "dataset.tsv", [&](std::ostream& o) { write_transcript(o, dataset); });
  write_atomic(dir / "metadata.txt", [&](std::ostream& o) { write_metadata(o, metadata_of(dataset)); });
  print_agreement_table(std::cout, dataset_stats(dataset));
  return 0;
}

int cmd_stats(const RunConfig& cfg) {
  const auto dataset = load_dataset(cfg);
  print_agreement_table(std::cout, dataset_stats(dataset));
  std::cout << '\n';
  print_medium_table(std::cout, medium_counts(dataset));
  return 0;
}

int cmd_train_lda(const RunConfig& cfg) {
  if (cfg.docs.empty() || !fs::is_directory(cfg.docs)) throw ConfigError("--docs must name a directory");
  if (cfg.out.empty()) throw ConfigError("--out is required");
  std::optional<CueList> stop;
  if (!cfg.stopwords.empty()) stop = CueList::load(cfg.stopwords);
  const auto docs = read_document_directory(cfg.docs);
  if (docs.empty()) throw ConfigError("no documents under " + cfg.docs);
  const auto corpus = build_lda_corpus(docs, cfg.min_count, stop ? &*stop : nullptr);
  LdaConfig lda = cfg.lda;
  lda.seed = derive_seed(cfg.seed, "lda");
  std::cerr << "training LDA: " << corpus.documents.size() << " documents, " << corpus.token_count() << " tokens, "
            << corpus.vocab.size() << " types, K=" << lda.num_topics << ", " << lda.sweeps << " sweeps\n";
  const auto model = train_lda(corpus, lda);
  write_atomic(cfg.out, [&](std::ostream& o) { model.save(o); }, true);
  return 0;
}

std::vector<std::size_t> training_debates(const LabeledDataset& dataset, const std::string& exclude) {
  std::vector<std::size_t> out;
  bool found = exclude.empty();
  for (std::size_t i = 0; i < dataset.debates.size(); ++i) {
    if (dataset.debates[i].debate_id == exclude) {
      found = true;
      continue;
    }
    out.push_back(i);
  }
  if (!found) throw ConfigError("unknown debate '" + exclude + "'");
  return out;
}

int cmd_extract(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto dataset = load_dataset(cfg);
  const auto ex = base_experiment(cfg);
  const auto resources = load_resources(cfg, dataset, ex.groups);
  const CvContext ctx(dataset, resources, ex.groups);
  // Vocabulary and kNN references come from every debate except --exclude.
  const auto train = training_debates(dataset, cfg.exclude);
  std::vector<const AnalyzedDebate*> training;
  for (auto i : train) training.push_back(&ctx.analyzed()[i]);
  const auto state = FoldState::fit(training, dataset.policy);
  const FeatureRegistry registry(ex.groups);
  write_atomic(cfg.out, [&](std::ostream& o) {
    bool header = true;
    for (std::size_t d = 0; d < dataset.debates.size(); ++d) {
      if (!cfg.debate.empty() && dataset.debates[d].debate_id != cfg.debate) continue;
      Eigen::MatrixXd full = ctx.static_rows(d);
      fill_fold_features(full, ctx.analyzed()[d], ex.groups, state);
      std::vector<int> ids;
      for (const auto& s : dataset.debates[d].sentences) ids.push_back(s.sentence_id);
      std::ostringstream block;
      write_feature_matrix(block, registry, ids, select_columns(full, registry));
      std::string text = block.str();
      if (!header) text.erase(0, text.find('\n') + 1);
      header = false;
      o << text;
    }
  });
  std::cerr << "wrote " << registry.dimension() << " features per sentence to " << cfg.out << '\n';
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto dataset = load_dataset(cfg);
  auto ex = base_experiment(cfg);
  const auto kind = parse_model(cfg.model);
  if (!kind || (*kind != ModelKind::Fnn && *kind != ModelKind::Svm)) throw ConfigError("--model must be fnn or svm");
  ex.model = *kind;
  const auto resources = load_resources(cfg, dataset, ex.groups);
  const CvContext ctx(dataset, resources, ex.groups);
  const auto ranker = train_ranker(ctx, training_debates(dataset, cfg.exclude), ex);
  write_atomic(cfg.out, [&](std::ostream& o) { ranker.save(o); }, true);
  return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto dataset = load_dataset(cfg);
  const auto base = base_experiment(cfg);
  std::vector<ModelKind> kinds;
  for (const auto& name : split(cfg.models, ',')) {
    const auto k = parse_model(name);
    if (!k) throw ConfigError("unknown model '" + name + "'; valid models: random, tfidf, svm, fnn");
    kinds.push_back(*k);
  }
  bool need_features = false;
  for (auto k : kinds) need_features = need_features || k == ModelKind::Fnn || k == ModelKind::Svm;
  GroupSelection groups = base.groups;
  if (!need_features) groups.groups.reset();
  const auto resources = load_resources(cfg, dataset, groups);
  const CvContext ctx(dataset, resources, groups);
  const std::map<ModelKind, std::pair<const char*, double>> names = {{ModelKind::Random, {"Random", .164}},
                                                                    {ModelKind::TfIdf, {"TF.IDF", .314}},
                                                                    {ModelKind::Svm, {"SVM", .395}},
                                                                    {ModelKind::Fnn, {"FNN", .427}}};
  std::vector<EvalReport> reports;
  for (auto k : kinds) {
    Experiment ex = base;
    ex.model = k;
    ex.name = names.at(k).first;
    if (k == ModelKind::Fnn || k == ModelKind::Svm) {
      ex.name += "_" + (base.groups.groups.all() && base.groups.scope == Scope::All ? std::string("All")
                                                                                   : base.groups.describe());
      if (base.groups.groups.all() && base.groups.scope == Scope::All) ex.reference_map = names.at(k).second;
    } else {
      ex.reference_map = names.at(k).second;
    }
    std::cerr << "evaluating " << ex.describe() << '\n';
    reports.push_back(cross_validate(ctx, ex));
  }
  write_reports(cfg, "evaluate", reports);
  return 0;
}

int cmd_ablate(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto dataset = load_dataset(cfg);
  auto base = base_experiment(cfg);
  GroupSelection groups;
  for (auto g : ablation_groups()) groups.groups.set(static_cast<std::size_t>(g));
  const auto resources = load_resources(cfg, dataset, groups);
  const CvContext ctx(dataset, resources, groups);
  write_reports(cfg, "ablate", ablate_groups(ctx, base));
  return 0;
}

int cmd_context(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto dataset = load_dataset(cfg);
  auto base = base_experiment(cfg);
  const auto resources = load_resources(cfg, dataset, base.groups);
  const CvContext ctx(dataset, resources, base.groups);
  write_reports(cfg, "context", context_split(ctx, base));
  return 0;
}

int cmd_per_source(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const auto dataset = load_dataset(cfg);
  auto base = base_experiment(cfg);
  std::vector<Source> sources;
  if (fold_case(cfg.sources) == "all") {
    sources.assign(kAllSources.begin(), kAllSources.end());
  } else {
    for (const auto& name : split(cfg.sources, ',')) {
      const auto s = parse_source(std::string(trim(name)));
      if (!s) throw ConfigError("unknown source '" + name + "'");
      sources.push_back(*s);
    }
  }
  const auto resources = load_resources(cfg, dataset, base.groups);
  const CvContext ctx(dataset, resources, base.groups);
  write_reports(cfg, "per_source", per_source(ctx, base, sources));
  return 0;
}

int cmd_rank(const RunConfig& cfg) {
  require_file(cfg.model_file, "--model-file");
  if (cfg.top < 0) throw ConfigError("--top must not be negative");
  TrainedRanker ranker;
  {
    std::ifstream in(cfg.model_file, std::ios::binary);
    ranker = TrainedRanker::load(in);
  }
  const auto dataset = load_dataset(cfg);
  std::size_t index = 0;
  if (!cfg.debate.empty()) {
    bool found = false;
    for (std::size_t i = 0; i < dataset.debates.size(); ++i)
      if (dataset.debates[i].debate_id == cfg.debate) {
        index = i;
        found = true;
      }
    if (!found) throw ConfigError("unknown debate '" + cfg.debate + "'");
  } else if (dataset.debates.size() != 1) {
    throw ConfigError("the transcript holds several debates; choose one with --debate");
  }
  const auto resources = load_resources(cfg, dataset, ranker.groups);
  const auto& debate = dataset.debates[index];
  const auto analyzed = analyze_debate(debate, resources);
  const auto scores = score_debate(ranker, analyzed, static_feature_matrix(analyzed, ranker.groups, resources));
  const auto ranking = rank_sentences(debate.sentences, scores);
  const std::size_t rows = cfg.top > 0 ? std::min<std::size_t>(static_cast<std::size_t>(cfg.top), ranking.size())
                                       : ranking.size();
  auto emit = [&](std::ostream& o) {
    o << "rank\tscore\tsentence_index\tspeaker\ttext\tgold_sources\n";
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& item = ranking.items[r];
      const auto& s = debate.sentences[static_cast<std::size_t>(item.index_in_debate)];
      std::vector<std::string> gold;
      for (auto src : kAllSources)
        if (s.annotated_by.test(static_cast<std::size_t>(src))) gold.emplace_back(source_name(src));
      char score[32];
      std::snprintf(score, sizeof score, "%.6f", item.score);
      o << r + 1 << '\t' << score << '\t' << s.index_in_debate << '\t' << s.speaker << '\t' << s.text << '\t'
        << join(gold, ",") << '\n';
    }
  };
  if (cfg.out.empty())
    emit(std::cout);
  else
    write_atomic(cfg.out, emit);
  return 0;
}

void add_dataset_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--transcript", cfg.transcript, "transcript TSV (all debates)");
  cmd->add_option("--metadata", cfg.metadata, "debate metadata file");
}

void add_resource_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--resources", cfg.resources, "resource directory (default $CLAIMRANK_RESOURCES, then ./resources)");
  cmd->add_option("--embeddings", cfg.embeddings, "word embedding file (text, optionally .gz)");
  cmd->add_option("--topic-model", cfg.topic_model, "topic model written by train-lda");
  cmd->add_option("--topic-sweeps", cfg.topic_sweeps, "Gibbs sweeps for topic inference")->capture_default_str();
}

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--groups", cfg.groups, "feature groups: all or a comma list")->capture_default_str();
  cmd->add_option("--epochs", cfg.train.epochs, "FNN epochs")->capture_default_str();
  cmd->add_option("--learning-rate", cfg.train.learning_rate, "FNN learning rate")->capture_default_str();
  cmd->add_option("--batch-size", cfg.train.batch_size, "FNN minibatch size")->capture_default_str();
  cmd->add_flag("--class-weighting", cfg.train.class_weighting, "weight classes by inverse frequency");
  cmd->add_option("--svm-c", cfg.train.svm_c, "SVM regularization C")->capture_default_str();
  cmd->add_option("--svm-gamma", cfg.train.svm_gamma, "RBF gamma; <= 0 means 1/dimension")->capture_default_str();
  cmd->add_option("--svm-tolerance", cfg.train.svm_tolerance, "SMO KKT tolerance")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank debate sentences by check-worthiness and evaluate the rankings"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "seed for every random choice of the run")->capture_default_str();
  app.add_option("--out", cfg.out, "output file or directory");

  auto* ingest = app.add_subcommand("ingest", "parse a transcript and write the canonical dataset");
  add_dataset_options(ingest, cfg);

  auto* stats = app.add_subcommand("stats", "print agreement and per-source tables");
  add_dataset_options(stats, cfg);

  auto* lda = app.add_subcommand("train-lda", "train a topic model on a document directory");
  lda->add_option("--docs,--corpus", cfg.docs, "directory of plain-text documents")->required();
  lda->add_option("--stopwords", cfg.stopwords, "stopword list");
  lda->add_option("--topics", cfg.lda.num_topics, "number of topics")->capture_default_str();
  lda->add_option("--sweeps", cfg.lda.sweeps, "Gibbs sweeps")->capture_default_str();
  lda->add_option("--alpha", cfg.lda.alpha, "document-topic prior; <= 0 means 50/topics")->capture_default_str();
  lda->add_option("--beta", cfg.lda.beta, "topic-word prior")->capture_default_str();
  lda->add_option("--min-count", cfg.min_count, "minimum corpus frequency of a word")->capture_default_str();

  auto* extract = app.add_subcommand("extract", "write feature vectors for every sentence");
  add_dataset_options(extract, cfg);
  add_resource_options(extract, cfg);
  add_model_options(extract, cfg);
  extract->add_option("--exclude", cfg.exclude, "debate left out of the vocabulary and kNN references");
  extract->add_option("--debate", cfg.debate, "only write this debate");

  auto* train = app.add_subcommand("train", "train a ranker and save it");
  add_dataset_options(train, cfg);
  add_resource_options(train, cfg);
  add_model_options(train, cfg);
  train->add_option("--model", cfg.model, "fnn or svm")->capture_default_str();
  train->add_option("--exclude", cfg.exclude, "debate held out of training");

  auto* evaluate = app.add_subcommand("evaluate", "leave-one-debate-out evaluation");
  add_dataset_options(evaluate, cfg);
  add_resource_options(evaluate, cfg);
  add_model_options(evaluate, cfg);
  evaluate->add_option("--model", cfg.models, "comma list of random, tfidf, svm, fnn")->capture_default_str();

  auto* ablate = app.add_subcommand("ablate", "evaluate each feature group on its own");
  add_dataset_options(ablate, cfg);
  add_resource_options(ablate, cfg);
  add_model_options(ablate, cfg);

  auto* context = app.add_subcommand("context", "all features vs. without and with only contextual ones");
  add_dataset_options(context, cfg);
  add_resource_options(context, cfg);
  add_model_options(context, cfg);

  auto* per_src = app.add_subcommand("per-source", "train on one source or on all, test on one source");
  add_dataset_options(per_src, cfg);
  add_resource_options(per_src, cfg);
  add_model_options(per_src, cfg);
  per_src->add_option("--source", cfg.sources, "source name(s), comma separated, or all")->capture_default_str();

  auto* rank = app.add_subcommand("rank", "rank the sentences of one debate with a saved model");
  add_dataset_options(rank, cfg);
  add_resource_options(rank, cfg);
  rank->add_option("--model-file", cfg.model_file, "model written by train");
  rank->add_option("--debate", cfg.debate, "debate to rank");
  rank->add_option("--top", cfg.top, "only print the first N sentences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  const std::map<CLI::App*, std::function<int(const RunConfig&)>> commands = {
      {ingest, cmd_ingest}, {stats, cmd_stats},       {lda, cmd_train_lda}, {extract, cmd_extract},
      {train, cmd_train},   {evaluate, cmd_evaluate}, {ablate, cmd_ablate}, {context, cmd_context},
      {per_src, cmd_per_source}, {rank, cmd_rank}};
  try {
    auto* sub = app.get_subcommands().front();
    if (sub != rank && sub != stats) echo_config(app, cfg);
    return commands.at(sub)(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "claimrank: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "claimrank: " << e.what() << '\n';
    return kExitError;
  }
}
