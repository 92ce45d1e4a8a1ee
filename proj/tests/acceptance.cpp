// Acceptance run over the bundled fixture corpus. Prints one PASS/FAIL line
// per criterion and exits non-zero when any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>

#include "claimrank/corpus.hpp"
#include "claimrank/eval.hpp"
#include "claimrank/features.hpp"
#include "claimrank/models.hpp"
#include "claimrank/random.hpp"
#include "claimrank/topics.hpp"

namespace fs = std::filesystem;
using namespace claimrank;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int n, bool ok, const std::string& detail, double secs, double budget) {
  const bool in_time = secs < budget;
  std::ostringstream t;
  t.precision(3);
  t << std::fixed << secs << "s (budget " << budget << "s)";
  std::cout << (ok && in_time ? "PASS" : "FAIL") << " criterion " << n << ": " << detail << "; " << t.str()
            << (in_time ? "" : " OVER BUDGET") << std::endl;
  if (!(ok && in_time)) ++failures;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ------------------------------------------------------------ 1: dataset

void dataset_counts(const std::string& fixture) {
  const auto t0 = Clock::now();
  const auto ds = read_dataset(fixture + "/transcript.tsv", fixture + "/metadata.txt");
  const auto stats = dataset_stats(ds);
  const auto media = medium_counts(ds);
  const double secs = seconds_since(t0);

  std::vector<std::string> wrong;
  if (stats.total_sentences != 5415) wrong.push_back("total " + std::to_string(stats.total_sentences));
  const std::array<std::size_t, 9> cumulative = {880, 388, 197, 97, 57, 31, 12, 7, 1};  // at least 1..9
  for (std::size_t n = 1; n <= 9; ++n)
    if (stats.at_least[n] != cumulative[n - 1])
      wrong.push_back(">=" + std::to_string(n) + ": " + std::to_string(stats.at_least[n]));
  const std::map<Source, std::size_t> totals = {{Source::NPR, 371}, {Source::PolitiFact, 253},
                                                {Source::WashingtonPost, 95}};
  for (const auto& [src, want] : totals)
    if (media.total[static_cast<std::size_t>(src)] != want)
      wrong.push_back(std::string(source_name(src)) + " " +
                      std::to_string(media.total[static_cast<std::size_t>(src)]));
  if (media.annotations_per_debate != std::vector<std::size_t>{378, 391, 428, 473})
    wrong.push_back("annotations per debate");
  if (media.annotated_sentences_per_debate != std::vector<std::size_t>{218, 235, 183, 244})
    wrong.push_back("annotated sentences per debate");

  report(1, wrong.empty(),
         wrong.empty() ? "5415 sentences, agreement and per-medium tables exact"
                       : "mismatch: " + [&] {
                           std::string s;
                           for (const auto& w : wrong) s += w + "; ";
                           return s;
                         }(),
         secs, 5);
}

// ------------------------------------------------------------ 2: metrics

double brute_ap(const std::vector<int>& rel) {
  double r = 0, total = 0;
  for (int v : rel) r += v;
  for (std::size_t i = 0; i < rel.size(); ++i)
    if (rel[i])
      for (std::size_t j = 0; j <= i; ++j)
        if (rel[j]) total += 1.0 / static_cast<double>(i + 1);
  return total / r;
}

double brute_p_at(const std::vector<int>& rel, int k) {
  int hits = 0;
  for (std::size_t i = 0; i < rel.size() && static_cast<int>(i) < k; ++i) hits += rel[i];
  return static_cast<double>(hits) / k;
}

void metric_oracle() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "acceptance-metrics"));
  double worst = 0;
  std::vector<double> aps, oracle_aps;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng.below(50);
    std::vector<int> rel(n);
    int r = 0;
    const double rate = rng.uniform();
    for (auto& v : rel) r += (v = rng.bernoulli(rate) ? 1 : 0);
    if (r == 0) rel[rng.below(n)] = ++r;
    const auto m = compute_metrics(rel);
    const double ap = brute_ap(rel);
    worst = std::max(worst, std::abs(m.average_precision - ap));
    worst = std::max(worst, std::abs(m.r_precision - brute_p_at(rel, r)));
    for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i)
      worst = std::max(worst, std::abs(m.precision_at[i] - brute_p_at(rel, kPrecisionCutoffs[i])));
    aps.push_back(m.average_precision);
    oracle_aps.push_back(ap);
  }
  double sum = 0;
  for (double a : oracle_aps) sum += a;
  worst = std::max(worst, std::abs(mean_average_precision(aps) - sum / 1000.0));
  std::ostringstream d;
  d << "1000 instances, max |diff| = " << worst << " (tolerance 1e-12)";
  report(2, worst <= 1e-12, d.str(), seconds_since(t0), 10);
}

// ------------------------------------------------------------ 3: gradients

void gradient_check() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "acceptance-gradients"));
  auto model = FnnModel<double>::glorot({10, 20, 5, 2}, rng);
  for (std::size_t l = 0; l < model.num_layers(); ++l)
    for (Eigen::Index i = 0; i < model.bias(l).size(); ++i) model.bias(l)(i) = rng.uniform(-0.1, 0.1);
  Eigen::MatrixXd x(8, 10);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  const std::vector<int> y = {1, 0, 1, 1, 0, 0, 1, 0};
  const auto g = fnn_gradients(model, x, y);
  const double h = 1e-5;
  double worst = 0;
  auto probe = [&](double& param, double analytic) {
    const double keep = param;
    param = keep + h;
    const double up = fnn_gradients(model, x, y).loss;
    param = keep - h;
    const double down = fnn_gradients(model, x, y).loss;
    param = keep;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), 1e-8));
  };
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < model.weight(l).size(); ++i) probe(model.weight(l).data()[i], g.weights[l].data()[i]);
    for (Eigen::Index i = 0; i < model.bias(l).size(); ++i) probe(model.bias(l)(i), g.biases[l](i));
  }
  std::ostringstream d;
  d << "10-20-5-2, 8 rows, max relative error " << worst << " (tolerance 1e-4)";
  report(3, worst < 1e-4, d.str(), seconds_since(t0), 5);
}

// ------------------------------------------------------------ 4: LDA

void lda_toy() {
  const auto t0 = Clock::now();
  const std::vector<std::string> fruit = {"apple", "banana", "cherry", "grape", "melon"};
  const std::vector<std::string> policy = {"tariff", "taxes", "trade", "treaty", "tribunal"};
  std::string a, b;
  for (int rep = 0; rep < 10; ++rep)
    for (int i = 0; i < 5; ++i) {
      a += fruit[static_cast<std::size_t>(i)] + " ";
      b += policy[static_cast<std::size_t>(i)] + " ";
    }
  const auto corpus = build_lda_corpus({a, b}, 1);
  LdaConfig cfg;
  cfg.num_topics = 2;
  cfg.alpha = 0.1;
  cfg.sweeps = 200;
  cfg.seed = derive_seed(1, "acceptance-lda");
  const auto n = static_cast<std::int64_t>(corpus.token_count());
  bool conserved = true;
  LdaSweepObserver obs;
  obs.after_sweep = [&](const GibbsSampler& s) {
    conserved = conserved && s.topic_totals().sum() == n && s.doc_topic().sum() == n &&
                (s.topic_word().rowwise().sum() - s.topic_totals()).isZero() && s.topic_word().minCoeff() >= 0;
    for (std::size_t d = 0; d < corpus.documents.size(); ++d)
      conserved = conserved && s.doc_topic().row(static_cast<Eigen::Index>(d)).sum() ==
                                   static_cast<std::int64_t>(corpus.documents[d].size());
  };
  const auto model = train_lda(corpus, cfg, obs);

  double worst_sum = 0;
  for (Eigen::Index k = 0; k < model.phi().rows(); ++k)
    worst_sum = std::max(worst_sum, std::abs(model.phi().row(k).sum() - 1.0));
  for (const auto& text : {a, b, std::string("apple trade"), std::string()})
    worst_sum = std::max(worst_sum, std::abs(infer_topics(model, tokenize(text), 50, 3).sum() - 1.0));

  std::set<bool> top_is_fruit;
  for (Eigen::Index k = 0; k < model.phi().rows(); ++k) {
    Eigen::Index top = 0;
    model.phi().row(k).maxCoeff(&top);
    const auto& w = model.vocab().word(static_cast<int>(top));
    top_is_fruit.insert(std::find(fruit.begin(), fruit.end(), w) != fruit.end());
  }
  const bool separated = top_is_fruit.size() == 2;
  std::ostringstream d;
  d << "conservation " << (conserved ? "held" : "broken") << " over 200 sweeps, max |sum-1| = " << worst_sum
    << ", topics " << (separated ? "separated" : "not separated");
  report(4, conserved && worst_sum <= 1e-9 && separated, d.str(), seconds_since(t0), 30);
}

// ------------------------------------------------------------ shared setup

struct Setup {
  LabeledDataset dataset;
  ResourceBundle resources;
  std::string topic_model_path;
};

Setup prepare(const std::string& fixture, const std::string& resource_dir, const fs::path& work) {
  Setup s;
  s.dataset = read_dataset(fixture + "/transcript.tsv", fixture + "/metadata.txt");
  s.resources = ResourceBundle::load_directory(resource_dir);
  s.resources.add_participants(s.dataset);
  s.resources.topic_seed = derive_seed(1, "topic-inference");

  std::unordered_set<std::string> vocab;
  for (const auto& d : s.dataset.debates)
    for (const auto& sent : d.sentences)
      for (const auto& t : tokenize(sent.text)) {
        vocab.insert(t.normalized);
        vocab.insert(t.surface);
      }
  EmbeddingLoadOptions opts;
  opts.vocabulary = &vocab;
  s.resources.embeddings = std::make_shared<EmbeddingTable>(load_embeddings(fixture + "/embeddings.txt", opts));

  const auto t0 = Clock::now();
  const auto stop = CueList::load(resource_dir + "/stopwords.txt");
  const auto corpus = build_lda_corpus(read_document_directory(fixture + "/speeches"), 2, &stop);
  LdaConfig lda;
  lda.seed = derive_seed(1, "lda");
  const auto model = train_lda(corpus, lda);
  s.topic_model_path = (work / "topics.bin").string();
  {
    std::ofstream out(s.topic_model_path, std::ios::binary);
    model.save(out);
  }
  s.resources.topics = std::make_shared<TopicModel>(model);
  std::cout << "  topic model: K=" << lda.num_topics << ", " << lda.sweeps << " sweeps, " << corpus.documents.size()
            << " documents, " << corpus.token_count() << " tokens, " << seconds_since(t0) << "s" << std::endl;
  return s;
}

// ------------------------------------------------------------ 5: dimensions

void dimensional_contract(const Setup& s) {
  const auto t0 = Clock::now();
  const auto sel = GroupSelection::all();
  const FeatureRegistry registry(sel);
  std::vector<std::string> problems;
  if (registry.dimension() != 1707) problems.push_back("registry dimension " + std::to_string(registry.dimension()));
  for (auto g : all_groups()) {
    const auto [b, e] = registry.span(g);
    if (e - b != group_dimension(g)) problems.push_back(std::string(group_name(g)) + " span " + std::to_string(e - b));
  }

  // Full extraction: every sentence, state fit on all debates.
  const auto analyzed = analyze_dataset(s.dataset, s.resources);
  std::vector<const AnalyzedDebate*> all;
  for (const auto& a : analyzed) all.push_back(&a);
  const auto state = FoldState::fit(all, s.dataset.policy);
  std::vector<Eigen::MatrixXd> rows;
  for (const auto& a : analyzed) {
    rows.push_back(static_feature_matrix(a, sel, s.resources));
    fill_fold_features(rows.back(), a, sel, state);
  }
  const double extract_secs = seconds_since(t0);

  // Audit: every sentence, every block at its declared size and in place.
  std::array<const Lexicon*, kNumLinguisticLexicons> lex{};
  for (std::size_t i = 0; i < lex.size(); ++i) lex[i] = &*s.resources.linguistic[i];
  std::size_t audited = 0, bad = 0;
  for (std::size_t d = 0; d < analyzed.size(); ++d) {
    const auto& a = analyzed[d];
    SegmentCache cache;
    if (rows[d].cols() != kFullDimension || !rows[d].allFinite()) ++bad;
    for (int i = 0; i < static_cast<int>(a.tokens.size()); ++i) {
      const SentenceView v{a, i};
      const auto& tok = v.tokens();
      const auto f = knn_features(knn_query(v), state.knn_training, state.knn_politifact);
      const std::array<Eigen::VectorXd, kNumGroups> blocks = {
          cb_features(tok, state.tfidf, *s.resources.gazetteer, *s.resources.polarity),
          sentiment_features(tok, *s.resources.polarity),
          ne_count_feature(tok, *s.resources.gazetteer),
          linguistic_features(tok, lex),
          tense_feature(tok),
          length_feature(v.sentence().text),
          position_features(v.sentence(), v.segment()),
          segment_size_features(v.sentence(), *a.debate),
          metadata_features(v.sentence(), tok, *a.debate),
          topic_features(v, *s.resources.topics, s.resources.topic_sweeps, s.resources.topic_seed, &cache),
          embedding_features(v, *s.resources.embeddings, &cache),
          discourse_features(v, *s.resources.discourse),
          contradiction_features(v, *s.resources.negations),
          Eigen::Vector3d(f[0], f[1], f[2])};
      for (auto g : all_groups()) {
        const auto& blk = blocks[static_cast<std::size_t>(g)];
        const auto [b, e] = registry.span(g);
        if (blk.size() != group_dimension(g) || rows[d].row(i).segment(b, e - b).transpose() != blk) ++bad;
      }
      ++audited;
    }
  }
  if (bad) problems.push_back(std::to_string(bad) + " block mismatches");
  std::ostringstream det;
  det << "dimension 1707, 14 blocks at declared sizes, audit of " << audited << " sentences "
      << (bad ? "failed" : "clean") << ", extraction " << extract_secs << "s";
  for (const auto& p : problems) det << "; " << p;
  report(5, problems.empty() && audited == s.dataset.sentence_count(), det.str(), seconds_since(t0), 300);
}

// ------------------------------------------------------------ 6: kNN oracle

struct Candidate {
  int id;
  std::string speaker;
  std::set<std::string> words;
  bool positive;
};

double scan(const std::set<std::string>& query, int query_id, const std::vector<Candidate>& pool,
            const std::string* speaker) {
  long best = 0;
  bool positive = false;
  for (const auto& c : pool) {
    if (c.id == query_id || (speaker && c.speaker != *speaker)) continue;
    long ov = 0;
    for (const auto& w : query) ov += static_cast<long>(c.words.count(w));
    if (ov > best) {
      best = ov;
      positive = c.positive;
    } else if (ov == best && c.positive) {
      positive = true;
    }
  }
  return best == 0 ? 0.0 : (positive ? static_cast<double>(best) : -static_cast<double>(best));
}

std::set<std::string> words_of(const std::string& text) {
  const auto types = word_types(tokenize(text));
  return {types.begin(), types.end()};
}

// Windows of the fixture debates, up to 100 sentences each, split into a
// training and a query half.
void knn_oracle(const Setup& s) {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "acceptance-knn"));
  ResourceBundle none;
  std::size_t checked = 0, wrong = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto& src = s.dataset.debates[rng.below(s.dataset.debates.size())];
    const auto n = 2 + rng.below(99);
    const auto start = rng.below(src.sentences.size() - n);
    Debate train_d, query_d;
    train_d.debate_id = "train";
    query_d.debate_id = "query";
    for (std::size_t i = 0; i < n; ++i) {
      auto sent = src.sentences[start + i];
      auto& dst = i < n / 2 ? train_d : query_d;
      sent.index_in_debate = static_cast<int>(dst.sentences.size());
      dst.sentences.push_back(sent);
    }
    const auto at = analyze_debate(train_d, none);
    const auto aq = analyze_debate(query_d, none);
    const auto state = FoldState::fit({&at}, s.dataset.policy);
    std::vector<Candidate> pool, politifact;
    for (const auto& sent : train_d.sentences) {
      pool.push_back({sent.sentence_id, sent.speaker, words_of(sent.text), s.dataset.label(sent) == 1});
      if (sent.annotated_by.test(static_cast<std::size_t>(Source::PolitiFact)))
        politifact.push_back({sent.sentence_id, sent.speaker, words_of(sent.text), true});
    }
    for (const auto* a : {&at, &aq})
      for (int i = 0; i < static_cast<int>(a->tokens.size()); ++i) {
        const auto& sent = a->debate->sentences[static_cast<std::size_t>(i)];
        const auto f = knn_features(knn_query({*a, i}), state.knn_training, state.knn_politifact);
        const auto w = words_of(sent.text);
        wrong += f[0] != scan(w, sent.sentence_id, pool, nullptr);
        wrong += f[1] != scan(w, sent.sentence_id, pool, &sent.speaker);
        wrong += f[2] != scan(w, sent.sentence_id, politifact, nullptr);
        ++checked;
      }
  }
  std::ostringstream d;
  d << "60 fixtures of 2..100 sentences, " << checked << " sentences, " << wrong << " disagreements";
  report(6, wrong == 0 && checked > 0, d.str(), seconds_since(t0), 60);
}

// ------------------------------------------------------------ 7: direction

void directional(const Setup& s) {
  const auto t0 = Clock::now();
  const CvContext ctx(s.dataset, s.resources);
  auto run = [&](ModelKind kind, Scope scope) {
    Experiment ex;
    ex.model = kind;
    ex.groups.scope = scope;
    ex.seed = 1;
    ex.name = std::string(model_name(kind));
    const auto t = Clock::now();
    const double map = cross_validate(ctx, ex).mean.average_precision;
    std::cout << "  " << ex.describe() << ": MAP " << map << " (" << seconds_since(t) << "s)" << std::endl;
    return map;
  };
  const double random = run(ModelKind::Random, Scope::All);
  const double tfidf = run(ModelKind::TfIdf, Scope::All);
  const double all = run(ModelKind::Fnn, Scope::All);
  const double no_ctx = run(ModelKind::Fnn, Scope::SentenceOnly);
  const double secs = seconds_since(t0);
  std::ostringstream a, b, c;
  a << "(a) FNN all " << all << " >= 2 x random " << random;
  b << "(b) FNN all " << all << " > TF.IDF " << tfidf;
  c << "(c) FNN all " << all << " >= no-contextual " << no_ctx;
  report(7, all >= 2 * random, a.str(), secs, 1800);
  report(7, all > tfidf, b.str(), secs, 1800);
  report(7, all >= no_ctx, c.str(), secs, 1800);
}

// ------------------------------------------------------------ 8: determinism

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + cli + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void determinism(const std::string& cli, const std::string& fixture, const std::string& resource_dir,
                 const Setup& s, const fs::path& work) {
  const auto t0 = Clock::now();
  const std::string common = "evaluate --model random,tfidf,fnn --epochs 5 --transcript " + fixture +
                             "/transcript.tsv --metadata " + fixture + "/metadata.txt --resources " + resource_dir +
                             " --embeddings " + fixture + "/embeddings.txt --topic-model " + s.topic_model_path;
  std::vector<std::string> problems;
  for (const char* run : {"eval_a", "eval_b"}) {
    fs::remove_all(work / run);
    const int rc = run_cli(cli, common + " --out " + (work / run).string(), work / (std::string(run) + ".log"));
    if (rc != 0) problems.push_back(std::string(run) + " exited " + std::to_string(rc));
  }
  for (const char* f : {"evaluate.tsv", "evaluate.txt", "evaluate.json"}) {
    const auto x = slurp(work / "eval_a" / f), y = slurp(work / "eval_b" / f);
    if (x.empty() || x != y) problems.push_back(std::string(f) + " differs");
  }
  std::string det = "two evaluate runs (random, tfidf, fnn all groups, 5 epochs): ";
  det += problems.empty() ? "tsv, txt and json byte-identical" : problems.front();
  report(8, problems.empty(), det, seconds_since(t0), 1800);
}

// ------------------------------------------------------------ 9: hygiene

void fold_hygiene(const Setup& s) {
  const auto t0 = Clock::now();
  const CvContext base(s.dataset, s.resources);
  std::size_t compared = 0, changed = 0;
  for (const auto& fold : base.folds()) {
    auto mutated = s.dataset;
    Rng rng(derive_seed(1, "acceptance-mutate", fold.test));
    for (auto& sent : mutated.debates[fold.test].sentences) {
      sent.text = "China " + sent.text + " not never isis mexico " + std::to_string(rng.below(1000000));
      if (rng.bernoulli(0.3)) sent.text = "However, " + sent.text;
    }
    const CvContext other(mutated, s.resources);
    const auto a = fold_data(base, fold, GroupSelection::all(), s.dataset.policy);
    const auto b = fold_data(other, other.folds()[static_cast<std::size_t>(fold.index)], GroupSelection::all(),
                             mutated.policy);
    std::ostringstream sa, sb;
    a.state.save(sa);
    b.state.save(sb);
    if (a.train.rows() != b.train.rows() || a.train != b.train || sa.str() != sb.str()) ++changed;
    if (a.test == b.test) ++changed;  // the mutation must reach the test rows
    compared += static_cast<std::size_t>(a.train.rows());
  }
  std::ostringstream d;
  d << "test-debate text mutated in each of 4 folds; " << compared << " training vectors and fold states "
    << (changed ? "changed" : "unchanged");
  report(9, changed == 0, d.str(), seconds_since(t0), 600);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"claimrank acceptance run"};
  std::string fixture, resource_dir, cli, work;
  app.add_option("--fixture", fixture, "fixture corpus directory")->required();
  app.add_option("--resources", resource_dir, "resource directory")->required();
  app.add_option("--cli", cli, "claimrank executable")->required();
  app.add_option("--work", work, "scratch directory")->required();
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  try {
    dataset_counts(fixture);
    metric_oracle();
    gradient_check();
    lda_toy();
    const auto setup = prepare(fixture, resource_dir, work);
    dimensional_contract(setup);
    knn_oracle(setup);
    directional(setup);
    determinism(cli, fixture, resource_dir, setup, work);
    fold_hygiene(setup);
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures ? "FAILED: " + std::to_string(failures) + " check(s)" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
