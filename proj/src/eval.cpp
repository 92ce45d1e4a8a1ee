#include "claimrank/eval.hpp"

#include <cstdio>
#include <map>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "claimrank/log.hpp"
#include "claimrank/strings.hpp"

namespace claimrank {

double average_precision(const std::vector<int>& relevance) {
  double sum = 0.0;
  int hits = 0;
  for (std::size_t k = 0; k < relevance.size(); ++k) {
    if (relevance[k] == 0) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  if (hits == 0) throw Error("average precision is undefined without relevant sentences");
  return sum / hits;
}

double precision_at_k(const std::vector<int>& relevance, int k) {
  if (k < 1) throw Error("precision_at_k: k must be at least 1");
  const std::size_t top = std::min(relevance.size(), static_cast<std::size_t>(k));
  int hits = 0;
  for (std::size_t i = 0; i < top; ++i) hits += relevance[i] != 0;
  return static_cast<double>(hits) / k;
}

double r_precision(const std::vector<int>& relevance) {
  int r = 0;
  for (int v : relevance) r += v != 0;
  if (r == 0) throw Error("R-precision is undefined without relevant sentences");
  int hits = 0;
  for (int i = 0; i < r; ++i) hits += relevance[static_cast<std::size_t>(i)] != 0;
  return static_cast<double>(hits) / r;
}

double mean_average_precision(const std::vector<double>& aps) {
  if (aps.empty()) throw Error("MAP needs at least one debate");
  double sum = 0.0;
  for (double a : aps) sum += a;
  return sum / static_cast<double>(aps.size());
}

std::vector<int> ranked_relevance(const RankedList& ranking, const std::vector<int>& labels) {
  std::vector<int> rel;
  rel.reserve(ranking.size());
  for (const auto& item : ranking.items) rel.push_back(labels.at(static_cast<std::size_t>(item.index_in_debate)));
  return rel;
}

MetricSet compute_metrics(const std::vector<int>& relevance) {
  MetricSet m;
  m.average_precision = average_precision(relevance);
  m.r_precision = r_precision(relevance);
  for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i)
    m.precision_at[i] = precision_at_k(relevance, kPrecisionCutoffs[i]);
  return m;
}

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Fnn:
      return "fnn";
    case ModelKind::Svm:
      return "svm";
    case ModelKind::Random:
      return "random";
    case ModelKind::TfIdf:
      return "tfidf";
  }
  return "?";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  const auto n = fold_case(trim(name));
  for (auto k : {ModelKind::Fnn, ModelKind::Svm, ModelKind::Random, ModelKind::TfIdf})
    if (model_name(k) == n) return k;
  return std::nullopt;
}

std::string Experiment::describe() const {
  std::string out = std::string(model_name(model));
  if (model == ModelKind::Fnn || model == ModelKind::Svm) out += " groups=" + groups.describe();
  out += " train=" + train_policy.describe() + " test=" + test_policy.describe();
  out += " seed=" + std::to_string(seed);
  return out;
}

CvContext::CvContext(const LabeledDataset& dataset, const ResourceBundle& resources, const GroupSelection& groups)
    : dataset_(dataset), resources_(resources), groups_(groups) {
  analyzed_ = analyze_dataset(dataset, resources);
  for (const auto& a : analyzed_) static_.push_back(static_feature_matrix(a, groups, resources));
  folds_ = split_folds(dataset);
}

namespace {

std::vector<int> labels_of(const Debate& d, const LabelPolicy& policy) {
  std::vector<int> y;
  y.reserve(d.sentences.size());
  for (const auto& s : d.sentences) y.push_back(policy.label(s));
  return y;
}

std::uint64_t fold_seed(std::uint64_t seed, std::string_view name, int fold) {
  return derive_seed(seed, name) + static_cast<std::uint64_t>(fold);
}

Eigen::MatrixXd stack(const std::vector<Eigen::MatrixXd>& parts, Eigen::Index cols) {
  Eigen::Index rows = 0;
  for (const auto& p : parts) rows += p.rows();
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return out;
}

RankedList fold_ranking(const CvContext& ctx, const Fold& fold, const Experiment& ex) {
  const auto& test = ctx.dataset().debates[fold.test];
  switch (ex.model) {
    case ModelKind::Random:
      return random_baseline(test.sentences, fold_seed(ex.seed, "random-baseline", fold.index));
    case ModelKind::TfIdf: {
      std::vector<const AnalyzedDebate*> training;
      for (auto i : fold.train) training.push_back(&ctx.analyzed()[i]);
      const auto state = FoldState::fit(training, ex.train_policy);
      auto rows_of = [&](const AnalyzedDebate& a) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(a.tokens.size()), state.tfidf.width());
        for (std::size_t i = 0; i < a.tokens.size(); ++i)
          x.row(static_cast<Eigen::Index>(i)) = state.tfidf.transform(a.tokens[i]).transpose();
        return x;
      };
      std::vector<Eigen::MatrixXd> parts;
      std::vector<int> y;
      for (const auto* a : training) {
        parts.push_back(rows_of(*a));
        const auto l = labels_of(*a->debate, ex.train_policy);
        y.insert(y.end(), l.begin(), l.end());
      }
      const Eigen::MatrixXd train = stack(parts, state.tfidf.width());
      const auto scaler = fit_scaler(train);
      TrainConfig cfg = ex.train;
      cfg.seed = fold_seed(ex.seed, "model", fold.index);
      return tfidf_baseline(apply_scaler(scaler, train), y, apply_scaler(scaler, rows_of(ctx.analyzed()[fold.test])),
                            test.sentences, cfg);
    }
    case ModelKind::Fnn:
    case ModelKind::Svm: {
      const auto data = fold_data(ctx, fold, ex.groups, ex.train_policy);
      TrainConfig cfg = ex.train;
      cfg.seed = fold_seed(ex.seed, "model", fold.index);
      Eigen::VectorXd scores;
      if (ex.model == ModelKind::Fnn) {
        const auto model = train_fnn<double>(data.train, data.train_labels, cfg);
        scores = fnn_scores(model, data.test);
      } else {
        scores = svm_scores(train_svm_rbf(data.train, data.train_labels, cfg), data.test);
      }
      return rank_sentences(test.sentences, scores);
    }
  }
  throw Error("unknown model kind");
}

}  // namespace

FoldData fold_data(const CvContext& ctx, const Fold& fold, const GroupSelection& groups,
                   const LabelPolicy& train_policy) {
  for (std::size_t g = 0; g < kNumGroups; ++g)
    if (groups.groups.test(g) && !ctx.groups().groups.test(g) && static_cast<FeatureGroup>(g) != FeatureGroup::KNN)
      throw ConfigError("feature group " + std::string(group_name(static_cast<FeatureGroup>(g))) +
                        " was not extracted for this dataset");
  std::vector<const AnalyzedDebate*> training;
  for (auto i : fold.train) training.push_back(&ctx.analyzed()[i]);

  FoldData out;
  out.state = FoldState::fit(training, train_policy);
  out.registry = std::make_shared<const FeatureRegistry>(groups);
  auto rows_of = [&](std::size_t debate) {
    Eigen::MatrixXd full = ctx.static_rows(debate);
    fill_fold_features(full, ctx.analyzed()[debate], groups, out.state);
    return select_columns(full, *out.registry);
  };
  std::vector<Eigen::MatrixXd> parts;
  for (auto i : fold.train) {
    parts.push_back(rows_of(i));
    const auto& d = ctx.dataset().debates[i];
    for (const auto& s : d.sentences) {
      out.train_labels.push_back(train_policy.label(s));
      out.train_sentence_ids.push_back(s.sentence_id);
    }
  }
  const Eigen::MatrixXd raw = stack(parts, out.registry->dimension());
  out.state.scaler = fit_scaler(raw);
  out.train = apply_scaler(out.state.scaler, raw);
  out.test = apply_scaler(out.state.scaler, rows_of(fold.test));
  return out;
}

Eigen::VectorXd fold_scores(const CvContext& ctx, const Fold& fold, const Experiment& ex) {
  const auto ranking = fold_ranking(ctx, fold, ex);
  Eigen::VectorXd scores(static_cast<Eigen::Index>(ranking.size()));
  for (const auto& item : ranking.items) scores(item.index_in_debate) = item.score;
  return scores;
}

EvalReport cross_validate(const CvContext& ctx, const Experiment& ex) {
  ex.train.validate();
  EvalReport report;
  report.experiment = ex;
  std::vector<MetricSet> kept;
  for (const auto& fold : ctx.folds()) {
    const auto& test = ctx.dataset().debates[fold.test];
    FoldResult r;
    r.fold = fold.index;
    r.test_debate = test.debate_id;
    r.sentences = static_cast<int>(test.sentences.size());
    // Test labels are read only after the ranking exists.
    RankedList ranking;
    try {
      ranking = fold_ranking(ctx, fold, ex);
    } catch (const Error& e) {
      throw Error("fold " + std::to_string(fold.index) + " (test debate " + test.debate_id + "): " + e.what());
    }
    const auto labels = labels_of(test, ex.test_policy);
    for (int y : labels) r.positives += y;
    if (r.positives == 0) {
      warn("fold " + std::to_string(fold.index) + " (test debate " + test.debate_id + ") has no positive sentences under " +
           ex.test_policy.describe() + "; skipped");
      r.skipped = true;
    } else {
      r.metrics = compute_metrics(ranked_relevance(ranking, labels));
      kept.push_back(r.metrics);
    }
    report.folds.push_back(r);
  }
  report.evaluated_folds = static_cast<int>(kept.size());
  if (kept.empty()) {
    warn("experiment '" + ex.name + "' has no fold with positive sentences");
    return report;
  }
  std::vector<double> aps;
  for (const auto& m : kept) {
    aps.push_back(m.average_precision);
    report.mean.r_precision += m.r_precision;
    for (std::size_t i = 0; i < m.precision_at.size(); ++i) report.mean.precision_at[i] += m.precision_at[i];
  }
  const double n = static_cast<double>(kept.size());
  report.mean.average_precision = mean_average_precision(aps);
  report.mean.r_precision /= n;
  for (auto& p : report.mean.precision_at) p /= n;
  return report;
}

TrainedRanker train_ranker(const CvContext& ctx, const std::vector<std::size_t>& debates, const Experiment& ex) {
  if (ex.model != ModelKind::Fnn && ex.model != ModelKind::Svm)
    throw ConfigError("only fnn and svm models can be trained and saved");
  if (debates.empty()) throw ConfigError("no training debates");
  ex.train.validate();
  // fold_data wants a test debate; the first training debate stands in and
  // its rows are discarded.
  Fold fold;
  fold.train = debates;
  fold.test = debates.front();
  auto data = fold_data(ctx, fold, ex.groups, ex.train_policy);
  TrainedRanker r;
  r.model = ex.model;
  r.groups = ex.groups;
  TrainConfig cfg = ex.train;
  cfg.seed = derive_seed(ex.seed, "model");
  if (ex.model == ModelKind::Fnn)
    r.fnn = train_fnn<double>(data.train, data.train_labels, cfg);
  else
    r.svm = train_svm_rbf(data.train, data.train_labels, cfg);
  r.state = std::move(data.state);
  return r;
}

Eigen::VectorXd score_debate(const TrainedRanker& r, const AnalyzedDebate& debate, const Eigen::MatrixXd& static_rows) {
  const FeatureRegistry registry(r.groups);
  Eigen::MatrixXd full = static_rows;
  fill_fold_features(full, debate, r.groups, r.state);
  const Eigen::MatrixXd x = apply_scaler(r.state.scaler, select_columns(full, registry));
  if (r.fnn) return fnn_scores(*r.fnn, x);
  if (r.svm) return svm_scores(*r.svm, x);
  throw StateError("ranker holds no trained model");
}

namespace {

std::string scope_name(Scope s) {
  switch (s) {
    case Scope::All:
      return "all";
    case Scope::SentenceOnly:
      return "sentence";
    case Scope::ContextOnly:
      return "context";
  }
  return "all";
}

}  // namespace

void TrainedRanker::save(std::ostream& out) const {
  std::vector<std::string> names;
  for (auto g : all_groups())
    if (groups.has(g)) names.emplace_back(group_name(g));
  out << "claimrank-ranker 1\n";
  out << "model " << model_name(model) << '\n';
  out << "groups " << join(names, ",") << '\n';
  out << "scope " << scope_name(groups.scope) << '\n';
  state.save(out);
  out << "weights\n";
  if (fnn) fnn->save(out);
  if (svm) svm->save(out);
  if (!out) throw Error("failed to write model file");
}

TrainedRanker TrainedRanker::load(std::istream& in) {
  auto field = [&](std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) throw Error("truncated model file");
    const auto sp = line.find(' ');
    if (sp == std::string::npos || line.substr(0, sp) != key)
      throw Error("model file: expected '" + std::string(key) + "' line");
    return line.substr(sp + 1);
  };
  std::string magic;
  std::getline(in, magic);
  if (magic != "claimrank-ranker 1") throw Error("not a claimrank model file");
  TrainedRanker r;
  const auto kind = parse_model(field("model"));
  if (!kind || (*kind != ModelKind::Fnn && *kind != ModelKind::Svm)) throw Error("model file: bad model kind");
  r.model = *kind;
  r.groups = GroupSelection::parse(field("groups"));
  const auto scope = field("scope");
  r.groups.scope = scope == "sentence" ? Scope::SentenceOnly : scope == "context" ? Scope::ContextOnly : Scope::All;
  r.state = FoldState::load(in);
  std::string line;
  if (!std::getline(in, line) || line != "weights") throw Error("model file: expected weights");
  if (r.model == ModelKind::Fnn)
    r.fnn = FnnModel<double>::load(in);
  else
    r.svm = SvmModel::load(in);
  return r;
}

namespace {

const std::map<FeatureGroup, double>& group_references() {
  static const std::map<FeatureGroup, double> refs = {
      {FeatureGroup::Embeddings, .357}, {FeatureGroup::KNN, .313},          {FeatureGroup::Linguistic, .308},
      {FeatureGroup::Sentiment, .260},  {FeatureGroup::Metadata, .256},     {FeatureGroup::Length, .254},
      {FeatureGroup::NE, .236},         {FeatureGroup::Contradiction, .222}, {FeatureGroup::SegmentSize, .217},
      {FeatureGroup::Position, .212},   {FeatureGroup::Discourse, .205},    {FeatureGroup::Topics, .180}};
  return refs;
}

// {train on source, train on all}
const std::map<Source, std::pair<double, double>>& source_references() {
  static const std::map<Source, std::pair<double, double>> refs = {
      {Source::PolitiFact, {.218, .213}},     {Source::NPR, {.193, .208}}, {Source::NYT, {.136, .136}},
      {Source::Guardian, {.121, .128}},       {Source::FactCheck, {.081, .115}}, {Source::CNN, {.079, .095}},
      {Source::ChicagoTribune, {.087, .092}}, {Source::ABC, {.059, .088}}, {Source::WashingtonPost, {.102, .076}}};
  return refs;
}

}  // namespace

std::vector<EvalReport> ablate_groups(const CvContext& ctx, const Experiment& base) {
  std::vector<EvalReport> out;
  for (auto g : ablation_groups()) {
    Experiment ex = base;
    ex.name = std::string(group_name(g));
    ex.groups = GroupSelection::only(g);
    ex.reference_map = group_references().at(g);
    out.push_back(cross_validate(ctx, ex));
  }
  return out;
}

std::vector<EvalReport> context_split(const CvContext& ctx, const Experiment& base) {
  std::vector<EvalReport> out;
  const std::array<std::tuple<const char*, Scope, double>, 3> rows = {
      std::tuple{"All", Scope::All, .427}, std::tuple{"All, no contextual", Scope::SentenceOnly, .385},
      std::tuple{"Only contextual", Scope::ContextOnly, .317}};
  for (const auto& [name, scope, ref] : rows) {
    Experiment ex = base;
    ex.name = name;
    ex.groups.scope = scope;
    ex.reference_map = ref;
    out.push_back(cross_validate(ctx, ex));
  }
  return out;
}

std::string_view source_mode_name(SourceMode mode) {
  return mode == SourceMode::TrainOnSource ? "train-on-source" : "train-on-all";
}

std::vector<EvalReport> per_source(const CvContext& ctx, const Experiment& base, const std::vector<Source>& sources) {
  std::vector<EvalReport> out;
  for (Source s : sources) {
    for (auto mode : {SourceMode::TrainOnSource, SourceMode::TrainOnAll}) {
      Experiment ex = base;
      ex.name = std::string(source_name(s)) + " " + std::string(source_mode_name(mode));
      ex.train_policy = mode == SourceMode::TrainOnSource ? LabelPolicy::single(s) : LabelPolicy::union_of_sources();
      ex.test_policy = LabelPolicy::single(s);
      const auto& ref = source_references().at(s);
      ex.reference_map = mode == SourceMode::TrainOnSource ? ref.first : ref.second;
      out.push_back(cross_validate(ctx, ex));
    }
  }
  return out;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> metric_cells(const MetricSet& m, const char* spec) {
  std::vector<std::string> out{fmt(spec, m.average_precision), fmt(spec, m.r_precision)};
  for (double p : m.precision_at) out.push_back(fmt(spec, p));
  return out;
}

const std::vector<std::string>& metric_headers() {
  static const std::vector<std::string> h = {"MAP", "R-Pr", "P@5", "P@10", "P@20", "P@50"};
  return h;
}

}  // namespace

void write_report_tsv(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "experiment\tmodel\tgroups\ttrain_labels\ttest_labels\tseed\tfold\ttest_debate\tpositives";
  for (const auto& h : metric_headers()) out << '\t' << h;
  out << "\treference_map\n";
  for (const auto& r : reports) {
    const auto& ex = r.experiment;
    const std::string prefix = ex.name + '\t' + std::string(model_name(ex.model)) + '\t' + ex.groups.describe() + '\t' +
                               ex.train_policy.describe() + '\t' + ex.test_policy.describe() + '\t' +
                               std::to_string(ex.seed);
    for (const auto& f : r.folds) {
      out << prefix << '\t' << f.fold << '\t' << f.test_debate << '\t' << f.positives;
      if (f.skipped) {
        for (std::size_t i = 0; i < metric_headers().size(); ++i) out << "\tNA";
      } else {
        for (const auto& c : metric_cells(f.metrics, "%.6f")) out << '\t' << c;
      }
      out << "\t\n";
    }
    out << prefix << "\tmean\t-\t-";
    for (const auto& c : metric_cells(r.mean, "%.6f")) out << '\t' << c;
    out << '\t' << (ex.reference_map ? fmt("%.3f", *ex.reference_map) : "") << '\n';
  }
}

void write_report_text(std::ostream& out, const std::vector<EvalReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"System"};
  header.insert(header.end(), metric_headers().begin(), metric_headers().end());
  header.push_back("ref MAP*");
  rows.push_back(header);
  for (const auto& r : reports) {
    std::vector<std::string> row{r.experiment.name.empty() ? std::string(model_name(r.experiment.model))
                                                           : r.experiment.name};
    for (auto& c : metric_cells(r.mean, "%.3f")) row.push_back(c.rfind("0.", 0) == 0 ? c.substr(1) : c);
    row.push_back(r.experiment.reference_map ? fmt("%.3f", *r.experiment.reference_map).substr(1) : "-");
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        out << row[i] << std::string(width[i] - row[i].size(), ' ');
      } else {
        out << "  " << std::string(width[i] - row[i].size(), ' ') << row[i];
      }
    }
    out << '\n';
    if (k == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
  }
  out << "* published reference MAP on different data; "
         "shown for orientation only.\n";
}

void write_report_json(std::ostream& out, const std::vector<EvalReport>& reports) {
  using nlohmann::ordered_json;
  auto metrics = [](const MetricSet& m) {
    ordered_json j;
    j["map"] = m.average_precision;
    j["r_precision"] = m.r_precision;
    for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i)
      j["p@" + std::to_string(kPrecisionCutoffs[i])] = m.precision_at[i];
    return j;
  };
  ordered_json all = ordered_json::array();
  for (const auto& r : reports) {
    const auto& ex = r.experiment;
    ordered_json j;
    j["experiment"] = ex.name;
    j["model"] = std::string(model_name(ex.model));
    j["groups"] = ex.groups.describe();
    j["train_labels"] = ex.train_policy.describe();
    j["test_labels"] = ex.test_policy.describe();
    j["seed"] = ex.seed;
    j["evaluated_folds"] = r.evaluated_folds;
    j["mean"] = metrics(r.mean);
    j["reference_map"] = ex.reference_map ? ordered_json(*ex.reference_map) : ordered_json(nullptr);
    ordered_json folds = ordered_json::array();
    for (const auto& f : r.folds) {
      ordered_json fj;
      fj["fold"] = f.fold;
      fj["test_debate"] = f.test_debate;
      fj["sentences"] = f.sentences;
      fj["positives"] = f.positives;
      fj["skipped"] = f.skipped;
      fj["metrics"] = f.skipped ? ordered_json(nullptr) : metrics(f.metrics);
      folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);
    all.push_back(std::move(j));
  }
  out << all.dump(2) << '\n';
}

}  // namespace claimrank
