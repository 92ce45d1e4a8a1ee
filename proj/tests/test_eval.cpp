#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "claimrank/errors.hpp"
#include "claimrank/eval.hpp"
#include "claimrank/random.hpp"
#include "support.hpp"

using namespace claimrank;
using testutil::Row;

namespace {

// Brute-force AP: pairwise form, sum over relevant pairs (j <= i) of 1/i.
double oracle_ap(const std::vector<int>& rel) {
  double r = 0, total = 0;
  for (int v : rel) r += v;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (!rel[i]) continue;
    for (std::size_t j = 0; j <= i; ++j)
      if (rel[j]) total += 1.0 / static_cast<double>(i + 1);
  }
  return total / r;
}

double oracle_p_at(const std::vector<int>& rel, int k) {
  int hits = 0;
  for (std::size_t i = 0; i < rel.size(); ++i)
    if (static_cast<int>(i) < k && rel[i]) ++hits;
  return static_cast<double>(hits) / k;
}

double oracle_r_prec(const std::vector<int>& rel) {
  int r = 0;
  for (int v : rel) r += v;
  return oracle_p_at(rel, r);
}

// Four debates where "debt" or a preceding negation makes a claim likely.
LabeledDataset learnable_dataset(std::uint64_t seed, int per_debate = 60) {
  Rng rng(seed);
  const char* speakers[] = {"Clinton", "Trump"};
  std::vector<Row> rows;
  for (int d = 1; d <= 4; ++d) {
    bool prev_neg = false;
    for (int i = 0; i < per_debate; ++i) {
      Row r{"d" + std::to_string(d), speakers[(i / 3) % 2], ""};
      const auto len = 2 + rng.below(6);
      bool claim_word = false;
      for (std::uint64_t k = 0; k < len; ++k) {
        const auto& w = testutil::kWords[rng.below(testutil::kWords.size())];
        claim_word = claim_word || w == "debt";
        r.text += (k ? " " : "") + w;
      }
      const bool neg = rng.bernoulli(0.2);
      if (neg) r.text += " not";
      r.text += ".";
      const double p = 0.02 + 0.7 * claim_word + 0.2 * prev_neg;
      if (rng.bernoulli(p)) r.sources.push_back(rng.bernoulli(0.5) ? Source::NPR : Source::PolitiFact);
      prev_neg = neg;
      rows.push_back(r);
    }
  }
  return testutil::dataset(rows, 4);
}

Experiment small_experiment(ModelKind kind, const GroupSelection& groups) {
  Experiment ex;
  ex.name = std::string(model_name(kind));
  ex.model = kind;
  ex.groups = groups;
  ex.train.hidden = {16, 8};
  ex.train.epochs = 20;
  ex.train.seed = 3;
  ex.seed = 11;
  return ex;
}

GroupSelection cheap_groups() { return GroupSelection::parse("CB,Sentiment,Length,Position,Metadata,Contradiction,KNN"); }

std::string tsv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  write_report_tsv(out, reports);
  return out.str();
}

}  // namespace

TEST_CASE("metrics on hand cases") {
  CHECK(average_precision({1, 0, 1, 0}) == doctest::Approx((1.0 + 2.0 / 3) / 2).epsilon(1e-15));
  CHECK(average_precision({1, 1, 0, 0}) == 1.0);
  CHECK(average_precision({0, 0, 0, 0, 1}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(average_precision({0, 0}), Error);
  CHECK(precision_at_k({1, 1, 1, 1, 1, 0}, 5) == 1.0);
  CHECK(precision_at_k({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 10) == 0.0);
  CHECK(precision_at_k({1, 0, 1}, 5) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r_precision({1, 1, 0, 0}) == 1.0);
  CHECK(r_precision({0, 0, 1, 1}) == 0.0);
  CHECK_THROWS_AS(r_precision({0, 0}), Error);
  CHECK(mean_average_precision({1.0, 0.0}) == 0.5);
  CHECK(mean_average_precision({0.3}) == 0.3);
  CHECK(mean_average_precision({0.1, 0.2, 0.3, 0.6}) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("metrics equal a brute-force recomputation") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng.below(50);
    std::vector<int> rel(n);
    int r = 0;
    for (auto& v : rel) r += (v = rng.bernoulli(rng.uniform()) ? 1 : 0);
    if (r == 0) rel[rng.below(n)] = 1;
    CHECK(std::abs(average_precision(rel) - oracle_ap(rel)) <= 1e-12);
    CHECK(std::abs(r_precision(rel) - oracle_r_prec(rel)) <= 1e-12);
    const auto m = compute_metrics(rel);
    for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i) {
      CHECK(std::abs(precision_at_k(rel, kPrecisionCutoffs[i]) - oracle_p_at(rel, kPrecisionCutoffs[i])) <= 1e-12);
      CHECK(m.precision_at[i] == precision_at_k(rel, kPrecisionCutoffs[i]));
    }
    CHECK(m.average_precision == average_precision(rel));
  }
}

TEST_CASE("metric properties") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + rng.below(50);
    CHECK(average_precision(std::vector<int>(n, 1)) == 1.0);
    // Perfect prefix: P@k never increases with k.
    std::vector<int> rel(n, 0);
    const auto r = 1 + rng.below(n);
    for (std::uint64_t i = 0; i < r; ++i) rel[i] = 1;
    for (std::size_t i = 1; i < kPrecisionCutoffs.size(); ++i)
      CHECK(precision_at_k(rel, kPrecisionCutoffs[i]) <= precision_at_k(rel, kPrecisionCutoffs[i - 1]));
  }
}

TEST_CASE("ranked relevance follows the ranking") {
  RankedList r;
  r.items = {{10, 2, 0.9}, {11, 0, 0.5}, {12, 1, 0.1}};
  CHECK(ranked_relevance(r, {1, 0, 0}) == std::vector<int>{0, 1, 0});
}

TEST_CASE("model names") {
  for (auto k : {ModelKind::Fnn, ModelKind::Svm, ModelKind::Random, ModelKind::TfIdf})
    CHECK(parse_model(model_name(k)) == k);
  CHECK_FALSE(parse_model("gbm").has_value());
}

TEST_CASE("cross validation") {
  const auto ds = learnable_dataset(1);
  auto r = testutil::full_resources(&ds);
  const CvContext ctx(ds, r, cheap_groups());
  CHECK(ctx.folds().size() == 4);

  const auto fnn = cross_validate(ctx, small_experiment(ModelKind::Fnn, cheap_groups()));
  const auto rnd = cross_validate(ctx, small_experiment(ModelKind::Random, cheap_groups()));
  CHECK(fnn.folds.size() == 4);
  CHECK(fnn.evaluated_folds == 4);
  double sum = 0;
  for (const auto& f : fnn.folds) {
    CHECK(f.metrics.average_precision >= 0.0);
    CHECK(f.metrics.average_precision <= 1.0);
    CHECK(f.sentences == 60);
    sum += f.metrics.average_precision;
  }
  CHECK(fnn.mean.average_precision == doctest::Approx(sum / 4).epsilon(1e-15));
  CHECK(fnn.mean.average_precision > rnd.mean.average_precision);

  // Same configuration, same report.
  CHECK(tsv({fnn, rnd}) == tsv({cross_validate(ctx, small_experiment(ModelKind::Fnn, cheap_groups())),
                                cross_validate(ctx, small_experiment(ModelKind::Random, cheap_groups()))}));

  const auto svm = cross_validate(ctx, small_experiment(ModelKind::Svm, cheap_groups()));
  const auto tfidf = cross_validate(ctx, small_experiment(ModelKind::TfIdf, cheap_groups()));
  CHECK(svm.evaluated_folds == 4);
  CHECK(tfidf.evaluated_folds == 4);

  // Groups outside the context cannot be evaluated.
  CHECK_THROWS_AS(cross_validate(ctx, small_experiment(ModelKind::Fnn, GroupSelection::all())), Error);
}

TEST_CASE("scores do not depend on test labels") {
  const auto ds = learnable_dataset(2);
  auto relabeled = ds;
  auto& test = relabeled.debates[1];
  for (auto& s : test.sentences) s.annotated_by = s.annotated_by.any() ? SourceSet{} : SourceSet{}.set(4);
  const auto r = testutil::full_resources(&ds);
  const CvContext a(ds, r, cheap_groups()), b(relabeled, r, cheap_groups());
  const auto ex = small_experiment(ModelKind::Fnn, cheap_groups());
  CHECK(fold_scores(a, a.folds()[1], ex) == fold_scores(b, b.folds()[1], ex));
}

TEST_CASE("training features ignore test-fold text") {
  const auto ds = learnable_dataset(3);
  auto mutated = ds;
  for (auto& s : mutated.debates[0].sentences) s.text = "China China mexico crime not " + s.text + " isis";
  const auto r = testutil::full_resources(&ds);
  const CvContext a(ds, r), b(mutated, r);
  const auto& fold = a.folds()[0];
  REQUIRE(fold.test == 0);
  const auto da = fold_data(a, fold, GroupSelection::all(), ds.policy);
  const auto db = fold_data(b, b.folds()[0], GroupSelection::all(), mutated.policy);
  CHECK(da.train.rows() == db.train.rows());
  CHECK(da.train == db.train);
  CHECK(da.train_labels == db.train_labels);
  std::ostringstream sa, sb;
  da.state.save(sa);
  db.state.save(sb);
  CHECK(sa.str() == sb.str());
  CHECK(da.test != db.test);
}

TEST_CASE("a test debate without positives is skipped") {
  auto ds = learnable_dataset(4);
  for (auto& s : ds.debates[2].sentences) s.annotated_by.reset(static_cast<std::size_t>(Source::PolitiFact));
  const auto r = testutil::full_resources(&ds);
  const CvContext ctx(ds, r, cheap_groups());
  const auto reports = per_source(ctx, small_experiment(ModelKind::Fnn, cheap_groups()), {Source::PolitiFact});
  REQUIRE(reports.size() == 2);
  for (const auto& rep : reports) {
    CHECK(rep.evaluated_folds == 3);
    CHECK(rep.folds[2].skipped);
    CHECK(rep.folds[2].positives == 0);
    CHECK(rep.experiment.test_policy.kind == LabelPolicy::Kind::SingleSource);
  }
  CHECK(reports[0].experiment.train_policy.kind == LabelPolicy::Kind::SingleSource);
  CHECK(reports[1].experiment.train_policy.kind == LabelPolicy::Kind::Union);
  CHECK(tsv(reports).find("NA") != std::string::npos);
}

TEST_CASE("ablation and context split inventories") {
  const auto ds = learnable_dataset(5, 30);
  const auto r = testutil::full_resources(&ds);
  const CvContext ctx(ds, r);
  auto base = small_experiment(ModelKind::Fnn, GroupSelection::all());
  base.train.epochs = 2;
  const auto ablation = ablate_groups(ctx, base);
  REQUIRE(ablation.size() == 12);
  for (const auto& rep : ablation) {
    CHECK(rep.experiment.groups.groups.count() == 1);
    CHECK(rep.experiment.reference_map.has_value());
    CHECK(rep.mean.average_precision >= 0.0);
    CHECK(rep.mean.average_precision <= 1.0);
  }
  const auto split = context_split(ctx, base);
  REQUIRE(split.size() == 3);
  CHECK(split[1].experiment.groups.scope == Scope::SentenceOnly);
  CHECK(split[2].experiment.groups.scope == Scope::ContextOnly);
}

TEST_CASE("report formats") {
  const auto ds = learnable_dataset(6, 30);
  const auto r = testutil::full_resources(&ds);
  const CvContext ctx(ds, r, cheap_groups());
  auto ex = small_experiment(ModelKind::Random, cheap_groups());
  ex.reference_map = 0.164;
  const std::vector<EvalReport> reports = {cross_validate(ctx, ex)};

  const auto text = tsv(reports);
  std::istringstream lines(text);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 6);  // header, four folds, mean

  std::ostringstream j;
  write_report_json(j, reports);
  const auto doc = nlohmann::json::parse(j.str());
  REQUIRE(doc.is_array());
  CHECK(doc[0]["folds"].size() == 4);
  CHECK(doc[0]["mean"]["map"].get<double>() == doctest::Approx(reports[0].mean.average_precision));

  std::ostringstream t;
  write_report_text(t, reports);
  CHECK(t.str().find(".164") != std::string::npos);
}

TEST_CASE("saved rankers score like the trained one") {
  const auto ds = learnable_dataset(7, 40);
  const auto r = testutil::full_resources(&ds);
  const CvContext ctx(ds, r, cheap_groups());
  for (auto kind : {ModelKind::Fnn, ModelKind::Svm}) {
    const auto ranker = train_ranker(ctx, {0, 1, 2}, small_experiment(kind, cheap_groups()));
    const auto direct = score_debate(ranker, ctx.analyzed()[3], ctx.static_rows(3));
    std::stringstream buf;
    ranker.save(buf);
    const auto loaded = TrainedRanker::load(buf);
    CHECK(loaded.model == kind);
    CHECK(score_debate(loaded, ctx.analyzed()[3], ctx.static_rows(3)) == direct);
  }
  std::stringstream junk("claimrank-ranker 7\n");
  CHECK_THROWS_AS(TrainedRanker::load(junk), Error);
}
