#pragma once

// Ranking metrics and the leave-one-debate-out experiment driver.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "claimrank/corpus.hpp"
#include "claimrank/features.hpp"
#include "claimrank/models.hpp"

namespace claimrank {

// ---------------------------------------------------------------- metrics
//
// `relevance` lists the 0/1 gold labels in ranked order.

// sum_k P(k) rel(k) / #relevant. Throws Error when nothing is relevant.
double average_precision(const std::vector<int>& relevance);
// relevant among the top min(k, n), divided by k.
double precision_at_k(const std::vector<int>& relevance, int k);
// relevant among the top R, divided by R. Throws Error when R = 0.
double r_precision(const std::vector<int>& relevance);
double mean_average_precision(const std::vector<double>& average_precisions);

// Gold labels of a ranking, looked up by index_in_debate.
std::vector<int> ranked_relevance(const RankedList& ranking, const std::vector<int>& labels_by_index);

inline constexpr std::array<int, 4> kPrecisionCutoffs = {5, 10, 20, 50};

struct MetricSet {
  double average_precision = 0.0;  // MAP once averaged over folds
  double r_precision = 0.0;
  std::array<double, 4> precision_at{};  // at kPrecisionCutoffs
};

MetricSet compute_metrics(const std::vector<int>& relevance);

// ------------------------------------------------------------- experiments

enum class ModelKind { Fnn, Svm, Random, TfIdf };

std::string_view model_name(ModelKind kind);
std::optional<ModelKind> parse_model(std::string_view name);

struct Experiment {
  std::string name;
  ModelKind model = ModelKind::Fnn;
  GroupSelection groups = GroupSelection::all();
  LabelPolicy train_policy;
  LabelPolicy test_policy;
  TrainConfig train;
  std::uint64_t seed = 1;
  // Published reference score for the same configuration;
  // printed next to ours, never compared against.
  std::optional<double> reference_map;

  std::string describe() const;
};

struct FoldResult {
  int fold = 0;
  std::string test_debate;
  int sentences = 0;
  int positives = 0;
  bool skipped = false;  // no relevant sentence in the test debate
  MetricSet metrics;
};

struct EvalReport {
  Experiment experiment;
  std::vector<FoldResult> folds;
  MetricSet mean;  // over the folds that were not skipped
  int evaluated_folds = 0;
};

// Fold-independent work shared by every experiment on one dataset: token
// analysis and the static part of the full-layout feature rows.
class CvContext {
 public:
  // Static features are computed for `groups` (KNN never needs resources).
  CvContext(const LabeledDataset& dataset, const ResourceBundle& resources,
            const GroupSelection& groups = GroupSelection::all());

  const LabeledDataset& dataset() const { return dataset_; }
  const ResourceBundle& resources() const { return resources_; }
  const std::vector<AnalyzedDebate>& analyzed() const { return analyzed_; }
  const Eigen::MatrixXd& static_rows(std::size_t debate) const { return static_.at(debate); }
  const GroupSelection& groups() const { return groups_; }
  const std::vector<Fold>& folds() const { return folds_; }

 private:
  const LabeledDataset& dataset_;
  const ResourceBundle& resources_;
  GroupSelection groups_;
  std::vector<AnalyzedDebate> analyzed_;
  std::vector<Eigen::MatrixXd> static_;
  std::vector<Fold> folds_;
};

// Model inputs of one fold. The fold state, scaler included, is fit on
// the training debates only.
struct FoldData {
  std::shared_ptr<const FeatureRegistry> registry;
  Eigen::MatrixXd train;  // scaled, training debates stacked in fold order
  std::vector<int> train_labels;
  std::vector<int> train_sentence_ids;
  Eigen::MatrixXd test;  // scaled with the training scaler
  FoldState state;
};

FoldData fold_data(const CvContext& context, const Fold& fold, const GroupSelection& groups,
                   const LabelPolicy& train_policy);

// Scores of the test debate of one fold.
Eigen::VectorXd fold_scores(const CvContext& context, const Fold& fold, const Experiment& experiment);

EvalReport cross_validate(const CvContext& context, const Experiment& experiment);

// One FNN run per feature group in isolation, in the order of ablation_groups().
std::vector<EvalReport> ablate_groups(const CvContext& context, const Experiment& base);

// All features, without contextual slots, and contextual slots only.
std::vector<EvalReport> context_split(const CvContext& context, const Experiment& base);

enum class SourceMode { TrainOnSource, TrainOnAll };
std::string_view source_mode_name(SourceMode mode);

// Test labels always come from `source`; training labels from the source
// or from the union of all sources.
std::vector<EvalReport> per_source(const CvContext& context, const Experiment& base,
                                   const std::vector<Source>& sources);

// ---------------------------------------------------------- trained model

// A model together with everything needed to score an unseen debate.
struct TrainedRanker {
  ModelKind model = ModelKind::Fnn;
  GroupSelection groups = GroupSelection::all();
  FoldState state;
  std::optional<FnnModel<double>> fnn;
  std::optional<SvmModel> svm;

  void save(std::ostream& out) const;
  static TrainedRanker load(std::istream& in);
};

// Trains on the given debates of the context (FNN or SVM only).
TrainedRanker train_ranker(const CvContext& context, const std::vector<std::size_t>& debates,
                           const Experiment& experiment);

// Scores every sentence of an analyzed debate; `static_rows` are its
// full-layout static features.
Eigen::VectorXd score_debate(const TrainedRanker& ranker, const AnalyzedDebate& debate,
                             const Eigen::MatrixXd& static_rows);

// -------------------------------------------------------------- reporting

void write_report_tsv(std::ostream& out, const std::vector<EvalReport>& reports);
void write_report_text(std::ostream& out, const std::vector<EvalReport>& reports);
void write_report_json(std::ostream& out, const std::vector<EvalReport>& reports);

}  // namespace claimrank
