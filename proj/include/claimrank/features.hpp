#pragma once

// Feature groups for check-worthiness ranking and their assembly into one
// registered vector per sentence.
//
// Every sentence has a fixed full layout of 1707 slots (all groups in
// FeatureGroup order). A FeatureRegistry is a selection of those slots,
// by group and by sentence/context scope, renumbered from 0.

#include <array>
#include <bitset>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "claimrank/corpus.hpp"
#include "claimrank/resources.hpp"
#include "claimrank/textproc.hpp"
#include "claimrank/topics.hpp"

namespace claimrank {

enum class FeatureGroup : int {
  CB = 0,
  Sentiment,
  NE,
  Linguistic,
  Tense,
  Length,
  Position,
  SegmentSize,
  Metadata,
  Topics,
  Embeddings,
  Discourse,
  Contradiction,
  KNN,
};

inline constexpr std::size_t kNumGroups = 14;
inline constexpr std::array<int, kNumGroups> kGroupDims = {1045, 2, 1, 9, 1, 1, 3, 3, 8, 303, 303, 20, 5, 3};
inline constexpr int kFullDimension = 1707;
inline constexpr int kTfIdfDim = 998;
inline constexpr int kNumDiscourseRelations = 18;

inline int group_dimension(FeatureGroup g) { return kGroupDims[static_cast<std::size_t>(g)]; }
std::string_view group_name(FeatureGroup g);
// Accepts the canonical names case-insensitively plus "kNN"/"NEs" style aliases.
std::optional<FeatureGroup> parse_group(std::string_view name);
std::vector<FeatureGroup> all_groups();

// The twelve groups evaluated in isolation by the ablation table.
std::vector<FeatureGroup> ablation_groups();

enum class Scope { All, SentenceOnly, ContextOnly };

struct GroupSelection {
  std::bitset<kNumGroups> groups;
  Scope scope = Scope::All;

  static GroupSelection all() {
    GroupSelection s;
    s.groups.set();
    return s;
  }
  static GroupSelection only(FeatureGroup g) {
    GroupSelection s;
    s.groups.set(static_cast<std::size_t>(g));
    return s;
  }
  bool has(FeatureGroup g) const { return groups.test(static_cast<std::size_t>(g)); }
  // "all" or a comma-separated list of group names; throws ConfigError
  // listing the valid names on an unknown one.
  static GroupSelection parse(std::string_view spec);
  std::string describe() const;
};

struct FeatureSlot {
  FeatureGroup group = FeatureGroup::CB;
  std::string name;
  int index = 0;        // position in the registry
  int full_index = 0;   // position in the full 1707-slot layout
  bool contextual = false;
};

class FeatureRegistry {
 public:
  explicit FeatureRegistry(const GroupSelection& selection);

  int dimension() const { return static_cast<int>(slots_.size()); }
  const std::vector<FeatureSlot>& slots() const { return slots_; }
  const GroupSelection& selection() const { return selection_; }
  // [begin, end) of the group's slots in this registry; empty when absent.
  std::pair<int, int> span(FeatureGroup g) const { return spans_[static_cast<std::size_t>(g)]; }
  std::vector<int> full_indices() const;
  // "group:name" per slot, the dump header.
  std::vector<std::string> column_names() const;

 private:
  GroupSelection selection_;
  std::vector<FeatureSlot> slots_;
  std::array<std::pair<int, int>, kNumGroups> spans_{};
};

const std::vector<FeatureSlot>& full_layout();

struct FeatureVector {
  Eigen::VectorXd values;
  std::shared_ptr<const FeatureRegistry> registry;
};

// Relation inventory of the discourse approximation, in feature order.
std::string_view discourse_relation_name(int relation);

// Cue phrases per relation. "inter" cues open a sentence and link it to the
// previous one; "intra" cues subordinate a clause inside a sentence.
class DiscourseCues {
 public:
  // relation<TAB>inter|intra<TAB>cue phrase; '#' comments.
  static DiscourseCues load(const std::string& path);
  void add(int relation, bool inter, std::string_view cue);

  // Relation of the longest inter cue starting at the first word, if any.
  std::optional<int> opening_relation(const Tokens& tokens) const;
  std::size_t intra_cue_count(const Tokens& tokens) const;

 private:
  PhraseMatcher inter_;
  PhraseMatcher intra_;
};

// Everything the feature groups read besides the transcript. Absent members
// make the groups needing them unavailable.
struct ResourceBundle {
  std::optional<PosTagger> tagger;
  std::optional<Gazetteer> gazetteer;
  std::optional<CueList> negations;
  std::optional<Lexicon> polarity;
  std::array<std::optional<Lexicon>, kNumLinguisticLexicons> linguistic;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<const TopicModel> topics;
  std::optional<DiscourseCues> discourse;
  int topic_sweeps = kDefaultInferenceSweeps;
  std::uint64_t topic_seed = 7;

  // Loads every file of the standard layout found under `root`:
  //   pos/tag_lexicon.tsv pos/suffix_rules.tsv gazetteer.txt
  //   negation_cues.txt discourse_cues.tsv lexicons/<name>.txt
  //   lexicons/nrc_polarity.tsv
  static ResourceBundle load_directory(const std::string& root);

  // Participant names become PERSON entries of the gazetteer.
  void add_participants(const LabeledDataset& dataset);

  // Human-readable list of resources missing for the selection.
  std::vector<std::string> missing_for(const GroupSelection& selection) const;
  void require(const GroupSelection& selection) const;
};

// Tokens (POS-tagged when a tagger is available) for every sentence.
struct AnalyzedDebate {
  const Debate* debate = nullptr;
  std::vector<Tokens> tokens;
};

AnalyzedDebate analyze_debate(const Debate& debate, const ResourceBundle& resources);
std::vector<AnalyzedDebate> analyze_dataset(const LabeledDataset& dataset,
                                            const ResourceBundle& resources);

// TF.IDF over the training fold: the 998 terms of highest document
// frequency (ties by term), tf = raw count, idf = ln(N / (1 + df)) + 1.
class TfIdfModel {
 public:
  TfIdfModel() = default;
  static TfIdfModel fit(const std::vector<const Tokens*>& documents, int max_terms = kTfIdfDim);
  static TfIdfModel from_terms(std::vector<std::string> terms, std::vector<double> idf, int width);

  bool fitted() const { return fitted_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  int width() const { return width_; }
  // Always `width()` long; unused trailing slots are zero.
  Eigen::VectorXd transform(const Tokens& tokens) const;

 private:
  bool fitted_ = false;
  int width_ = kTfIdfDim;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::unordered_map<std::string, int> index_;
};

// Case-folded word types of a sentence, the unit of kNN overlap.
std::vector<std::string> word_types(const Tokens& tokens);

struct KnnItem {
  int sentence_id = 0;
  std::string speaker;
  std::vector<int> types;  // sorted term ids
  bool positive = false;
};

class KnnIndex {
 public:
  KnnIndex() = default;

  int term_id(const std::string& word);                  // adds when absent
  int find_term(const std::string& word) const;          // -1 when absent
  std::vector<int> encode(const std::vector<std::string>& types) const;  // drops unknown
  void add(int sentence_id, std::string speaker, const std::vector<std::string>& types, bool positive);

  const std::vector<KnnItem>& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  // Term strings indexed by id.
  std::vector<std::string> words() const;

 private:
  std::unordered_map<std::string, int> terms_;
  std::vector<KnnItem> items_;
};

struct KnnQuery {
  int sentence_id = 0;
  std::string speaker;
  std::vector<std::string> types;
};

// [f1, f2, f3]: signed overlap with the nearest training sentence, the same
// restricted to same-speaker neighbours, and the overlap with the nearest
// PolitiFact-checked claim. Nearest = largest overlap, ties toward a
// positive neighbour. The query sentence itself is never a neighbour.
std::array<double, 3> knn_features(const KnnQuery& query, const KnnIndex& training,
                                   const KnnIndex& politifact);

// Per-feature z-scoring fit on training rows. Zero-variance features pass
// through unchanged.
struct ScalerParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  bool fitted() const { return mean.size() > 0; }
};

ScalerParams fit_scaler(const Eigen::MatrixXd& training);
Eigen::VectorXd apply_scaler(const ScalerParams& params, const Eigen::VectorXd& x);
Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::MatrixXd& rows);

// State fit on the training partition of a fold. The constructor never sees
// test debates.
struct FoldState {
  TfIdfModel tfidf;
  KnnIndex knn_training;
  KnnIndex knn_politifact;
  ScalerParams scaler;

  static FoldState fit(const std::vector<const AnalyzedDebate*>& training, const LabelPolicy& policy);

  // Line-oriented text form; doubles are written with full precision.
  void save(std::ostream& out) const;
  static FoldState load(std::istream& in);
};

// Per-group blocks. Each returns exactly group_dimension(group) values.
struct SentenceView {
  const AnalyzedDebate& debate;
  int index;  // index_in_debate

  const Sentence& sentence() const { return debate.debate->sentences[static_cast<std::size_t>(index)]; }
  const Tokens& tokens() const { return debate.tokens[static_cast<std::size_t>(index)]; }
  const Segment& segment() const { return debate.debate->segment_of(sentence()); }
};

Eigen::VectorXd cb_features(const Tokens& tokens, const TfIdfModel& tfidf, const Gazetteer& gazetteer,
                            const Lexicon& polarity);
Eigen::VectorXd sentiment_features(const Tokens& tokens, const Lexicon& polarity);
Eigen::VectorXd ne_count_feature(const Tokens& tokens, const Gazetteer& gazetteer);
Eigen::VectorXd linguistic_features(const Tokens& tokens,
                                    const std::array<const Lexicon*, kNumLinguisticLexicons>& lexicons);
Eigen::VectorXd tense_feature(const Tokens& tokens);
Eigen::VectorXd length_feature(std::string_view text);
Eigen::VectorXd position_features(const Sentence& sentence, const Segment& segment);
Eigen::VectorXd segment_size_features(const Sentence& sentence, const Debate& debate);
Eigen::VectorXd metadata_features(const Sentence& sentence, const Tokens& tokens, const Debate& debate);

// Memoizes segment-level vectors (topic distributions, mean embeddings) of
// one debate.
class SegmentCache {
 public:
  const Eigen::VectorXd& topics(const SentenceView& view, int segment_id, const TopicModel& model,
                                int sweeps, std::uint64_t seed);
  const Eigen::VectorXd& embedding(const SentenceView& view, int segment_id,
                                   const EmbeddingTable& table);

 private:
  std::map<int, Eigen::VectorXd> topics_;
  std::map<int, Eigen::VectorXd> embeddings_;
};

Eigen::VectorXd topic_features(const SentenceView& view, const TopicModel& model, int sweeps,
                               std::uint64_t seed, SegmentCache* cache = nullptr);
Eigen::VectorXd embedding_features(const SentenceView& view, const EmbeddingTable& table,
                                   SegmentCache* cache = nullptr);
Eigen::VectorXd discourse_features(const SentenceView& view, const DiscourseCues& cues);
Eigen::VectorXd contradiction_features(const SentenceView& view, const CueList& negations);

KnnQuery knn_query(const SentenceView& view);

// One sentence, enabled groups only, in FeatureGroup order.
FeatureVector assemble(const SentenceView& view, const GroupSelection& selection,
                       const ResourceBundle& resources, const FoldState& fold_state);

// Fold-independent slots of the full layout for every sentence of a debate
// (rows = sentences). TF.IDF and kNN slots are left zero.
Eigen::MatrixXd static_feature_matrix(const AnalyzedDebate& debate, const GroupSelection& selection,
                                      const ResourceBundle& resources);

// Writes the fold-dependent TF.IDF and kNN slots into a full-layout matrix.
void fill_fold_features(Eigen::MatrixXd& full, const AnalyzedDebate& debate,
                        const GroupSelection& selection, const FoldState& fold_state);

// Selects the registry's columns from full-layout rows.
Eigen::MatrixXd select_columns(const Eigen::MatrixXd& full, const FeatureRegistry& registry);

// TSV: "sentence_id" then one "group:name" column per slot.
void write_feature_matrix(std::ostream& out, const FeatureRegistry& registry,
                          const std::vector<int>& sentence_ids, const Eigen::MatrixXd& rows);

}  // namespace claimrank
