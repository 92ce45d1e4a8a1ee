#include "claimrank/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "claimrank/errors.hpp"
#include "claimrank/strings.hpp"

namespace claimrank {

namespace {

constexpr std::array<std::string_view, kNumGroups> kGroupNames = {
    "CB",       "Sentiment", "NE",     "Linguistic", "Tense",     "Length",        "Position",
    "SegmentSize", "Metadata", "Topics", "Embeddings", "Discourse", "Contradiction", "KNN"};

constexpr std::array<std::string_view, kNumDiscourseRelations> kRelations = {
    "Attribution", "Background",  "Cause",         "Comparison", "Condition",
    "Contrast",    "Elaboration", "Enablement",    "Evaluation", "Explanation",
    "Joint",       "Manner-Means", "Topic-Comment", "Summary",    "Temporal",
    "Topic-Change", "Textual-Organization", "Same-Unit"};

// Offsets inside the CB block.
constexpr int kCbPos = kTfIdfDim;                            // 998
constexpr int kCbNe = kCbPos + static_cast<int>(kNumPosTags);  // 1023
constexpr int kCbPolarity = kCbNe + static_cast<int>(kNumEntitySlots);  // 1043
constexpr int kCbTokens = kCbPolarity + 1;                   // 1044

int group_offset(FeatureGroup g) {
  int off = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(g); ++i) off += kGroupDims[i];
  return off;
}

std::vector<FeatureSlot> make_layout() {
  std::vector<FeatureSlot> slots;
  auto add = [&](FeatureGroup g, std::string name, bool contextual) {
    FeatureSlot s;
    s.group = g;
    s.name = std::move(name);
    s.full_index = static_cast<int>(slots.size());
    s.index = s.full_index;
    s.contextual = contextual;
    slots.push_back(std::move(s));
  };
  using G = FeatureGroup;
  for (int i = 0; i < kTfIdfDim; ++i) add(G::CB, "tfidf[" + std::to_string(i) + "]", false);
  for (std::size_t i = 0; i < kNumPosTags; ++i)
    add(G::CB, "pos:" + std::string(pos_name(static_cast<PosTag>(i))), false);
  for (std::size_t i = 0; i < kNumEntitySlots; ++i)
    add(G::CB, i <= static_cast<std::size_t>(EntityType::OTHER)
                   ? "ne:" + std::string(entity_name(static_cast<EntityType>(i)))
                   : "ne:slot" + std::to_string(i),
        false);
  add(G::CB, "polarity", false);
  add(G::CB, "tokens", false);
  add(G::Sentiment, "positive", false);
  add(G::Sentiment, "negative", false);
  add(G::NE, "count", false);
  for (std::size_t i = 0; i < kNumLinguisticLexicons; ++i)
    add(G::Linguistic, std::string(lexicon_name(static_cast<LexiconName>(i))), false);
  add(G::Tense, "tense", false);
  add(G::Length, "chars", false);
  for (auto n : {"is_first", "is_last", "reciprocal_rank"}) add(G::Position, n, true);
  for (auto n : {"prev", "cur", "next"}) add(G::SegmentSize, n, true);
  for (auto n : {"opponent_mentioned", "speaker_is_moderator", "speaker_candidate1",
                 "speaker_candidate2", "speaker_moderator", "applause", "laugh", "crosstalk"})
    add(G::Metadata, n, true);
  for (int i = 0; i < 300; ++i) add(G::Topics, "topic[" + std::to_string(i) + "]", false);
  for (auto n : {"cos_prev", "cos_cur", "cos_next"}) add(G::Topics, n, true);
  for (int i = 0; i < 300; ++i) add(G::Embeddings, "dim[" + std::to_string(i) + "]", false);
  for (auto n : {"cos_prev", "cos_cur", "cos_next"}) add(G::Embeddings, n, true);
  for (auto r : kRelations) add(G::Discourse, std::string(r), true);
  add(G::Discourse, "nuclei", false);
  add(G::Discourse, "satellites", false);
  add(G::Contradiction, "sentence", false);
  for (auto n : {"prev_sentence", "next_sentence", "prev_segment", "next_segment"})
    add(G::Contradiction, n, true);
  add(G::KNN, "nearest", false);
  add(G::KNN, "nearest_same_speaker", true);
  add(G::KNN, "nearest_politifact", false);
  return slots;
}

bool in_scope(const FeatureSlot& s, Scope scope) {
  switch (scope) {
    case Scope::All:
      return true;
    case Scope::SentenceOnly:
      return !s.contextual;
    case Scope::ContextOnly:
      return s.contextual;
  }
  return true;
}

template <class F>
void for_each_data_line(const std::string& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open resource file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    f(std::string(body), line_no);
  }
}

std::size_t first_word(const Tokens& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (is_word(tokens[i])) return i;
  return tokens.size();
}

std::optional<PhraseMatcher::Match> prefix_match(const PhraseMatcher& m, const Tokens& tokens,
                                                 std::size_t start) {
  if (start >= tokens.size()) return std::nullopt;
  std::vector<std::string> key;
  const std::size_t longest = std::min(m.max_length(), tokens.size() - start);
  for (std::size_t len = longest; len >= 1; --len) {
    key.clear();
    for (std::size_t k = 0; k < len; ++k) key.push_back(tokens[start + k].normalized);
    if (auto it = m.phrases().find(key); it != m.phrases().end())
      return PhraseMatcher::Match{start, len, it->second};
  }
  return std::nullopt;
}

Eigen::VectorXd cb_static(const Tokens& tokens, const Gazetteer& gazetteer, const Lexicon& polarity) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(group_dimension(FeatureGroup::CB) - kTfIdfDim);
  const auto pos = pos_histogram(tokens);
  for (std::size_t i = 0; i < kNumPosTags; ++i) v(static_cast<Eigen::Index>(i)) = pos[i];
  const auto ne = entity_type_counts(detect_named_entities(tokens, gazetteer));
  for (std::size_t i = 0; i < kNumEntitySlots; ++i)
    v(static_cast<Eigen::Index>(kNumPosTags + i)) = ne[i];
  v(kCbPolarity - kTfIdfDim) = polarity_score(sentiment_counts(tokens, polarity.matcher()));
  v(kCbTokens - kTfIdfDim) = static_cast<double>(tokens.size());
  return v;
}

std::array<const Lexicon*, kNumLinguisticLexicons> lexicon_pointers(const ResourceBundle& r) {
  std::array<const Lexicon*, kNumLinguisticLexicons> out{};
  for (std::size_t i = 0; i < kNumLinguisticLexicons; ++i)
    out[i] = r.linguistic[i] ? &*r.linguistic[i] : nullptr;
  return out;
}

// Block of `group` without the fold-dependent parts.
Eigen::VectorXd static_block(FeatureGroup g, const SentenceView& view, const ResourceBundle& r,
                             SegmentCache& cache) {
  const auto& tokens = view.tokens();
  const auto& s = view.sentence();
  const auto& debate = *view.debate.debate;
  switch (g) {
    case FeatureGroup::CB: {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(group_dimension(g));
      v.tail(group_dimension(g) - kTfIdfDim) = cb_static(tokens, *r.gazetteer, *r.polarity);
      return v;
    }
    case FeatureGroup::Sentiment:
      return sentiment_features(tokens, *r.polarity);
    case FeatureGroup::NE:
      return ne_count_feature(tokens, *r.gazetteer);
    case FeatureGroup::Linguistic:
      return linguistic_features(tokens, lexicon_pointers(r));
    case FeatureGroup::Tense:
      return tense_feature(tokens);
    case FeatureGroup::Length:
      return length_feature(s.text);
    case FeatureGroup::Position:
      return position_features(s, view.segment());
    case FeatureGroup::SegmentSize:
      return segment_size_features(s, debate);
    case FeatureGroup::Metadata:
      return metadata_features(s, tokens, debate);
    case FeatureGroup::Topics:
      return topic_features(view, *r.topics, r.topic_sweeps, r.topic_seed, &cache);
    case FeatureGroup::Embeddings:
      return embedding_features(view, *r.embeddings, &cache);
    case FeatureGroup::Discourse:
      return discourse_features(view, *r.discourse);
    case FeatureGroup::Contradiction:
      return contradiction_features(view, *r.negations);
    case FeatureGroup::KNN:
      return Eigen::VectorXd::Zero(group_dimension(g));
  }
  return {};
}

}  // namespace

std::string_view group_name(FeatureGroup g) { return kGroupNames.at(static_cast<std::size_t>(g)); }

std::optional<FeatureGroup> parse_group(std::string_view name) {
  const std::string folded = fold_case(trim(name));
  for (std::size_t i = 0; i < kNumGroups; ++i)
    if (fold_case(kGroupNames[i]) == folded) return static_cast<FeatureGroup>(i);
  if (folded == "nes" || folded == "named_entities") return FeatureGroup::NE;
  if (folded == "segment_size" || folded == "segmentsizes") return FeatureGroup::SegmentSize;
  if (folded == "contradictions") return FeatureGroup::Contradiction;
  if (folded == "topic") return FeatureGroup::Topics;
  return std::nullopt;
}

std::vector<FeatureGroup> all_groups() {
  std::vector<FeatureGroup> out;
  for (std::size_t i = 0; i < kNumGroups; ++i) out.push_back(static_cast<FeatureGroup>(i));
  return out;
}

std::vector<FeatureGroup> ablation_groups() {
  using G = FeatureGroup;
  return {G::Embeddings, G::KNN,           G::Linguistic,  G::Sentiment, G::Metadata,  G::Length,
          G::NE,         G::Contradiction, G::SegmentSize, G::Position,  G::Discourse, G::Topics};
}

GroupSelection GroupSelection::parse(std::string_view spec) {
  if (fold_case(trim(spec)) == "all") return all();
  GroupSelection s;
  for (const auto& part : split(spec, ',')) {
    if (trim(part).empty()) continue;
    const auto g = parse_group(part);
    if (!g) {
      std::vector<std::string> valid;
      for (auto n : kGroupNames) valid.emplace_back(n);
      throw ConfigError("unknown feature group '" + std::string(trim(part)) +
                        "'; valid groups: " + join(valid, ",") + " (or 'all')");
    }
    s.groups.set(static_cast<std::size_t>(*g));
  }
  if (s.groups.none()) throw ConfigError("no feature groups selected");
  return s;
}

std::string GroupSelection::describe() const {
  std::string out;
  if (groups.all()) {
    out = "all";
  } else {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < kNumGroups; ++i)
      if (groups.test(i)) names.emplace_back(kGroupNames[i]);
    out = join(names, ",");
  }
  if (scope == Scope::SentenceOnly) out += " (sentence-level only)";
  if (scope == Scope::ContextOnly) out += " (contextual only)";
  return out;
}

const std::vector<FeatureSlot>& full_layout() {
  static const std::vector<FeatureSlot> layout = make_layout();
  return layout;
}

FeatureRegistry::FeatureRegistry(const GroupSelection& selection) : selection_(selection) {
  for (auto& span : spans_) span = {0, 0};
  for (const auto& slot : full_layout()) {
    if (!selection.has(slot.group) || !in_scope(slot, selection.scope)) continue;
    FeatureSlot s = slot;
    s.index = static_cast<int>(slots_.size());
    auto& span = spans_[static_cast<std::size_t>(s.group)];
    if (span.first == span.second) span = {s.index, s.index};
    span.second = s.index + 1;
    slots_.push_back(std::move(s));
  }
}

std::vector<int> FeatureRegistry::full_indices() const {
  std::vector<int> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.full_index);
  return out;
}

std::vector<std::string> FeatureRegistry::column_names() const {
  std::vector<std::string> out;
  for (const auto& s : slots_) out.push_back(std::string(group_name(s.group)) + ":" + s.name);
  return out;
}

std::string_view discourse_relation_name(int relation) {
  return kRelations.at(static_cast<std::size_t>(relation));
}

DiscourseCues DiscourseCues::load(const std::string& path) {
  DiscourseCues cues;
  for_each_data_line(path, [&](const std::string& line, std::size_t line_no) {
    const auto cols = split(line, '\t');
    if (cols.size() != 3) throw ParseError(path, line_no, "expected relation<TAB>inter|intra<TAB>cue");
    const auto rel = trim(cols[0]);
    const auto it = std::find(kRelations.begin(), kRelations.end(), rel);
    if (it == kRelations.end())
      throw ParseError(path, line_no, "unknown discourse relation '" + std::string(rel) + "'");
    const auto kind = trim(cols[1]);
    if (kind != "inter" && kind != "intra")
      throw ParseError(path, line_no, "cue kind must be inter or intra");
    cues.add(static_cast<int>(it - kRelations.begin()), kind == "inter", trim(cols[2]));
  });
  return cues;
}

void DiscourseCues::add(int relation, bool inter, std::string_view cue) {
  (inter ? inter_ : intra_).add(cue, relation);
}

std::optional<int> DiscourseCues::opening_relation(const Tokens& tokens) const {
  if (auto m = prefix_match(inter_, tokens, first_word(tokens))) return m->payload;
  return std::nullopt;
}

std::size_t DiscourseCues::intra_cue_count(const Tokens& tokens) const { return intra_.count(tokens); }

ResourceBundle ResourceBundle::load_directory(const std::string& root) {
  namespace fs = std::filesystem;
  const fs::path base(root);
  if (!fs::is_directory(base)) throw ResourceError("resource directory not found: " + root);
  ResourceBundle r;
  auto exists = [&](const fs::path& p) { return fs::exists(base / p); };
  auto path = [&](const fs::path& p) { return (base / p).string(); };
  if (exists("pos/tag_lexicon.tsv") && exists("pos/suffix_rules.tsv"))
    r.tagger = PosTagger::load(path("pos/tag_lexicon.tsv"), path("pos/suffix_rules.tsv"));
  if (exists("gazetteer.txt")) r.gazetteer = Gazetteer::load(path("gazetteer.txt"));
  if (exists("negation_cues.txt")) r.negations = CueList::load(path("negation_cues.txt"));
  if (exists("discourse_cues.tsv")) r.discourse = DiscourseCues::load(path("discourse_cues.tsv"));
  if (exists("lexicons/nrc_polarity.tsv"))
    r.polarity = load_lexicon(path("lexicons/nrc_polarity.tsv"), LexiconName::NrcPolarity);
  for (std::size_t i = 0; i < kNumLinguisticLexicons; ++i) {
    const auto name = static_cast<LexiconName>(i);
    const fs::path p = fs::path("lexicons") / (std::string(lexicon_name(name)) + ".txt");
    if (exists(p)) r.linguistic[i] = load_lexicon(path(p), name);
  }
  return r;
}

void ResourceBundle::add_participants(const LabeledDataset& dataset) {
  if (!gazetteer) return;
  for (const auto& d : dataset.debates) {
    const auto& p = d.participants;
    std::vector<std::string> speakers = p.moderators;
    speakers.push_back(p.candidate1);
    speakers.push_back(p.candidate2);
    for (const auto& s : speakers) {
      gazetteer->add(s, EntityType::PERSON);
      if (auto it = p.full_names.find(s); it != p.full_names.end())
        gazetteer->add(it->second, EntityType::PERSON);
    }
  }
}

std::vector<std::string> ResourceBundle::missing_for(const GroupSelection& selection) const {
  std::set<std::string> missing;
  auto need = [&](FeatureGroup g, bool ok, const std::string& what) {
    if (selection.has(g) && !ok) missing.insert(what + " (needed by " + std::string(group_name(g)) + ")");
  };
  using G = FeatureGroup;
  for (auto g : {G::CB, G::NE, G::Tense}) need(g, tagger.has_value(), "POS tag lexicon");
  for (auto g : {G::CB, G::NE}) need(g, gazetteer.has_value(), "gazetteer");
  for (auto g : {G::CB, G::Sentiment}) need(g, polarity.has_value(), "NRC polarity lexicon");
  for (std::size_t i = 0; i < kNumLinguisticLexicons; ++i)
    need(G::Linguistic, linguistic[i].has_value(),
         "lexicon " + std::string(lexicon_name(static_cast<LexiconName>(i))));
  need(G::Topics, topics != nullptr, "topic model");
  need(G::Embeddings, embeddings != nullptr, "word embeddings");
  need(G::Discourse, discourse.has_value(), "discourse cue table");
  need(G::Contradiction, negations.has_value(), "negation cue list");
  return {missing.begin(), missing.end()};
}

void ResourceBundle::require(const GroupSelection& selection) const {
  const auto missing = missing_for(selection);
  if (!missing.empty()) throw ConfigError("missing resources: " + join(missing, "; "));
}

AnalyzedDebate analyze_debate(const Debate& debate, const ResourceBundle& resources) {
  AnalyzedDebate a;
  a.debate = &debate;
  a.tokens.reserve(debate.sentences.size());
  for (const auto& s : debate.sentences) {
    auto tokens = tokenize(s.text);
    if (resources.tagger) resources.tagger->tag(tokens);
    a.tokens.push_back(std::move(tokens));
  }
  return a;
}

std::vector<AnalyzedDebate> analyze_dataset(const LabeledDataset& dataset,
                                            const ResourceBundle& resources) {
  std::vector<AnalyzedDebate> out;
  for (const auto& d : dataset.debates) out.push_back(analyze_debate(d, resources));
  return out;
}

TfIdfModel TfIdfModel::fit(const std::vector<const Tokens*>& documents, int max_terms) {
  std::map<std::string, int> df;
  for (const Tokens* doc : documents)
    for (const auto& w : word_types(*doc)) ++df[w];
  std::vector<std::pair<std::string, int>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (static_cast<int>(ranked.size()) > max_terms) ranked.resize(static_cast<std::size_t>(max_terms));
  TfIdfModel m;
  m.fitted_ = true;
  m.width_ = max_terms;
  const double n = static_cast<double>(documents.size());
  for (const auto& [term, count] : ranked) {
    m.index_.emplace(term, static_cast<int>(m.terms_.size()));
    m.terms_.push_back(term);
    m.idf_.push_back(std::log(n / (1.0 + count)) + 1.0);
  }
  return m;
}

Eigen::VectorXd TfIdfModel::transform(const Tokens& tokens) const {
  if (!fitted_) throw StateError("TF.IDF vocabulary has not been fit on a training fold");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(width_);
  for (const auto& t : tokens) {
    if (!is_word(t)) continue;
    if (auto it = index_.find(t.normalized); it != index_.end()) v(it->second) += 1.0;
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) v(static_cast<Eigen::Index>(i)) *= idf_[i];
  return v;
}

TfIdfModel TfIdfModel::from_terms(std::vector<std::string> terms, std::vector<double> idf, int width) {
  if (terms.size() != idf.size() || static_cast<int>(terms.size()) > width)
    throw Error("TF.IDF model: inconsistent term table");
  TfIdfModel m;
  m.fitted_ = true;
  m.width_ = width;
  m.terms_ = std::move(terms);
  m.idf_ = std::move(idf);
  for (std::size_t i = 0; i < m.terms_.size(); ++i) m.index_.emplace(m.terms_[i], static_cast<int>(i));
  return m;
}

std::vector<std::string> word_types(const Tokens& tokens) {
  std::set<std::string> types;
  for (const auto& t : tokens)
    if (is_word(t)) types.insert(t.normalized);
  return {types.begin(), types.end()};
}

int KnnIndex::term_id(const std::string& word) {
  auto [it, inserted] = terms_.emplace(word, static_cast<int>(terms_.size()));
  return it->second;
}

int KnnIndex::find_term(const std::string& word) const {
  auto it = terms_.find(word);
  return it == terms_.end() ? -1 : it->second;
}

std::vector<int> KnnIndex::encode(const std::vector<std::string>& types) const {
  std::vector<int> ids;
  for (const auto& w : types)
    if (int id = find_term(w); id >= 0) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void KnnIndex::add(int sentence_id, std::string speaker, const std::vector<std::string>& types,
                   bool positive) {
  KnnItem item;
  item.sentence_id = sentence_id;
  item.speaker = std::move(speaker);
  for (const auto& w : types) item.types.push_back(term_id(w));
  std::sort(item.types.begin(), item.types.end());
  item.positive = positive;
  items_.push_back(std::move(item));
}

std::vector<std::string> KnnIndex::words() const {
  std::vector<std::string> out(terms_.size());
  for (const auto& [w, id] : terms_) out[static_cast<std::size_t>(id)] = w;
  return out;
}

std::array<double, 3> knn_features(const KnnQuery& query, const KnnIndex& training,
                                   const KnnIndex& politifact) {
  struct Best {
    long overlap = 0;
    bool positive = false;
    void offer(long ov, bool pos) {
      if (ov > overlap || (ov == overlap && pos && !positive)) {
        overlap = ov;
        positive = pos;
      }
    }
    double value() const { return overlap == 0 ? 0.0 : static_cast<double>(positive ? overlap : -overlap); }
  };

  auto overlap = [](const std::vector<int>& a, const std::vector<int>& b) {
    long n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        ++n;
        ++i;
        ++j;
      }
    }
    return n;
  };

  Best nearest, same_speaker, pf;
  const auto q_train = training.encode(query.types);
  for (const auto& item : training.items()) {
    if (item.sentence_id == query.sentence_id) continue;
    const long ov = overlap(q_train, item.types);
    nearest.offer(ov, item.positive);
    if (item.speaker == query.speaker) same_speaker.offer(ov, item.positive);
  }
  const auto q_pf = politifact.encode(query.types);
  for (const auto& item : politifact.items()) {
    if (item.sentence_id == query.sentence_id) continue;
    pf.offer(overlap(q_pf, item.types), item.positive);
  }
  return {nearest.value(), same_speaker.value(), pf.value()};
}

ScalerParams fit_scaler(const Eigen::MatrixXd& training) {
  if (training.rows() == 0) throw Error("fit_scaler: empty training matrix");
  ScalerParams p;
  p.mean = training.colwise().mean().transpose();
  const Eigen::MatrixXd centered = training.rowwise() - p.mean.transpose();
  p.stddev = (centered.array().square().colwise().sum() / static_cast<double>(training.rows()))
                 .sqrt()
                 .transpose();
  return p;
}

Eigen::VectorXd apply_scaler(const ScalerParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.mean.size())
    throw Error("apply_scaler: vector has " + std::to_string(x.size()) + " features, scaler " +
                std::to_string(params.mean.size()));
  Eigen::VectorXd out = x;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (params.stddev(i) > 0.0) out(i) = (x(i) - params.mean(i)) / params.stddev(i);
  return out;
}

Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::MatrixXd& rows) {
  if (rows.cols() != params.mean.size())
    throw Error("apply_scaler: matrix has " + std::to_string(rows.cols()) + " features, scaler " +
                std::to_string(params.mean.size()));
  Eigen::MatrixXd out = rows;
  for (Eigen::Index j = 0; j < rows.cols(); ++j)
    if (params.stddev(j) > 0.0)
      out.col(j) = (rows.col(j).array() - params.mean(j)) / params.stddev(j);
  return out;
}

FoldState FoldState::fit(const std::vector<const AnalyzedDebate*>& training, const LabelPolicy& policy) {
  FoldState st;
  std::vector<const Tokens*> docs;
  for (const auto* d : training)
    for (const auto& t : d->tokens) docs.push_back(&t);
  st.tfidf = TfIdfModel::fit(docs);
  for (const auto* d : training)
    for (std::size_t i = 0; i < d->tokens.size(); ++i) {
      const auto& s = d->debate->sentences[i];
      const auto types = word_types(d->tokens[i]);
      st.knn_training.add(s.sentence_id, s.speaker, types, policy.label(s) == 1);
      if (s.annotated_by.test(static_cast<std::size_t>(Source::PolitiFact)))
        st.knn_politifact.add(s.sentence_id, s.speaker, types, true);
    }
  return st;
}

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void save_knn(std::ostream& out, const char* name, const KnnIndex& index) {
  const auto words = index.words();
  out << "knn " << name << ' ' << index.items().size() << '\n';
  for (const auto& item : index.items()) {
    out << item.sentence_id << '\t' << item.speaker << '\t' << (item.positive ? 1 : 0) << '\t';
    for (std::size_t k = 0; k < item.types.size(); ++k)
      out << (k ? " " : "") << words[static_cast<std::size_t>(item.types[k])];
    out << '\n';
  }
}

struct StateReader {
  std::istream& in;
  std::size_t line_no = 0;

  std::string line() {
    std::string l;
    if (!std::getline(in, l)) throw ParseError("fold state", line_no + 1, "unexpected end of input");
    ++line_no;
    return l;
  }
  // "<tag> ... <count>" header; returns its fields.
  std::vector<std::string> header(std::string_view tag) {
    const auto fields = split_ws(line());
    if (fields.empty() || fields[0] != tag)
      throw ParseError("fold state", line_no, "expected '" + std::string(tag) + "' section");
    return fields;
  }
  std::size_t count(const std::string& field) {
    try {
      return static_cast<std::size_t>(std::stoull(field));
    } catch (const std::exception&) {
      throw ParseError("fold state", line_no, "bad count '" + field + "'");
    }
  }
  double number(const std::string& field) {
    try {
      return std::stod(field);
    } catch (const std::exception&) {
      throw ParseError("fold state", line_no, "bad number '" + field + "'");
    }
  }
  KnnIndex knn(std::string_view name) {
    const auto h = header("knn");
    if (h.size() != 3 || h[1] != name) throw ParseError("fold state", line_no, "expected knn " + std::string(name));
    KnnIndex index;
    for (std::size_t i = 0, n = count(h[2]); i < n; ++i) {
      const auto cols = split(line(), '\t');
      if (cols.size() != 4) throw ParseError("fold state", line_no, "expected 4 kNN columns");
      index.add(static_cast<int>(count(cols[0])), cols[1], split_ws(cols[3]), cols[2] == "1");
    }
    return index;
  }
};

}  // namespace

void FoldState::save(std::ostream& out) const {
  out << "claimrank-fold-state 1\n";
  out << "tfidf " << tfidf.width() << ' ' << tfidf.terms().size() << '\n';
  for (std::size_t i = 0; i < tfidf.terms().size(); ++i)
    out << tfidf.terms()[i] << '\t' << full_precision(tfidf.idf()[i]) << '\n';
  save_knn(out, "training", knn_training);
  save_knn(out, "politifact", knn_politifact);
  out << "scaler " << scaler.mean.size() << '\n';
  for (Eigen::Index i = 0; i < scaler.mean.size(); ++i)
    out << full_precision(scaler.mean(i)) << '\t' << full_precision(scaler.stddev(i)) << '\n';
}

FoldState FoldState::load(std::istream& in) {
  StateReader r{in};
  if (trim(r.line()) != "claimrank-fold-state 1") throw ParseError("fold state", 1, "not a fold state");
  FoldState st;
  const auto th = r.header("tfidf");
  if (th.size() != 3) throw ParseError("fold state", r.line_no, "bad tfidf header");
  std::vector<std::string> terms;
  std::vector<double> idf;
  for (std::size_t i = 0, n = r.count(th[2]); i < n; ++i) {
    const auto cols = split(r.line(), '\t');
    if (cols.size() != 2) throw ParseError("fold state", r.line_no, "expected term<TAB>idf");
    terms.push_back(cols[0]);
    idf.push_back(r.number(cols[1]));
  }
  st.tfidf = TfIdfModel::from_terms(std::move(terms), std::move(idf), static_cast<int>(r.count(th[1])));
  st.knn_training = r.knn("training");
  st.knn_politifact = r.knn("politifact");
  const auto sh = r.header("scaler");
  if (sh.size() != 2) throw ParseError("fold state", r.line_no, "bad scaler header");
  const auto dim = static_cast<Eigen::Index>(r.count(sh[1]));
  st.scaler.mean.resize(dim);
  st.scaler.stddev.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto cols = split(r.line(), '\t');
    if (cols.size() != 2) throw ParseError("fold state", r.line_no, "expected mean<TAB>stddev");
    st.scaler.mean(i) = r.number(cols[0]);
    st.scaler.stddev(i) = r.number(cols[1]);
  }
  return st;
}

Eigen::VectorXd cb_features(const Tokens& tokens, const TfIdfModel& tfidf, const Gazetteer& gazetteer,
                            const Lexicon& polarity) {
  Eigen::VectorXd v(group_dimension(FeatureGroup::CB));
  v.head(kTfIdfDim) = tfidf.transform(tokens);
  v.tail(group_dimension(FeatureGroup::CB) - kTfIdfDim) = cb_static(tokens, gazetteer, polarity);
  return v;
}

Eigen::VectorXd sentiment_features(const Tokens& tokens, const Lexicon& polarity) {
  const auto c = sentiment_counts(tokens, polarity.matcher());
  return Eigen::Vector2d(static_cast<double>(c.positive), static_cast<double>(c.negative));
}

Eigen::VectorXd ne_count_feature(const Tokens& tokens, const Gazetteer& gazetteer) {
  return Eigen::VectorXd::Constant(1, static_cast<double>(detect_named_entities(tokens, gazetteer).size()));
}

Eigen::VectorXd linguistic_features(const Tokens& tokens,
                                    const std::array<const Lexicon*, kNumLinguisticLexicons>& lexicons) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kNumLinguisticLexicons);
  for (std::size_t i = 0; i < kNumLinguisticLexicons; ++i)
    if (lexicons[i]) v(static_cast<Eigen::Index>(i)) = static_cast<double>(lexicons[i]->count_matches(tokens));
  return v;
}

Eigen::VectorXd tense_feature(const Tokens& tokens) {
  return Eigen::VectorXd::Constant(1, static_cast<double>(static_cast<int>(detect_tense(tokens))));
}

Eigen::VectorXd length_feature(std::string_view text) {
  return Eigen::VectorXd::Constant(1, static_cast<double>(utf8_length(text)));
}

Eigen::VectorXd position_features(const Sentence& sentence, const Segment& segment) {
  const int i = sentence.index_in_segment;
  return Eigen::Vector3d(i == 0 ? 1.0 : 0.0, i + 1 == segment.size() ? 1.0 : 0.0, 1.0 / (i + 1));
}

Eigen::VectorXd segment_size_features(const Sentence& sentence, const Debate& debate) {
  const auto* prev = debate.previous_segment(sentence);
  const auto* next = debate.next_segment(sentence);
  return Eigen::Vector3d(prev ? prev->size() : 0, debate.segment_of(sentence).size(),
                         next ? next->size() : 0);
}

Eigen::VectorXd metadata_features(const Sentence& sentence, const Tokens& tokens, const Debate& debate) {
  const auto& p = debate.participants;
  const auto role = p.role_of(sentence.speaker);
  if (!role)
    throw ConfigError("speaker '" + sentence.speaker + "' is not a participant of debate " +
                      debate.debate_id);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
  if (auto opponent = p.opponent_of(sentence.speaker)) {
    const auto names = p.name_words(*opponent);
    for (const auto& t : tokens)
      if (std::find(names.begin(), names.end(), t.normalized) != names.end()) {
        v(0) = 1.0;
        break;
      }
  }
  v(1) = *role == Role::Moderator ? 1.0 : 0.0;
  v(2 + static_cast<int>(*role)) = 1.0;
  for (std::size_t e = 0; e < kNumEvents; ++e)
    v(5 + static_cast<Eigen::Index>(e)) = sentence.followed_by.test(e) ? 1.0 : 0.0;
  return v;
}

const Eigen::VectorXd& SegmentCache::topics(const SentenceView& view, int segment_id,
                                            const TopicModel& model, int sweeps, std::uint64_t seed) {
  auto it = topics_.find(segment_id);
  if (it != topics_.end()) return it->second;
  std::vector<const Tokens*> parts;
  for (int idx : view.debate.debate->segments[static_cast<std::size_t>(segment_id)].sentences)
    parts.push_back(&view.debate.tokens[static_cast<std::size_t>(idx)]);
  return topics_.emplace(segment_id, segment_topics(model, parts, sweeps, seed)).first->second;
}

const Eigen::VectorXd& SegmentCache::embedding(const SentenceView& view, int segment_id,
                                               const EmbeddingTable& table) {
  auto it = embeddings_.find(segment_id);
  if (it != embeddings_.end()) return it->second;
  Tokens all;
  for (int idx : view.debate.debate->segments[static_cast<std::size_t>(segment_id)].sentences) {
    const auto& t = view.debate.tokens[static_cast<std::size_t>(idx)];
    all.insert(all.end(), t.begin(), t.end());
  }
  return embeddings_.emplace(segment_id, sentence_embedding(all, table)).first->second;
}

Eigen::VectorXd topic_features(const SentenceView& view, const TopicModel& model, int sweeps,
                               std::uint64_t seed, SegmentCache* cache) {
  SegmentCache local;
  SegmentCache& c = cache ? *cache : local;
  const int k = model.num_topics();
  if (k != 300)
    throw ConfigError("topic features need a 300-topic model, got " + std::to_string(k));
  Eigen::VectorXd v(group_dimension(FeatureGroup::Topics));
  const Eigen::VectorXd dist = infer_topics(model, view.tokens(), sweeps, seed);
  v.head(k) = dist;
  const auto& s = view.sentence();
  const int segs = static_cast<int>(view.debate.debate->segments.size());
  for (int off = -1; off <= 1; ++off) {
    const int id = s.segment_id + off;
    v(k + 1 + off) = (id < 0 || id >= segs) ? 0.0 : cosine(dist, c.topics(view, id, model, sweeps, seed));
  }
  return v;
}

Eigen::VectorXd embedding_features(const SentenceView& view, const EmbeddingTable& table,
                                   SegmentCache* cache) {
  SegmentCache local;
  SegmentCache& c = cache ? *cache : local;
  if (table.dimension() != 300)
    throw ConfigError("embedding features need 300-dimensional vectors, got " +
                      std::to_string(table.dimension()));
  Eigen::VectorXd v(group_dimension(FeatureGroup::Embeddings));
  const Eigen::VectorXd mean = sentence_embedding(view.tokens(), table);
  v.head(300) = mean;
  const auto& s = view.sentence();
  const int segs = static_cast<int>(view.debate.debate->segments.size());
  for (int off = -1; off <= 1; ++off) {
    const int id = s.segment_id + off;
    v(301 + off) = (id < 0 || id >= segs) ? 0.0 : cosine(mean, c.embedding(view, id, table));
  }
  return v;
}

Eigen::VectorXd discourse_features(const SentenceView& view, const DiscourseCues& cues) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(group_dimension(FeatureGroup::Discourse));
  const auto& s = view.sentence();
  const auto& seg = view.segment();
  if (s.index_in_segment > 0)
    if (auto r = cues.opening_relation(view.tokens())) v(*r) = 1.0;
  if (s.index_in_segment + 1 < seg.size()) {
    const int next = seg.sentences[static_cast<std::size_t>(s.index_in_segment + 1)];
    if (auto r = cues.opening_relation(view.debate.tokens[static_cast<std::size_t>(next)])) v(*r) = 1.0;
  }
  const double c = static_cast<double>(cues.intra_cue_count(view.tokens()));
  v(kNumDiscourseRelations) = c + 1.0;
  v(kNumDiscourseRelations + 1) = c;
  return v;
}

Eigen::VectorXd contradiction_features(const SentenceView& view, const CueList& negations) {
  const auto& d = view.debate;
  auto negs_of = [&](int idx) {
    return static_cast<double>(count_negations(d.tokens[static_cast<std::size_t>(idx)], negations));
  };
  auto negs_of_segment = [&](const Segment* seg) {
    double n = 0;
    if (seg)
      for (int idx : seg->sentences) n += negs_of(idx);
    return n;
  };
  const auto& s = view.sentence();
  const auto& seg = view.segment();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(5);
  v(0) = negs_of(view.index);
  if (s.index_in_segment > 0) v(1) = negs_of(seg.sentences[static_cast<std::size_t>(s.index_in_segment - 1)]);
  if (s.index_in_segment + 1 < seg.size())
    v(2) = negs_of(seg.sentences[static_cast<std::size_t>(s.index_in_segment + 1)]);
  v(3) = negs_of_segment(d.debate->previous_segment(s));
  v(4) = negs_of_segment(d.debate->next_segment(s));
  return v;
}

KnnQuery knn_query(const SentenceView& view) {
  return {view.sentence().sentence_id, view.sentence().speaker, word_types(view.tokens())};
}

FeatureVector assemble(const SentenceView& view, const GroupSelection& selection,
                       const ResourceBundle& resources, const FoldState& fold_state) {
  resources.require(selection);
  auto registry = std::make_shared<const FeatureRegistry>(selection);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(kFullDimension);
  SegmentCache cache;
  for (auto g : all_groups()) {
    if (!selection.has(g)) continue;
    Eigen::VectorXd block;
    if (g == FeatureGroup::CB) {
      block = cb_features(view.tokens(), fold_state.tfidf, *resources.gazetteer, *resources.polarity);
    } else if (g == FeatureGroup::KNN) {
      const auto f = knn_features(knn_query(view), fold_state.knn_training, fold_state.knn_politifact);
      block = Eigen::Vector3d(f[0], f[1], f[2]);
    } else {
      block = static_block(g, view, resources, cache);
    }
    if (block.size() != group_dimension(g))
      throw Error("group " + std::string(group_name(g)) + " produced " + std::to_string(block.size()) +
                  " values, declared " + std::to_string(group_dimension(g)));
    full.segment(group_offset(g), block.size()) = block;
  }
  FeatureVector out;
  out.values.resize(registry->dimension());
  for (const auto& slot : registry->slots()) out.values(slot.index) = full(slot.full_index);
  if (fold_state.scaler.fitted()) out.values = apply_scaler(fold_state.scaler, out.values);
  out.registry = std::move(registry);
  return out;
}

Eigen::MatrixXd static_feature_matrix(const AnalyzedDebate& debate, const GroupSelection& selection,
                                      const ResourceBundle& resources) {
  GroupSelection needed = selection;
  needed.groups.reset(static_cast<std::size_t>(FeatureGroup::KNN));
  resources.require(needed);
  const auto n = static_cast<Eigen::Index>(debate.tokens.size());
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, kFullDimension);
  SegmentCache cache;
  for (Eigen::Index i = 0; i < n; ++i) {
    const SentenceView view{debate, static_cast<int>(i)};
    for (auto g : all_groups()) {
      if (!selection.has(g) || g == FeatureGroup::KNN) continue;
      const Eigen::VectorXd block = static_block(g, view, resources, cache);
      full.row(i).segment(group_offset(g), block.size()) = block.transpose();
    }
  }
  return full;
}

void fill_fold_features(Eigen::MatrixXd& full, const AnalyzedDebate& debate,
                        const GroupSelection& selection, const FoldState& fold_state) {
  const int cb = group_offset(FeatureGroup::CB);
  const int knn = group_offset(FeatureGroup::KNN);
  for (Eigen::Index i = 0; i < full.rows(); ++i) {
    const SentenceView view{debate, static_cast<int>(i)};
    if (selection.has(FeatureGroup::CB))
      full.row(i).segment(cb, kTfIdfDim) = fold_state.tfidf.transform(view.tokens()).transpose();
    if (selection.has(FeatureGroup::KNN)) {
      const auto f = knn_features(knn_query(view), fold_state.knn_training, fold_state.knn_politifact);
      full.row(i).segment(knn, 3) = Eigen::RowVector3d(f[0], f[1], f[2]);
    }
  }
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& full, const FeatureRegistry& registry) {
  if (full.cols() != kFullDimension)
    throw Error("select_columns: expected full-layout rows of width " + std::to_string(kFullDimension));
  Eigen::MatrixXd out(full.rows(), registry.dimension());
  for (const auto& slot : registry.slots()) out.col(slot.index) = full.col(slot.full_index);
  return out;
}

void write_feature_matrix(std::ostream& out, const FeatureRegistry& registry,
                          const std::vector<int>& sentence_ids, const Eigen::MatrixXd& rows) {
  out << "sentence_id";
  for (const auto& name : registry.column_names()) out << '\t' << name;
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out << sentence_ids.at(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.10g", rows(i, j));
      out << '\t' << buf;
    }
    out << '\n';
  }
}

}  // namespace claimrank
