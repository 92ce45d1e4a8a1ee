#pragma once

// Deterministic text analysis: tokenization, rule-based POS tagging,
// heuristic named entities, tense, negations and lexicon matching.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace claimrank {

// 17 universal coarse tags followed by 8 punctuation/symbol/foreign
// subdivisions. Order is the feature order of pos_histogram.
enum class PosTag : int {
  ADJ = 0, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN,
  PUNCT, SCONJ, SYM, VERB, X,
  PUNCT_PERIOD,   // . ! ?
  PUNCT_COMMA,    // ,
  PUNCT_COLON,    // : ;
  PUNCT_QUOTE,    // " ' ` and typographic quotes
  PUNCT_BRACKET,  // ( ) [ ] { }
  PUNCT_DASH,     // - -- and dashes
  SYM_CURRENCY,   // $ and other currency signs
  X_FOREIGN,      // non-ASCII words outside the lexicon
};

inline constexpr std::size_t kNumPosTags = 25;

std::string_view pos_name(PosTag tag);
std::optional<PosTag> parse_pos(std::string_view name);

struct Token {
  std::string surface;
  std::string normalized;  // case-folded surface
  std::optional<PosTag> pos;
  bool past_form = false;  // morphological past tense, set by the tagger
  std::pair<std::size_t, std::size_t> span{0, 0};  // [start, end) bytes
};

using Tokens = std::vector<Token>;

// Splits on whitespace and punctuation. Contractions split at the
// apostrophe ("didn't" -> "did" "n't", "I'll" -> "I" "'ll"), numbers keep
// their internal separators ("5,000", "3.5"), hyphenated words stay whole.
Tokens tokenize(std::string_view text);

bool is_word(const Token& token);  // has at least one letter or digit

struct TagEntry {
  PosTag tag = PosTag::NOUN;
  bool past_form = false;
};

class PosTagger {
 public:
  PosTagger() = default;
  PosTagger(std::unordered_map<std::string, TagEntry> lexicon,
            std::vector<std::pair<std::string, TagEntry>> suffix_rules)
      : lexicon_(std::move(lexicon)), suffix_rules_(std::move(suffix_rules)) {}

  // word<TAB>tag[<TAB>Tense=Past]; '#' comments.
  static PosTagger load(const std::string& lexicon_path, const std::string& suffix_path);

  // Lexicon lookup, then character-class rules (numbers, punctuation),
  // then the first matching suffix rule, then NOUN.
  void tag(Tokens& tokens) const;
  TagEntry tag_word(std::string_view surface, std::string_view normalized) const;

  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  std::unordered_map<std::string, TagEntry> lexicon_;
  std::vector<std::pair<std::string, TagEntry>> suffix_rules_;
};

std::array<double, kNumPosTags> pos_histogram(const Tokens& tokens);

// Type slots of the 20-dim entity-type vector; slots past OTHER stay zero.
enum class EntityType : int { PERSON = 0, LOCATION, ORGANIZATION, DATE, NUMBER, OTHER };
inline constexpr std::size_t kNumEntitySlots = 20;

std::string_view entity_name(EntityType type);

struct Entity {
  std::size_t first = 0;  // token range [first, last)
  std::size_t last = 0;
  EntityType type = EntityType::OTHER;
};

class Gazetteer {
 public:
  // One name per line under [PERSON] / [LOCATION] / [ORGANIZATION] headers.
  // Month names are built in as DATE.
  static Gazetteer load(const std::string& path);
  static Gazetteer with_months();

  void add(std::string_view name, EntityType type);
  // Looks up a case-folded word or multiword name.
  std::optional<EntityType> find(std::string_view folded) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, EntityType> names_;   // full names
  std::unordered_map<std::string, EntityType> words_;   // words of multiword names
};

// Maximal runs of capitalized, non-function-word tokens. A sentence-initial
// word only starts an entity when the gazetteer knows it. Digit-bearing
// tokens form NUMBER entities.
std::vector<Entity> detect_named_entities(const Tokens& tokens, const Gazetteer& gazetteer);

std::array<double, kNumEntitySlots> entity_type_counts(const std::vector<Entity>& entities);

enum class Tense : int { Past = -1, Present = 0, Future = 1 };

// Future cue > past verb form > present.
Tense detect_tense(const Tokens& tokens);

class CueList {
 public:
  CueList() = default;
  explicit CueList(std::vector<std::string> cues);
  // One cue per line, '#' comments.
  static CueList load(const std::string& path);
  static CueList default_negations();

  bool contains(std::string_view folded) const { return cues_.count(std::string(folded)) > 0; }
  std::size_t size() const { return cues_.size(); }

 private:
  std::unordered_set<std::string> cues_;
};

std::size_t count_negations(const Tokens& tokens, const CueList& cues);

// Greedy longest-match phrase matcher over normalized tokens: scanning left
// to right, the longest entry starting at the current token wins and its
// tokens are consumed.
class PhraseMatcher {
 public:
  struct Match {
    std::size_t first = 0;
    std::size_t length = 0;
    int payload = 0;
  };

  // Phrases are tokenized with tokenize() and case-folded. A repeated phrase
  // keeps its first payload.
  void add(std::string_view phrase, int payload = 0);
  std::vector<Match> match(const Tokens& tokens) const;
  std::size_t count(const Tokens& tokens) const { return match(tokens).size(); }
  std::size_t size() const { return phrases_.size(); }
  std::size_t max_length() const { return max_length_; }
  bool contains(const std::vector<std::string>& words) const;
  const std::map<std::vector<std::string>, int>& phrases() const { return phrases_; }

 private:
  std::map<std::vector<std::string>, int> phrases_;
  std::size_t max_length_ = 0;
};

inline constexpr int kPositive = 1;
inline constexpr int kNegative = -1;

struct SentimentCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
};

// `lexicon` payloads are kPositive / kNegative.
SentimentCounts sentiment_counts(const Tokens& tokens, const PhraseMatcher& lexicon);

// (pos - neg) / max(1, pos + neg)
double polarity_score(const SentimentCounts& counts);

}  // namespace claimrank
