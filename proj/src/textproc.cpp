#include "claimrank/textproc.hpp"

#include <algorithm>
#include <fstream>

#include "claimrank/errors.hpp"
#include "claimrank/strings.hpp"

namespace claimrank {

namespace {

constexpr std::array<std::string_view, kNumPosTags> kPosNames = {
    "ADJ",   "ADP",   "ADV",          "AUX",         "CCONJ",       "DET",
    "INTJ",  "NOUN",  "NUM",          "PART",        "PRON",        "PROPN",
    "PUNCT", "SCONJ", "SYM",          "VERB",        "X",           "PUNCT_PERIOD",
    "PUNCT_COMMA",    "PUNCT_COLON",  "PUNCT_QUOTE", "PUNCT_BRACKET", "PUNCT_DASH",
    "SYM_CURRENCY",   "X_FOREIGN"};

constexpr std::array<std::string_view, 6> kEntityNames = {"PERSON", "LOCATION", "ORGANIZATION",
                                                          "DATE",   "NUMBER",   "OTHER"};

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Length of a typographic punctuation sequence at `i` (U+2018/2019/201C/201D
// quotes, U+2013/2014 dashes, U+2026 ellipsis), 0 otherwise.
std::size_t typographic_at(std::string_view s, std::size_t i) {
  if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
      static_cast<unsigned char>(s[i + 1]) == 0x80) {
    const auto c = static_cast<unsigned char>(s[i + 2]);
    if (c == 0x98 || c == 0x99 || c == 0x9C || c == 0x9D || c == 0x93 || c == 0x94 || c == 0xA6)
      return 3;
  }
  return 0;
}

bool is_right_single_quote(std::string_view s, std::size_t i) {
  return typographic_at(s, i) == 3 && static_cast<unsigned char>(s[i + 2]) == 0x99;
}

// Apostrophe (ASCII or U+2019) length at i, 0 when none.
std::size_t apostrophe_at(std::string_view s, std::size_t i) {
  if (i < s.size() && s[i] == '\'') return 1;
  if (is_right_single_quote(s, i)) return 3;
  return 0;
}

bool is_word_byte(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (is_ascii_alpha(c) || is_digit(c)) return true;
  return static_cast<unsigned char>(c) >= 0x80 && typographic_at(s, i) == 0;
}

std::string normalize(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  for (std::size_t i = 0; i < surface.size();) {
    if (is_right_single_quote(surface, i)) {
      out += '\'';
      i += 3;
    } else {
      out += fold_char(surface[i]);
      ++i;
    }
  }
  return out;
}

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> abbr = {"mr", "mrs", "ms", "dr", "st", "jr",
                                                       "sr", "vs", "gov", "sen", "rep", "gen"};
  return abbr;
}

void push_token(Tokens& out, std::string_view text, std::size_t b, std::size_t e) {
  Token t;
  t.surface = std::string(text.substr(b, e - b));
  t.normalized = normalize(t.surface);
  t.span = {b, e};
  out.push_back(std::move(t));
}

// Splits a scanned word at a contraction boundary when there is one.
void push_word(Tokens& out, std::string_view text, std::size_t b, std::size_t e) {
  std::size_t apos = e;
  std::size_t alen = 0;
  for (std::size_t i = b; i < e; ++i)
    if ((alen = apostrophe_at(text, i)) != 0) {
      apos = i;
      break;
    }
  if (apos == e) {
    push_token(out, text, b, e);
    return;
  }
  const std::string rest = normalize(text.substr(apos + alen, e - apos - alen));
  if (rest == "t" && apos > b + 1 && fold_char(text[apos - 1]) == 'n') {
    push_token(out, text, b, apos - 1);
    push_token(out, text, apos - 1, e);
  } else if (apos > b &&
             (rest == "s" || rest == "re" || rest == "ve" || rest == "ll" || rest == "d" || rest == "m")) {
    push_token(out, text, b, apos);
    push_token(out, text, apos, e);
  } else {
    push_token(out, text, b, e);
  }
}

PosTag punctuation_tag(std::string_view s) {
  if (s == "." || s == "!" || s == "?" || s == "..." || s == "\xE2\x80\xA6") return PosTag::PUNCT_PERIOD;
  if (s == ",") return PosTag::PUNCT_COMMA;
  if (s == ":" || s == ";") return PosTag::PUNCT_COLON;
  if (s == "\"" || s == "'" || s == "`" || s == "\xE2\x80\x98" || s == "\xE2\x80\x99" ||
      s == "\xE2\x80\x9C" || s == "\xE2\x80\x9D")
    return PosTag::PUNCT_QUOTE;
  if (s == "(" || s == ")" || s == "[" || s == "]" || s == "{" || s == "}") return PosTag::PUNCT_BRACKET;
  if (!s.empty() && (s.find_first_not_of('-') == std::string_view::npos || s == "\xE2\x80\x93" ||
                     s == "\xE2\x80\x94"))
    return PosTag::PUNCT_DASH;
  if (s == "$" || s == "\xE2\x82\xAC" || s == "\xC2\xA3") return PosTag::SYM_CURRENCY;
  if (s == "%" || s == "&" || s == "+" || s == "=" || s == "/" || s == "#" || s == "@" ||
      s == "*" || s == "<" || s == ">")
    return PosTag::SYM;
  return PosTag::PUNCT;
}

TagEntry parse_tag_fields(const std::vector<std::string>& cols, const std::string& file,
                          std::size_t line_no) {
  TagEntry e;
  const auto tag = parse_pos(trim(cols[1]));
  if (!tag) throw ParseError(file, line_no, "unknown POS tag '" + cols[1] + "'");
  e.tag = *tag;
  if (cols.size() > 2) {
    const auto feat = trim(cols[2]);
    if (feat == "Tense=Past")
      e.past_form = true;
    else if (!feat.empty())
      throw ParseError(file, line_no, "unknown feature '" + std::string(feat) + "'");
  }
  return e;
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

bool is_function_tag(PosTag t) {
  switch (t) {
    case PosTag::PRON:
    case PosTag::DET:
    case PosTag::ADP:
    case PosTag::CCONJ:
    case PosTag::SCONJ:
    case PosTag::AUX:
    case PosTag::PART:
    case PosTag::INTJ:
      return true;
    default:
      return false;
  }
}

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_digit(c); });
}

}  // namespace

std::string_view pos_name(PosTag tag) { return kPosNames.at(static_cast<std::size_t>(tag)); }

std::optional<PosTag> parse_pos(std::string_view name) {
  for (std::size_t i = 0; i < kNumPosTags; ++i)
    if (kPosNames[i] == name) return static_cast<PosTag>(i);
  return std::nullopt;
}

std::string_view entity_name(EntityType type) {
  return kEntityNames.at(static_cast<std::size_t>(type));
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    if (is_word_byte(text, i)) {
      const std::size_t b = i;
      while (i < n) {
        if (is_word_byte(text, i)) {
          ++i;
          continue;
        }
        // internal apostrophe or hyphen between word characters
        const auto alen = apostrophe_at(text, i);
        if (alen && i + alen < n && is_word_byte(text, i + alen)) {
          i += alen;
          continue;
        }
        if (text[i] == '-' && i + 1 < n && is_word_byte(text, i + 1) && i > b) {
          ++i;
          continue;
        }
        // 5,000 and 3.5
        if ((text[i] == ',' || text[i] == '.') && i > b && is_digit(text[i - 1]) && i + 1 < n &&
            is_digit(text[i + 1])) {
          ++i;
          continue;
        }
        break;
      }
      // U.S., D.C.
      if (i - b == 1 && is_ascii_alpha(text[b]) && i + 1 < n && text[i] == '.' &&
          is_ascii_alpha(text[i + 1]) && i + 2 < n && text[i + 2] == '.') {
        while (i + 1 < n && text[i] == '.' && is_ascii_alpha(text[i + 1]) &&
               (i + 2 >= n || !is_word_byte(text, i + 2)))
          i += 2;
        if (i < n && text[i] == '.') ++i;
        push_token(out, text, b, i);
        continue;
      }
      if (i < n && text[i] == '.' && abbreviations().count(fold_case(text.substr(b, i - b)))) {
        ++i;
        push_token(out, text, b, i);
        continue;
      }
      push_word(out, text, b, i);
      continue;
    }
    if (const auto len = typographic_at(text, i)) {
      push_token(out, text, i, i + len);
      i += len;
      continue;
    }
    // runs of '.' and '-' stay together
    if (text[i] == '.' || text[i] == '-') {
      const std::size_t b = i;
      const char c = text[i];
      while (i < n && text[i] == c) ++i;
      push_token(out, text, b, i);
      continue;
    }
    push_token(out, text, i, i + 1);
    ++i;
  }
  return out;
}

bool is_word(const Token& token) {
  for (std::size_t i = 0; i < token.surface.size(); ++i)
    if (is_word_byte(token.surface, i)) return true;
  return false;
}

PosTagger PosTagger::load(const std::string& lexicon_path, const std::string& suffix_path) {
  std::unordered_map<std::string, TagEntry> lexicon;
  for_each_data_line(lexicon_path, [&](const std::string& line, std::size_t line_no) {
    const auto cols = split(line, '\t');
    if (cols.size() < 2) throw ParseError(lexicon_path, line_no, "expected word<TAB>tag");
    lexicon[normalize(trim(cols[0]))] = parse_tag_fields(cols, lexicon_path, line_no);
  });
  std::vector<std::pair<std::string, TagEntry>> rules;
  for_each_data_line(suffix_path, [&](const std::string& line, std::size_t line_no) {
    const auto cols = split(line, '\t');
    if (cols.size() < 2) throw ParseError(suffix_path, line_no, "expected suffix<TAB>tag");
    rules.emplace_back(fold_case(trim(cols[0])), parse_tag_fields(cols, suffix_path, line_no));
  });
  return PosTagger(std::move(lexicon), std::move(rules));
}

TagEntry PosTagger::tag_word(std::string_view surface, std::string_view normalized) const {
  if (auto it = lexicon_.find(std::string(normalized)); it != lexicon_.end()) return it->second;
  if (!surface.empty() && is_digit(surface.front())) return {PosTag::NUM, false};
  bool word = false;
  bool foreign = false;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    if (is_word_byte(surface, i)) word = true;
    if (static_cast<unsigned char>(surface[i]) >= 0x80 && typographic_at(surface, i) == 0)
      foreign = true;
  }
  if (!word) return {punctuation_tag(surface), false};
  if (foreign) return {PosTag::X_FOREIGN, false};
  for (const auto& [suffix, entry] : suffix_rules_)
    if (normalized.size() > suffix.size() &&
        normalized.compare(normalized.size() - suffix.size(), suffix.size(), suffix) == 0)
      return entry;
  return {PosTag::NOUN, false};
}

void PosTagger::tag(Tokens& tokens) const {
  if (lexicon_.empty()) throw ResourceError("POS tagger has no tag lexicon loaded");
  for (auto& t : tokens) {
    const auto e = tag_word(t.surface, t.normalized);
    t.pos = e.tag;
    t.past_form = e.past_form;
  }
}

std::array<double, kNumPosTags> pos_histogram(const Tokens& tokens) {
  std::array<double, kNumPosTags> h{};
  for (const auto& t : tokens)
    if (t.pos) h[static_cast<std::size_t>(*t.pos)] += 1.0;
  return h;
}

Gazetteer Gazetteer::with_months() {
  Gazetteer g;
  for (auto m : kMonths) g.add(m, EntityType::DATE);
  return g;
}

Gazetteer Gazetteer::load(const std::string& path) {
  Gazetteer g = with_months();
  std::optional<EntityType> section;
  for_each_data_line(path, [&](const std::string& line, std::size_t line_no) {
    if (line.front() == '[') {
      if (line == "[PERSON]")
        section = EntityType::PERSON;
      else if (line == "[LOCATION]")
        section = EntityType::LOCATION;
      else if (line == "[ORGANIZATION]")
        section = EntityType::ORGANIZATION;
      else
        throw ParseError(path, line_no, "unknown gazetteer section " + line);
      return;
    }
    if (!section) throw ParseError(path, line_no, "gazetteer entry before any section header");
    g.add(line, *section);
  });
  return g;
}

void Gazetteer::add(std::string_view name, EntityType type) {
  const auto words = split_ws(name);
  if (words.empty()) return;
  std::vector<std::string> folded;
  for (const auto& w : words) folded.push_back(fold_case(w));
  names_.emplace(join(folded, " "), type);
  if (folded.size() > 1)
    for (const auto& w : folded) words_.emplace(w, type);
}

std::optional<EntityType> Gazetteer::find(std::string_view folded) const {
  if (auto it = names_.find(std::string(folded)); it != names_.end()) return it->second;
  if (auto it = words_.find(std::string(folded)); it != words_.end()) return it->second;
  return std::nullopt;
}

std::vector<Entity> detect_named_entities(const Tokens& tokens, const Gazetteer& gazetteer) {
  std::vector<Entity> out;
  // first word token of the sentence (skipping opening quotes/brackets)
  std::size_t initial = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (is_word(tokens[i])) {
      initial = i;
      break;
    }

  auto candidate = [&](std::size_t i) {
    const auto& t = tokens[i];
    if (!starts_with_upper(t.surface)) return false;
    const bool known = gazetteer.find(t.normalized).has_value();
    if (i == initial) return known;
    if (known) return true;
    return !(t.pos && is_function_tag(*t.pos));
  };

  std::size_t i = 0;
  while (i < tokens.size()) {
    if (has_digit(tokens[i].surface) && is_digit(tokens[i].surface.front())) {
      std::size_t j = i + 1;
      while (j < tokens.size() && !tokens[j].surface.empty() && is_digit(tokens[j].surface.front()))
        ++j;
      out.push_back({i, j, EntityType::NUMBER});
      i = j;
      continue;
    }
    if (!candidate(i)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tokens.size() && j != initial && candidate(j)) ++j;
    std::string phrase;
    for (std::size_t k = i; k < j; ++k) phrase += (k > i ? " " : "") + tokens[k].normalized;
    std::optional<EntityType> type = gazetteer.find(phrase);
    if (!type) {
      // priority PERSON > LOCATION > ORGANIZATION > DATE among the words
      for (std::size_t k = i; k < j; ++k)
        if (auto t = gazetteer.find(tokens[k].normalized); t && (!type || *t < *type)) type = t;
    }
    out.push_back({i, j, type.value_or(EntityType::OTHER)});
    i = j;
  }
  return out;
}

std::array<double, kNumEntitySlots> entity_type_counts(const std::vector<Entity>& entities) {
  std::array<double, kNumEntitySlots> counts{};
  for (const auto& e : entities) counts[static_cast<std::size_t>(e.type)] += 1.0;
  return counts;
}

Tense detect_tense(const Tokens& tokens) {
  bool past = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& w = tokens[i].normalized;
    if (w == "will" || w == "shall" || w == "'ll" || w == "wo") {
      if (w != "wo" || (i + 1 < tokens.size() && tokens[i + 1].normalized == "n't"))
        return Tense::Future;
    }
    if (i + 1 < tokens.size() && tokens[i + 1].normalized == "to" &&
        (w == "going" || w == "have"))
      return Tense::Future;
    if (tokens[i].past_form && tokens[i].pos &&
        (*tokens[i].pos == PosTag::VERB || *tokens[i].pos == PosTag::AUX))
      past = true;
  }
  return past ? Tense::Past : Tense::Present;
}

CueList::CueList(std::vector<std::string> cues) {
  for (auto& c : cues) cues_.insert(normalize(trim(c)));
}

CueList CueList::load(const std::string& path) {
  std::vector<std::string> cues;
  for_each_data_line(path, [&](const std::string& line, std::size_t) { cues.push_back(line); });
  return CueList(std::move(cues));
}

CueList CueList::default_negations() {
  return CueList({"not", "n't", "no", "never", "nothing", "nobody", "none", "neither", "nor",
                  "without"});
}

std::size_t count_negations(const Tokens& tokens, const CueList& cues) {
  std::size_t n = 0;
  for (const auto& t : tokens)
    if (cues.contains(t.normalized)) ++n;
  return n;
}

void PhraseMatcher::add(std::string_view phrase, int payload) {
  std::vector<std::string> words;
  for (const auto& t : tokenize(phrase)) words.push_back(t.normalized);
  if (words.empty()) return;
  max_length_ = std::max(max_length_, words.size());
  phrases_.emplace(std::move(words), payload);
}

bool PhraseMatcher::contains(const std::vector<std::string>& words) const {
  return phrases_.count(words) > 0;
}

std::vector<PhraseMatcher::Match> PhraseMatcher::match(const Tokens& tokens) const {
  std::vector<Match> out;
  std::vector<std::string> key;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::size_t longest = std::min(max_length_, tokens.size() - i);
    bool found = false;
    for (std::size_t len = longest; len >= 1; --len) {
      key.clear();
      for (std::size_t k = 0; k < len; ++k) key.push_back(tokens[i + k].normalized);
      if (auto it = phrases_.find(key); it != phrases_.end()) {
        out.push_back({i, len, it->second});
        i += len;
        found = true;
        break;
      }
    }
    if (!found) ++i;
  }
  return out;
}

SentimentCounts sentiment_counts(const Tokens& tokens, const PhraseMatcher& lexicon) {
  SentimentCounts c;
  for (const auto& m : lexicon.match(tokens)) {
    if (m.payload == kPositive) ++c.positive;
    if (m.payload == kNegative) ++c.negative;
  }
  return c;
}

double polarity_score(const SentimentCounts& counts) {
  const double pos = static_cast<double>(counts.positive);
  const double neg = static_cast<double>(counts.negative);
  return (pos - neg) / std::max(1.0, pos + neg);
}

}  // namespace claimrank
