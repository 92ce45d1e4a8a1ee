#include <doctest.h>

#include <map>

#include "claimrank/errors.hpp"
#include "claimrank/random.hpp"
#include "claimrank/strings.hpp"
#include "claimrank/textproc.hpp"
#include "support.hpp"

using namespace claimrank;

namespace {

std::vector<std::string> surfaces(const Tokens& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

const PosTagger& bundled_tagger() {
  static const PosTagger tagger = PosTagger::load(testutil::resource_dir() + "/pos/tag_lexicon.tsv",
                                                  testutil::resource_dir() + "/pos/suffix_rules.tsv");
  return tagger;
}

Tokens tagged(std::string_view text) {
  auto tokens = tokenize(text);
  bundled_tagger().tag(tokens);
  return tokens;
}

const Gazetteer& bundled_gazetteer() {
  static const Gazetteer g = [] {
    auto g = Gazetteer::load(testutil::resource_dir() + "/gazetteer.txt");
    g.add("Hillary Clinton", EntityType::PERSON);
    g.add("Clinton", EntityType::PERSON);
    return g;
  }();
  return g;
}

// Independent greedy longest match: at each position scan every phrase.
std::vector<PhraseMatcher::Match> brute_force_matches(const std::map<std::vector<std::string>, int>& phrases,
                                                      const std::vector<std::string>& words) {
  std::vector<PhraseMatcher::Match> out;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t best = 0;
    int payload = 0;
    for (const auto& [phrase, p] : phrases) {
      if (phrase.size() <= best || i + phrase.size() > words.size()) continue;
      if (std::equal(phrase.begin(), phrase.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
        best = phrase.size();
        payload = p;
      }
    }
    if (best > 0) {
      out.push_back({i, best, payload});
      i += best;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tokenizer") {
  CHECK(surfaces(tokenize("Murders are up.")) == std::vector<std::string>{"Murders", "are", "up", "."});
  CHECK(surfaces(tokenize("I didn't say nuclear.")) ==
        std::vector<std::string>{"I", "did", "n't", "say", "nuclear", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t ").empty());
  CHECK(surfaces(tokenize("I'll pay $5,000 or 3.5%.")) ==
        std::vector<std::string>{"I", "'ll", "pay", "$", "5,000", "or", "3.5", "%", "."});
  CHECK(surfaces(tokenize("a well-known fact")) == std::vector<std::string>{"a", "well-known", "fact"});
}

TEST_CASE("token spans are ordered, disjoint and address the surface") {
  Rng rng(3);
  const std::string alphabet = "ab ,.'-$9 Xn't";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto len = rng.below(40);
    for (std::uint64_t i = 0; i < len; ++i) text += alphabet[rng.below(alphabet.size())];
    const auto tokens = tokenize(text);
    std::size_t last_end = 0;
    for (const auto& t : tokens) {
      CHECK(t.span.first >= last_end);
      CHECK(t.span.second > t.span.first);
      CHECK(text.substr(t.span.first, t.span.second - t.span.first) == t.surface);
      CHECK(t.normalized == fold_case(t.surface));
      last_end = t.span.second;
    }
  }
}

TEST_CASE("tagger lookup, suffix fallback and default") {
  PosTagger tagger({{"running", {PosTag::VERB, false}}}, {{"ly", {PosTag::ADV, false}}});
  CHECK(tagger.tag_word("running", "running").tag == PosTag::VERB);
  CHECK(tagger.tag_word("blargly", "blargly").tag == PosTag::ADV);
  CHECK(tagger.tag_word("zorp", "zorp").tag == PosTag::NOUN);
  CHECK(tagger.tag_word("42", "42").tag == PosTag::NUM);
  CHECK(tagger.tag_word(",", ",").tag == PosTag::PUNCT_COMMA);
  CHECK(tagger.tag_word("$", "$").tag == PosTag::SYM_CURRENCY);
  CHECK_THROWS_AS(PosTagger::load("/nonexistent/lex.tsv", "/nonexistent/suf.tsv"), ResourceError);
  CHECK(bundled_tagger().lexicon_size() > 100);
}

TEST_CASE("every token gets one of the 25 tags") {
  const auto tokens = tagged("Well, nobody was pressing it -- nobody cared about $5 (really)!");
  for (const auto& t : tokens) {
    REQUIRE(t.pos.has_value());
    CHECK(static_cast<int>(*t.pos) >= 0);
    CHECK(static_cast<std::size_t>(*t.pos) < kNumPosTags);
    CHECK(parse_pos(pos_name(*t.pos)) == t.pos);
  }
}

TEST_CASE("POS histogram") {
  PosTagger nouns({{"the", {PosTag::DET, false}}}, {});
  auto four = tokenize("cats dogs birds fish");
  nouns.tag(four);
  const auto h = pos_histogram(four);
  for (std::size_t i = 0; i < kNumPosTags; ++i) CHECK(h[i] == (i == static_cast<std::size_t>(PosTag::NOUN) ? 4 : 0));
  for (double v : pos_histogram({})) CHECK(v == 0);

  const auto mixed = tagged("The economy grew 3 percent, and wages rose.");
  std::map<PosTag, int> hand;
  for (const auto& t : mixed) hand[*t.pos]++;
  const auto hm = pos_histogram(mixed);
  double total = 0;
  for (std::size_t i = 0; i < kNumPosTags; ++i) {
    CHECK(hm[i] == hand[static_cast<PosTag>(i)]);
    total += hm[i];
  }
  CHECK(total == mixed.size());
}

TEST_CASE("named entities") {
  const auto& g = bundled_gazetteer();
  auto count_type = [&](std::string_view text, EntityType type) {
    int n = 0;
    for (const auto& e : detect_named_entities(tagged(text), g)) n += e.type == type ? 1 : 0;
    return n;
  };
  const auto clinton = detect_named_entities(tagged("Hillary Clinton attacked those same women."), g);
  REQUIRE(clinton.size() == 1);
  CHECK(clinton[0].type == EntityType::PERSON);
  CHECK(clinton[0].last - clinton[0].first == 2);
  CHECK(detect_named_entities(tagged("we will cut taxes for everyone."), g).empty());
  CHECK(count_type("Russia has used cyber attacks.", EntityType::LOCATION) == 1);
  CHECK(count_type("We lost 5,000 jobs.", EntityType::NUMBER) == 1);
  const auto counts = entity_type_counts(detect_named_entities(tagged("Clinton went to Ohio and Michigan."), g));
  CHECK(counts.size() == kNumEntitySlots);
  CHECK(counts[static_cast<std::size_t>(EntityType::PERSON)] == 1);
  CHECK(counts[static_cast<std::size_t>(EntityType::LOCATION)] == 2);
  CHECK_THROWS_AS(Gazetteer::load("/nonexistent/gazetteer.txt"), ResourceError);
}

TEST_CASE("tense") {
  CHECK(detect_tense(tagged("He will cut taxes.")) == Tense::Future);
  CHECK(detect_tense(tagged("Five million people lost their homes.")) == Tense::Past);
  CHECK(detect_tense(tagged("Bullying is up.")) == Tense::Present);
  CHECK(detect_tense({}) == Tense::Present);
}

TEST_CASE("negations") {
  const auto cues = CueList::load(testutil::resource_dir() + "/negation_cues.txt");
  CHECK(count_negations(tokenize("I didn't say nuclear."), cues) == 1);
  CHECK(count_negations(tokenize("Well, nobody was pressing it, nobody was caring much about it."), cues) == 2);
  CHECK(count_negations(tokenize("Murders are up."), cues) == 0);
  CHECK(count_negations(tokenize("I didn't say nuclear."), CueList::default_negations()) == 1);
  CHECK_THROWS_AS(CueList::load("/nonexistent/cues.txt"), ResourceError);
}

TEST_CASE("sentiment counts and polarity") {
  PhraseMatcher lex;
  lex.add("viciously", kNegative);
  lex.add("great", kPositive);
  const auto c = sentiment_counts(tokenize("She attacked them viciously."), lex);
  CHECK(c.positive == 0);
  CHECK(c.negative == 1);
  const auto e = sentiment_counts({}, lex);
  CHECK(e.positive + e.negative == 0);
  CHECK(polarity_score({0, 1}) == -1.0);
  CHECK(polarity_score({0, 0}) == 0.0);
  CHECK(polarity_score({2, 1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("longest match consumes overlapping unigram and bigram entries") {
  PhraseMatcher m;
  m.add("tax", 1);
  m.add("tax cuts", 2);
  m.add("cuts", 3);
  const auto hits = m.match(tokenize("Tax cuts for the rich, tax for the rest, cuts."));
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].length == 2);
  CHECK(hits[0].payload == 2);
  CHECK(hits[1].payload == 1);
  CHECK(hits[2].payload == 3);
}

TEST_CASE("phrase matcher agrees with an exhaustive scan") {
  Rng rng(17);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 300; ++trial) {
    PhraseMatcher m;
    const auto entries = 1 + rng.below(8);
    for (std::uint64_t k = 0; k < entries; ++k) {
      std::string phrase;
      const auto len = 1 + rng.below(3);
      for (std::uint64_t j = 0; j < len; ++j) phrase += (j ? " " : "") + vocab[rng.below(vocab.size())];
      m.add(phrase, static_cast<int>(k));
    }
    std::string text;
    std::vector<std::string> words;
    const auto n = rng.below(25);
    for (std::uint64_t j = 0; j < n; ++j) {
      words.push_back(vocab[rng.below(vocab.size())]);
      text += words.back() + " ";
    }
    const auto got = m.match(tokenize(text));
    const auto want = brute_force_matches(m.phrases(), words);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].first == want[i].first);
      CHECK(got[i].length == want[i].length);
      CHECK(got[i].payload == want[i].payload);
    }
  }
}

TEST_CASE("text analysis is deterministic") {
  const std::string text = "Hillary Clinton didn't say she would raise taxes on 5,000 families in Ohio.";
  const auto a = tagged(text);
  const auto b = tagged(text);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].surface == b[i].surface);
    CHECK(a[i].pos == b[i].pos);
  }
}
