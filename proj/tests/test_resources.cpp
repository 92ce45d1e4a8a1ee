#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <zlib.h>

#include "claimrank/errors.hpp"
#include "claimrank/random.hpp"
#include "claimrank/resources.hpp"
#include "support.hpp"

using namespace claimrank;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = CLAIMRANK_TEST_TMP;
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const auto path = scratch(name);
  std::ofstream(path) << content;
  return path;
}

Lexicon bundled(LexiconName name) {
  const std::string file = name == LexiconName::NrcPolarity ? "nrc_polarity.tsv"
                                                            : std::string(lexicon_name(name)) + ".txt";
  return load_lexicon(testutil::resource_dir() + "/lexicons/" + file, name);
}

}  // namespace

TEST_CASE("bundled lexicons hold the documented example entries") {
  const std::map<LexiconName, std::vector<std::string>> examples = {
      {LexiconName::Bias, {"capture", "create", "demand", "follow"}},
      {LexiconName::Negatives, {"abnormal", "bankrupt", "cheat", "conflicts"}},
      {LexiconName::Positives, {"accurate", "achievements", "affirm"}},
      {LexiconName::Factives, {"realize", "know", "discover", "learn"}},
      {LexiconName::Assertives, {"think", "believe", "imagine", "guarantee"}},
      {LexiconName::Hedges, {"approximately", "estimate", "essentially"}},
      {LexiconName::Implicatives, {"cause", "manage", "hesitate", "neglect"}},
      {LexiconName::StrongSubj, {"admire", "afraid", "agreeably", "apologist"}},
      {LexiconName::WeakSubj, {"abandon", "adaptive", "champ", "consume"}},
  };
  for (const auto& [name, words] : examples) {
    const auto lex = bundled(name);
    for (const auto& w : words) {
      INFO(lexicon_name(name), ": ", w);
      CHECK(lex.contains(w));
    }
  }
  const auto nrc = bundled(LexiconName::NrcPolarity);
  CHECK(nrc.polarity("viciously") == kNegative);
  CHECK(nrc.polarity("accurate") == kPositive);
  CHECK_FALSE(nrc.polarity("table").has_value());
}

TEST_CASE("lexicon names round trip") {
  for (int i = 0; i <= static_cast<int>(LexiconName::NrcPolarity); ++i) {
    const auto name = static_cast<LexiconName>(i);
    CHECK(parse_lexicon_name(lexicon_name(name)) == name);
  }
}

TEST_CASE("lexicon loading") {
  const auto factives = load_lexicon(write_file("factives.txt", "# comment\nrealize\nknow\ndiscover\nlearn\n").string(),
                                     LexiconName::Factives);
  CHECK(factives.size() == 4);

  const auto folded = load_lexicon(write_file("dedup.txt", "Cheat\ncheat\n").string(), LexiconName::Negatives);
  CHECK(folded.size() == 1);
  CHECK(folded.contains("CHEAT"));

  CHECK(load_lexicon(write_file("empty.txt", "").string(), LexiconName::Hedges).empty());
  CHECK_THROWS_AS(load_lexicon(scratch("missing.txt").string(), LexiconName::Bias), ResourceError);

  const auto multi = load_lexicon(write_file("multi.txt", "kind of\n").string(), LexiconName::Hedges);
  CHECK(multi.contains("Kind Of"));
  CHECK(multi.count_matches(tokenize("It is kind of a mess, kind of.")) == 2);

  CHECK_THROWS_AS(load_lexicon(write_file("conflict.tsv", "good\tpositive\ngood\tnegative\n").string(),
                               LexiconName::NrcPolarity),
                  ParseError);
  CHECK_THROWS_AS(load_lexicon(write_file("badtag.tsv", "good\tneutral\n").string(), LexiconName::NrcPolarity),
                  ParseError);
}

TEST_CASE("embedding files") {
  EmbeddingLoadOptions three;
  three.dimension = 3;

  SUBCASE("minimal file with a dimension override") {
    const auto t = load_embeddings(write_file("e1.txt", "tax 1 0 0\ncut 0 2 0\n").string(), three);
    CHECK(t.size() == 2);
    CHECK(t.dimension() == 3);
    CHECK(t.vector("cut")(1) == 2.0f);
    CHECK(t.find("jobs") == nullptr);
  }
  SUBCASE("header line") {
    const auto t = load_embeddings(write_file("e2.txt", "2 3\ntax 1 0 0\ncut 0 2 0\n").string(), three);
    CHECK(t.size() == 2);
  }
  SUBCASE("short row names its line") {
    try {
      load_embeddings(write_file("e3.txt", "tax 1 0 0\ncut 0 2\n").string(), three);
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("default dimension is 300") {
    std::string row = "tax";
    for (int i = 0; i < 299; ++i) row += " 0.5";
    CHECK_THROWS_AS(load_embeddings(write_file("e4.txt", row + "\n").string()), ParseError);
  }
  SUBCASE("last duplicate wins") {
    const auto t = load_embeddings(write_file("e5.txt", "tax 1 0 0\ntax 0 0 7\n").string(), three);
    CHECK(t.size() == 1);
    CHECK(t.vector("tax")(2) == 7.0f);
  }
  SUBCASE("vocabulary filter") {
    std::unordered_set<std::string> vocab = {"cut"};
    three.vocabulary = &vocab;
    const auto t = load_embeddings(write_file("e6.txt", "tax 1 0 0\ncut 0 2 0\n").string(), three);
    CHECK(t.size() == 1);
    CHECK(t.find("tax") == nullptr);
  }
  SUBCASE("gzip input") {
    const auto path = scratch("e7.txt.gz").string();
    gzFile gz = gzopen(path.c_str(), "wb");
    const std::string body = "tax 1 0 0\ncut 0 2 0\n";
    gzwrite(gz, body.data(), static_cast<unsigned>(body.size()));
    gzclose(gz);
    CHECK(load_embeddings(path, three).size() == 2);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_embeddings(scratch("none.txt").string(), three), ResourceError); }
}

TEST_CASE("sentence embedding is the mean of in-vocabulary vectors") {
  EmbeddingLoadOptions three;
  three.dimension = 3;
  const auto t = load_embeddings(write_file("mean.txt", "tax 1 0 3\ncut 0 2 1\n").string(), three);
  const auto one = sentence_embedding(tokenize("tax"), t);
  CHECK(one(0) == 1.0);
  CHECK(one(2) == 3.0);
  const auto two = sentence_embedding(tokenize("Cut the tax!"), t);
  CHECK(two(0) == doctest::Approx(0.5));
  CHECK(two(1) == doctest::Approx(1.0));
  CHECK(two(2) == doctest::Approx(2.0));
  CHECK(sentence_embedding(tokenize("nothing here"), t).isZero());
  const auto swapped = sentence_embedding(tokenize("tax the cut"), t);
  CHECK((swapped - two).norm() < 1e-12);
}

TEST_CASE("cosine") {
  Eigen::Vector3d u(1, 2, 3), x(1, 0, 0), y(0, 1, 0);
  CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine(x, y) == 0.0);
  CHECK(cosine(u, Eigen::Vector3d(-u)) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(cosine(u, Eigen::Vector3d::Zero()) == 0.0);
  CHECK_THROWS_AS(cosine(Eigen::VectorXd(u), Eigen::VectorXd::Ones(2)), Error);

  Rng rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd a(5), b(5);
    for (int i = 0; i < 5; ++i) {
      a(i) = rng.normal();
      b(i) = rng.normal();
    }
    const double s = rng.uniform(0.01, 100), t = rng.uniform(0.01, 100);
    const double c = cosine(a, b);
    CHECK(std::abs(c - cosine(b, a)) <= 1e-12);
    CHECK(std::abs(c - cosine(Eigen::VectorXd(s * a), Eigen::VectorXd(t * b))) <= 1e-12);
    CHECK(c <= 1.0);
    CHECK(c >= -1.0);
  }
}
