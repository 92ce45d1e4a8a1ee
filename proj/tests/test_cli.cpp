#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path work() {
  static const fs::path dir = [] {
    const fs::path d = fs::path(CLAIMRANK_TEST_TMP) / "cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const auto out = work() / "stdout.txt", err = work() / "stderr.txt";
  const std::string cmd = std::string("\"") + CLAIMRANK_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string fixture() {
  const char* dir = std::getenv("CLAIMRANK_FIXTURE");
  REQUIRE_MESSAGE(dir, "CLAIMRANK_FIXTURE is not set");
  return dir;
}

std::string dataset_args() {
  return "--transcript " + fixture() + "/transcript.tsv --metadata " + fixture() + "/metadata.txt";
}

std::string data_args() { return dataset_args() + " --resources " + CLAIMRANK_TEST_RESOURCES; }

const char* kCheapGroups = "CB,Sentiment,Length,Position,Metadata,KNN";

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status != 0);
  const auto bad_group = run("evaluate --model fnn --groups Nonsense --out " + (work() / "bad").string() + " " +
                             data_args());
  CHECK(bad_group.status == 2);
  CHECK(bad_group.err.find("Nonsense") != std::string::npos);

  // Both missing resources are reported together.
  const auto missing = run("evaluate --model fnn --out " + (work() / "missing").string() + " " + data_args());
  CHECK(missing.status == 2);
  CHECK(missing.err.find("embeddings") != std::string::npos);
  CHECK(missing.err.find("topic model") != std::string::npos);

  CHECK(run("stats --transcript /nonexistent.tsv --metadata /nonexistent.txt").status == 2);
}

TEST_CASE("stats and ingest") {
  const auto stats = run("stats " + dataset_args());
  REQUIRE(stats.status == 0);
  CHECK(stats.out.find("5415") != std::string::npos);
  CHECK(stats.out.find("PolitiFact") != std::string::npos);

  const auto a = work() / "ingest_a", b = work() / "ingest_b";
  REQUIRE(run("ingest --out " + a.string() + " " + dataset_args()).status == 0);
  REQUIRE(run("--out " + b.string() + " ingest " + dataset_args()).status == 0);
  CHECK(slurp(a / "dataset.tsv") == slurp(b / "dataset.tsv"));
  CHECK(slurp(a / "metadata.txt") == slurp(b / "metadata.txt"));
  CHECK(fs::exists(a / "run_config.ini"));

  // The canonical output reads back to the same tables.
  const auto again = run("stats --transcript " + (a / "dataset.tsv").string() + " --metadata " +
                         (a / "metadata.txt").string());
  CHECK(again.out == stats.out);
}

TEST_CASE("configuration files merge with flags") {
  const auto ini = work() / "run.ini";
  std::ofstream(ini) << "seed=9\n[evaluate]\nmodel=random\ngroups=Length\n";
  const auto dir = work() / "cfg";
  // The flag overrides the file's model list.
  const auto r = run("--config " + ini.string() + " evaluate --model random,tfidf --out " + dir.string() + " " +
                     data_args());
  REQUIRE(r.status == 0);
  const auto echo = slurp(dir / "run_config.ini");
  CHECK(echo.find("groups=\"Length\"") != std::string::npos);
  CHECK(echo.find("model=\"random,tfidf\"") != std::string::npos);
  const auto tsv = slurp(dir / "evaluate.tsv");
  CHECK(tsv.find("TF.IDF") != std::string::npos);
  CHECK(tsv.find("Random") != std::string::npos);
}

TEST_CASE("train then rank") {
  const auto model = work() / "model" / "fnn.bin";
  const std::string train_args = std::string("train --model fnn --groups ") + kCheapGroups +
                                 " --epochs 3 --exclude 1st --out " + model.string() + " " + data_args();
  REQUIRE(run(train_args).status == 0);
  REQUIRE(fs::exists(model));
  CHECK(fs::exists(model.parent_path() / "run_config.ini"));

  const auto top = run("rank --model-file " + model.string() + " --debate 1st --top 7 " + data_args());
  REQUIRE(top.status == 0);
  REQUIRE(count_lines(top.out) == 8);
  std::istringstream lines(top.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "rank\tscore\tsentence_index\tspeaker\ttext\tgold_sources");
  double prev = 1e300;
  int expected_rank = 1;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    int rank = 0;
    double score = 0;
    fields >> rank >> score;
    CHECK(rank == expected_rank++);
    CHECK(score <= prev);
    prev = score;
  }

  const auto all = run("rank --model-file " + model.string() + " --debate 1st " + data_args());
  REQUIRE(all.status == 0);
  CHECK(all.out.substr(0, top.out.size()) == top.out);
  CHECK(count_lines(all.out) > 8);

  CHECK(run("rank --model-file " + (work() / "nope.bin").string() + " --debate 1st " + data_args()).status == 2);
  CHECK(run("rank --model-file " + model.string() + " --debate 9th " + data_args()).status == 2);
  CHECK(run("rank --model-file " + model.string() + " " + data_args()).status == 2);
}

TEST_CASE("extract writes the selected columns for one debate") {
  const auto out = work() / "feat" / "small.tsv";
  REQUIRE(run("extract --groups Length,Position --debate 2nd --exclude 2nd --out " + out.string() + " " + data_args())
              .status == 0);
  const auto text = slurp(out);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  int tabs = 0;
  for (char c : header) tabs += c == '\t';
  CHECK(tabs == 4);  // id plus four columns
  CHECK(count_lines(text) > 1);
}
