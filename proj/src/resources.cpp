#include "claimrank/resources.hpp"

#include <charconv>
#include <fstream>
#include <memory>
#include <vector>

#include <zlib.h>

#include "claimrank/log.hpp"
#include "claimrank/strings.hpp"

namespace claimrank {

namespace {

constexpr std::array<std::string_view, 10> kLexiconNames = {
    "bias",   "negatives",    "positives",   "factives", "assertives",
    "hedges", "implicatives", "strong_subj", "weak_subj", "nrc_polarity"};

std::vector<std::string> words_of(std::string_view term) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(term)) out.push_back(t.normalized);
  return out;
}

// Line reader over plain or gzip-compressed files.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
      gz_ = gzopen(path.c_str(), "rb");
      if (!gz_) throw ResourceError("cannot open embedding file " + path);
      gzbuffer(gz_, 1 << 18);
    } else {
      in_.open(path);
      if (!in_) throw ResourceError("cannot open embedding file " + path);
    }
  }
  ~LineReader() {
    if (gz_) gzclose(gz_);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line) {
    if (!gz_) return static_cast<bool>(std::getline(in_, line));
    line.clear();
    char buf[1 << 14];
    while (gzgets(gz_, buf, sizeof buf)) {
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        return true;
      }
    }
    return !line.empty();
  }

 private:
  std::string path_;
  std::ifstream in_;
  gzFile gz_ = nullptr;
};

bool parse_double(std::string_view s, double& out) {
  // from_chars for double is available in libstdc++ 11
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view lexicon_name(LexiconName name) {
  return kLexiconNames.at(static_cast<std::size_t>(name));
}

std::optional<LexiconName> parse_lexicon_name(std::string_view name) {
  for (std::size_t i = 0; i < kLexiconNames.size(); ++i)
    if (kLexiconNames[i] == name) return static_cast<LexiconName>(i);
  return std::nullopt;
}

bool Lexicon::contains(std::string_view term) const { return matcher_.contains(words_of(term)); }

std::optional<int> Lexicon::polarity(std::string_view term) const {
  const auto& phrases = matcher_.phrases();
  if (auto it = phrases.find(words_of(term)); it != phrases.end()) return it->second;
  return std::nullopt;
}

Lexicon load_lexicon(const std::string& path, LexiconName name) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open lexicon " + path);
  Lexicon lex(name);
  const bool polar = name == LexiconName::NrcPolarity;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!polar) {
      lex.add(body);
      continue;
    }
    const auto cols = split(body, '\t');
    if (cols.size() != 2) throw ParseError(path, line_no, "expected term<TAB>positive|negative");
    const auto tag = trim(cols[1]);
    int payload = 0;
    if (tag == "positive")
      payload = kPositive;
    else if (tag == "negative")
      payload = kNegative;
    else
      throw ParseError(path, line_no, "unknown polarity '" + std::string(tag) + "'");
    if (auto existing = lex.polarity(trim(cols[0])); existing && *existing != payload)
      throw ParseError(path, line_no,
                       "term '" + std::string(trim(cols[0])) + "' listed with both polarities");
    lex.add(trim(cols[0]), payload);
  }
  if (lex.empty()) warn("lexicon " + path + " is empty");
  return lex;
}

EmbeddingTable load_embeddings(const std::string& path, const EmbeddingLoadOptions& options) {
  LineReader reader(path);
  const int dim = options.dimension;
  std::unordered_map<std::string, Eigen::Index> index;
  std::vector<float> values;
  std::string line;
  std::size_t line_no = 0;
  std::size_t duplicates = 0;
  while (reader.next(line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      double v = 0, d = 0;
      if (parse_double(fields[0], v) && parse_double(fields[1], d)) {
        if (static_cast<int>(d) != dim)
          throw ParseError(path, line_no,
                           "header declares dimension " + fields[1] + ", expected " +
                               std::to_string(dim));
        continue;
      }
    }
    if (static_cast<int>(fields.size()) != dim + 1)
      throw ParseError(path, line_no,
                       "expected " + std::to_string(dim) + " values, found " +
                           std::to_string(static_cast<long>(fields.size()) - 1));
    if (options.vocabulary && !options.vocabulary->count(fields[0])) continue;
    Eigen::Index row;
    if (auto it = index.find(fields[0]); it != index.end()) {
      row = it->second;
      ++duplicates;
    } else {
      row = static_cast<Eigen::Index>(index.size());
      index.emplace(fields[0], row);
      values.resize(values.size() + static_cast<std::size_t>(dim));
    }
    float* dst = values.data() + row * dim;
    for (int k = 0; k < dim; ++k) {
      double v = 0;
      if (!parse_double(fields[static_cast<std::size_t>(k) + 1], v))
        throw ParseError(path, line_no, "bad number '" + fields[static_cast<std::size_t>(k) + 1] + "'");
      dst[k] = static_cast<float>(v);
    }
  }
  if (duplicates > 0)
    warn(path + ": " + std::to_string(duplicates) + " duplicate words, last occurrence kept");
  EmbeddingTable::Matrix vectors =
      Eigen::Map<EmbeddingTable::Matrix>(values.data(), static_cast<Eigen::Index>(index.size()), dim);
  return EmbeddingTable(dim, std::move(index), std::move(vectors));
}

Eigen::VectorXd sentence_embedding(const Tokens& tokens, const EmbeddingTable& table) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dimension());
  int n = 0;
  for (const auto& t : tokens) {
    const float* v = table.find(t.normalized);
    if (!v) v = table.find(t.surface);
    if (!v) continue;
    sum += Eigen::Map<const Eigen::VectorXf>(v, table.dimension()).cast<double>();
    ++n;
  }
  if (n > 0) sum /= n;
  return sum;
}

}  // namespace claimrank
