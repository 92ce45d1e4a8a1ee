#include "claimrank/topics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "claimrank/errors.hpp"
#include "claimrank/strings.hpp"

namespace claimrank {

namespace {

constexpr char kMagic[4] = {'C', 'L', 'D', 'A'};
constexpr std::uint8_t kFormatVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  // little-endian on disk
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw ParseError("", 0, "truncated topic model file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

bool has_letter(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || static_cast<unsigned char>(c) >= 0x80;
  });
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  for (std::size_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], static_cast<int>(i));
}

std::size_t LdaCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

LdaCorpus build_lda_corpus(const std::vector<std::string>& documents, int min_count,
                           const CueList* stopwords) {
  std::vector<std::vector<std::string>> words(documents.size());
  std::map<std::string, int> counts;
  for (std::size_t d = 0; d < documents.size(); ++d)
    for (auto& t : tokenize(documents[d])) {
      if (!has_letter(t.normalized)) continue;
      if (stopwords && stopwords->contains(t.normalized)) continue;
      ++counts[t.normalized];
      words[d].push_back(std::move(t.normalized));
    }
  std::vector<std::string> vocab;
  for (const auto& [w, c] : counts)
    if (c >= min_count) vocab.push_back(w);
  LdaCorpus corpus{Vocabulary(std::move(vocab)), {}};
  for (const auto& doc : words) {
    std::vector<int> ids;
    for (const auto& w : doc)
      if (int id = corpus.vocab.id(w); id >= 0) ids.push_back(id);
    if (!ids.empty()) corpus.documents.push_back(std::move(ids));
  }
  return corpus;
}

std::vector<std::string> read_document_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ResourceError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> docs;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line, current;
    while (std::getline(in, line)) {
      if (trim(line).empty()) {
        if (!current.empty()) docs.push_back(std::move(current));
        current.clear();
      } else {
        current += line;
        current += '\n';
      }
    }
    if (!current.empty()) docs.push_back(std::move(current));
  }
  return docs;
}

TopicModel::TopicModel(Vocabulary vocab, double alpha, double beta, CountMatrix topic_word)
    : vocab_(std::move(vocab)), alpha_(alpha), beta_(beta), topic_word_(std::move(topic_word)) {
  if (topic_word_.cols() != vocab_.size())
    throw Error("topic model: count matrix has " + std::to_string(topic_word_.cols()) +
                " columns for a vocabulary of " + std::to_string(vocab_.size()));
  if ((topic_word_.array() < 0).any()) throw Error("topic model: negative counts");
  topic_totals_ = topic_word_.rowwise().sum();
  const double vbeta = vocab_.size() * beta_;
  phi_ = (topic_word_.cast<double>().array() + beta_).colwise() /
         (topic_totals_.cast<double>().array() + vbeta);
}

std::vector<int> TopicModel::encode(const Tokens& tokens) const {
  std::vector<int> ids;
  for (const auto& t : tokens)
    if (int id = vocab_.id(t.normalized); id >= 0) ids.push_back(id);
  return ids;
}

void TopicModel::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put<std::uint8_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(num_topics()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(vocab_size()));
  put<double>(out, alpha_);
  put<double>(out, beta_);
  for (const auto& w : vocab_.words()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  for (Eigen::Index k = 0; k < topic_word_.rows(); ++k)
    for (Eigen::Index w = 0; w < topic_word_.cols(); ++w)
      put<std::uint32_t>(out, static_cast<std::uint32_t>(topic_word_(k, w)));
  for (Eigen::Index k = 0; k < topic_totals_.size(); ++k)
    put<std::uint64_t>(out, static_cast<std::uint64_t>(topic_totals_(k)));
}

TopicModel TopicModel::load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("", 0, "not a topic model file (bad magic)");
  const auto version = get<std::uint8_t>(in);
  if (version != kFormatVersion)
    throw ParseError("", 0, "unsupported topic model version " + std::to_string(version));
  const auto k = get<std::uint32_t>(in);
  const auto v = get<std::uint32_t>(in);
  const auto alpha = get<double>(in);
  const auto beta = get<double>(in);
  std::vector<std::string> words(v);
  for (auto& w : words) {
    const auto len = get<std::uint32_t>(in);
    w.resize(len);
    if (!in.read(w.data(), len)) throw ParseError("", 0, "truncated topic model vocabulary");
  }
  CountMatrix counts(k, v);
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    for (Eigen::Index j = 0; j < counts.cols(); ++j) counts(i, j) = get<std::uint32_t>(in);
  TopicModel model(Vocabulary(std::move(words)), alpha, beta, std::move(counts));
  for (Eigen::Index i = 0; i < model.topic_totals_.size(); ++i)
    if (static_cast<std::int64_t>(get<std::uint64_t>(in)) != model.topic_totals_(i))
      throw ParseError("", 0, "topic totals do not match the count matrix");
  return model;
}

void TopicModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write topic model " + path);
  save(out);
}

TopicModel TopicModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open topic model " + path);
  try {
    return load(in);
  } catch (const ParseError& e) {
    throw ParseError(path, 0, e.what());
  }
}

GibbsSampler::GibbsSampler(const LdaCorpus& corpus, const LdaConfig& config)
    : corpus_(corpus),
      num_topics_(config.num_topics),
      alpha_(config.resolved_alpha()),
      beta_(config.beta),
      rng_(config.seed) {
  if (config.num_topics < 2) throw ConfigError("LDA needs at least 2 topics");
  if (corpus.documents.empty() || corpus.token_count() == 0)
    throw ConfigError("LDA training corpus is empty");
  if (!(beta_ > 0.0)) throw ConfigError("LDA beta must be positive");
  const int v = corpus.vocab.size();
  topic_word_ = CountMatrix::Zero(num_topics_, v);
  topic_totals_ = CountVector::Zero(num_topics_);
  doc_topic_ = DocTopicMatrix::Zero(static_cast<Eigen::Index>(corpus.documents.size()), num_topics_);
  weights_.resize(static_cast<std::size_t>(num_topics_));
  assignments_.resize(corpus.documents.size());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    assignments_[d].resize(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const int z = static_cast<int>(rng_.below(static_cast<std::uint64_t>(num_topics_)));
      assignments_[d][i] = z;
      ++topic_word_(z, doc[i]);
      ++topic_totals_(z);
      ++doc_topic_(static_cast<Eigen::Index>(d), z);
    }
  }
}

void GibbsSampler::sweep() {
  const double vbeta = corpus_.vocab.size() * beta_;
  for (std::size_t d = 0; d < corpus_.documents.size(); ++d) {
    const auto& doc = corpus_.documents[d];
    const auto di = static_cast<Eigen::Index>(d);
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const int w = doc[i];
      int z = assignments_[d][i];
      --topic_word_(z, w);
      --topic_totals_(z);
      --doc_topic_(di, z);
      double total = 0.0;
      for (int k = 0; k < num_topics_; ++k) {
        total += (static_cast<double>(doc_topic_(di, k)) + alpha_) *
                 (static_cast<double>(topic_word_(k, w)) + beta_) /
                 (static_cast<double>(topic_totals_(k)) + vbeta);
        weights_[static_cast<std::size_t>(k)] = total;
      }
      const double u = rng_.uniform() * total;
      z = static_cast<int>(std::upper_bound(weights_.begin(), weights_.end(), u) - weights_.begin());
      if (z >= num_topics_) z = num_topics_ - 1;
      assignments_[d][i] = z;
      ++topic_word_(z, w);
      ++topic_totals_(z);
      ++doc_topic_(di, z);
    }
  }
  ++sweeps_done_;
}

double GibbsSampler::log_likelihood() const {
  const double v = corpus_.vocab.size();
  const double k = num_topics_;
  double ll = k * (std::lgamma(v * beta_) - v * std::lgamma(beta_));
  for (Eigen::Index t = 0; t < topic_word_.rows(); ++t) {
    for (Eigen::Index w = 0; w < topic_word_.cols(); ++w)
      ll += std::lgamma(static_cast<double>(topic_word_(t, w)) + beta_);
    ll -= std::lgamma(static_cast<double>(topic_totals_(t)) + v * beta_);
  }
  const double d = static_cast<double>(doc_topic_.rows());
  ll += d * (std::lgamma(k * alpha_) - k * std::lgamma(alpha_));
  for (Eigen::Index r = 0; r < doc_topic_.rows(); ++r) {
    double n = 0.0;
    for (Eigen::Index t = 0; t < doc_topic_.cols(); ++t) {
      ll += std::lgamma(static_cast<double>(doc_topic_(r, t)) + alpha_);
      n += static_cast<double>(doc_topic_(r, t));
    }
    ll -= std::lgamma(n + k * alpha_);
  }
  return ll;
}

TopicModel GibbsSampler::model() const {
  return TopicModel(corpus_.vocab, alpha_, beta_, topic_word_);
}

TopicModel train_lda(const LdaCorpus& corpus, const LdaConfig& config,
                     const LdaSweepObserver& observer) {
  GibbsSampler sampler(corpus, config);
  for (int s = 0; s < config.sweeps; ++s) {
    sampler.sweep();
    if (observer.after_sweep) observer.after_sweep(sampler);
  }
  return sampler.model();
}

Eigen::VectorXd infer_topics(const TopicModel& model, const std::vector<int>& word_ids, int sweeps,
                             std::uint64_t seed) {
  const int k = model.num_topics();
  const double alpha = model.alpha();
  if (word_ids.empty()) return Eigen::VectorXd::Constant(k, 1.0 / k);
  const auto& phi = model.phi();
  Rng rng(seed);
  std::vector<int> z(word_ids.size());
  Eigen::VectorXd doc_topic = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < word_ids.size(); ++i) {
    z[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    doc_topic(z[i]) += 1.0;
  }
  std::vector<double> cumulative(static_cast<std::size_t>(k));
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < word_ids.size(); ++i) {
      doc_topic(z[i]) -= 1.0;
      const int w = word_ids[i];
      double total = 0.0;
      for (int t = 0; t < k; ++t) {
        total += (doc_topic(t) + alpha) * phi(t, w);
        cumulative[static_cast<std::size_t>(t)] = total;
      }
      const double u = rng.uniform() * total;
      int nz = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                cumulative.begin());
      if (nz >= k) nz = k - 1;
      z[i] = nz;
      doc_topic(nz) += 1.0;
    }
  }
  const double n = static_cast<double>(word_ids.size());
  return (doc_topic.array() + alpha) / (n + k * alpha);
}

Eigen::VectorXd infer_topics(const TopicModel& model, const Tokens& tokens, int sweeps,
                             std::uint64_t seed) {
  return infer_topics(model, model.encode(tokens), sweeps, seed);
}

Eigen::VectorXd segment_topics(const TopicModel& model, const std::vector<const Tokens*>& sentences,
                               int sweeps, std::uint64_t seed) {
  std::vector<int> ids;
  for (const Tokens* s : sentences) {
    const auto part = model.encode(*s);
    ids.insert(ids.end(), part.begin(), part.end());
  }
  return infer_topics(model, ids, sweeps, seed);
}

}  // namespace claimrank
