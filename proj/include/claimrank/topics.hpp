#pragma once

// LDA topic model trained by collapsed Gibbs sampling, with fold-in
// inference for sentences and segments.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "claimrank/random.hpp"
#include "claimrank/textproc.hpp"

namespace claimrank {

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);

  int size() const { return static_cast<int>(words_.size()); }
  // -1 when absent
  int id(const std::string& word) const {
    auto it = ids_.find(word);
    return it == ids_.end() ? -1 : it->second;
  }
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using DocTopicMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LdaConfig {
  int num_topics = 300;
  double alpha = -1.0;  // <= 0 selects 50 / num_topics
  double beta = 0.01;
  int sweeps = 1000;
  std::uint64_t seed = 1;

  double resolved_alpha() const { return alpha > 0.0 ? alpha : 50.0 / num_topics; }
};

struct LdaCorpus {
  Vocabulary vocab;
  std::vector<std::vector<int>> documents;  // token ids

  std::size_t token_count() const;
};

// Tokenizes and case-folds each document, drops tokens without letters and
// stopwords, and keeps words seen at least `min_count` times. Vocabulary
// ids follow lexicographic order.
LdaCorpus build_lda_corpus(const std::vector<std::string>& documents, int min_count = 5,
                           const CueList* stopwords = nullptr);

// Documents of a training directory: every regular file, in path order,
// split into paragraphs at blank lines.
std::vector<std::string> read_document_directory(const std::string& dir);

class TopicModel {
 public:
  TopicModel() = default;
  TopicModel(Vocabulary vocab, double alpha, double beta, CountMatrix topic_word);

  int num_topics() const { return static_cast<int>(topic_word_.rows()); }
  int vocab_size() const { return vocab_.size(); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const Vocabulary& vocab() const { return vocab_; }
  // K x V
  const CountMatrix& topic_word_counts() const { return topic_word_; }
  const CountVector& topic_totals() const { return topic_totals_; }

  // Smoothed topic-word probability (n_kw + beta) / (n_k + V beta), K x V.
  const Eigen::MatrixXd& phi() const { return phi_; }

  std::vector<int> encode(const Tokens& tokens) const;

  void save(std::ostream& out) const;
  static TopicModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static TopicModel load_file(const std::string& path);

 private:
  Vocabulary vocab_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  CountMatrix topic_word_;
  CountVector topic_totals_;
  Eigen::MatrixXd phi_;
};

// Collapsed Gibbs sampler state. train_lda drives it; tests use it to look
// at the counts between sweeps.
class GibbsSampler {
 public:
  GibbsSampler(const LdaCorpus& corpus, const LdaConfig& config);

  void sweep();
  int sweeps_done() const { return sweeps_done_; }

  // log p(w, z) under the collapsed model.
  double log_likelihood() const;

  const CountMatrix& topic_word() const { return topic_word_; }
  const CountVector& topic_totals() const { return topic_totals_; }
  const DocTopicMatrix& doc_topic() const { return doc_topic_; }

  TopicModel model() const;

 private:
  const LdaCorpus& corpus_;
  int num_topics_;
  double alpha_;
  double beta_;
  Rng rng_;
  std::vector<std::vector<int>> assignments_;
  CountMatrix topic_word_;  // K x V
  CountVector topic_totals_;
  DocTopicMatrix doc_topic_;  // D x K
  std::vector<double> weights_;
  int sweeps_done_ = 0;
};

struct LdaSweepObserver {
  std::function<void(const GibbsSampler&)> after_sweep;
};

TopicModel train_lda(const LdaCorpus& corpus, const LdaConfig& config,
                     const LdaSweepObserver& observer = {});

inline constexpr int kDefaultInferenceSweeps = 50;

// Fold-in Gibbs sampling with the model counts held fixed. Returns
// (n_k + alpha) / (N + K alpha) from the final state; a document with no
// in-vocabulary token gets the uniform distribution.
Eigen::VectorXd infer_topics(const TopicModel& model, const std::vector<int>& word_ids,
                             int sweeps, std::uint64_t seed);
Eigen::VectorXd infer_topics(const TopicModel& model, const Tokens& tokens, int sweeps,
                             std::uint64_t seed);

// Topic distribution of the concatenated segment text.
Eigen::VectorXd segment_topics(const TopicModel& model, const std::vector<const Tokens*>& sentences,
                               int sweeps, std::uint64_t seed);

}  // namespace claimrank
