#pragma once

// Lexicons and word embeddings, plus the vector helpers the mixed feature
// groups are built on.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>

#include "claimrank/errors.hpp"
#include "claimrank/textproc.hpp"

namespace claimrank {

enum class LexiconName : int {
  Bias = 0,
  Negatives,
  Positives,
  Factives,
  Assertives,
  Hedges,
  Implicatives,
  StrongSubj,
  WeakSubj,
  NrcPolarity,
};

inline constexpr std::size_t kNumLinguisticLexicons = 9;

std::string_view lexicon_name(LexiconName name);
std::optional<LexiconName> parse_lexicon_name(std::string_view name);

// Case-folded, deduplicated terms and n-grams. The polarity lexicon tags
// every entry kPositive or kNegative; other lexicons carry payload 0.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(LexiconName name) : name_(name) {}

  LexiconName name() const { return name_; }
  std::size_t size() const { return matcher_.size(); }
  bool empty() const { return matcher_.size() == 0; }

  // Exact, case-insensitive membership of a (possibly multiword) term.
  bool contains(std::string_view term) const;
  std::optional<int> polarity(std::string_view term) const;

  void add(std::string_view term, int payload = 0) { matcher_.add(term, payload); }
  const PhraseMatcher& matcher() const { return matcher_; }
  std::size_t count_matches(const Tokens& tokens) const { return matcher_.count(tokens); }

 private:
  LexiconName name_ = LexiconName::Bias;
  PhraseMatcher matcher_;
};

// One term per line, '#' comments. The polarity lexicon uses
// term<TAB>positive|negative; a term listed with both polarities is an error.
Lexicon load_lexicon(const std::string& path, LexiconName name);

inline constexpr int kEmbeddingDim = 300;

template <class Scalar>
class BasicEmbeddingTable {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BasicEmbeddingTable() = default;
  BasicEmbeddingTable(int dimension, std::unordered_map<std::string, Eigen::Index> index,
                      Matrix vectors)
      : dimension_(dimension), index_(std::move(index)), vectors_(std::move(vectors)) {}

  int dimension() const { return dimension_; }
  std::size_t size() const { return index_.size(); }

  const Scalar* find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    return it == index_.end() ? nullptr : vectors_.row(it->second).data();
  }

  auto vector(std::string_view word) const {
    const Scalar* p = find(word);
    if (!p) throw Error("word not in embedding table: " + std::string(word));
    return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(p, dimension_);
  }

 private:
  int dimension_ = kEmbeddingDim;
  std::unordered_map<std::string, Eigen::Index> index_;
  Matrix vectors_;
};

// Single precision keeps a full pre-trained table in memory; all arithmetic
// on the vectors is done in double.
using EmbeddingTable = BasicEmbeddingTable<float>;

struct EmbeddingLoadOptions {
  int dimension = kEmbeddingDim;
  // When set, only these words are kept.
  const std::unordered_set<std::string>* vocabulary = nullptr;
};

// Plain text: optional "V D" header, then "word v1 ... vD" per line. A
// ".gz" path is read through zlib. Later duplicates replace earlier ones.
EmbeddingTable load_embeddings(const std::string& path, const EmbeddingLoadOptions& options = {});

// Mean vector of the in-vocabulary tokens (looked up by normalized form,
// then surface form). No in-vocabulary token gives the zero vector.
Eigen::VectorXd sentence_embedding(const Tokens& tokens, const EmbeddingTable& table);

// dot(u, v) / (|u| |v|); 0 when either vector is zero.
template <class A, class B>
double cosine(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  if (u.size() != v.size())
    throw Error("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  const double nu = u.template cast<double>().norm();
  const double nv = v.template cast<double>().norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = u.template cast<double>().dot(v.template cast<double>()) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace claimrank
