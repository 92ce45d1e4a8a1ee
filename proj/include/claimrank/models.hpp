#pragma once

// Rankers: a feed-forward network with a softmax output, an RBF-kernel SVM
// trained with SMO, and the random baseline. Scores turn into rankings
// through rank_sentences.

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "claimrank/corpus.hpp"
#include "claimrank/errors.hpp"
#include "claimrank/random.hpp"

namespace claimrank {

struct TrainConfig {
  // network
  std::vector<int> hidden = {200, 50};
  double learning_rate = 0.01;
  int epochs = 100;
  int batch_size = 32;
  bool class_weighting = false;
  std::uint64_t seed = 1;
  // svm
  double svm_c = 1.0;
  double svm_gamma = -1.0;  // <= 0 selects 1 / dimension
  double svm_tolerance = 1e-3;
  int svm_max_passes = 1000;

  // Throws ConfigError on a non-positive rate, epochs < 1, etc.
  void validate() const;
};

// ---------------------------------------------------------------- network

template <class Scalar = double>
class FnnModel {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  FnnModel() = default;

  // All parameters zero. sizes = {d_in, hidden..., 2}.
  explicit FnnModel(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw ConfigError("network needs at least an input and an output layer");
    for (int s : sizes_)
      if (s < 1) throw ConfigError("layer sizes must be positive");
    if (sizes_.back() != 2) throw ConfigError("output layer must have 2 units");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weights_.push_back(Matrix::Zero(sizes_[l], sizes_[l + 1]));
      biases_.push_back(Vector::Zero(sizes_[l + 1]));
    }
  }

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static FnnModel glorot(std::vector<int> sizes, Rng& rng) {
    FnnModel m(std::move(sizes));
    for (std::size_t l = 0; l < m.weights_.size(); ++l) {
      const double limit = std::sqrt(6.0 / (m.sizes_[l] + m.sizes_[l + 1]));
      auto& w = m.weights_[l];
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<Scalar>(rng.uniform(-limit, limit));
    }
    return m;
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.empty() ? 0 : sizes_.front(); }
  std::size_t num_layers() const { return weights_.size(); }

  // Layer l maps sizes[l] -> sizes[l+1]; activations are row vectors, so
  // the weight matrix is sizes[l] x sizes[l+1].
  Matrix& weight(std::size_t l) { return weights_.at(l); }
  const Matrix& weight(std::size_t l) const { return weights_.at(l); }
  Vector& bias(std::size_t l) { return biases_.at(l); }
  const Vector& bias(std::size_t l) const { return biases_.at(l); }

  bool all_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l)
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
  }

  // Pre-activations of every layer for a batch of rows. Entry l holds
  // layer l+1; the last entry holds the output logits.
  template <class Derived>
  std::vector<Matrix> pre_activations(const Eigen::MatrixBase<Derived>& x) const {
    check_input(x.cols());
    std::vector<Matrix> z;
    Matrix a = x.template cast<Scalar>();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      z.push_back((a * weights_[l]).rowwise() + biases_[l].transpose());
      if (l + 1 < weights_.size()) a = z.back().cwiseMax(Scalar(0));
    }
    return z;
  }

  // Positive-class probability for every row.
  template <class Derived>
  Vector positive_probability(const Eigen::MatrixBase<Derived>& x) const {
    const auto z = pre_activations(x);
    const Matrix& logits = z.back();
    return (Scalar(1) / (Scalar(1) + (logits.col(0) - logits.col(1)).array().exp())).matrix();
  }

  void save(std::ostream& out) const;
  static FnnModel load(std::istream& in);

 private:
  void check_input(Eigen::Index cols) const {
    if (sizes_.empty()) throw StateError("network has no layers");
    if (cols != sizes_.front())
      throw Error("network expects " + std::to_string(sizes_.front()) + " input features, got " +
                  std::to_string(cols));
  }

  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

template <class Scalar>
struct FnnGradients {
  std::vector<typename FnnModel<Scalar>::Matrix> weights;
  std::vector<typename FnnModel<Scalar>::Vector> biases;
  Scalar loss = 0;
};

// Positive-class probability of one input vector.
template <class Scalar, class Derived>
Scalar fnn_score(const FnnModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  if (x.cols() != 1 && x.rows() != 1) throw Error("fnn_score expects a single vector");
  const Eigen::Index n = x.size();
  if (n != model.input_dim())
    throw Error("network expects " + std::to_string(model.input_dim()) + " input features, got " +
                std::to_string(n));
  typename FnnModel<Scalar>::RowVector row(n);
  for (Eigen::Index i = 0; i < n; ++i) row(i) = static_cast<Scalar>(x(i));
  return model.positive_probability(row)(0);
}

template <class Scalar, class Derived>
typename FnnModel<Scalar>::Vector fnn_scores(const FnnModel<Scalar>& model,
                                             const Eigen::MatrixBase<Derived>& x) {
  return model.positive_probability(x);
}

// Loss and gradients of the (optionally weighted) mean cross-entropy over
// the rows of x. Labels are 0/1; weights, when given, scale each row's loss.
template <class Scalar, class Derived>
FnnGradients<Scalar> fnn_gradients(const FnnModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                                   const std::vector<int>& labels,
                                   const std::vector<Scalar>* row_weights = nullptr) {
  using Matrix = typename FnnModel<Scalar>::Matrix;
  const Eigen::Index n = x.rows();
  if (n == 0) throw Error("fnn_gradients: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != n) throw Error("fnn_gradients: label count mismatch");
  if (row_weights && static_cast<Eigen::Index>(row_weights->size()) != n)
    throw Error("fnn_gradients: weight count mismatch");

  const auto z = model.pre_activations(x);
  const std::size_t layers = model.num_layers();

  // Output layer: d loss / d logits = w_i (softmax - onehot) / n.
  const Matrix& logits = z.back();
  Matrix delta(n, 2);
  FnnGradients<Scalar> g;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar m = std::max(logits(i, 0), logits(i, 1));
    const Scalar lse = m + std::log(std::exp(logits(i, 0) - m) + std::exp(logits(i, 1) - m));
    const Scalar w = row_weights ? (*row_weights)[static_cast<std::size_t>(i)] : Scalar(1);
    const int y = labels[static_cast<std::size_t>(i)] > 0 ? 1 : 0;
    g.loss += w * (lse - logits(i, y));
    for (int c = 0; c < 2; ++c) {
      const Scalar p = std::exp(logits(i, c) - lse);
      delta(i, c) = w * (p - (c == y ? Scalar(1) : Scalar(0))) / static_cast<Scalar>(n);
    }
  }
  g.loss /= static_cast<Scalar>(n);

  g.weights.resize(layers);
  g.biases.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    if (l == 0) {
      g.weights[0] = x.template cast<Scalar>().transpose() * delta;
    } else {
      g.weights[l] = z[l - 1].cwiseMax(Scalar(0)).transpose() * delta;
    }
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix back = delta * model.weight(l).transpose();
      delta = back.cwiseProduct((z[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
  }
  return g;
}

// Minibatch SGD on mean cross-entropy. Shuffling and initialization are
// drawn from sub-seeds of config.seed. Labels are 0/1.
template <class Scalar = double, class Derived>
FnnModel<Scalar> train_fnn(const Eigen::MatrixBase<Derived>& x, const std::vector<int>& labels,
                           const TrainConfig& config) {
  using Matrix = typename FnnModel<Scalar>::Matrix;
  config.validate();
  const Eigen::Index n = x.rows();
  if (n == 0) throw Error("train_fnn: no training rows");
  if (static_cast<Eigen::Index>(labels.size()) != n) throw Error("train_fnn: label count mismatch");

  std::vector<int> sizes{static_cast<int>(x.cols())};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(2);
  Rng init(derive_seed(config.seed, "fnn-init"));
  auto model = FnnModel<Scalar>::glorot(sizes, init);
  Rng order_rng(derive_seed(config.seed, "fnn-shuffle"));

  std::vector<Scalar> class_weight{1, 1};
  if (config.class_weighting) {
    std::size_t pos = 0;
    for (int y : labels) pos += y > 0 ? 1 : 0;
    if (pos > 0 && pos < labels.size()) {
      class_weight[1] = static_cast<Scalar>(n) / (2 * static_cast<Scalar>(pos));
      class_weight[0] = static_cast<Scalar>(n) / (2 * static_cast<Scalar>(labels.size() - pos));
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  const Scalar lr = static_cast<Scalar>(config.learning_rate);
  Matrix batch;
  std::vector<int> batch_labels;
  std::vector<Scalar> batch_weights;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(order);
    Scalar epoch_loss = 0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index m = std::min<Eigen::Index>(config.batch_size, n - start);
      batch.resize(m, x.cols());
      batch_labels.resize(static_cast<std::size_t>(m));
      batch_weights.resize(static_cast<std::size_t>(m));
      for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index src = order[static_cast<std::size_t>(start + r)];
        batch.row(r) = x.row(src).template cast<Scalar>();
        const int y = labels[static_cast<std::size_t>(src)] > 0 ? 1 : 0;
        batch_labels[static_cast<std::size_t>(r)] = y;
        batch_weights[static_cast<std::size_t>(r)] = class_weight[static_cast<std::size_t>(y)];
      }
      const auto g = fnn_gradients(model, batch, batch_labels, &batch_weights);
      if (!std::isfinite(static_cast<double>(g.loss)))
        throw Error("training loss became NaN at epoch " + std::to_string(epoch + 1) +
                    "; the learning rate (" + std::to_string(config.learning_rate) + ") is too high");
      epoch_loss += g.loss * static_cast<Scalar>(m);
      for (std::size_t l = 0; l < model.num_layers(); ++l) {
        model.weight(l) -= lr * g.weights[l];
        model.bias(l) -= lr * g.biases[l];
      }
    }
    (void)epoch_loss;
  }
  return model;
}

// Binary layout: "CFNN", version byte, scalar width byte, u32 layer count,
// u32 sizes, then per layer the weights row-major (in x out) and the bias,
// all little-endian IEEE.
namespace detail {
void write_u32(std::ostream& out, std::uint32_t v);
std::uint32_t read_u32(std::istream& in);
void write_f64(std::ostream& out, double v);
double read_f64(std::istream& in);
}  // namespace detail

template <class Scalar>
void FnnModel<Scalar>::save(std::ostream& out) const {
  out.write("CFNN", 4);
  out.put(1);
  out.put(static_cast<char>(sizeof(Scalar)));
  detail::write_u32(out, static_cast<std::uint32_t>(sizes_.size()));
  for (int s : sizes_) detail::write_u32(out, static_cast<std::uint32_t>(s));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index i = 0; i < weights_[l].rows(); ++i)
      for (Eigen::Index j = 0; j < weights_[l].cols(); ++j)
        detail::write_f64(out, static_cast<double>(weights_[l](i, j)));
    for (Eigen::Index j = 0; j < biases_[l].size(); ++j) detail::write_f64(out, static_cast<double>(biases_[l](j)));
  }
  if (!out) throw Error("failed to write network");
}

template <class Scalar>
FnnModel<Scalar> FnnModel<Scalar>::load(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "CFNN") throw Error("not a network model file");
  const int version = in.get();
  if (version != 1) throw Error("unsupported network model version " + std::to_string(version));
  in.get();  // scalar width of the writer; values are stored as f64
  const std::uint32_t count = detail::read_u32(in);
  if (count < 2 || count > 64) throw Error("corrupt network model: layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) sizes.push_back(static_cast<int>(detail::read_u32(in)));
  FnnModel m(sizes);
  for (std::size_t l = 0; l < m.weights_.size(); ++l) {
    for (Eigen::Index i = 0; i < m.weights_[l].rows(); ++i)
      for (Eigen::Index j = 0; j < m.weights_[l].cols(); ++j)
        m.weights_[l](i, j) = static_cast<Scalar>(detail::read_f64(in));
    for (Eigen::Index j = 0; j < m.biases_[l].size(); ++j) m.biases_[l](j) = static_cast<Scalar>(detail::read_f64(in));
  }
  if (!m.all_finite()) throw Error("corrupt network model: non-finite parameter");
  return m;
}

// -------------------------------------------------------------------- svm

// exp(-gamma |u - v|^2) between every row of a and every row of b.
Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

class SvmModel {
 public:
  SvmModel() = default;
  SvmModel(double gamma, double c, double bias, Eigen::MatrixXd support, Eigen::VectorXd coefficients);

  double gamma() const { return gamma_; }
  double c() const { return c_; }
  double bias() const { return bias_; }
  void set_bias(double b) { bias_ = b; }
  // Support rows and their alpha_i * y_i.
  const Eigen::MatrixXd& support() const { return support_; }
  const Eigen::VectorXd& coefficients() const { return coef_; }
  Eigen::Index dimension() const { return support_.cols(); }

  void save(std::ostream& out) const;
  static SvmModel load(std::istream& in);

 private:
  double gamma_ = 0.0;
  double c_ = 0.0;
  double bias_ = 0.0;
  Eigen::MatrixXd support_;
  Eigen::VectorXd coef_;
};

struct SvmTrainInfo {
  int passes = 0;
  bool converged = false;
};

// Platt's SMO with the two selection heuristics over a precomputed Gram
// matrix. Labels > 0 are the positive class, everything else negative.
SvmModel train_svm_rbf(const Eigen::MatrixXd& x, const std::vector<int>& labels, const TrainConfig& config,
                       SvmTrainInfo* info = nullptr);

// sum_i alpha_i y_i K(x_i, x) + b
double svm_score(const SvmModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd svm_scores(const SvmModel& model, const Eigen::MatrixXd& rows);

// ---------------------------------------------------------------- ranking

struct RankedItem {
  int sentence_id = 0;
  int index_in_debate = 0;
  double score = 0.0;
};

struct RankedList {
  std::vector<RankedItem> items;

  std::size_t size() const { return items.size(); }
};

// Descending score; equal scores keep debate order.
RankedList rank_sentences(const std::vector<Sentence>& sentences, const Eigen::VectorXd& scores);

// Uniform permutation from the seed, scored n..1 down the list.
RankedList random_baseline(const std::vector<Sentence>& sentences, std::uint64_t seed);

// RBF SVM over TF.IDF rows only, ranked by decision value.
RankedList tfidf_baseline(const Eigen::MatrixXd& train_tfidf, const std::vector<int>& train_labels,
                          const Eigen::MatrixXd& test_tfidf, const std::vector<Sentence>& test_sentences,
                          const TrainConfig& config);

}  // namespace claimrank
