#include "claimrank/models.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>

#include "claimrank/log.hpp"

namespace claimrank {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("minibatch size must be at least 1");
  for (int h : hidden)
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  if (!(svm_c > 0.0)) throw ConfigError("SVM C must be positive");
  if (!(svm_tolerance > 0.0)) throw ConfigError("SMO tolerance must be positive");
  if (svm_max_passes < 1) throw ConfigError("SMO max passes must be at least 1");
}

namespace detail {

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated model file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated model file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace detail

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
  if (a.cols() != b.cols()) throw Error("rbf_kernel: dimension mismatch");
  const Eigen::VectorXd na = a.rowwise().squaredNorm();
  const Eigen::VectorXd nb = b.rowwise().squaredNorm();
  Eigen::MatrixXd k = a * b.transpose();
  for (Eigen::Index j = 0; j < k.cols(); ++j)
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      k(i, j) = std::exp(-gamma * std::max(0.0, na(i) + nb(j) - 2.0 * k(i, j)));
  return k;
}

SvmModel::SvmModel(double gamma, double c, double bias, Eigen::MatrixXd support, Eigen::VectorXd coefficients)
    : gamma_(gamma), c_(c), bias_(bias), support_(std::move(support)), coef_(std::move(coefficients)) {
  if (support_.rows() != coef_.size()) throw Error("SVM: support/coefficient count mismatch");
}

void SvmModel::save(std::ostream& out) const {
  out.write("CSVM", 4);
  out.put(1);
  detail::write_f64(out, gamma_);
  detail::write_f64(out, c_);
  detail::write_f64(out, bias_);
  detail::write_u32(out, static_cast<std::uint32_t>(support_.rows()));
  detail::write_u32(out, static_cast<std::uint32_t>(support_.cols()));
  for (Eigen::Index i = 0; i < support_.rows(); ++i) {
    detail::write_f64(out, coef_(i));
    for (Eigen::Index j = 0; j < support_.cols(); ++j) detail::write_f64(out, support_(i, j));
  }
  if (!out) throw Error("failed to write SVM model");
}

SvmModel SvmModel::load(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "CSVM") throw Error("not an SVM model file");
  if (const int v = in.get(); v != 1) throw Error("unsupported SVM model version " + std::to_string(v));
  const double gamma = detail::read_f64(in);
  const double c = detail::read_f64(in);
  const double bias = detail::read_f64(in);
  const auto rows = detail::read_u32(in);
  const auto cols = detail::read_u32(in);
  Eigen::MatrixXd support(rows, cols);
  Eigen::VectorXd coef(rows);
  for (Eigen::Index i = 0; i < support.rows(); ++i) {
    coef(i) = detail::read_f64(in);
    for (Eigen::Index j = 0; j < support.cols(); ++j) support(i, j) = detail::read_f64(in);
  }
  return SvmModel(gamma, c, bias, std::move(support), std::move(coef));
}

namespace {

// State of one SMO run; f(x) = sum a_j y_j K(x_j, x) + b and
// error_i = f(x_i) - y_i is kept current for every point.
class Smo {
 public:
  Smo(const Eigen::MatrixXd& gram, std::vector<double> y, double c, double tol, std::uint64_t seed)
      : k_(gram), y_(std::move(y)), c_(c), tol_(tol), rng_(seed) {
    const auto n = y_.size();
    alpha_.assign(n, 0.0);
    error_.resize(n);
    for (std::size_t i = 0; i < n; ++i) error_[i] = -y_[i];
  }

  SvmTrainInfo run(int max_passes) {
    SvmTrainInfo info;
    const auto n = static_cast<int>(y_.size());
    bool examine_all = true;
    int changed = 0;
    while (changed > 0 || examine_all) {
      if (info.passes >= max_passes) return info;
      ++info.passes;
      changed = 0;
      for (int i = 0; i < n; ++i)
        if (examine_all || non_bound(i)) changed += examine(i);
      if (examine_all)
        examine_all = false;
      else if (changed == 0)
        examine_all = true;
    }
    info.converged = true;
    return info;
  }

  const std::vector<double>& alpha() const { return alpha_; }
  double bias() const { return b_; }

 private:
  bool non_bound(int i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

  int examine(int i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = error_[i2];
    const double r2 = e2 * y2;
    if (!((r2 < -tol_ && a2 < c_) || (r2 > tol_ && a2 > 0.0))) return 0;
    const int n = static_cast<int>(y_.size());

    // Second choice: largest |E1 - E2| among non-bound points.
    int best = -1;
    double gap = -1.0;
    int nb = 0;
    for (int i = 0; i < n; ++i) {
      if (!non_bound(i)) continue;
      ++nb;
      const double d = std::abs(error_[i] - e2);
      if (d > gap) {
        gap = d;
        best = i;
      }
    }
    if (nb > 1 && best >= 0 && step(best, i2)) return 1;

    const int start_nb = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
    for (int k = 0; k < n; ++k) {
      const int i1 = (start_nb + k) % n;
      if (non_bound(i1) && step(i1, i2)) return 1;
    }
    const int start = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
    for (int k = 0; k < n; ++k) {
      const int i1 = (start + k) % n;
      if (!non_bound(i1) && step(i1, i2)) return 1;
    }
    return 0;
  }

  bool step(int i1, int i2) {
    if (i1 == i2) return false;
    constexpr double eps = 1e-3;
    const double a1 = alpha_[i1], a2 = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = error_[i1], e2 = error_[i2];
    const double s = y1 * y2;
    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_);
      hi = std::min(c_, a1 + a2);
    }
    if (lo >= hi) return false;
    const double k11 = k_(i1, i1), k12 = k_(i1, i2), k22 = k_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2n;
    if (eta > 0) {
      a2n = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective at both ends of the segment.
      const double f1 = y1 * e1 - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * e2 - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - lo);
      const double h1 = a1 + s * (a2 - hi);
      const double lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (lobj < hobj - eps)
        a2n = lo;
      else if (lobj > hobj + eps)
        a2n = hi;
      else
        a2n = a2;
    }
    if (std::abs(a2n - a2) < eps * (a2n + a2 + eps)) return false;
    double a1n = a1 + s * (a2 - a2n);
    if (a1n < 0) {
      a2n += s * a1n;
      a1n = 0;
    } else if (a1n > c_) {
      a2n += s * (a1n - c_);
      a1n = c_;
    }

    const double d1 = y1 * (a1n - a1);
    const double d2 = y2 * (a2n - a2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    double bn;
    if (a1n > 0 && a1n < c_)
      bn = b1;
    else if (a2n > 0 && a2n < c_)
      bn = b2;
    else
      bn = 0.5 * (b1 + b2);
    const double db = bn - b_;
    b_ = bn;
    alpha_[i1] = a1n;
    alpha_[i2] = a2n;
    const auto n = static_cast<Eigen::Index>(y_.size());
    const double* c1 = k_.col(i1).data();
    const double* c2 = k_.col(i2).data();
    for (Eigen::Index i = 0; i < n; ++i) error_[i] += d1 * c1[i] + d2 * c2[i] + db;
    return true;
  }

  const Eigen::MatrixXd& k_;
  std::vector<double> y_;
  double c_;
  double tol_;
  Rng rng_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double b_ = 0.0;
};

}  // namespace

SvmModel train_svm_rbf(const Eigen::MatrixXd& x, const std::vector<int>& labels, const TrainConfig& config,
                       SvmTrainInfo* info) {
  config.validate();
  if (x.rows() == 0) throw Error("train_svm_rbf: no training rows");
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) throw Error("train_svm_rbf: label count mismatch");
  std::vector<double> y;
  std::size_t pos = 0;
  for (int l : labels) {
    y.push_back(l > 0 ? 1.0 : -1.0);
    pos += l > 0 ? 1 : 0;
  }
  if (pos == 0 || pos == labels.size())
    throw ConfigError("SVM training needs both positive and negative examples");
  const double gamma = config.svm_gamma > 0 ? config.svm_gamma : 1.0 / static_cast<double>(x.cols());

  const Eigen::MatrixXd gram = rbf_kernel(x, x, gamma);
  Smo smo(gram, y, config.svm_c, config.svm_tolerance, derive_seed(config.seed, "smo"));
  const SvmTrainInfo run = smo.run(config.svm_max_passes);
  if (!run.converged)
    warn("SMO did not converge within " + std::to_string(config.svm_max_passes) +
         " passes; using the last iterate");
  if (info) *info = run;

  std::vector<Eigen::Index> sv;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (smo.alpha()[i] > 0.0) sv.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXd support(static_cast<Eigen::Index>(sv.size()), x.cols());
  Eigen::VectorXd coef(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    support.row(static_cast<Eigen::Index>(k)) = x.row(sv[k]);
    coef(static_cast<Eigen::Index>(k)) = smo.alpha()[static_cast<std::size_t>(sv[k])] * y[static_cast<std::size_t>(sv[k])];
  }
  return SvmModel(gamma, config.svm_c, smo.bias(), std::move(support), std::move(coef));
}

Eigen::VectorXd svm_scores(const SvmModel& model, const Eigen::MatrixXd& rows) {
  if (model.support().rows() == 0) throw StateError("SVM model has an empty support set");
  if (rows.cols() != model.dimension())
    throw Error("SVM expects " + std::to_string(model.dimension()) + " features, got " +
                std::to_string(rows.cols()));
  return (rbf_kernel(rows, model.support(), model.gamma()) * model.coefficients()).array() + model.bias();
}

double svm_score(const SvmModel& model, const Eigen::VectorXd& x) {
  return svm_scores(model, x.transpose())(0);
}

RankedList rank_sentences(const std::vector<Sentence>& sentences, const Eigen::VectorXd& scores) {
  if (static_cast<Eigen::Index>(sentences.size()) != scores.size())
    throw Error("rank_sentences: " + std::to_string(scores.size()) + " scores for " +
                std::to_string(sentences.size()) + " sentences");
  RankedList list;
  list.items.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i)
    list.items.push_back({sentences[i].sentence_id, sentences[i].index_in_debate, scores(static_cast<Eigen::Index>(i))});
  std::stable_sort(list.items.begin(), list.items.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index_in_debate < b.index_in_debate;
  });
  return list;
}

RankedList random_baseline(const std::vector<Sentence>& sentences, std::uint64_t seed) {
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  RankedList list;
  const auto n = static_cast<double>(sentences.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& s = sentences[order[r]];
    list.items.push_back({s.sentence_id, s.index_in_debate, n - static_cast<double>(r)});
  }
  return list;
}

RankedList tfidf_baseline(const Eigen::MatrixXd& train_tfidf, const std::vector<int>& train_labels,
                          const Eigen::MatrixXd& test_tfidf, const std::vector<Sentence>& test_sentences,
                          const TrainConfig& config) {
  const auto model = train_svm_rbf(train_tfidf, train_labels, config);
  return rank_sentences(test_sentences, svm_scores(model, test_tfidf));
}

}  // namespace claimrank
