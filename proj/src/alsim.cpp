#include "levval/alsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "levval/errors.hpp"
#include "levval/rng.hpp"
#include "levval/valuation.hpp"

namespace levval {

namespace {

constexpr Index kRetrainEpochs = 20;

// Seed-stream tags, one per independent random decision in a run.
constexpr std::uint64_t kSplitStream = 101;
constexpr std::uint64_t kProjectionStream = 102;
constexpr std::uint64_t kInitStream = 103;
constexpr std::uint64_t kAcquireStreamBase = 1000;

void check_count(Index value, const char* what) {
  if (value < 1) {
    raise(Errc::ConfigInvalid, std::string(what) + " must be >= 1, got " +
                                   std::to_string(value));
  }
}

// Sorts candidate indices by (score, index); the comparator picks the
// direction so the best-k prefix respects the lowest-index tie rule.
std::vector<Index> top_k_by_score(const Vector& scores, Index k,
                                  bool largest) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (scores(a) != scores(b)) {
      return largest ? scores(a) > scores(b) : scores(a) < scores(b);
    }
    return a < b;
  });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

void check_k(Index k, Index pool_size) {
  if (k < 0 || k > pool_size) {
    raise(Errc::InvalidBudget, "acquisition size " + std::to_string(k) +
                                   " outside [0, " +
                                   std::to_string(pool_size) + "]");
  }
}

void check_probs(const Matrix& probs) {
  if (probs.rows() < 1 || probs.cols() < 2 || !probs.allFinite()) {
    raise(Errc::InvalidInput,
          "probability matrix must be finite with at least two classes");
  }
}

Matrix softmax_rows(Matrix logits) {
  for (Index i = 0; i < logits.rows(); ++i) {
    const double peak = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - peak).exp().matrix();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::RidgeLeverage: return "ridge_leverage";
    case Strategy::KCenter: return "k_center";
    case Strategy::Margin: return "margin";
    case Strategy::Entropy: return "entropy";
    case Strategy::Egl: return "egl";
    case Strategy::Random: return "random";
  }
  raise(Errc::InvalidInput, "unknown strategy");
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "ridge_leverage") return Strategy::RidgeLeverage;
  if (name == "k_center") return Strategy::KCenter;
  if (name == "margin") return Strategy::Margin;
  if (name == "entropy") return Strategy::Entropy;
  if (name == "egl") return Strategy::Egl;
  if (name == "random") return Strategy::Random;
  raise(Errc::InvalidInput, "unknown strategy name: " + name);
}

Dataset make_gaussian_mixture(Index n, int classes, Index d,
                              std::uint64_t seed, double separation,
                              std::vector<double> priors) {
  if (n < 1 || classes < 2 || d < 1) {
    raise(Errc::ConfigInvalid,
          "mixture needs n >= 1, classes >= 2, d >= 1");
  }
  if (priors.empty()) {
    priors.resize(static_cast<std::size_t>(classes));
    double mass = 1.0;
    for (auto& p : priors) {
      p = mass;
      mass *= 0.45;
    }
  }
  if (static_cast<int>(priors.size()) != classes) {
    raise(Errc::ConfigInvalid, "priors length must equal class count");
  }
  double total = 0.0;
  for (double p : priors) {
    if (!(p > 0.0)) {
      raise(Errc::ConfigInvalid, "priors must be positive");
    }
    total += p;
  }

  Rng rng(seed);
  Dataset data;
  data.features.resize(n, d);
  data.labels.resize(static_cast<std::size_t>(n));
  data.classes = classes;
  for (Index i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int label = classes - 1;
    for (int c = 0; c < classes; ++c) {
      acc += priors[static_cast<std::size_t>(c)];
      if (u < acc) {
        label = c;
        break;
      }
    }
    data.labels[static_cast<std::size_t>(i)] = label;
    for (Index j = 0; j < d; ++j) {
      data.features(i, j) = rng.normal();
    }
    data.features(i, label % d) += separation;
  }
  return data;
}

SoftmaxClassifier::SoftmaxClassifier(Index dim, int classes)
    : w_(Matrix::Zero(dim, classes)), b_(Vector::Zero(classes)) {
  if (dim < 1 || classes < 2) {
    raise(Errc::ConfigInvalid, "classifier needs dim >= 1 and classes >= 2");
  }
}

Matrix SoftmaxClassifier::predict_proba(const Matrix& x) const {
  if (x.cols() != w_.rows()) {
    raise(Errc::DimensionMismatch, "feature dimension mismatch");
  }
  Matrix logits = x * w_;
  logits.rowwise() += b_.transpose();
  return softmax_rows(std::move(logits));
}

double SoftmaxClassifier::mean_cross_entropy(
    const Matrix& x, const std::vector<int>& labels) const {
  const Matrix probs = predict_proba(x);
  double loss = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    loss -= std::log(std::max(probs(i, y), 1e-300));
  }
  return loss / static_cast<double>(x.rows());
}

double SoftmaxClassifier::accuracy(const Matrix& x,
                                   const std::vector<int>& labels) const {
  const Matrix probs = predict_proba(x);
  Index hits = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    Index argmax = 0;
    probs.row(i).maxCoeff(&argmax);
    if (static_cast<int>(argmax) == labels[static_cast<std::size_t>(i)]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(x.rows());
}

void SoftmaxClassifier::train(const Matrix& x, const std::vector<int>& labels,
                              Index epochs) {
  if (x.rows() < 1 || x.cols() != w_.rows()) {
    raise(Errc::DimensionMismatch, "training matrix shape mismatch");
  }
  if (static_cast<Index>(labels.size()) != x.rows()) {
    raise(Errc::DimensionMismatch, "label count mismatch");
  }
  const int classes = static_cast<int>(w_.cols());
  for (int label : labels) {
    if (label < 0 || label >= classes) {
      raise(Errc::InvalidInput, "label outside [0, classes)");
    }
  }

  const Index n = x.rows();
  const double n_real = static_cast<double>(n);

  // Smoothness from the augmented design (constant column for the bias).
  Matrix augmented(n, x.cols() + 1);
  augmented.leftCols(x.cols()) = x;
  augmented.col(x.cols()).setOnes();
  Matrix gram = augmented.transpose() * augmented / n_real;
  gram = 0.5 * (gram + gram.transpose());
  const double lmax =
      Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
  const double step = 0.5 / std::max(lmax, 1e-12);

  Matrix onehot = Matrix::Zero(n, classes);
  for (Index i = 0; i < n; ++i) {
    onehot(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  }

  for (Index epoch = 0; epoch < epochs; ++epoch) {
    const Matrix residual = predict_proba(x) - onehot;
    w_ -= step * (x.transpose() * residual) / n_real;
    b_ -= step * residual.colwise().sum().transpose() / n_real;
  }
}

std::vector<Index> acquire_ridge_leverage(const DataMatrix& pool,
                                          const Matrix& labeled,
                                          double lambda_coeff, Index k) {
  check_k(k, pool.rows());
  if (!(lambda_coeff > 0.0) || !std::isfinite(lambda_coeff)) {
    raise(Errc::InvalidLambda, "lambda coefficient must be positive");
  }
  if (labeled.rows() > 0 && labeled.cols() != pool.cols()) {
    raise(Errc::DimensionMismatch,
          "labeled and pool embedding dimensions differ");
  }
  const Matrix& basis = labeled.rows() > 0 ? labeled : pool.values();
  const double lambda = resolve_lambda(
      DataMatrix(basis), RidgeConfig{0.0, lambda_coeff});

  Matrix a = lambda * Matrix::Identity(pool.cols(), pool.cols());
  a.noalias() += basis.transpose() * basis;
  const Factorization fact =
      Factorization::positive_definite(SpdMatrix(0.5 * (a + a.transpose())));
  const Matrix solved = fact.solve(Matrix(pool.values().transpose()));
  const Vector scores =
      (pool.values().transpose().cwiseProduct(solved)).colwise().sum().transpose();
  return top_k_by_score(scores, k, /*largest=*/true);
}

std::vector<Index> acquire_k_center(const DataMatrix& pool,
                                    const Matrix& labeled, Index k) {
  check_k(k, pool.rows());
  if (labeled.rows() > 0 && labeled.cols() != pool.cols()) {
    raise(Errc::DimensionMismatch,
          "labeled and pool embedding dimensions differ");
  }
  const Index n = pool.rows();
  std::vector<Index> picks;
  picks.reserve(static_cast<std::size_t>(k));
  if (k == 0) return picks;

  Vector min_dist(n);
  if (labeled.rows() > 0) {
    for (Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < labeled.rows(); ++c) {
        best = std::min(
            best, (pool.values().row(i) - labeled.row(c)).norm());
      }
      min_dist(i) = best;
    }
  } else {
    // No centers yet: the first pick is the pool point of maximal norm.
    const Vector norms = pool.values().rowwise().norm();
    Index first = 0;
    for (Index i = 1; i < n; ++i) {
      if (norms(i) > norms(first)) first = i;
    }
    picks.push_back(first);
    min_dist.setConstant(std::numeric_limits<double>::infinity());
    for (Index i = 0; i < n; ++i) {
      min_dist(i) = (pool.values().row(i) - pool.values().row(first)).norm();
    }
    min_dist(first) = -1.0;  // never picked again
  }

  while (static_cast<Index>(picks.size()) < k) {
    Index best = -1;
    for (Index i = 0; i < n; ++i) {
      if (min_dist(i) < 0.0) continue;
      if (best < 0 || min_dist(i) > min_dist(best)) best = i;
    }
    picks.push_back(best);
    for (Index i = 0; i < n; ++i) {
      if (min_dist(i) < 0.0) continue;
      min_dist(i) = std::min(
          min_dist(i),
          (pool.values().row(i) - pool.values().row(best)).norm());
    }
    min_dist(best) = -1.0;
  }
  return picks;
}

std::vector<Index> acquire_margin(const Matrix& probs, Index k) {
  check_probs(probs);
  check_k(k, probs.rows());
  Vector margins(probs.rows());
  for (Index i = 0; i < probs.rows(); ++i) {
    double top = -1.0, second = -1.0;
    for (Index c = 0; c < probs.cols(); ++c) {
      const double p = probs(i, c);
      if (p > top) {
        second = top;
        top = p;
      } else if (p > second) {
        second = p;
      }
    }
    margins(i) = top - second;
  }
  return top_k_by_score(margins, k, /*largest=*/false);
}

std::vector<Index> acquire_entropy(const Matrix& probs, Index k) {
  check_probs(probs);
  check_k(k, probs.rows());
  Vector entropy(probs.rows());
  for (Index i = 0; i < probs.rows(); ++i) {
    double h = 0.0;
    for (Index c = 0; c < probs.cols(); ++c) {
      const double p = probs(i, c);
      if (p > 0.0) h -= p * std::log(p);
    }
    entropy(i) = h;
  }
  return top_k_by_score(entropy, k, /*largest=*/true);
}

std::vector<Index> acquire_egl(const DataMatrix& pool, const Matrix& probs,
                               Index k) {
  check_probs(probs);
  check_k(k, probs.rows());
  if (probs.rows() != pool.rows()) {
    raise(Errc::DimensionMismatch,
          "probability rows must match pool rows");
  }
  Vector scores(pool.rows());
  for (Index i = 0; i < pool.rows(); ++i) {
    const double x_norm = pool.values().row(i).norm();
    double expected = 0.0;
    for (Index c = 0; c < probs.cols(); ++c) {
      Vector residual = -probs.row(i).transpose();
      residual(c) += 1.0;
      expected += probs(i, c) * residual.norm();
    }
    scores(i) = x_norm * expected;
  }
  return top_k_by_score(scores, k, /*largest=*/true);
}

namespace {

Matrix embed_features(const Matrix& features, Index embedding_dim,
                      std::uint64_t seed) {
  if (embedding_dim <= 0 || embedding_dim == features.cols()) {
    return features;
  }
  Rng rng(derive_seed(seed, kProjectionStream));
  Matrix projection(features.cols(), embedding_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(embedding_dim));
  for (Index i = 0; i < projection.rows(); ++i) {
    for (Index j = 0; j < projection.cols(); ++j) {
      projection(i, j) = scale * rng.normal();
    }
  }
  return features * projection;
}

Matrix gather_rows(const Matrix& source, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), source.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Index>(r)) = source.row(rows[r]);
  }
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels,
                               const std::vector<Index>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (Index i : rows) out.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

ALRunRecord run_single(const ALConfig& cfg, const Dataset& data,
                       std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Index n = data.features.rows();

  std::vector<Index> shuffled(static_cast<std::size_t>(n));
  std::iota(shuffled.begin(), shuffled.end(), Index{0});
  Rng split_rng(derive_seed(seed, kSplitStream));
  split_rng.shuffle(shuffled.begin(), shuffled.end());
  const Index n_test = n / 2;
  const Index n_pool = n - n_test;
  std::vector<Index> pool_idx(shuffled.begin(), shuffled.begin() + n_pool);
  std::vector<Index> test_idx(shuffled.begin() + n_pool, shuffled.end());
  std::sort(pool_idx.begin(), pool_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  if (cfg.initial_labels + cfg.rounds * cfg.per_round > n_pool) {
    raise(Errc::ConfigInvalid,
          "label budget " +
              std::to_string(cfg.initial_labels + cfg.rounds * cfg.per_round) +
              " exceeds pool size " + std::to_string(n_pool));
  }

  const Matrix embeddings =
      embed_features(data.features, cfg.embedding_dim, seed);
  const Matrix test_emb = gather_rows(embeddings, test_idx);
  const std::vector<int> test_labels = gather_labels(data.labels, test_idx);

  // Initial labels: uniform without replacement from the pool.
  std::vector<Index> pool_order = pool_idx;
  Rng init_rng(derive_seed(seed, kInitStream));
  init_rng.shuffle(pool_order.begin(), pool_order.end());
  std::vector<Index> labeled(pool_order.begin(),
                             pool_order.begin() + cfg.initial_labels);
  std::sort(labeled.begin(), labeled.end());
  std::vector<Index> remaining(pool_order.begin() + cfg.initial_labels,
                               pool_order.end());
  std::sort(remaining.begin(), remaining.end());

  SoftmaxClassifier model(embeddings.cols(), data.classes);
  model.train(gather_rows(embeddings, labeled),
              gather_labels(data.labels, labeled), cfg.pretrain_epochs);

  ALRunRecord record;
  record.strategy = strategy_name(cfg.strategy);
  record.seed = seed;
  record.accuracy_curve.push_back(model.accuracy(test_emb, test_labels));

  for (Index round = 1; round <= cfg.rounds; ++round) {
    const Index k =
        std::min<Index>(cfg.per_round, static_cast<Index>(remaining.size()));
    if (k > 0) {
      const Matrix pool_emb = gather_rows(embeddings, remaining);
      const DataMatrix pool_data(pool_emb);
      const Matrix labeled_emb = gather_rows(embeddings, labeled);

      std::vector<Index> relative;
      switch (cfg.strategy) {
        case Strategy::RidgeLeverage:
          relative = acquire_ridge_leverage(pool_data, labeled_emb,
                                            cfg.lambda_coeff, k);
          break;
        case Strategy::KCenter:
          relative = acquire_k_center(pool_data, labeled_emb, k);
          break;
        case Strategy::Margin:
          relative = acquire_margin(model.predict_proba(pool_emb), k);
          break;
        case Strategy::Entropy:
          relative = acquire_entropy(model.predict_proba(pool_emb), k);
          break;
        case Strategy::Egl:
          relative = acquire_egl(pool_data, model.predict_proba(pool_emb), k);
          break;
        case Strategy::Random: {
          std::vector<Index> slots(remaining.size());
          std::iota(slots.begin(), slots.end(), Index{0});
          Rng round_rng(derive_seed(
              seed, kAcquireStreamBase + static_cast<std::uint64_t>(round)));
          round_rng.shuffle(slots.begin(), slots.end());
          relative.assign(slots.begin(), slots.begin() + k);
          break;
        }
      }

      std::vector<Index> absolute;
      absolute.reserve(relative.size());
      for (Index r : relative) {
        absolute.push_back(remaining[static_cast<std::size_t>(r)]);
      }
      std::sort(absolute.begin(), absolute.end());
      std::vector<Index> next_remaining;
      next_remaining.reserve(remaining.size() - absolute.size());
      std::set_difference(remaining.begin(), remaining.end(),
                          absolute.begin(), absolute.end(),
                          std::back_inserter(next_remaining));
      remaining = std::move(next_remaining);
      std::vector<Index> merged;
      merged.reserve(labeled.size() + absolute.size());
      std::merge(labeled.begin(), labeled.end(), absolute.begin(),
                 absolute.end(), std::back_inserter(merged));
      labeled = std::move(merged);
    }

    model.train(gather_rows(embeddings, labeled),
                gather_labels(data.labels, labeled), kRetrainEpochs);
    record.accuracy_curve.push_back(model.accuracy(test_emb, test_labels));
  }

  record.labeled_indices = labeled;
  record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

}  // namespace

std::vector<ALRunRecord> run_experiment(const ALConfig& cfg,
                                        const Dataset& data) {
  check_count(cfg.initial_labels, "initial_labels");
  check_count(cfg.pretrain_epochs, "pretrain_epochs");
  check_count(cfg.rounds, "rounds");
  check_count(cfg.per_round, "per_round");
  if (cfg.seeds.empty()) {
    raise(Errc::ConfigInvalid, "at least one seed is required");
  }
  if (!(cfg.lambda_coeff > 0.0)) {
    raise(Errc::ConfigInvalid, "lambda_coeff must be positive");
  }
  if (cfg.embedding_dim < 0) {
    raise(Errc::ConfigInvalid, "embedding_dim must be non-negative");
  }
  if (data.classes < 2 ||
      data.features.rows() != static_cast<Index>(data.labels.size())) {
    raise(Errc::ConfigInvalid, "dataset needs >= 2 classes and one label "
                               "per row");
  }
  for (int label : data.labels) {
    if (label < 0 || label >= data.classes) {
      raise(Errc::ConfigInvalid, "label outside [0, classes)");
    }
  }

  std::vector<ALRunRecord> records;
  records.reserve(cfg.seeds.size());
  for (std::uint64_t seed : cfg.seeds) {
    records.push_back(run_single(cfg, data, seed));
  }
  return records;
}

}  // namespace levval
