#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levval/linalg.hpp"

namespace levval {

enum class Strategy { RidgeLeverage, KCenter, Margin, Entropy, Egl, Random };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct ALConfig {
  Index initial_labels = 100;
  Index pretrain_epochs = 20;
  Index rounds = 40;
  Index per_round = 5;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  Strategy strategy = Strategy::Random;
  double lambda_coeff = 0.01;
  Index embedding_dim = 0;  // 0 keeps raw features as the embedding
};

struct ALRunRecord {
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<double> accuracy_curve;   // rounds + 1 entries
  std::vector<Index> labeled_indices;   // final set, ascending
  double wall_time = 0.0;               // in-memory diagnostic only
};

struct Dataset {
  Matrix features;          // n×d
  std::vector<int> labels;  // values in [0, classes)
  int classes = 0;
};

// Synthetic Gaussian mixture: class c is an isotropic unit-variance blob
// centered at separation·e_{c mod d}. Empty priors default to the skewed
// profile priors_c ∝ 0.45^c, which leaves the later classes rare.
Dataset make_gaussian_mixture(Index n, int classes, Index d,
                              std::uint64_t seed, double separation = 3.0,
                              std::vector<double> priors = {});

// Multinomial logistic regression trained by full-batch gradient descent
// with step 0.5/L, where L is the largest eigenvalue of the mean augmented
// Gram. Deterministic: zero initialization, fixed epoch budgets.
class SoftmaxClassifier {
 public:
  SoftmaxClassifier(Index dim, int classes);

  void train(const Matrix& x, const std::vector<int>& labels, Index epochs);
  Matrix predict_proba(const Matrix& x) const;
  double mean_cross_entropy(const Matrix& x,
                            const std::vector<int>& labels) const;
  double accuracy(const Matrix& x, const std::vector<int>& labels) const;

  const Matrix& weights() const { return w_; }
  const Vector& bias() const { return b_; }

 private:
  Matrix w_;  // dim×K
  Vector b_;  // K
};

// Acquisition strategies. All return exactly k pool-relative indices,
// never repeating one, with ties broken toward the lowest index.

// Ridge leverage of each pool point against A = X_labᵀX_lab + λI with
// λ = lambda_coeff·Tr(X_labᵀX_lab)/d. Needs no labels or model state.
// An empty labeled set falls back to the pool Gram.
std::vector<Index> acquire_ridge_leverage(const DataMatrix& pool,
                                          const Matrix& labeled,
                                          double lambda_coeff, Index k);

// Greedy k-center: repeatedly take the pool point farthest from the
// current centers (labeled points plus earlier picks). An empty labeled
// set seeds with the pool point of maximal norm.
std::vector<Index> acquire_k_center(const DataMatrix& pool,
                                    const Matrix& labeled, Index k);

// Smallest top-2 probability margin first.
std::vector<Index> acquire_margin(const Matrix& probs, Index k);

// Highest Shannon entropy first (0·log 0 = 0).
std::vector<Index> acquire_entropy(const Matrix& probs, Index k);

// Largest expected gradient length ‖x‖·Σ_c p_c‖onehot(c) − p‖ first.
std::vector<Index> acquire_egl(const DataMatrix& pool, const Matrix& probs,
                               Index k);

// Full protocol: per seed, split the dataset into pool and test halves,
// label an initial batch, pretrain, then acquire per_round points per round
// with retraining and accuracy tracking. Pure function of (cfg, data).
std::vector<ALRunRecord> run_experiment(const ALConfig& cfg,
                                        const Dataset& data);

}  // namespace levval
