#include "levval/design.hpp"

#include <cmath>

#include "levval/errors.hpp"

namespace levval {

DesignState::DesignState(SpdMatrix a) : a_(a.values()) {
  refactorize();
}

void DesignState::refactorize() {
  SpdMatrix wrapped(a_);
  a_inv_ = inverse_spd(wrapped);
  logdet_ = logdet_spd(wrapped);
  trace_inv_ = a_inv_.trace();
  since_refactor_ = 0;
}

void DesignState::add(const Vector& x, Index pool_index) {
  if (x.size() != dim()) {
    raise(Errc::DimensionMismatch, "design update vector has size " +
                                       std::to_string(x.size()) +
                                       ", state dimension is " +
                                       std::to_string(dim()));
  }
  logdet_ += d_opt_gain(*this, x);
  trace_inv_ += a_opt_gain(*this, x);
  a_ += x * x.transpose();
  a_ = ((a_ + a_.transpose()) * 0.5).eval();
  a_inv_ = sherman_morrison_update(SpdMatrix(a_inv_), x).values();
  chosen_.push_back(pool_index);
  if (++since_refactor_ >= kRefactorPeriod) {
    refactorize();
  }
}

namespace {

void check_gain_input(const DesignState& state, const Vector& x) {
  if (x.size() != state.dim()) {
    raise(Errc::DimensionMismatch,
          "gain vector has size " + std::to_string(x.size()) +
              ", state dimension is " + std::to_string(state.dim()));
  }
  if (!x.allFinite()) {
    raise(Errc::InvalidInput, "gain vector has non-finite entries");
  }
}

}  // namespace

double d_opt_gain(const DesignState& state, const Vector& x) {
  check_gain_input(state, x);
  const double lev = x.dot(state.a_inv() * x);
  return std::log1p(lev);
}

double a_opt_gain(const DesignState& state, const Vector& x) {
  check_gain_input(state, x);
  const Vector v = state.a_inv() * x;
  return -v.squaredNorm() / (1.0 + x.dot(v));
}

GreedySelection greedy_select_traced(const DataMatrix& pool, double lambda,
                                     Index budget, DesignCriterion criterion) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    raise(Errc::InvalidLambda,
          "greedy selection requires lambda > 0, got " +
              std::to_string(lambda));
  }
  const Index d = pool.cols();
  Matrix init = lambda * Matrix::Identity(d, d);
  return greedy_select_traced(DesignState{SpdMatrix(std::move(init))}, pool,
                              budget, criterion);
}

GreedySelection greedy_select_traced(DesignState state, const DataMatrix& pool,
                                     Index budget, DesignCriterion criterion) {
  if (budget < 0 || budget > pool.rows()) {
    raise(Errc::InvalidBudget, "budget " + std::to_string(budget) +
                                   " outside [0, " +
                                   std::to_string(pool.rows()) + "]");
  }
  if (state.dim() != pool.cols()) {
    raise(Errc::DimensionMismatch,
          "state dimension " + std::to_string(state.dim()) +
              " does not match pool column count " +
              std::to_string(pool.cols()));
  }

  GreedySelection result;
  std::vector<bool> taken(static_cast<std::size_t>(pool.rows()), false);
  for (Index step = 0; step < budget; ++step) {
    Index best = -1;
    double best_gain = 0.0;
    for (Index i = 0; i < pool.rows(); ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const Vector row = pool.values().row(i).transpose();
      const double gain = criterion == DesignCriterion::D
                              ? d_opt_gain(state, row)
                              : -a_opt_gain(state, row);
      if (best < 0 || gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    state.add(pool.values().row(best).transpose(), best);
    result.chosen.push_back(best);
    result.gains.push_back(criterion == DesignCriterion::D ? best_gain
                                                           : -best_gain);
  }
  return result;
}

std::vector<Index> greedy_select(const DataMatrix& pool, double lambda,
                                 Index budget, DesignCriterion criterion) {
  return greedy_select_traced(pool, lambda, budget, criterion).chosen;
}

}  // namespace levval
