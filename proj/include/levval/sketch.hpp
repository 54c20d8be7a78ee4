#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "levval/linalg.hpp"
#include "levval/valuation.hpp"

namespace levval {

// With-replacement importance-sampling plan over rows.
struct SamplingPlan {
  Vector probabilities;
  Index m = 0;
  std::uint64_t seed = 0;
  bool with_replacement = true;
};

// Validates pᵢ ≥ 0 and Σpᵢ = 1 within 1e-10.
SamplingPlan make_plan(Vector probabilities, Index m, std::uint64_t seed);

// Theorem-2 plan: pᵢ = ℓᵢ^(λ)/kλ from a ridge valuation.
SamplingPlan plan_from_valuation(const ValuationReport& report, Index m,
                                 std::uint64_t seed);

// m ≥ C·(kλ + ln(2d/δ))/ε², rounded up.
Index sample_size(double k_lambda, Index d, double epsilon, double delta,
                  double c);

struct SketchedProblem {
  std::vector<Index> indices;
  Vector weights;     // W_tt = (m·p_{i_t})^{-1/2}
  Matrix x_tilde;     // row t = weights[t]·X[indices[t]]
  Vector y_tilde;
  SpdMatrix a_s;      // X̃ᵀX̃ + λI
  Vector b_s;         // X̃ᵀỹ
  Vector theta_hat;   // A_S⁻¹ b_S
};

// Assembles the weighted subproblem for an explicit index/weight draw.
SketchedProblem assemble_sketch(const DataMatrix& x, const Vector& y,
                                std::vector<Index> indices, Vector weights,
                                double lambda);

// Draws plan.m i.i.d. indices by inverse CDF on a generator seeded with
// plan.seed, then assembles and solves the sketched ridge problem.
SketchedProblem draw_sketch(const DataMatrix& x, const Vector& y,
                            const SamplingPlan& plan, double lambda);

struct GuaranteeCheck {
  double epsilon = 0.0;
  double delta = 0.0;          // carried for reporting; not checked here
  double spectral_dev = 0.0;   // ‖A^{-1/2}A_S A^{-1/2} − I‖₂
  double b_dev = 0.0;          // ‖b_S − b‖_{A⁻¹}
  double theta_err = 0.0;      // ‖θ̂ − θ*‖_A
  double risk_gap = 0.0;       // R(θ̂) − R(θ*)
  double theta_lin_norm = 0.0; // ‖θ_lin‖_A
  bool passed_A = false;
  bool passed_Q = false;
};

// Checks the sketch against the realizable problem y = Xθ_lin:
// passed_A ⇔ spectral_dev ≤ ε and b_dev ≤ ε‖θ_lin‖_A;
// passed_Q ⇔ theta_err ≤ 4ε‖θ_lin‖_A and risk_gap ≤ 8ε²‖θ_lin‖²_A.
// Raises NotRealizable when the sketch's responses disagree with
// X̃θ_lin beyond 1e-8 relative, which signals a non-realizable caller.
GuaranteeCheck verify_guarantees(const DataMatrix& x, const Vector& theta_lin,
                                 double lambda, double epsilon,
                                 const SketchedProblem& sketch);

struct DeviationHistogram {
  Vector eps_grid;
  Vector empirical_tail;       // P[dev ≥ ε] per grid point
  Vector envelope;             // 2d·exp(−mε²/(3kλ))
  std::vector<double> deviations;  // per-trial ‖Σ Y_t − M‖₂
  double k_lambda = 0.0;
  Index d = 0;
  Index m = 0;
  Index trials = 0;
  double y_norm_min = 0.0;     // extremes of ‖Y_t‖₂ across all draws
  double y_norm_max = 0.0;
};

// Monte Carlo deviation study for the matrix Chernoff bound with
// Y_t = (m·p_{i_t})⁻¹ A^{-1/2}x_{i_t}x_{i_t}ᵀA^{-1/2}. Trial t uses the
// derived seed (seed, t), so trials are reproducible and order-free.
DeviationHistogram chernoff_trial_stats(const DataMatrix& x, double lambda,
                                        Index m, Index trials,
                                        std::uint64_t seed);

// Log-space slack of Lemma 1's scalar bounds at ε:
//   first:  ε − (1+ε)·ln(1+ε) − (−ε²/3)
//   second: −ε − (1−ε)·ln(1−ε) − (−ε²/2)
// Both are ≤ 0 up to rounding for ε ∈ (0, ½).
std::pair<double, double> lemma1_log_gaps(double epsilon);

struct RidgeContraction {
  double theta_star_norm = 0.0;  // ‖θ*‖_A
  double theta_lin_norm = 0.0;   // ‖θ_lin‖_A
  double closed_form_gap = 0.0;  // ‖θ*(solve) − (I − λA⁻¹)θ_lin‖₂
  Vector multipliers_h;          // hⱼ = σⱼ²/√(σⱼ²+λ) per eigen-direction
  Vector multipliers_a;          // aⱼ = √(σⱼ²+λ)
};

// Ridge contraction in the A-norm: computes θ* = A⁻¹XᵀXθ_lin two ways and
// the per-direction multipliers, raising if the closed form
// θ* = (I − λA⁻¹)θ_lin disagrees beyond 1e-8 or if ‖θ*‖_A exceeds
// ‖θ_lin‖_A beyond rounding.
RidgeContraction ridge_contraction_check(const DataMatrix& x,
                                         const Vector& theta_lin,
                                         double lambda);

struct CalibrationResult {
  double c = 0.0;              // smallest grid value meeting the target
  double failure_rate = 0.0;   // measured joint failure rate at that C
  Index m = 0;                 // sample size implied by C
  std::vector<double> grid;    // candidates examined, ascending
  bool calibrated = false;     // false when no candidate met the target
};

// Empirically calibrates the Theorem-2 constant on a Gaussian reference
// ensemble: returns the smallest grid C whose joint (A)-event failure rate
// over `trials` sketches is ≤ δ/2 (margin for reuse at level δ). Falls back
// to C = 8 with calibrated = false when the grid is exhausted.
CalibrationResult calibrate_constant(Index n, Index d, double lambda,
                                     double epsilon, double delta,
                                     Index trials, std::uint64_t seed);

}  // namespace levval
