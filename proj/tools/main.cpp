#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levval/alsim.hpp"
#include "levval/csv.hpp"
#include "levval/design.hpp"
#include "levval/errors.hpp"
#include "levval/linalg.hpp"
#include "levval/report.hpp"
#include "levval/rng.hpp"
#include "levval/shapley.hpp"
#include "levval/sketch.hpp"
#include "levval/valuation.hpp"

namespace {

using namespace levval;
using nlohmann::json;

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::ParseError, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<double> to_list(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<std::int64_t> to_list(const std::vector<Index>& v) {
  return std::vector<std::int64_t>(v.begin(), v.end());
}

std::string fmt_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

void emit_report(const Report& report, const std::string& out_path) {
  const std::string text = serialize_report(report);
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    raise(Errc::ParseError, "cannot write '" + out_path + "'");
  }
  out << text;
  if (!out) {
    raise(Errc::ParseError, "write to '" + out_path + "' failed");
  }
}

// ---------------------------------------------------------------- value ----

struct ValueOpts {
  std::string matrix;
  std::string mode = "exact";
  double lambda = 0.0;
  double lambda_coeff = 0.0;
  bool has_lambda = false;
  bool has_coeff = false;
  std::string out;
};

void run_value(const ValueOpts& o) {
  const std::string bytes = read_file_bytes(o.matrix);
  const DataMatrix x(parse_csv(bytes).values);

  ValuationReport rep;
  if (o.mode == "exact") {
    rep = leverage_scores(x);
  } else {
    RidgeConfig cfg;
    if (o.has_lambda) {
      cfg.lambda = o.lambda;
    } else if (o.has_coeff) {
      cfg.adaptive_coeff = o.lambda_coeff;
    } else {
      raise(Errc::InvalidLambda, "ridge mode needs --lambda or --lambda-coeff");
    }
    rep = ridge_leverage_scores(x, cfg);
  }
  const AxiomAuditResult audit = axiom_audit(x, rep);

  const Index n = x.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (rep.scores(a) != rep.scores(b)) return rep.scores(a) > rep.scores(b);
    return a < b;
  });
  std::vector<std::int64_t> rank(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < order.size(); ++k) {
    rank[static_cast<std::size_t>(order[k])] = static_cast<std::int64_t>(k + 1);
  }

  Report report;
  report.command = "value";
  report.inputs_digest = DigestBuilder{}.add(bytes).hex();
  report.seed = 0;
  report.payload = {
      {"n", n},
      {"d", x.cols()},
      {"mode", o.mode},
      {"lambda", rep.lambda_used},
      {"stat_dim", rep.stat_dim},
      {"leverage", to_list(rep.leverage)},
      {"scores", to_list(rep.scores)},
      {"rank", rank},
      {"audit",
       {{"all_pass", audit.all_pass()},
        {"efficiency_ok", audit.efficiency_ok},
        {"efficiency_residual", audit.efficiency_residual},
        {"symmetry_ok", audit.symmetry_ok},
        {"symmetry_gap", audit.symmetry_gap},
        {"dummy_ok", audit.dummy_ok},
        {"positivity_ok", audit.positivity_ok}}},
  };
  emit_report(report, o.out);
}

// --------------------------------------------------------------- sample ----

struct SampleOpts {
  std::string matrix;
  std::string target;
  double lambda = 1.0;
  double epsilon = 0.2;
  double delta = 0.1;
  double constant = 4.0;
  std::uint64_t seed = 0;
  bool verify = false;
  std::string out;
};

void run_sample(const SampleOpts& o) {
  const std::string bytes = read_file_bytes(o.matrix);
  const DataMatrix x(parse_csv(bytes).values);
  DigestBuilder digest;
  digest.add(bytes);

  Vector y;
  Vector theta_lin;
  bool have_theta_lin = false;
  std::string target_source;
  if (!o.target.empty()) {
    const std::string target_bytes = read_file_bytes(o.target);
    digest.add(target_bytes);
    const CsvTable t = parse_csv(target_bytes);
    if (t.values.cols() != 1 || t.values.rows() != x.rows()) {
      raise(Errc::DimensionMismatch,
            "target must be a single column with one row per datapoint");
    }
    y = t.values.col(0);
    target_source = "file";
  } else {
    digest.add("synthetic-target");
    Rng rng(derive_seed(o.seed, 1));
    theta_lin.resize(x.cols());
    for (Index j = 0; j < x.cols(); ++j) theta_lin(j) = rng.normal();
    y = x.values() * theta_lin;
    have_theta_lin = true;
    target_source = "synthetic";
  }

  const ValuationReport valuation =
      ridge_leverage_scores(x, RidgeConfig{o.lambda, {}});
  const Index m =
      sample_size(valuation.stat_dim, x.cols(), o.epsilon, o.delta, o.constant);
  const SamplingPlan plan =
      plan_from_valuation(valuation, m, derive_seed(o.seed, 2));
  const SketchedProblem sketch = draw_sketch(x, y, plan, o.lambda);

  Matrix a_full = gram(x).values();
  a_full.diagonal().array() += o.lambda;
  const Vector b_full = x.values().transpose() * y;
  const Vector theta_star = solve_spd(SpdMatrix(a_full), b_full);

  Report report;
  report.command = "sample";
  report.inputs_digest = digest.hex();
  report.seed = o.seed;
  report.payload = {
      {"n", x.rows()},
      {"d", x.cols()},
      {"lambda", o.lambda},
      {"epsilon", o.epsilon},
      {"delta", o.delta},
      {"constant", o.constant},
      {"k_lambda", valuation.stat_dim},
      {"m", m},
      {"target_source", target_source},
      {"indices", to_list(sketch.indices)},
      {"weights", to_list(sketch.weights)},
      {"theta_hat", to_list(sketch.theta_hat)},
      {"theta_star", to_list(theta_star)},
  };

  if (o.verify) {
    if (!have_theta_lin) {
      const Vector b_plain = x.values().transpose() * y;
      theta_lin = solve_spd(gram(x), b_plain);
      const double residual = (y - x.values() * theta_lin).norm();
      if (residual > 1e-8 * std::max(y.norm(), 1.0)) {
        raise(Errc::NotRealizable,
              "target is not realizable: no theta satisfies y = X theta "
              "(residual " + fmt_double(residual) + ")");
      }
    }
    GuaranteeCheck check =
        verify_guarantees(x, theta_lin, o.lambda, o.epsilon, sketch);
    check.delta = o.delta;
    report.payload["verify"] = {
        {"epsilon", check.epsilon},
        {"delta", check.delta},
        {"spectral_dev", check.spectral_dev},
        {"b_dev", check.b_dev},
        {"theta_err", check.theta_err},
        {"risk_gap", check.risk_gap},
        {"theta_lin_norm", check.theta_lin_norm},
        {"passed_A", check.passed_A},
        {"passed_Q", check.passed_Q},
    };
  }
  emit_report(report, o.out);
}

// --------------------------------------------------------------- design ----

struct DesignOpts {
  std::string matrix;
  double lambda = 1.0;
  std::string criterion = "D";
  Index budget = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_design(const DesignOpts& o) {
  const std::string bytes = read_file_bytes(o.matrix);
  const DataMatrix pool(parse_csv(bytes).values);
  const DesignCriterion crit =
      o.criterion == "D" ? DesignCriterion::D : DesignCriterion::A;
  if (!(o.lambda > 0.0)) {
    raise(Errc::InvalidLambda, "design selection requires --lambda > 0");
  }

  // Gains are measured against the pool's information matrix A = X^T X + aI,
  // so each step reports the selected row's marginal design value within the
  // dataset; picks then reinforce A.
  Matrix a0 = gram(pool).values();
  a0.diagonal().array() += o.lambda;
  const GreedySelection sel = greedy_select_traced(
      DesignState{SpdMatrix(a0)}, pool, o.budget, crit);

  // Cross-check: replay the chosen sequence, recomputing each gain from a
  // fresh factorization instead of the rank-one identity.
  Matrix a = a0;
  json steps = json::array();
  double max_abs_diff = 0.0;
  for (std::size_t k = 0; k < sel.chosen.size(); ++k) {
    const Vector xk = pool.row(sel.chosen[k]);
    const double before = crit == DesignCriterion::D
                              ? logdet_spd(SpdMatrix(a))
                              : inverse_spd(SpdMatrix(a)).trace();
    a.noalias() += xk * xk.transpose();
    a = 0.5 * (a + a.transpose());
    const double after = crit == DesignCriterion::D
                             ? logdet_spd(SpdMatrix(a))
                             : inverse_spd(SpdMatrix(a)).trace();
    const double direct = after - before;
    const double diff = std::abs(direct - sel.gains[k]);
    max_abs_diff = std::max(max_abs_diff, diff);
    steps.push_back({{"index", sel.chosen[k]},
                     {"gain", sel.gains[k]},
                     {"gain_direct", direct},
                     {"abs_diff", diff}});
  }

  Report report;
  report.command = "design";
  report.inputs_digest = DigestBuilder{}.add(bytes).hex();
  report.seed = o.seed;
  report.payload = {
      {"n", pool.rows()},     {"d", pool.cols()},
      {"lambda", o.lambda},   {"criterion", o.criterion},
      {"budget", o.budget},   {"steps", steps},
      {"max_abs_diff", max_abs_diff},
  };
  emit_report(report, o.out);
}

// -------------------------------------------------------------- shapley ----

struct ShapleyOpts {
  std::string matrix;
  std::string utility = "span";
  double lambda = 0.0;
  bool exact = false;
  std::int64_t mc = 0;
  std::uint64_t seed = 0;
  bool compare = false;
  std::string out;
};

UtilityKind utility_kind_from(const std::string& name) {
  if (name == "span") return UtilityKind::SpanRank;
  if (name == "dlogdet") return UtilityKind::RidgeLogdet;
  if (name == "atrace") return UtilityKind::RidgeNegTrace;
  raise(Errc::InvalidInput, "unknown utility: " + name);
}

std::string utility_name_of(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::SpanRank: return "span";
    case UtilityKind::RidgeLogdet: return "dlogdet";
    case UtilityKind::RidgeNegTrace: return "atrace";
  }
  raise(Errc::InvalidInput, "unknown utility kind");
}

void run_shapley(const ShapleyOpts& o) {
  const std::string bytes = read_file_bytes(o.matrix);
  DataMatrix x(parse_csv(bytes).values);
  const Index n = x.rows();
  const Index d = x.cols();
  const UtilitySpec u{utility_kind_from(o.utility), std::move(x), o.lambda};

  const bool monte_carlo = o.mc > 0;
  const ShapleyResult result =
      monte_carlo ? shapley_monte_carlo(u, o.mc, o.seed) : shapley_exact(u);

  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  const double grand = utility_of_rows(u, all);
  const double empty = utility_of_rows(u, {});

  Report report;
  report.command = "shapley";
  report.inputs_digest = DigestBuilder{}.add(bytes).hex();
  report.seed = o.seed;
  report.payload = {
      {"n", n},
      {"d", d},
      {"utility", o.utility},
      {"lambda", o.lambda},
      {"method", monte_carlo ? "monte_carlo" : "exact"},
      {"values", to_list(result.values)},
      {"grand_utility", grand},
      {"empty_utility", empty},
      {"efficiency_residual", result.values.sum() - (grand - empty)},
  };
  if (monte_carlo) {
    report.payload["mc_permutations"] = *result.mc_permutations;
    report.payload["mc_stderr"] = to_list(*result.mc_stderr);
  }
  if (o.compare) {
    const GapReport gap = surrogate_gap_report(u.x, o.lambda);
    json surrogates = json::array();
    for (const SurrogateComparison& cmp : gap.comparisons) {
      surrogates.push_back({
          {"utility", utility_name_of(cmp.kind)},
          {"shapley_normalized", to_list(cmp.shapley_normalized)},
          {"max_gap_exact", cmp.max_gap_exact},
          {"max_gap_ridge", cmp.max_gap_ridge},
          {"spearman_exact", cmp.spearman_exact},
          {"spearman_ridge", cmp.spearman_ridge},
      });
    }
    report.payload["compare"] = {
        {"lambda", gap.lambda},
        {"pi_exact", to_list(gap.pi_exact)},
        {"pi_ridge", to_list(gap.pi_ridge)},
        {"surrogates", surrogates},
    };
  }
  emit_report(report, o.out);
}

// ------------------------------------------------------------------- al ----

struct AlOpts {
  std::string data;
  std::string target_col = "label";
  Index synth_n = 2000;
  int classes = 4;
  Index dim = 16;
  std::uint64_t data_seed = 42;
  double separation = 3.0;
  std::string strategy = "all";
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  Index rounds = 40;
  Index per_round = 5;
  Index init = 100;
  Index pretrain = 20;
  double lambda_coeff = 0.01;
  Index embedding_dim = 0;
  std::string out_dir = ".";
  std::string out;
};

void run_al(const AlOpts& o) {
  DigestBuilder digest;
  Dataset data;
  std::string source;
  if (!o.data.empty()) {
    const std::string bytes = read_file_bytes(o.data);
    digest.add(bytes).add(o.target_col);
    const LabeledTable table = split_target(parse_csv(bytes), o.target_col);
    data.features = table.features;
    data.labels = table.labels;
    data.classes =
        1 + *std::max_element(table.labels.begin(), table.labels.end());
    source = o.data;
  } else {
    digest.add("synthetic")
        .add("n=" + std::to_string(o.synth_n))
        .add("classes=" + std::to_string(o.classes))
        .add("d=" + std::to_string(o.dim))
        .add("seed=" + std::to_string(o.data_seed))
        .add("separation=" + fmt_double(o.separation));
    data = make_gaussian_mixture(o.synth_n, o.classes, o.dim, o.data_seed,
                                 o.separation);
    source = "synthetic";
  }

  std::vector<Strategy> strategies;
  if (o.strategy == "all") {
    strategies = {Strategy::RidgeLeverage, Strategy::KCenter, Strategy::Margin,
                  Strategy::Entropy,       Strategy::Egl,     Strategy::Random};
  } else {
    strategies = {strategy_from_name(o.strategy)};
  }

  std::filesystem::create_directories(o.out_dir);

  json runs = json::array();
  json summary = json::array();
  std::vector<std::string> curve_files;
  for (Strategy s : strategies) {
    ALConfig cfg;
    cfg.initial_labels = o.init;
    cfg.pretrain_epochs = o.pretrain;
    cfg.rounds = o.rounds;
    cfg.per_round = o.per_round;
    cfg.seeds = o.seeds;
    cfg.strategy = s;
    cfg.lambda_coeff = o.lambda_coeff;
    cfg.embedding_dim = o.embedding_dim;
    const std::vector<ALRunRecord> records = run_experiment(cfg, data);

    double mean = 0.0;
    for (const ALRunRecord& rec : records) mean += rec.accuracy_curve.back();
    mean /= static_cast<double>(records.size());
    double var = 0.0;
    for (const ALRunRecord& rec : records) {
      const double gap = rec.accuracy_curve.back() - mean;
      var += gap * gap;
    }
    const double stdev =
        records.size() > 1
            ? std::sqrt(var / static_cast<double>(records.size() - 1))
            : 0.0;
    summary.push_back({{"strategy", strategy_name(s)},
                       {"final_mean", mean},
                       {"final_std", stdev}});

    // The pool holds the first half of the shuffled dataset; a final round
    // may be clipped to the rows that remain.
    const Index n_pool = data.features.rows() - data.features.rows() / 2;
    for (const ALRunRecord& rec : records) {
      Matrix curve(static_cast<Index>(rec.accuracy_curve.size()), 3);
      for (Index r = 0; r < curve.rows(); ++r) {
        curve(r, 0) = static_cast<double>(r);
        curve(r, 1) =
            static_cast<double>(std::min(o.init + r * o.per_round, n_pool));
        curve(r, 2) = rec.accuracy_curve[static_cast<std::size_t>(r)];
      }
      const std::string filename =
          "curve_" + rec.strategy + "_seed" + std::to_string(rec.seed) + ".csv";
      save_csv(o.out_dir + "/" + filename, curve,
               {"round", "labeled_count", "accuracy"});
      curve_files.push_back(filename);
      runs.push_back({{"strategy", rec.strategy},
                      {"seed", rec.seed},
                      {"final_accuracy", rec.accuracy_curve.back()},
                      {"accuracy_curve", rec.accuracy_curve},
                      {"labeled_indices", to_list(rec.labeled_indices)}});
    }
  }

  Report report;
  report.command = "al";
  report.inputs_digest = digest.hex();
  report.seed = o.seeds.front();
  report.payload = {
      {"dataset",
       {{"source", source},
        {"n", data.features.rows()},
        {"d", data.features.cols()},
        {"classes", data.classes}}},
      {"config",
       {{"initial_labels", o.init},
        {"pretrain_epochs", o.pretrain},
        {"rounds", o.rounds},
        {"per_round", o.per_round},
        {"lambda_coeff", o.lambda_coeff},
        {"embedding_dim", o.embedding_dim},
        {"seeds", o.seeds}}},
      {"summary", summary},
      {"runs", runs},
      {"curve_files", curve_files},
  };
  emit_report(report, o.out);
}

// ------------------------------------------------------------- chernoff ----

struct ChernoffOpts {
  std::string matrix;
  double lambda = 1.0;
  Index m = 0;
  Index trials = 100;
  std::uint64_t seed = 0;
  std::string out;
};

void run_chernoff(const ChernoffOpts& o) {
  const std::string bytes = read_file_bytes(o.matrix);
  const DataMatrix x(parse_csv(bytes).values);
  const DeviationHistogram hist =
      chernoff_trial_stats(x, o.lambda, o.m, o.trials, o.seed);

  json table = json::array();
  for (Index g = 0; g < hist.eps_grid.size(); ++g) {
    table.push_back({{"epsilon", hist.eps_grid(g)},
                     {"empirical_tail", hist.empirical_tail(g)},
                     {"envelope", hist.envelope(g)}});
  }
  const double max_deviation =
      *std::max_element(hist.deviations.begin(), hist.deviations.end());

  Report report;
  report.command = "chernoff";
  report.inputs_digest = DigestBuilder{}.add(bytes).hex();
  report.seed = o.seed;
  report.payload = {
      {"n", x.rows()},
      {"d", hist.d},
      {"lambda", o.lambda},
      {"m", hist.m},
      {"trials", hist.trials},
      {"k_lambda", hist.k_lambda},
      {"y_norm_min", hist.y_norm_min},
      {"y_norm_max", hist.y_norm_max},
      {"max_deviation", max_deviation},
      {"table", table},
  };
  emit_report(report, o.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leverage-score data valuation and guarantee-checked subsampling"};
  app.require_subcommand(1);

  ValueOpts value_opts;
  auto* value_cmd = app.add_subcommand(
      "value", "Per-point leverage valuation with an axiom audit");
  value_cmd->add_option("matrix", value_opts.matrix, "input matrix CSV")
      ->required();
  value_cmd->add_option("--mode", value_opts.mode, "exact or ridge")
      ->check(CLI::IsMember({"exact", "ridge"}));
  auto* value_lambda = value_cmd->add_option(
      "--lambda", value_opts.lambda, "fixed ridge regularization (ridge mode)");
  auto* value_coeff = value_cmd->add_option(
      "--lambda-coeff", value_opts.lambda_coeff,
      "adaptive ridge coefficient: lambda = coeff * tr(X^T X) / d");
  value_lambda->excludes(value_coeff);
  value_cmd->add_option("--out", value_opts.out, "report path (default stdout)");
  value_cmd->callback([&] {
    value_opts.has_lambda = value_lambda->count() > 0;
    value_opts.has_coeff = value_coeff->count() > 0;
    run_value(value_opts);
  });

  SampleOpts sample_opts;
  auto* sample_cmd = app.add_subcommand(
      "sample", "Ridge-leverage row sampling with guarantee checks");
  sample_cmd->add_option("matrix", sample_opts.matrix, "input matrix CSV")
      ->required();
  sample_cmd->add_option("--target", sample_opts.target,
                         "target CSV (one column); synthesized when absent");
  sample_cmd->add_option("--lambda", sample_opts.lambda,
                         "ridge regularization (> 0)");
  sample_cmd->add_option("--epsilon", sample_opts.epsilon,
                         "spectral accuracy in (0, 1/2)");
  sample_cmd->add_option("--delta", sample_opts.delta,
                         "failure probability in (0, 1)");
  sample_cmd->add_option("--constant", sample_opts.constant,
                         "sample-size constant C");
  sample_cmd->add_option("--seed", sample_opts.seed, "base seed");
  sample_cmd->add_flag("--verify", sample_opts.verify,
                       "check the spectral and solution guarantees");
  sample_cmd->add_option("--out", sample_opts.out, "report path (default stdout)");
  sample_cmd->callback([&] { run_sample(sample_opts); });

  DesignOpts design_opts;
  auto* design_cmd = app.add_subcommand(
      "design", "Greedy optimal-design selection with identity cross-checks");
  design_cmd->add_option("matrix", design_opts.matrix, "pool matrix CSV")
      ->required();
  design_cmd->add_option("--lambda", design_opts.lambda,
                         "ridge regularization (> 0)");
  design_cmd->add_option("--criterion", design_opts.criterion, "D or A")
      ->check(CLI::IsMember({"D", "A"}));
  design_cmd->add_option("--budget", design_opts.budget, "rows to select")
      ->required();
  design_cmd->add_option("--seed", design_opts.seed, "base seed");
  design_cmd->add_option("--out", design_opts.out, "report path (default stdout)");
  design_cmd->callback([&] { run_design(design_opts); });

  ShapleyOpts shapley_opts;
  auto* shapley_cmd = app.add_subcommand(
      "shapley", "Shapley values under span or ridge utilities");
  shapley_cmd->add_option("matrix", shapley_opts.matrix, "input matrix CSV")
      ->required();
  shapley_cmd->add_option("--utility", shapley_opts.utility,
                          "span, dlogdet, or atrace")
      ->check(CLI::IsMember({"span", "dlogdet", "atrace"}));
  shapley_cmd->add_option("--lambda", shapley_opts.lambda,
                          "ridge regularization for ridge utilities");
  auto* shapley_exact_flag = shapley_cmd->add_flag(
      "--exact", shapley_opts.exact, "exact enumeration (default; n <= 20)");
  auto* shapley_mc = shapley_cmd->add_option(
      "--mc", shapley_opts.mc, "Monte Carlo permutation count");
  shapley_exact_flag->excludes(shapley_mc);
  shapley_cmd->add_option("--seed", shapley_opts.seed, "base seed");
  shapley_cmd->add_flag("--compare", shapley_opts.compare,
                        "include the leverage-surrogate gap report");
  shapley_cmd->add_option("--out", shapley_opts.out, "report path (default stdout)");
  shapley_cmd->callback([&] { run_shapley(shapley_opts); });

  AlOpts al_opts;
  auto* al_cmd = app.add_subcommand(
      "al", "Deterministic active-learning strategy comparison");
  al_cmd->add_option("--data", al_opts.data,
                     "labeled dataset CSV (features + target column)");
  al_cmd->add_option("--target-col", al_opts.target_col,
                     "target column name or 0-based index");
  al_cmd->add_option("--synthetic-n", al_opts.synth_n,
                     "synthetic dataset size (when --data is absent)");
  al_cmd->add_option("--classes", al_opts.classes, "synthetic class count");
  al_cmd->add_option("--dim", al_opts.dim, "synthetic feature dimension");
  al_cmd->add_option("--data-seed", al_opts.data_seed, "synthetic dataset seed");
  al_cmd->add_option("--separation", al_opts.separation,
                     "synthetic class-mean separation");
  al_cmd->add_option("--strategy", al_opts.strategy,
                     "one strategy name, or 'all'");
  al_cmd->add_option("--seeds", al_opts.seeds, "run seeds");
  al_cmd->add_option("--rounds", al_opts.rounds, "acquisition rounds");
  al_cmd->add_option("--per-round", al_opts.per_round, "labels per round");
  al_cmd->add_option("--init", al_opts.init, "initial labeled count");
  al_cmd->add_option("--pretrain", al_opts.pretrain, "pretraining epochs");
  al_cmd->add_option("--lambda-coeff", al_opts.lambda_coeff,
                     "adaptive ridge coefficient for ridge_leverage");
  al_cmd->add_option("--embedding-dim", al_opts.embedding_dim,
                     "random-projection dimension (0 = raw features)");
  al_cmd->add_option("--out-dir", al_opts.out_dir, "directory for curve CSVs");
  al_cmd->add_option("--out", al_opts.out, "report path (default stdout)");
  al_cmd->callback([&] { run_al(al_opts); });

  ChernoffOpts chernoff_opts;
  auto* chernoff_cmd = app.add_subcommand(
      "chernoff", "Matrix-Chernoff deviation tails against the envelope");
  chernoff_cmd->add_option("matrix", chernoff_opts.matrix, "input matrix CSV")
      ->required();
  chernoff_cmd->add_option("--lambda", chernoff_opts.lambda,
                           "ridge regularization (> 0)");
  chernoff_cmd->add_option("--m", chernoff_opts.m, "rows per trial")
      ->required();
  chernoff_cmd->add_option("--trials", chernoff_opts.trials, "trial count");
  chernoff_cmd->add_option("--seed", chernoff_opts.seed, "base seed");
  chernoff_cmd->add_option("--out", chernoff_opts.out,
                           "report path (default stdout)");
  chernoff_cmd->callback([&] { run_chernoff(chernoff_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const levval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == Errc::RankDeficient) {
      std::cerr << "hint: exact leverage needs full column rank; rerun with "
                   "--mode ridge and a positive --lambda or --lambda-coeff\n";
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
