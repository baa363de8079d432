#include "tvfrft/pipeline.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>

#include "tvfrft/errors.hpp"
#include "tvfrft/fractional.hpp"
#include "tvfrft/rng.hpp"
#include "tvfrft/transforms.hpp"
#include "tvfrft/wiener.hpp"

namespace tvfrft {

namespace {

constexpr double kSnrCapDb = 300.0;

double db_factor(SnrConvention convention) {
  return convention == SnrConvention::NormRatio ? 10.0 : 20.0;
}

// Shared spectral machinery for one (graph, segment length) problem; built
// once and reused across trials and grid points.
struct PipelineContext {
  SpectralDecomposition decomp_g;
  SpectralDecomposition decomp_t;  // of the M-cycle Laplacian
  FractionalContext ctx_g;
  FractionalContext ctx_t;
  int n = 0;
  int t = 0;
  int m = 0;
  int s = 0;
};

PipelineContext make_context(const Graph& g, int t_total, int m) {
  PipelineContext ctx;
  ctx.n = g.n_vertices;
  ctx.t = t_total;
  ctx.m = m;
  ctx.s = t_total / m;
  ctx.decomp_g = eigendecompose(laplacian(g), true);
  ctx.decomp_t = eigendecompose(cycle_laplacian(m));
  ctx.ctx_g = make_fractional_context(ctx.decomp_g);
  ctx.ctx_t = make_fractional_context(ctx.decomp_t);
  return ctx;
}

// Everything one fractional order contributes: the unitary transform factor,
// the normalized fractional shift, its spectrum, and the Vandermonde block.
struct OrderPack {
  Eigen::MatrixXcd transform;
  Eigen::MatrixXcd op;
  Eigen::VectorXcd eigs;
  Eigen::MatrixXcd psi;
};

OrderPack make_order_pack(const FractionalContext& fctx, double order,
                          int degree) {
  const FractionalBasis basis = fractional_transform(fctx, order);
  Eigen::MatrixXcd op = basis.transform.adjoint() *
                        basis.frac_eigenvalues.asDiagonal() * basis.transform;
  auto normalized =
      normalize_energy_preserving(std::move(op), basis.frac_eigenvalues);
  OrderPack pack;
  pack.transform = basis.transform;
  pack.op = std::move(normalized.first);
  pack.eigs = std::move(normalized.second);
  pack.psi = build_vandermonde(pack.eigs, degree);
  return pack;
}

std::map<double, OrderPack> build_packs(
    const FractionalContext& fctx,
    const std::vector<std::pair<double, double>>& grid, bool temporal,
    int degree) {
  std::map<double, OrderPack> packs;
  for (const auto& [a, b] : grid) {
    const double order = temporal ? a : b;
    if (!packs.count(order))
      packs.emplace(order, make_order_pack(fctx, order, degree));
  }
  return packs;
}

Eigen::MatrixXd apply_first_stage(const Eigen::MatrixXd& y, const Graph& g,
                                  const PipelineContext& ctx,
                                  const ExperimentConfig& cfg, double gamma,
                                  double* imag_residue) {
  Eigen::MatrixXd out(ctx.n, ctx.t);
  for (int s = 0; s < ctx.s; ++s) {
    const Eigen::MatrixXd block = y.middleCols(s * ctx.m, ctx.m);
    if (cfg.first_stage == FirstStage::Median) {
      out.middleCols(s * ctx.m, ctx.m) =
          recursive_median_filter(block, g, cfg.median);
      continue;
    }
    const Eigen::Map<const Eigen::VectorXd> stacked(block.data(),
                                                    block.size());
    TikhonovConfig tik;
    tik.gamma = gamma;
    const TikhonovResult res =
        tikhonov_denoise(stacked, ctx.decomp_t, ctx.decomp_g, tik);
    out.middleCols(s * ctx.m, ctx.m) = Eigen::Map<const Eigen::MatrixXd>(
        res.values.data(), ctx.n, ctx.m);
    if (imag_residue) *imag_residue = std::max(*imag_residue, res.imag_residue);
  }
  return out;
}

// The second-stage output is genuinely complex at fractional orders; only
// its real part is the estimate, so no imaginary-residue bookkeeping here —
// that concept belongs to the Tikhonov synthesis, where imaginary parts are
// pure round-off.
struct OrderEval {
  Eigen::MatrixXd denoised;
  std::vector<FilterCoefficients> coefficients;
  double residual = 0.0;
  bool ill = false;
};

// One (a,b) pair on one realization: per segment, spectra of noisy and
// reference signals, Wiener-Hopf solve, filter application.
OrderEval evaluate_orders(const PipelineContext& ctx, const OrderPack& tp,
                          const OrderPack& gp, const Eigen::MatrixXd& y,
                          const Eigen::MatrixXd& ref,
                          const ExperimentConfig& cfg) {
  OrderEval ev;
  ev.denoised.resize(ctx.n, ctx.t);
  double residual_sq = 0.0;
  for (int s = 0; s < ctx.s; ++s) {
    const Eigen::MatrixXcd y_block =
        y.middleCols(s * ctx.m, ctx.m).cast<std::complex<double>>();
    const Eigen::MatrixXcd ref_block =
        ref.middleCols(s * ctx.m, ctx.m).cast<std::complex<double>>();
    const Eigen::MatrixXcd y_f =
        gp.transform * y_block * tp.transform.transpose();
    const Eigen::MatrixXcd x_f =
        gp.transform * ref_block * tp.transform.transpose();

    const WienerSystem sys =
        assemble_wiener_system_factored(y_f, x_f, tp.psi, gp.psi);
    const double ridge = cfg.ridge < 0.0 ? default_ridge(sys) : cfg.ridge;
    SolveResult sol = solve_coefficients(sys, ridge);
    ev.ill = ev.ill || sol.ill_conditioned;

    const Eigen::Map<const Eigen::VectorXcd> y_vec(y_block.data(),
                                                   y_block.size());
    const Eigen::VectorXcd z =
        apply_joint_filter(sol.coefficients, tp.op, gp.op, y_vec);
    ev.coefficients.push_back(std::move(sol.coefficients));
    const Eigen::Map<const Eigen::MatrixXcd> z_mat(z.data(), ctx.n, ctx.m);
    ev.denoised.middleCols(s * ctx.m, ctx.m) = z_mat.real();
    residual_sq += (z_mat - ref_block).squaredNorm();
  }
  ev.residual = std::sqrt(residual_sq);
  return ev;
}

// Grid ranking: experiment mode wants the largest SNR, blind mode the
// smallest residual; ties go to the orders nearest (1,1), then to the
// lexicographically smaller pair.
struct Ranker {
  bool maximize = true;
  bool has = false;
  double value = 0.0, dist2 = 0.0, a = 0.0, b = 0.0;
  int index = -1;

  bool offer(double v, double aa, double bb, int idx) {
    const double d2 = (aa - 1.0) * (aa - 1.0) + (bb - 1.0) * (bb - 1.0);
    bool better = false;
    if (!has)
      better = true;
    else if (v != value)
      better = maximize ? v > value : v < value;
    else if (d2 != dist2)
      better = d2 < dist2;
    else if (aa != a)
      better = aa < a;
    else if (bb != b)
      better = bb < b;
    if (better) {
      has = true;
      value = v;
      dist2 = d2;
      a = aa;
      b = bb;
      index = idx;
    }
    return better;
  }
};

TrialBreakdown evaluate_trial(const PipelineContext& ctx, const Graph& g,
                              const std::map<double, OrderPack>& tpacks,
                              const std::map<double, OrderPack>& gpacks,
                              const Eigen::MatrixXd& y,
                              const Eigen::MatrixXd* clean,
                              const ExperimentConfig& cfg, double gamma,
                              bool* any_ill, double* imag_max) {
  TrialBreakdown trial;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd first =
      apply_first_stage(y, g, ctx, cfg, gamma, imag_max);

  trial.input_snr_db = clean ? snr_db(*clean, y, cfg.snr_convention) : nan;
  trial.first_stage_snr_db =
      clean ? snr_db(*clean, first, cfg.snr_convention) : nan;

  Ranker rank;
  rank.maximize = clean != nullptr;
  trial.surface.reserve(cfg.orders_grid.size());
  for (std::size_t i = 0; i < cfg.orders_grid.size(); ++i) {
    const auto [a, b] = cfg.orders_grid[i];
    const OrderEval ev = evaluate_orders(ctx, tpacks.at(a), gpacks.at(b), y,
                                         first, cfg);
    *any_ill = *any_ill || ev.ill;
    const double value = clean ? snr_db(*clean, ev.denoised,
                                        cfg.snr_convention)
                               : ev.residual;
    trial.surface.push_back({a, b, value});
    rank.offer(value, a, b, static_cast<int>(i));
  }
  trial.best_a = rank.a;
  trial.best_b = rank.b;
  trial.second_stage_snr_db = clean ? rank.value : nan;
  return trial;
}

double measured_norm_target(double target_snr_db, SnrConvention convention,
                            double ref_norm) {
  return ref_norm * std::pow(10.0, -target_snr_db / db_factor(convention));
}

}  // namespace

void validate_config(const ExperimentConfig& cfg, int n, int t) {
  if (n < 1 || t < 1)
    throw InvalidParameter("config: empty signal dimensions");
  if (cfg.group_length < 1 || t % cfg.group_length != 0)
    throw InvalidParameter("config: group length must divide T");
  if (cfg.p < 1 || cfg.p > cfg.group_length)
    throw InvalidParameter("config: need 1 <= P <= group length");
  if (cfg.q < 1 || cfg.q > n)
    throw InvalidParameter("config: need 1 <= Q <= N");
  if (cfg.orders_grid.empty())
    throw InvalidParameter("config: orders grid is empty");
  for (const auto& [a, b] : cfg.orders_grid)
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
      throw InvalidParameter("config: orders must lie in [0,1]");
  if (cfg.trials < 1) throw InvalidParameter("config: trials must be >= 1");
  if (!std::isfinite(cfg.input_snr_db))
    throw InvalidParameter("config: input SNR must be finite");
  if (!(cfg.tikhonov.gamma >= 0.0))
    throw InvalidParameter("config: gamma must be >= 0");
  if (cfg.median.iterations < 1)
    throw InvalidParameter("config: median iterations must be >= 1");
  if (cfg.ridge >= 0.0 && !std::isfinite(cfg.ridge))
    throw InvalidParameter("config: ridge must be finite");
}

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& x, double target_snr_db,
                          std::uint64_t seed, SnrConvention convention) {
  if (!std::isfinite(target_snr_db))
    throw InvalidParameter("add_noise: target SNR must be finite");
  const double x_norm = x.norm();
  if (x_norm == 0.0)
    throw InvalidInput("add_noise: zero signal has no SNR");

  Rng rng(seed);
  Eigen::MatrixXd noise(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < noise.cols(); ++j)
    for (Eigen::Index i = 0; i < noise.rows(); ++i)
      noise(i, j) = rng.gaussian();
  const double raw_norm = noise.norm();
  if (raw_norm == 0.0) throw NumericError("add_noise: degenerate noise draw");

  noise *= measured_norm_target(target_snr_db, convention, x_norm) / raw_norm;
  return x + noise;
}

double snr_db(const Eigen::MatrixXd& x_ref, const Eigen::MatrixXd& x_est,
              SnrConvention convention) {
  if (x_ref.rows() != x_est.rows() || x_ref.cols() != x_est.cols())
    throw InvalidParameter("snr_db: shape mismatch");
  const double ref_norm = x_ref.norm();
  if (ref_norm == 0.0) throw InvalidInput("snr_db: zero reference");
  const double err_norm = (x_ref - x_est).norm();
  if (err_norm == 0.0) return kSnrCapDb;
  return std::min(db_factor(convention) * std::log10(ref_norm / err_norm),
                  kSnrCapDb);
}

std::vector<Eigen::MatrixXd> segment(const Eigen::MatrixXd& x, int m) {
  const int t = static_cast<int>(x.cols());
  if (m < 1 || t % m != 0)
    throw InvalidParameter("segment: group length must divide T");
  std::vector<Eigen::MatrixXd> groups;
  groups.reserve(t / m);
  for (int s = 0; s < t / m; ++s) groups.push_back(x.middleCols(s * m, m));
  return groups;
}

TwoStageResult two_stage_denoise(const Eigen::MatrixXd& y, const Graph& g,
                                 double a, double b,
                                 const ExperimentConfig& cfg) {
  ExperimentConfig single = cfg;
  single.orders_grid = {{a, b}};
  validate_config(single, static_cast<int>(y.rows()),
                  static_cast<int>(y.cols()));
  if (y.rows() != g.n_vertices)
    throw InvalidParameter("two_stage_denoise: signal rows != vertices");
  if (!y.allFinite()) throw InvalidInput("two_stage_denoise: non-finite input");

  const PipelineContext ctx =
      make_context(g, static_cast<int>(y.cols()), cfg.group_length);
  const OrderPack tp = make_order_pack(ctx.ctx_t, a, cfg.p);
  const OrderPack gp = make_order_pack(ctx.ctx_g, b, cfg.q);

  TwoStageResult out;
  out.first_stage =
      apply_first_stage(y, g, ctx, cfg, cfg.tikhonov.gamma,
                        &out.max_imag_residue);
  OrderEval ev = evaluate_orders(ctx, tp, gp, y, out.first_stage, cfg);
  out.denoised = std::move(ev.denoised);
  out.coefficients = std::move(ev.coefficients);
  out.residual_norm = ev.residual;
  out.ill_conditioned = ev.ill;
  return out;
}

DenoiseReport grid_search(const Eigen::MatrixXd& y, const Graph& g,
                          const ExperimentConfig& cfg,
                          const Eigen::MatrixXd* x_clean) {
  validate_config(cfg, static_cast<int>(y.rows()),
                  static_cast<int>(y.cols()));
  if (y.rows() != g.n_vertices)
    throw InvalidParameter("grid_search: signal rows != vertices");
  if (!y.allFinite()) throw InvalidInput("grid_search: non-finite input");
  if (x_clean && (x_clean->rows() != y.rows() || x_clean->cols() != y.cols()))
    throw InvalidParameter("grid_search: clean/noisy shape mismatch");
  if ((cfg.mode == RunMode::Experiment) != (x_clean != nullptr))
    throw InvalidParameter(
        "grid_search: experiment mode needs the clean signal, blind mode "
        "must not have one");

  const PipelineContext ctx =
      make_context(g, static_cast<int>(y.cols()), cfg.group_length);
  const auto tpacks = build_packs(ctx.ctx_t, cfg.orders_grid, true, cfg.p);
  const auto gpacks = build_packs(ctx.ctx_g, cfg.orders_grid, false, cfg.q);

  DenoiseReport report;
  report.mode = cfg.mode;
  report.snr_convention = cfg.snr_convention;
  report.gamma = cfg.first_stage == FirstStage::Tikhonov
                     ? cfg.tikhonov.gamma
                     : std::numeric_limits<double>::quiet_NaN();

  const double gamma = cfg.tikhonov.gamma;
  TrialBreakdown trial =
      evaluate_trial(ctx, g, tpacks, gpacks, y, x_clean, cfg, gamma,
                     &report.any_ill_conditioned, &report.max_imag_residue);
  report.input_snr_db = trial.input_snr_db;
  report.first_stage_snr_db = trial.first_stage_snr_db;
  report.second_stage_snr_db = trial.second_stage_snr_db;
  report.best_a = trial.best_a;
  report.best_b = trial.best_b;
  report.surface = trial.surface;
  report.trials.push_back(std::move(trial));
  return report;
}

DenoiseReport run_experiment(const Eigen::MatrixXd& x_clean, const Graph& g,
                             const ExperimentConfig& cfg) {
  validate_config(cfg, static_cast<int>(x_clean.rows()),
                  static_cast<int>(x_clean.cols()));
  if (cfg.mode != RunMode::Experiment)
    throw InvalidParameter("run_experiment: config must be in experiment mode");
  if (x_clean.rows() != g.n_vertices)
    throw InvalidParameter("run_experiment: signal rows != vertices");
  if (!x_clean.allFinite())
    throw InvalidInput("run_experiment: non-finite input");

  const PipelineContext ctx = make_context(
      g, static_cast<int>(x_clean.cols()), cfg.group_length);
  const auto tpacks = build_packs(ctx.ctx_t, cfg.orders_grid, true, cfg.p);
  const auto gpacks = build_packs(ctx.ctx_g, cfg.orders_grid, false, cfg.q);

  DenoiseReport report;
  report.mode = RunMode::Experiment;
  report.snr_convention = cfg.snr_convention;

  // First-stage weight: either swept on a held-out draw or taken verbatim.
  double gamma = cfg.tikhonov.gamma;
  if (cfg.first_stage == FirstStage::Tikhonov && cfg.sweep_gamma) {
    const Eigen::MatrixXd held_out = add_noise(
        x_clean, cfg.input_snr_db, derive_seed(cfg.seed, 0),
        cfg.snr_convention);
    double best_snr = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) {
      const double candidate = std::pow(10.0, -3.0 + 6.0 * i / 9.0);
      const Eigen::MatrixXd filtered =
          apply_first_stage(held_out, g, ctx, cfg, candidate, nullptr);
      const double snr = snr_db(x_clean, filtered, cfg.snr_convention);
      if (snr > best_snr) {
        best_snr = snr;
        gamma = candidate;
      }
    }
  }
  report.gamma = cfg.first_stage == FirstStage::Tikhonov
                     ? gamma
                     : std::numeric_limits<double>::quiet_NaN();

  std::vector<double> mean_surface(cfg.orders_grid.size(), 0.0);
  double mean_input = 0.0, mean_first = 0.0;
  for (int trial_idx = 0; trial_idx < cfg.trials; ++trial_idx) {
    const Eigen::MatrixXd y =
        add_noise(x_clean, cfg.input_snr_db,
                  derive_seed(cfg.seed, 1 + trial_idx), cfg.snr_convention);
    TrialBreakdown trial =
        evaluate_trial(ctx, g, tpacks, gpacks, y, &x_clean, cfg, gamma,
                       &report.any_ill_conditioned, &report.max_imag_residue);
    mean_input += trial.input_snr_db;
    mean_first += trial.first_stage_snr_db;
    for (std::size_t i = 0; i < mean_surface.size(); ++i)
      mean_surface[i] += trial.surface[i].value;
    report.trials.push_back(std::move(trial));
  }

  const double inv = 1.0 / cfg.trials;
  report.input_snr_db = mean_input * inv;
  report.first_stage_snr_db = mean_first * inv;
  report.surface.reserve(cfg.orders_grid.size());
  Ranker rank;
  rank.maximize = true;
  for (std::size_t i = 0; i < cfg.orders_grid.size(); ++i) {
    const auto [a, b] = cfg.orders_grid[i];
    const double value = mean_surface[i] * inv;
    report.surface.push_back({a, b, value});
    rank.offer(value, a, b, static_cast<int>(i));
  }
  report.best_a = rank.a;
  report.best_b = rank.b;
  report.second_stage_snr_db = rank.value;
  return report;
}

Eigen::MatrixXd make_smooth_signal(const SpectralDecomposition& graph_decomp,
                                   const SpectralDecomposition& temporal_decomp,
                                   int smoothness, std::uint64_t seed) {
  const Eigen::Index n = graph_decomp.basis.rows();
  const Eigen::Index t = temporal_decomp.basis.rows();
  if (smoothness < 1 || smoothness > n)
    throw InvalidParameter("make_smooth_signal: need 1 <= smoothness <= N");

  Rng rng(seed);
  Eigen::MatrixXcd spectrum = Eigen::MatrixXcd::Zero(n, t);
  for (Eigen::Index i = 0; i < smoothness; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      const std::complex<double> alpha(rng.gaussian(), rng.gaussian());
      spectrum(i, k) =
          alpha / (1.0 + graph_decomp.eigenvalues[i].real() +
                   std::abs(temporal_decomp.eigenvalues[k]));
    }
  }
  Eigen::MatrixXd x =
      (graph_decomp.basis * spectrum * temporal_decomp.basis.transpose())
          .real();
  const double norm = x.norm();
  if (norm == 0.0)
    throw NumericError("make_smooth_signal: degenerate draw");
  x *= std::sqrt(static_cast<double>(n * t)) / norm;
  return x;
}

}  // namespace tvfrft
