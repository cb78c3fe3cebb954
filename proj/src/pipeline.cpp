#include "tacifa/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tacifa {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- parsing

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  throw std::invalid_argument("key '" + key + "': " + what);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const std::exception& e) {
    key_error(key, e.what());
  }
}

long long to_ll(const std::string& key, const std::string& value) {
  try {
    return parse_int(value);
  } catch (const std::exception& e) {
    key_error(key, e.what());
  }
}

int to_int(const std::string& key, const std::string& value, long long lo,
           long long hi = std::numeric_limits<int>::max()) {
  const long long v = to_ll(key, value);
  if (v < lo || v > hi) {
    key_error(key, "value " + value + " is outside [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

double to_positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0)) key_error(key, "must be positive, got " + value);
  return v;
}

double to_nonnegative(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v >= 0.0)) key_error(key, "must be nonnegative, got " + value);
  return v;
}

double to_open_unit(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0 && v < 1.0)) key_error(key, "must be inside (0, 1), got " + value);
  return v;
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
  const long long v = to_ll(key, value);
  if (v < 0) key_error(key, "must be nonnegative, got " + value);
  return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  key_error(key, "expected 0/1/true/false, got '" + value + "'");
}

SimCase to_sim_case(const std::string& key, const std::string& value) {
  if (value == "sinusoid") return SimCase::sinusoid;
  if (value == "ellipse") return SimCase::ellipse;
  key_error(key, "expected sinusoid or ellipse, got '" + value + "'");
}

Zeta1Family to_family(const std::string& key, const std::string& value) {
  if (value == "sin") return Zeta1Family::sin;
  if (value == "linear") return Zeta1Family::linear;
  if (value == "square") return Zeta1Family::square;
  if (value == "cube") return Zeta1Family::cube;
  key_error(key, "expected sin, linear, square or cube, got '" + value + "'");
}

const char* sim_case_name(SimCase c) {
  return c == SimCase::sinusoid ? "sinusoid" : "ellipse";
}

const char* family_name(Zeta1Family f) {
  switch (f) {
    case Zeta1Family::sin: return "sin";
    case Zeta1Family::linear: return "linear";
    case Zeta1Family::square: return "square";
    case Zeta1Family::cube: return "cube";
  }
  return "sin";
}

// --------------------------------------------------------------- emission

std::vector<double> make_eval_grid(int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = static_cast<double>(i) / (n - 1);
  return g;
}

std::vector<std::string> default_names(int p) {
  std::vector<std::string> names(p);
  for (int i = 0; i < p; ++i) names[i] = "f" + std::to_string(i + 1);
  return names;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << content;
  if (!out.flush()) {
    throw std::runtime_error("writing '" + path.string() + "' failed");
  }
}

void write_warp_csv(const fs::path& path, const Vector& grid, const Vector& mean,
                    const Vector& lo, const Vector& hi) {
  std::ostringstream out;
  out << "t,mean,lo,hi\n";
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    out << format_double(grid[j]) << ',' << format_double(mean[j]) << ','
        << format_double(lo[j]) << ',' << format_double(hi[j]) << '\n';
  }
  write_text(path, out.str());
}

void write_sp_csv(const fs::path& path, const std::vector<std::string>& names,
                  const Matrix& sp) {
  std::ostringstream out;
  out << "feature";
  for (Eigen::Index k = 0; k < sp.cols(); ++k) out << ",factor_" << (k + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < sp.rows(); ++i) {
    out << names[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < sp.cols(); ++k) out << ',' << format_double(sp(i, k));
    out << '\n';
  }
  write_text(path, out.str());
}

void write_syn_csv(const fs::path& path, const SynResult& syn) {
  std::ostringstream out;
  out << "stat,value\n";
  out << "mean," << format_double(syn.mean) << '\n';
  out << "lo," << format_double(syn.lo) << '\n';
  out << "hi," << format_double(syn.hi) << '\n';
  out << "of_mean_fractions," << format_double(syn.of_mean_fractions) << '\n';
  write_text(path, out.str());
}

void write_syn_samples_csv(const fs::path& path, const SynResult& syn) {
  std::ostringstream out;
  out << "sample,syn\n";
  for (std::size_t i = 0; i < syn.per_sample.size(); ++i) {
    out << (i + 1) << ',' << format_double(syn.per_sample[i]) << '\n';
  }
  write_text(path, out.str());
}

void write_diagnostics_csv(const fs::path& path, const ChainDiagnostics& d) {
  std::ostringstream out;
  out << "iter,accept_lambda,accept_kappa,step_lambda,step_kappa,"
         "rank_shared,rank_ind1,rank_ind2,log_lik\n";
  for (std::size_t i = 0; i < d.accept_lambda.size(); ++i) {
    out << (i + 1) << ',' << format_double(d.accept_lambda[i]) << ','
        << format_double(d.accept_kappa[i]) << ','
        << format_double(d.step_lambda[i]) << ','
        << format_double(d.step_kappa[i]) << ',' << d.rank_shared[i] << ','
        << d.rank_ind1[i] << ',' << d.rank_ind2[i] << ','
        << format_double(d.log_lik[i]) << '\n';
  }
  write_text(path, out.str());
}

void write_predictions_csv(const fs::path& path, const SeriesPair& full,
                           const std::vector<std::string>& names,
                           const PredictiveSummary& pred) {
  std::ostringstream out;
  out << "series,feature,time,truth,mean,lo,hi\n";
  for (std::size_t j = 0; j < pred.index.size(); ++j) {
    const HeldoutIndex& h = pred.index[j];
    const double time =
        h.series == 1 ? full.grid_x[h.col] : full.grid_y[h.col];
    for (Eigen::Index i = 0; i < pred.truth.rows(); ++i) {
      out << h.series << ',' << names[static_cast<std::size_t>(i)] << ','
          << format_double(time) << ',' << format_double(pred.truth(i, j))
          << ',' << format_double(pred.mean(i, j)) << ','
          << format_double(pred.lo(i, j)) << ','
          << format_double(pred.hi(i, j)) << '\n';
    }
  }
  write_text(path, out.str());
}

void write_metrics_csv(const fs::path& path, const PredictiveSummary& pred) {
  std::ostringstream out;
  out << "mse_x,mse_y,coverage_x,coverage_y\n";
  out << format_double(pred.mse1) << ',' << format_double(pred.mse2) << ','
      << format_double(pred.coverage1) << ',' << format_double(pred.coverage2)
      << '\n';
  write_text(path, out.str());
}

void append_block(std::ostringstream& out, int sample, const char* block,
                  const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << sample << ',' << block << ',' << i << ',' << j << ','
          << format_double(m(i, j)) << '\n';
    }
  }
}

void append_block(std::ostringstream& out, int sample, const char* block,
                  const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << sample << ',' << block << ',' << i << ",0,"
        << format_double(v[i]) << '\n';
  }
}

void write_chain_csv(const fs::path& path, const Chain& chain) {
  std::ostringstream out;
  out << "sample,block,row,col,value\n";
  for (std::size_t s = 0; s < chain.samples.size(); ++s) {
    const ModelState& st = chain.samples[s];
    const int k = static_cast<int>(s) + 1;
    append_block(out, k, "lambda", st.lambda);
    append_block(out, k, "gamma1", st.gamma1);
    append_block(out, k, "gamma2", st.gamma2);
    append_block(out, k, "xi1", st.xi1);
    append_block(out, k, "xi2", st.xi2);
    append_block(out, k, "beta_shared", st.beta_shared);
    append_block(out, k, "beta_ind1", st.beta_ind1);
    append_block(out, k, "beta_ind2", st.beta_ind2);
    append_block(out, k, "sigma1_sq", st.sigma1_sq);
    append_block(out, k, "sigma2_sq", st.sigma2_sq);
    append_block(out, k, "kappa", st.warp.kappa);
  }
  write_text(path, out.str());
}

// Column documentation for everything any command can emit; each command's
// README lists the files it actually wrote.
std::string readme_text(const std::vector<std::string>& files) {
  static const std::vector<std::pair<std::string, std::string>> docs = {
      {"manifest.txt",
       "the full effective configuration as `key = value` lines; pass it back "
       "via --config to reproduce the run"},
      {"x.csv",
       "first series panel: header `feature,<t1>,<t2>,...`, one row per "
       "feature with its values"},
      {"y.csv", "second series panel, same layout as x.csv"},
      {"truth_warp.csv",
       "columns t,m0: the generating time transformation on the simulation "
       "grid"},
      {"warp_summary.csv",
       "columns t,mean,lo,hi: pointwise posterior mean and equal-tailed 95% "
       "band of the estimated time transformation on the evaluation grid"},
      {"sp_shared1.csv",
       "columns feature,factor_1..factor_r: sign-stability scores in [0,1] "
       "for series 1's shared-space loading product after chain alignment"},
      {"sp_shared2.csv", "same layout for series 2's shared-space loading"},
      {"sp_ind1.csv",
       "same layout for series 1's individual-specific loading product"},
      {"sp_ind2.csv",
       "same layout for series 2's individual-specific loading product"},
      {"syn.csv",
       "columns stat,value: rows mean, lo, hi (posterior mean and 95% "
       "interval of the per-sample similarity score) and of_mean_fractions "
       "(the score recomputed from posterior-mean variance fractions)"},
      {"syn_samples.csv", "columns sample,syn: per-sample similarity scores"},
      {"diagnostics.csv",
       "columns iter,accept_lambda,accept_kappa,step_lambda,step_kappa,"
       "rank_shared,rank_ind1,rank_ind2,log_lik: one row per sampler "
       "iteration"},
      {"heldout_predictions.csv",
       "columns series,feature,time,truth,mean,lo,hi: posterior predictive "
       "summaries at each held-out column (time on the rescaled [0,1] axis)"},
      {"metrics.csv",
       "columns mse_x,mse_y,coverage_x,coverage_y: held-out mean squared "
       "error of the predictive mean and empirical coverage of the 95% "
       "bands, per series"},
      {"chain.csv",
       "columns sample,block,row,col,value: every recorded post-burn-in "
       "state, flattened (vectors use col = 0)"},
      {"chain_<k>/",
       "with chains > 1, each chain writes its own copies of the summary "
       "files into chain_<k>/, run with sampler seed `seed + k - 1`"},
  };
  std::ostringstream out;
  out << "# Run outputs\n\n"
      << "All .csv files carry a header row, use UTF-8 with '.' as the "
         "decimal\nseparator and no digit grouping, and print numbers in the "
         "shortest form\nthat parses back to the identical value.\n\n";
  for (const auto& [name, doc] : docs) {
    if (std::find(files.begin(), files.end(), name) == files.end()) continue;
    out << "- `" << name << "` - " << doc << "\n";
  }
  return out.str();
}

// ----------------------------------------------------------- orchestration

void check_run_dirs(const RunConfig& cfg, bool needs_data) {
  if (cfg.out_dir.empty()) {
    throw std::invalid_argument("out_dir is required");
  }
  if (needs_data && (cfg.x_csv.empty() || cfg.y_csv.empty())) {
    throw std::invalid_argument("x_csv and y_csv are required for this command");
  }
  if (!(cfg.heldout_fraction >= 0.0 && cfg.heldout_fraction < 0.5)) {
    throw std::invalid_argument("heldout_fraction must lie in [0, 0.5)");
  }
  if (cfg.eval_grid_size < 2) {
    throw std::invalid_argument("eval_grid_size must be at least 2");
  }
  if (cfg.chains < 1) {
    throw std::invalid_argument("chains must be at least 1");
  }
  cfg.hyper.validate();
  cfg.mcmc.validate();
}

enum class Emit { fit, predict, similarity };

void run_fit_command(const RunConfig& cfg, Emit emit) {
  check_run_dirs(cfg, /*needs_data=*/true);
  const SeriesPair full = load_series(cfg.x_csv, cfg.y_csv);

  std::vector<HeldoutIndex> heldout;
  if (emit != Emit::similarity && cfg.heldout_fraction > 0.0) {
    heldout = choose_heldout(full.t1(), full.t2(), cfg.heldout_fraction,
                             cfg.heldout_seed);
  }
  const SeriesPair train = heldout.empty() ? full : drop_columns(full, heldout);
  const std::vector<double> grid = make_eval_grid(cfg.eval_grid_size);
  const std::vector<std::string> names =
      full.feature_names.empty() ? default_names(full.p()) : full.feature_names;

  fs::create_directories(cfg.out_dir);
  std::vector<std::string> files = {"manifest.txt"};
  if (emit != Emit::similarity) {
    files.insert(files.end(), {"warp_summary.csv", "sp_shared1.csv",
                               "sp_shared2.csv", "sp_ind1.csv", "sp_ind2.csv"});
  }
  files.insert(files.end(), {"syn.csv", "syn_samples.csv", "diagnostics.csv"});
  if (emit == Emit::predict) {
    files.insert(files.end(), {"heldout_predictions.csv", "metrics.csv"});
  }
  if (cfg.save_chain) files.push_back("chain.csv");
  if (cfg.chains > 1) files.push_back("chain_<k>/");
  write_text(fs::path(cfg.out_dir) / "manifest.txt", manifest_text(cfg));
  write_text(fs::path(cfg.out_dir) / "README.md", readme_text(files));

  for (int k = 1; k <= cfg.chains; ++k) {
    const fs::path dir = cfg.chains == 1
                             ? fs::path(cfg.out_dir)
                             : fs::path(cfg.out_dir) / ("chain_" + std::to_string(k));
    fs::create_directories(dir);

    McmcConfig mc = cfg.mcmc;
    mc.seed = cfg.mcmc.seed + static_cast<std::uint64_t>(k - 1);
    const Chain chain = run_chain(train, cfg.hyper, mc);

    write_diagnostics_csv(dir / "diagnostics.csv", chain.diagnostics);
    if (cfg.save_chain) write_chain_csv(dir / "chain.csv", chain);

    if (emit == Emit::similarity) {
      const SynResult syn = syn_similarity(chain, grid);
      write_syn_csv(dir / "syn.csv", syn);
      write_syn_samples_csv(dir / "syn_samples.csv", syn);
      continue;
    }

    Rng pred_rng(cfg.heldout_seed + 1);
    const PosteriorSummary summary =
        summarize_chain(chain, full, heldout, grid, pred_rng);
    write_warp_csv(dir / "warp_summary.csv", summary.warp_grid,
                   summary.warp_mean, summary.warp_lo, summary.warp_hi);
    write_sp_csv(dir / "sp_shared1.csv", names, summary.sp_shared1);
    write_sp_csv(dir / "sp_shared2.csv", names, summary.sp_shared2);
    write_sp_csv(dir / "sp_ind1.csv", names, summary.sp_ind1);
    write_sp_csv(dir / "sp_ind2.csv", names, summary.sp_ind2);
    write_syn_csv(dir / "syn.csv", summary.syn);
    write_syn_samples_csv(dir / "syn_samples.csv", summary.syn);
    if (emit == Emit::predict) {
      write_predictions_csv(dir / "heldout_predictions.csv", full, names,
                            summary.pred);
      write_metrics_csv(dir / "metrics.csv", summary.pred);
    }
  }
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = {
      // data and run layout
      "x_csv", "y_csv", "out_dir",
      // model hyperparameters
      "nu1", "a1", "a2", "sigma_prior_shape", "sigma_prior_rate", "omega", "K",
      "K1", "K2", "J", "degree", "warp_degree", "r_init", "r1_init", "r2_init",
      // sampler
      "n_iter", "n_burnin", "thin", "leapfrog_steps", "step_size_lambda",
      "step_size_kappa", "adapt_interval", "accept_low", "accept_high",
      "prune_threshold", "seed", "chains", "save_chain",
      // evaluation
      "heldout_fraction", "heldout_seed", "eval_grid_size",
      // simulation
      "sim_case", "sim_t", "sim_p", "sim_r_true", "sim_noise_sd",
      "zeta1_family", "sim_seed"};
  return keys;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  HyperParams& h = cfg.hyper;
  McmcConfig& m = cfg.mcmc;
  SimSpec& s = cfg.sim;
  if (key == "x_csv") cfg.x_csv = value;
  else if (key == "y_csv") cfg.y_csv = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "nu1") h.nu1 = to_positive(key, value);
  else if (key == "a1") h.a1 = to_positive(key, value);
  else if (key == "a2") h.a2 = to_positive(key, value);
  else if (key == "sigma_prior_shape") h.sigma_prior_shape = to_positive(key, value);
  else if (key == "sigma_prior_rate") h.sigma_prior_rate = to_positive(key, value);
  else if (key == "omega") h.omega = to_positive(key, value);
  else if (key == "K") h.K = to_int(key, value, 2);
  else if (key == "K1") h.K1 = to_int(key, value, 2);
  else if (key == "K2") h.K2 = to_int(key, value, 2);
  else if (key == "J") h.J = to_int(key, value, 2);
  else if (key == "degree") h.degree = to_int(key, value, 1);
  else if (key == "warp_degree") h.warp_degree = to_int(key, value, 1);
  else if (key == "r_init") h.r_init = to_int(key, value, 0);
  else if (key == "r1_init") h.r1_init = to_int(key, value, 0);
  else if (key == "r2_init") h.r2_init = to_int(key, value, 0);
  else if (key == "n_iter") m.n_iter = to_int(key, value, 1);
  else if (key == "n_burnin") m.n_burnin = to_int(key, value, 0);
  else if (key == "thin") m.thin = to_int(key, value, 1);
  else if (key == "leapfrog_steps") m.leapfrog_steps = to_int(key, value, 1);
  else if (key == "step_size_lambda") m.step_size_lambda = to_positive(key, value);
  else if (key == "step_size_kappa") m.step_size_kappa = to_positive(key, value);
  else if (key == "adapt_interval") m.adapt_interval = to_int(key, value, 1);
  else if (key == "accept_low") m.accept_low = to_open_unit(key, value);
  else if (key == "accept_high") m.accept_high = to_open_unit(key, value);
  else if (key == "prune_threshold") m.prune_threshold = to_nonnegative(key, value);
  else if (key == "seed") m.seed = to_seed(key, value);
  else if (key == "chains") cfg.chains = to_int(key, value, 1);
  else if (key == "save_chain") cfg.save_chain = to_bool(key, value);
  else if (key == "heldout_fraction") {
    const double v = to_double(key, value);
    if (!(v >= 0.0 && v < 0.5)) key_error(key, "must lie in [0, 0.5), got " + value);
    cfg.heldout_fraction = v;
  } else if (key == "heldout_seed") cfg.heldout_seed = to_seed(key, value);
  else if (key == "eval_grid_size") cfg.eval_grid_size = to_int(key, value, 2);
  else if (key == "sim_case") s.kind = to_sim_case(key, value);
  else if (key == "sim_t") s.t = to_int(key, value, 10);
  else if (key == "sim_p") s.p = to_int(key, value, 1);
  else if (key == "sim_r_true") s.r_true = to_int(key, value, 1);
  else if (key == "sim_noise_sd") s.noise_sd = to_nonnegative(key, value);
  else if (key == "zeta1_family") s.zeta1_family = to_family(key, value);
  else if (key == "sim_seed") s.seed = to_seed(key, value);
  else throw std::invalid_argument("unknown key '" + key + "'");
}

RunConfig build_config(
    const std::vector<ConfigEntry>& file_entries,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  std::set<std::string> given;
  for (const ConfigEntry& e : file_entries) {
    try {
      apply_key(cfg, e.key, e.value);
    } catch (const std::exception& ex) {
      throw std::runtime_error("config line " + std::to_string(e.line) + ": " +
                               ex.what());
    }
    given.insert(e.key);
  }
  for (const auto& [key, value] : overrides) {
    try {
      apply_key(cfg, key, value);
    } catch (const std::exception& ex) {
      throw std::runtime_error("flag --" + key + ": " + ex.what());
    }
    given.insert(key);
  }
  if (cfg.sim.kind == SimCase::ellipse) {
    if (!given.count("sim_p")) cfg.sim.p = 24;
    if (!given.count("sim_noise_sd")) cfg.sim.noise_sd = 0.0;
  }
  return cfg;
}

std::string manifest_text(const RunConfig& cfg) {
  const HyperParams& h = cfg.hyper;
  const McmcConfig& m = cfg.mcmc;
  const SimSpec& s = cfg.sim;
  auto value_of = [&](const std::string& key) -> std::string {
    if (key == "x_csv") return cfg.x_csv;
    if (key == "y_csv") return cfg.y_csv;
    if (key == "out_dir") return cfg.out_dir;
    if (key == "nu1") return format_double(h.nu1);
    if (key == "a1") return format_double(h.a1);
    if (key == "a2") return format_double(h.a2);
    if (key == "sigma_prior_shape") return format_double(h.sigma_prior_shape);
    if (key == "sigma_prior_rate") return format_double(h.sigma_prior_rate);
    if (key == "omega") return format_double(h.omega);
    if (key == "K") return std::to_string(h.K);
    if (key == "K1") return std::to_string(h.K1);
    if (key == "K2") return std::to_string(h.K2);
    if (key == "J") return std::to_string(h.J);
    if (key == "degree") return std::to_string(h.degree);
    if (key == "warp_degree") return std::to_string(h.warp_degree);
    if (key == "r_init") return std::to_string(h.r_init);
    if (key == "r1_init") return std::to_string(h.r1_init);
    if (key == "r2_init") return std::to_string(h.r2_init);
    if (key == "n_iter") return std::to_string(m.n_iter);
    if (key == "n_burnin") return std::to_string(m.n_burnin);
    if (key == "thin") return std::to_string(m.thin);
    if (key == "leapfrog_steps") return std::to_string(m.leapfrog_steps);
    if (key == "step_size_lambda") return format_double(m.step_size_lambda);
    if (key == "step_size_kappa") return format_double(m.step_size_kappa);
    if (key == "adapt_interval") return std::to_string(m.adapt_interval);
    if (key == "accept_low") return format_double(m.accept_low);
    if (key == "accept_high") return format_double(m.accept_high);
    if (key == "prune_threshold") return format_double(m.prune_threshold);
    if (key == "seed") return std::to_string(m.seed);
    if (key == "chains") return std::to_string(cfg.chains);
    if (key == "save_chain") return cfg.save_chain ? "true" : "false";
    if (key == "heldout_fraction") return format_double(cfg.heldout_fraction);
    if (key == "heldout_seed") return std::to_string(cfg.heldout_seed);
    if (key == "eval_grid_size") return std::to_string(cfg.eval_grid_size);
    if (key == "sim_case") return sim_case_name(s.kind);
    if (key == "sim_t") return std::to_string(s.t);
    if (key == "sim_p") return std::to_string(s.p);
    if (key == "sim_r_true") return std::to_string(s.r_true);
    if (key == "sim_noise_sd") return format_double(s.noise_sd);
    if (key == "zeta1_family") return family_name(s.zeta1_family);
    if (key == "sim_seed") return std::to_string(s.seed);
    throw std::logic_error("manifest_text: unmapped key '" + key + "'");
  };
  std::ostringstream out;
  for (const std::string& key : run_config_keys()) {
    out << key << " = " << value_of(key) << '\n';
  }
  return out.str();
}

void cmd_simulate(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) {
    throw std::invalid_argument("out_dir is required");
  }
  const SimOutput sim = generate(cfg.sim);
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  const std::vector<std::string> names = default_names(sim.data.p());
  write_series_csv((dir / "x.csv").string(), sim.data.x, sim.data.grid_x, names);
  write_series_csv((dir / "y.csv").string(), sim.data.y, sim.data.grid_y, names);

  std::ostringstream warp;
  warp << "t,m0\n";
  for (std::size_t j = 0; j < sim.truth.warp.size(); ++j) {
    warp << format_double(sim.data.grid_x[j]) << ','
         << format_double(sim.truth.warp[j]) << '\n';
  }
  write_text(dir / "truth_warp.csv", warp.str());
  write_text(dir / "manifest.txt", manifest_text(cfg));
  write_text(dir / "README.md",
             readme_text({"manifest.txt", "x.csv", "y.csv", "truth_warp.csv"}));
}

void cmd_fit(const RunConfig& cfg) { run_fit_command(cfg, Emit::fit); }

void cmd_predict(const RunConfig& cfg) { run_fit_command(cfg, Emit::predict); }

void cmd_similarity(const RunConfig& cfg) {
  run_fit_command(cfg, Emit::similarity);
}

}  // namespace tacifa
