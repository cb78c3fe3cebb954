#include <cstdlib>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tacifa/pipeline.hpp"

namespace {

const char* key_help(const std::string& key) {
  static const std::map<std::string, const char*> help = {
      {"x_csv", "first series CSV (header: feature,<times...>)"},
      {"y_csv", "second series CSV, same feature names and order"},
      {"out_dir", "directory the command writes into"},
      {"nu1", "local shrinkage gamma shape"},
      {"a1", "global shrinkage gamma shape, first column"},
      {"a2", "global shrinkage gamma shape, later columns"},
      {"sigma_prior_shape", "noise precision gamma shape"},
      {"sigma_prior_rate", "noise precision gamma rate"},
      {"omega", "warp coefficient prior scale"},
      {"K", "shared factor basis size"},
      {"K1", "series-1 individual basis size"},
      {"K2", "series-2 individual basis size"},
      {"J", "warp basis size"},
      {"degree", "factor basis spline degree"},
      {"warp_degree", "warp basis spline degree"},
      {"r_init", "initial shared rank"},
      {"r1_init", "initial series-1 individual rank"},
      {"r2_init", "initial series-2 individual rank"},
      {"n_iter", "total sampler iterations"},
      {"n_burnin", "burn-in iterations to discard"},
      {"thin", "keep every thin-th post-burn-in state"},
      {"leapfrog_steps", "leapfrog steps per trajectory"},
      {"step_size_lambda", "initial loading update step size"},
      {"step_size_kappa", "initial warp update step size"},
      {"adapt_interval", "iterations between step-size adaptations"},
      {"accept_low", "step-size adaptation band, lower acceptance bound"},
      {"accept_high", "step-size adaptation band, upper acceptance bound"},
      {"prune_threshold", "factor column prune threshold"},
      {"seed", "sampler seed (TACIFA_SEED overrides)"},
      {"chains", "independent chains, chain k seeded seed + k - 1"},
      {"save_chain", "write chain.csv with all kept states (0/1)"},
      {"heldout_fraction", "fraction of time columns held out per series"},
      {"heldout_seed", "seed for the held-out split"},
      {"eval_grid_size", "points in the [0,1] evaluation grid"},
      {"sim_case", "simulated design: sinusoid or ellipse"},
      {"sim_t", "simulated time points per series"},
      {"sim_p", "simulated features per series"},
      {"sim_r_true", "true shared rank (sinusoid design)"},
      {"sim_noise_sd", "simulated observation noise sd"},
      {"zeta1_family", "series-1 individual curves: sin, linear, square, cube"},
      {"sim_seed", "simulation seed"},
  };
  const auto it = help.find(key);
  return it == help.end() ? "" : it->second;
}

struct SubState {
  std::string config_path;
  std::vector<std::string> values;
  std::vector<CLI::Option*> options;
};

void add_options(CLI::App* sub, SubState& st) {
  const std::vector<std::string>& keys = tacifa::run_config_keys();
  st.values.resize(keys.size());
  st.options.resize(keys.size());
  sub->add_option("--config", st.config_path,
                  "key = value file applied before any flags");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    st.options[i] = sub->add_option("--" + keys[i], st.values[i], key_help(keys[i]));
  }
}

tacifa::RunConfig config_from(const SubState& st) {
  std::vector<tacifa::ConfigEntry> entries;
  if (!st.config_path.empty()) {
    entries = tacifa::read_config_lines(st.config_path);
  }
  std::vector<std::pair<std::string, std::string>> overrides;
  const std::vector<std::string>& keys = tacifa::run_config_keys();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (st.options[i]->count() > 0) overrides.emplace_back(keys[i], st.values[i]);
  }
  tacifa::RunConfig cfg = tacifa::build_config(entries, overrides);
  if (const char* env = std::getenv("TACIFA_SEED")) {
    try {
      tacifa::apply_key(cfg, "seed", env);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("TACIFA_SEED: ") + e.what());
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-aligned common and individual factor analysis"};
  app.require_subcommand(1);

  SubState s_sim, s_fit, s_pred, s_syn;
  CLI::App* sim =
      app.add_subcommand("simulate", "generate a synthetic series pair");
  CLI::App* fit = app.add_subcommand(
      "fit", "run the sampler and write posterior summaries");
  CLI::App* pred = app.add_subcommand(
      "predict", "fit, then summarize predictions at held-out columns");
  CLI::App* syn = app.add_subcommand(
      "similarity", "fit on the full panels and write the similarity score");
  add_options(sim, s_sim);
  add_options(fit, s_fit);
  add_options(pred, s_pred);
  add_options(syn, s_syn);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      tacifa::cmd_simulate(config_from(s_sim));
    } else if (fit->parsed()) {
      tacifa::cmd_fit(config_from(s_fit));
    } else if (pred->parsed()) {
      tacifa::cmd_predict(config_from(s_pred));
    } else {
      tacifa::cmd_similarity(config_from(s_syn));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
