#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tacifa/io.hpp"
#include "tacifa/model.hpp"
#include "tacifa/postprocess.hpp"
#include "tacifa/sampler.hpp"
#include "tacifa/simgen.hpp"

namespace tacifa {

/// Everything a run needs, addressable through flat `key = value` text (see
/// run_config_keys for the full key list). Seeds: `seed` drives the sampler
/// (chain k of a multi-chain run uses seed + k - 1), `sim_seed` the data
/// generator, `heldout_seed` the held-out column split, and heldout_seed + 1
/// the posterior-predictive noise stream.
struct RunConfig {
  HyperParams hyper;
  McmcConfig mcmc;
  SimSpec sim;
  std::string x_csv, y_csv, out_dir;
  double heldout_fraction = 0.10;  // share of time columns held out per series
  std::uint64_t heldout_seed = 1234;
  int eval_grid_size = 200;  // evaluation grid for warp/similarity summaries
  int chains = 1;            // chains > 1 write into chain_<k>/ subdirectories
  bool save_chain = false;   // also write every recorded state to chain.csv
};

/// The documented configuration keys, in manifest order.
const std::vector<std::string>& run_config_keys();

/// Applies one key/value assignment; throws on an unknown key or an
/// unparseable value, naming the key.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Defaults, then the config-file entries, then the overrides (flags), each
/// later source winning. When the ellipse design is selected and the keys
/// were never given explicitly, sim_p defaults to 24 and sim_noise_sd to 0.
RunConfig build_config(
    const std::vector<ConfigEntry>& file_entries,
    const std::vector<std::pair<std::string, std::string>>& overrides);

/// The full effective configuration as `key = value` lines; written to
/// manifest.txt in out_dir and loadable again as a config file.
std::string manifest_text(const RunConfig& cfg);

/// Generates the configured synthetic design and writes x.csv, y.csv and
/// truth_warp.csv (plus manifest.txt and README.md) into out_dir.
void cmd_simulate(const RunConfig& cfg);

/// Loads x_csv/y_csv, holds out heldout_fraction of the time columns per
/// series, runs the sampler on the rest, and writes the posterior summaries
/// (warp_summary.csv, sp_*.csv, syn.csv, syn_samples.csv, diagnostics.csv,
/// manifest.txt, README.md, optionally chain.csv) into out_dir.
void cmd_fit(const RunConfig& cfg);

/// cmd_fit plus the held-out evaluation files heldout_predictions.csv and
/// metrics.csv (mse_x, mse_y, coverage_x, coverage_y).
void cmd_predict(const RunConfig& cfg);

/// Fits on the full data (nothing held out) and reports the similarity
/// score: syn.csv, syn_samples.csv, diagnostics.csv, manifest.txt, README.md.
void cmd_similarity(const RunConfig& cfg);

}  // namespace tacifa
