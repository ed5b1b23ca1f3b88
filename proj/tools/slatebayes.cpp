// slatebayes: generate synthetic slate data, fit the Full / Reward / Rank
// click models, sample their posteriors and run the benchmark sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "slate/data_gen.hpp"
#include "slate/experiments.hpp"
#include "slate/inference.hpp"
#include "slate/io.hpp"
#include "slate/metrics.hpp"

namespace fs = std::filesystem;
using namespace slate;

namespace {

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string format = "json";

  // generate
  std::size_t catalog = 0;
  std::size_t slate = 2;
  Count samples = 1000;
  std::string out;

  // fit / sample
  std::string model = "full";
  std::string data;
  PriorConfig prior;
  MapConfig map;
  McmcConfig mcmc;

  // eval
  std::string estimate;
  std::string truth;
  bool all_positions = false;

  // experiment
  std::string preset;
  std::size_t replications = 50;
  bool heavy = false;
  std::vector<std::uint64_t> values;
  std::string out_dir = ".";
};

std::uint64_t resolve_seed(const Options& opt) {
  if (opt.seed) return *opt.seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << seed << '\n';
  return seed;
}

void add_prior_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--theta-shape", opt.prior.theta_shape, "Gamma shape for theta")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--theta-rate", opt.prior.theta_rate, "Gamma rate for theta")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--phi-shape", opt.prior.phi_shape, "Gamma shape for phi")->check(CLI::PositiveNumber);
  cmd->add_option("--phi-rate", opt.prior.phi_rate, "Gamma rate for phi")->check(CLI::PositiveNumber);
}

void add_map_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--max-iterations", opt.map.max_iterations, "MAP iteration cap");
  cmd->add_option("--gradient-tolerance", opt.map.gradient_tolerance, "MAP gradient inf-norm tolerance");
  cmd->add_option("--initial-step", opt.map.initial_step, "First line-search trial step");
  cmd->add_option("--backtracking", opt.map.backtracking, "Line-search shrink factor");
  cmd->add_option("--armijo", opt.map.armijo, "Armijo sufficient-increase constant");
}

void add_mcmc_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--num-samples", opt.mcmc.num_samples, "Posterior samples kept");
  cmd->add_option("--burn-in", opt.mcmc.burn_in, "Adaptive burn-in iterations");
  cmd->add_option("--thin", opt.mcmc.thin, "Keep every n-th iteration");
  cmd->add_option("--target-acceptance", opt.mcmc.target_acceptance, "Burn-in acceptance target");
  cmd->add_option("--adaptation-window", opt.mcmc.adaptation_window, "Iterations per scale update");
}

Dataset load_dataset(const Options& opt) {
  const fs::path path(opt.data);
  std::optional<std::size_t> catalog;
  if (opt.catalog > 0) {
    catalog = opt.catalog;
  } else {
    auto sidecar = path;
    sidecar.replace_extension(".json");
    if (fs::exists(sidecar))
      catalog = metadata_from_json(nlohmann::json::parse(read_file(sidecar))).catalog_size;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  try {
    return read_dataset_csv(in, catalog);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void emit(const std::string& out, const std::string& contents) {
  if (out.empty() || out == "-") {
    std::cout << contents;
    return;
  }
  OutputSet files;
  files.add(out, contents);
  files.commit();
}

int cmd_generate(const Options& opt) {
  if (opt.catalog < 2) throw UsageError("--catalog must be >= 2");
  if (opt.slate < 2 || opt.slate > opt.catalog)
    throw UsageError("--slate must satisfy 2 <= slate <= catalog");
  if (opt.samples < 1) throw UsageError("--samples must be >= 1");
  if (opt.out.empty()) throw UsageError("--out is required");
  GeneratorSpec spec{opt.catalog, opt.slate, opt.samples, make_true_params(opt.catalog),
                     resolve_seed(opt)};
  const Dataset dataset = simulate(spec, opt.threads);

  std::ostringstream csv;
  write_dataset_csv(csv, dataset);
  fs::path base(opt.out);
  if (base.extension() == ".csv") base.replace_extension();
  OutputSet files;
  files.add(fs::path(base.string() + ".csv"), csv.str());
  files.add(fs::path(base.string() + ".json"), to_json(metadata_for(spec)).dump(2) + "\n");
  files.commit();
  return 0;
}

int cmd_fit(const Options& opt) {
  const auto kind = parse_model_kind(opt.model);
  const Dataset raw = load_dataset(opt);
  if (raw.empty()) throw std::runtime_error("empty dataset: " + opt.data + " has no records");
  const auto result = map_estimate(kind, to_view(raw, kind), opt.prior, opt.map);
  emit(opt.out, to_json(result).dump(2) + "\n");
  return 0;
}

int cmd_sample(const Options& opt) {
  const auto kind = parse_model_kind(opt.model);
  const Dataset raw = load_dataset(opt);
  McmcConfig mcmc = opt.mcmc;
  mcmc.seed = resolve_seed(opt);
  const auto samples = mcmc_sample(kind, to_view(raw, kind), opt.prior, mcmc, opt.map);
  if (samples.acceptance_warning)
    std::cerr << "warning: acceptance rate " << samples.acceptance_rate << " outside [0.05, 0.7]\n";
  if (opt.format == "csv") {
    std::ostringstream csv;
    write_samples_csv(csv, samples);
    emit(opt.out, csv.str());
  } else {
    emit(opt.out, to_json(samples).dump() + "\n");
  }
  return 0;
}

int cmd_eval(const Options& opt) {
  const auto estimate = params_from_json(nlohmann::json::parse(read_file(opt.estimate)));
  const auto truth = params_from_json(nlohmann::json::parse(read_file(opt.truth)));
  if (estimate.theta.size() != truth.theta.size())
    throw UsageError("estimate and truth have different catalog sizes");
  const auto slates = enumerate_slates(truth.theta.size(), opt.slate);
  nlohmann::json out{{"spec_version", kSchemaVersion},
                     {"catalog_size", truth.theta.size()},
                     {"slate_size", opt.slate},
                     {"num_slates", slates.size()}};
  out["click_rank_l1"] = l1_click_rank_error(estimate.theta, truth.theta, slates, opt.all_positions).value;
  if (estimate.phi && truth.phi) out["non_click_l1"] = l1_nonclick_error(estimate, truth, slates).value;
  emit(opt.out, out.dump(2) + "\n");
  return 0;
}

int cmd_experiment(const Options& opt) {
  SweepKind sweep;
  try {
    sweep = parse_sweep_kind(opt.preset);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  ExperimentConfig config = preset(sweep, opt.heavy);
  config.replications = opt.replications;
  config.base_seed = resolve_seed(opt);
  config.prior = opt.prior;
  config.map = opt.map;
  config.mcmc = opt.mcmc;
  config.threads = opt.threads;
  config.all_positions = opt.all_positions;
  if (!opt.values.empty()) config.values = opt.values;
  if (opt.catalog > 0) {
    if (sweep == SweepKind::Violin) config.values = {opt.catalog};
    else config.catalog_size = opt.catalog;
  }

  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);
  const std::string stem = "experiment_" + std::string(to_string(sweep));
  OutputSet files;
  if (sweep == SweepKind::Violin) {
    config.mcmc.seed = config.base_seed;
    for (auto n : config.values) {
      const auto result = run_violin(n, config.slate_size, config.samples_per_slate,
                                     config.base_seed, config.prior, config.mcmc, config.models,
                                     config.threads);
      std::ostringstream csv;
      write_violin_csv(csv, result);
      const std::string name = stem + "_" + std::to_string(n);
      files.add(dir / (name + ".csv"), csv.str());
      files.add(dir / (name + ".json"), to_json(result).dump(2) + "\n");
      for (const auto& s : result.series) {
        std::cerr << "N=" << n << ' ' << to_string(s.model) << ": mean " << mean_of(s.l1)
                  << " std " << sample_std(s.l1) << " acceptance " << s.acceptance_rate << '\n';
      }
    }
  } else {
    const auto report = run_sweep(config);
    std::ostringstream csv;
    write_report_csv(csv, report);
    files.add(dir / (stem + ".csv"), csv.str());
    files.add(dir / (stem + ".json"), to_json(report).dump(2) + "\n");
    std::cerr << csv.str();
  }
  files.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian Full / Reward / Rank slate click models"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Key-value configuration file; command-line flags take precedence");
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Random seed (printed when generated)");
    cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* generate = app.add_subcommand("generate", "Simulate a dataset (CSV + metadata JSON)");
  generate->add_option("--catalog", opt.catalog, "Catalog size N")->required();
  generate->add_option("--slate", opt.slate, "Slate size K");
  generate->add_option("--samples", opt.samples, "Impressions per slate n");
  generate->add_option("--out", opt.out, "Output prefix; writes PREFIX.csv and PREFIX.json")->required();
  add_common(generate);

  auto* fit = app.add_subcommand("fit", "MAP estimate of one model");
  fit->add_option("--model", opt.model, "full | reward | rank")
      ->check(CLI::IsMember({"full", "reward", "rank"}));
  fit->add_option("--data", opt.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--catalog", opt.catalog, "Catalog size (default: sidecar metadata or max index + 1)");
  fit->add_option("--out", opt.out, "Output JSON (default: stdout)");
  add_prior_options(fit, opt);
  add_map_options(fit, opt);

  auto* sample = app.add_subcommand("sample", "Posterior samples by adaptive random-walk Metropolis");
  sample->add_option("--model", opt.model, "full | reward | rank")
      ->check(CLI::IsMember({"full", "reward", "rank"}));
  sample->add_option("--data", opt.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  sample->add_option("--catalog", opt.catalog, "Catalog size");
  sample->add_option("--out", opt.out, "Output file (default: stdout)");
  sample->add_option("--format", opt.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  add_common(sample);
  add_prior_options(sample, opt);
  add_map_options(sample, opt);
  add_mcmc_options(sample, opt);

  auto* eval = app.add_subcommand("eval", "L1 errors between two parameter files");
  eval->add_option("--estimate", opt.estimate, "Estimated parameters (fit output or params JSON)")
      ->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", opt.truth, "True parameters (dataset metadata or params JSON)")
      ->required()->check(CLI::ExistingFile);
  eval->add_option("--slate", opt.slate, "Slate size K");
  eval->add_flag("--all-positions", opt.all_positions, "Sum the click-rank error over every position");
  eval->add_option("--out", opt.out, "Output JSON (default: stdout)");

  auto* experiment = app.add_subcommand("experiment", "Run a benchmark preset");
  experiment->add_option("preset", opt.preset, "catalog | slate | samples | nonclick | violin")->required();
  experiment->add_option("--replications", opt.replications, "Replications per cell")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--values", opt.values, "Override the swept values (comma separated)")->delimiter(',');
  experiment->add_option("--catalog", opt.catalog, "Catalog size (violin) or fixed catalog size");
  experiment->add_flag("--heavy", opt.heavy, "Include the K=4 cell of the slate sweep (slow)");
  experiment->add_flag("--all-positions", opt.all_positions, "Click-rank error over every position");
  experiment->add_option("--out-dir", opt.out_dir, "Directory for report files");
  add_common(experiment);
  add_prior_options(experiment, opt);
  add_map_options(experiment, opt);
  add_mcmc_options(experiment, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*generate) return cmd_generate(opt);
    if (*fit) return cmd_fit(opt);
    if (*sample) return cmd_sample(opt);
    if (*eval) return cmd_eval(opt);
    if (*experiment) return cmd_experiment(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}
