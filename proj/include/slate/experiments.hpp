#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slate/inference.hpp"
#include "slate/metrics.hpp"
#include "slate/model.hpp"

namespace slate {

enum class SweepKind { Catalog, Slate, Samples, NonClick, Violin };

std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view name);

struct ExperimentConfig {
  SweepKind sweep = SweepKind::Catalog;
  // Catalog/NonClick: catalog sizes. Slate: slate sizes. Samples: samples per slate.
  std::vector<std::uint64_t> values;
  std::size_t catalog_size = 50;
  std::size_t slate_size = 2;
  Count samples_per_slate = 1000;
  std::size_t replications = 50;
  std::uint64_t base_seed = 0;
  std::vector<ModelKind> models{ModelKind::Full, ModelKind::Rank, ModelKind::Reward};
  PriorConfig prior;
  MapConfig map;
  McmcConfig mcmc;
  unsigned threads = 1;
  bool all_positions = false;

  void validate() const;
  MetricKind metric() const;
};

// The published experiment grids. `heavy` adds the K = 4 cell to the slate sweep.
ExperimentConfig preset(SweepKind sweep, bool heavy = false);

struct ModelOutcome {
  ModelKind model = ModelKind::Full;
  double value = 0.0;
  bool failed = false;
  bool converged = false;
  // origin_hash() of the view the model was fit on.
  std::uint64_t dataset_origin = 0;
};

struct ReplicationResult {
  std::uint64_t dataset_hash = 0;
  std::vector<ModelOutcome> outcomes;
};

// One generate / fit / score cycle. Every model sees a view of the same
// simulated dataset.
ReplicationResult run_replication(std::span<const ModelKind> models, std::size_t catalog_size,
                                  std::size_t slate_size, Count samples_per_slate,
                                  std::uint64_t seed, const PriorConfig& prior,
                                  const MapConfig& map_config, MetricKind metric,
                                  bool all_positions = false);

struct CellResult {
  std::uint64_t sweep_value = 0;
  ModelKind model = ModelKind::Full;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over successful replications
  std::vector<double> raw;  // one entry per replication, NaN when failed
  std::size_t n_replications = 0;
  std::size_t n_failed = 0;
  std::size_t n_unconverged = 0;
  bool unreliable = false;  // more than 10% failed
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellResult> cells;
  double wall_clock_seconds = 0.0;
  std::string version;

  const CellResult& cell(std::uint64_t sweep_value, ModelKind model) const;
};

ExperimentReport run_sweep(const ExperimentConfig& config);

struct ViolinSeries {
  ModelKind model = ModelKind::Full;
  std::vector<double> l1;
  double acceptance_rate = 0.0;
  bool acceptance_warning = false;
};

struct ViolinResult {
  std::size_t catalog_size = 0;
  std::size_t slate_size = 0;
  Count samples_per_slate = 0;
  std::uint64_t seed = 0;
  std::vector<ViolinSeries> series;

  const ViolinSeries& for_model(ModelKind model) const;
};

// Posterior-sample click-rank errors on a single simulated dataset. Chain
// seeds are mcmc.seed + model position.
ViolinResult run_violin(std::size_t catalog_size, std::size_t slate_size, Count samples_per_slate,
                        std::uint64_t seed, const PriorConfig& prior, const McmcConfig& mcmc,
                        std::span<const ModelKind> models, unsigned threads = 1);

double mean_of(std::span<const double> values);
double sample_std(std::span<const double> values);

std::string version_string();

// Runs task(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

}  // namespace slate
