#include "slate/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "slate/data_gen.hpp"

#ifndef SLATE_VERSION
#define SLATE_VERSION "0.1.0"
#endif

namespace slate {

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Catalog: return "catalog";
    case SweepKind::Slate: return "slate";
    case SweepKind::Samples: return "samples";
    case SweepKind::NonClick: return "nonclick";
    case SweepKind::Violin: return "violin";
  }
  return "?";
}

SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "catalog") return SweepKind::Catalog;
  if (name == "slate") return SweepKind::Slate;
  if (name == "samples") return SweepKind::Samples;
  if (name == "nonclick") return SweepKind::NonClick;
  if (name == "violin") return SweepKind::Violin;
  throw std::invalid_argument("unknown experiment preset: " + std::string(name));
}

void ExperimentConfig::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep values must be nonempty");
  for (auto v : values) {
    if (v == 0) throw std::invalid_argument("sweep values must be positive");
  }
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (models.empty()) throw std::invalid_argument("at least one model is required");
  if (sweep == SweepKind::NonClick) {
    for (auto m : models) {
      if (m == ModelKind::Rank) throw std::invalid_argument("the non-click sweep excludes Rank");
    }
  }
  prior.validate();
  map.validate();
}

MetricKind ExperimentConfig::metric() const {
  return sweep == SweepKind::NonClick ? MetricKind::NonClick : MetricKind::ClickRank;
}

ExperimentConfig preset(SweepKind sweep, bool heavy) {
  ExperimentConfig config;
  config.sweep = sweep;
  switch (sweep) {
    case SweepKind::Catalog:
      config.values = {5, 10, 20, 30, 40, 50, 60, 70, 80};
      config.slate_size = 2;
      config.samples_per_slate = 1000;
      break;
    case SweepKind::Slate:
      config.values = {2, 3};
      if (heavy) config.values.push_back(4);
      config.catalog_size = 50;
      config.samples_per_slate = 1000;
      break;
    case SweepKind::Samples:
      config.values = {5, 10, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000, 5000, 10000};
      config.catalog_size = 80;
      config.slate_size = 2;
      break;
    case SweepKind::NonClick:
      config.values = {5, 10, 20, 30, 40, 50, 60, 70, 80};
      config.slate_size = 2;
      config.samples_per_slate = 1000;
      config.models = {ModelKind::Full, ModelKind::Reward};
      break;
    case SweepKind::Violin:
      config.values = {20};
      config.slate_size = 2;
      config.samples_per_slate = 1000;
      config.replications = 1;
      break;
  }
  return config;
}

ReplicationResult run_replication(std::span<const ModelKind> models, std::size_t catalog_size,
                                  std::size_t slate_size, Count samples_per_slate,
                                  std::uint64_t seed, const PriorConfig& prior,
                                  const MapConfig& map_config, MetricKind metric,
                                  bool all_positions) {
  GeneratorSpec spec{catalog_size, slate_size, samples_per_slate, make_true_params(catalog_size),
                     seed};
  const Dataset raw = simulate(spec);
  const auto slates = enumerate_slates(catalog_size, slate_size);

  ReplicationResult result;
  result.dataset_hash = raw.content_hash();
  for (auto model : models) {
    ModelOutcome outcome;
    outcome.model = model;
    try {
      const Dataset view = to_view(raw, model);
      outcome.dataset_origin = view.origin_hash();
      const auto fit = map_estimate(model, view, prior, map_config);
      outcome.converged = fit.converged;
      outcome.value =
          metric == MetricKind::ClickRank
              ? l1_click_rank_error(fit.params.theta, spec.true_params.theta, slates, all_positions)
                    .value
              : l1_nonclick_error(fit.params, spec.true_params, slates).value;
      outcome.failed = !std::isfinite(outcome.value);
    } catch (const NumericFailure&) {
      outcome.failed = true;
      outcome.value = std::numeric_limits<double>::quiet_NaN();
    }
    result.outcomes.push_back(outcome);
  }
  return result;
}

const CellResult& ExperimentReport::cell(std::uint64_t sweep_value, ModelKind model) const {
  for (const auto& c : cells) {
    if (c.sweep_value == sweep_value && c.model == model) return c;
  }
  throw std::out_of_range("no such experiment cell");
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  threads = std::max(1u, threads);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            task(i);
          } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

ExperimentReport run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.sweep == SweepKind::Violin)
    throw std::invalid_argument("violin runs go through run_violin");
  const auto start = std::chrono::steady_clock::now();

  const std::size_t cells = config.values.size();
  const std::size_t reps = config.replications;
  std::vector<ReplicationResult> results(cells * reps);
  parallel_for(results.size(), config.threads, [&](std::size_t task) {
    const std::size_t cell = task / reps;
    const std::size_t rep = task % reps;
    std::size_t catalog = config.catalog_size, slate = config.slate_size;
    Count samples = config.samples_per_slate;
    const auto value = config.values[cell];
    switch (config.sweep) {
      case SweepKind::Catalog:
      case SweepKind::NonClick: catalog = value; break;
      case SweepKind::Slate: slate = value; break;
      case SweepKind::Samples: samples = value; break;
      case SweepKind::Violin: break;
    }
    results[task] = run_replication(config.models, catalog, slate, samples,
                                    config.base_seed + rep, config.prior, config.map,
                                    config.metric(), config.all_positions);
  });

  ExperimentReport report;
  report.config = config;
  report.version = version_string();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      CellResult out;
      out.sweep_value = config.values[cell];
      out.model = config.models[m];
      out.n_replications = reps;
      std::vector<double> ok;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto& outcome = results[cell * reps + rep].outcomes[m];
        out.raw.push_back(outcome.failed ? std::numeric_limits<double>::quiet_NaN() : outcome.value);
        if (outcome.failed) {
          ++out.n_failed;
        } else {
          ok.push_back(outcome.value);
        }
        if (!outcome.converged) ++out.n_unconverged;
      }
      out.mean = mean_of(ok);
      out.std = sample_std(ok);
      out.unreliable = 10 * out.n_failed > reps;
      report.cells.push_back(std::move(out));
    }
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

const ViolinSeries& ViolinResult::for_model(ModelKind model) const {
  for (const auto& s : series) {
    if (s.model == model) return s;
  }
  throw std::out_of_range("model not present in violin result");
}

ViolinResult run_violin(std::size_t catalog_size, std::size_t slate_size, Count samples_per_slate,
                        std::uint64_t seed, const PriorConfig& prior, const McmcConfig& mcmc,
                        std::span<const ModelKind> models, unsigned threads) {
  GeneratorSpec spec{catalog_size, slate_size, samples_per_slate, make_true_params(catalog_size),
                     seed};
  const Dataset raw = simulate(spec);
  const auto slates = enumerate_slates(catalog_size, slate_size);

  ViolinResult result{catalog_size, slate_size, samples_per_slate, seed, {}};
  result.series.resize(models.size());
  parallel_for(models.size(), threads, [&](std::size_t m) {
    const Dataset view = to_view(raw, models[m]);
    McmcConfig chain = mcmc;
    chain.seed = mcmc.seed + m;
    const auto samples = mcmc_sample(models[m], view, prior, chain);
    ViolinSeries series;
    series.model = models[m];
    series.acceptance_rate = samples.acceptance_rate;
    series.acceptance_warning = samples.acceptance_warning;
    series.l1.reserve(samples.num_samples);
    for (std::size_t i = 0; i < samples.num_samples; ++i) {
      const auto params = samples.params(i);
      series.l1.push_back(l1_click_rank_error(params.theta, spec.true_params.theta, slates).value);
    }
    result.series[m] = std::move(series);
  });
  return result;
}

std::string version_string() { return SLATE_VERSION; }

}  // namespace slate
