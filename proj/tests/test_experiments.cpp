#include <cmath>

#include "doctest.h"
#include "slate/data_gen.hpp"
#include "slate/experiments.hpp"

using namespace slate;
using doctest::Approx;

namespace {

const std::vector<ModelKind> kAll{ModelKind::Full, ModelKind::Rank, ModelKind::Reward};

ReplicationResult replicate(std::size_t n, Count samples, std::uint64_t seed,
                            MetricKind metric = MetricKind::ClickRank,
                            std::vector<ModelKind> models = kAll) {
  return run_replication(models, n, 2, samples, seed, PriorConfig{}, MapConfig{}, metric);
}

ExperimentConfig small_catalog_sweep() {
  ExperimentConfig cfg;
  cfg.sweep = SweepKind::Catalog;
  cfg.values = {4, 6};
  cfg.samples_per_slate = 200;
  cfg.replications = 4;
  cfg.base_seed = 10;
  return cfg;
}

}  // namespace

TEST_SUITE("replication") {
  TEST_CASE("two-item values are bounded by the slate count") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto r = replicate(2, 1000, seed);
      REQUIRE(r.outcomes.size() == 3);
      for (const auto& o : r.outcomes) {
        CHECK_FALSE(o.failed);
        CHECK(std::isfinite(o.value));
        CHECK(o.value >= 0.0);
        CHECK(o.value <= 1.0);
      }
    }
  }

  TEST_CASE("huge samples drive every model's error to zero") {
    const auto r = replicate(5, 10'000'000, 3);
    for (const auto& o : r.outcomes) {
      CAPTURE(to_string(o.model));
      CHECK(o.value < 0.05);
    }
  }

  TEST_CASE("same seed, same values") {
    const auto a = replicate(8, 500, 42), b = replicate(8, 500, 42);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.outcomes[i].value == b.outcomes[i].value);
    CHECK(a.dataset_hash == b.dataset_hash);
  }

  TEST_CASE("all models see the same dataset") {
    const auto r = replicate(6, 300, 9);
    for (const auto& o : r.outcomes) CHECK(o.dataset_origin == r.dataset_hash);
    const auto raw = simulate(GeneratorSpec{6, 2, 300, make_true_params(6), 9});
    CHECK(r.dataset_hash == raw.origin_hash());
  }

  TEST_CASE("non-click metric") {
    const auto r = replicate(6, 300, 9, MetricKind::NonClick, {ModelKind::Full, ModelKind::Reward});
    REQUIRE(r.outcomes.size() == 2);
    for (const auto& o : r.outcomes) CHECK(o.value >= 0.0);
    CHECK_THROWS_AS(replicate(6, 300, 9, MetricKind::NonClick, {ModelKind::Rank}), std::invalid_argument);
  }
}

TEST_SUITE("sweep") {
  TEST_CASE("report statistics match the raw values") {
    const auto report = run_sweep(small_catalog_sweep());
    CHECK(report.cells.size() == 6);
    for (const auto& cell : report.cells) {
      CHECK(cell.raw.size() == 4);
      CHECK(cell.n_replications == 4);
      CHECK(cell.n_failed == 0);
      double m = 0.0;
      for (double v : cell.raw) m += v;
      m /= 4.0;
      double v2 = 0.0;
      for (double v : cell.raw) v2 += (v - m) * (v - m);
      CHECK(std::abs(cell.mean - m) <= 1e-12);
      CHECK(std::abs(cell.std - std::sqrt(v2 / 3.0)) <= 1e-12);
      CHECK(cell.std >= 0.0);
    }
    CHECK_FALSE(report.version.empty());
  }

  TEST_CASE("replication seeds follow the base seed") {
    const auto cfg = small_catalog_sweep();
    const auto report = run_sweep(cfg);
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const auto r = replicate(6, 200, cfg.base_seed + rep);
      CHECK(report.cell(6, ModelKind::Full).raw[rep] == r.outcomes[0].value);
      CHECK(report.cell(6, ModelKind::Reward).raw[rep] == r.outcomes[2].value);
    }
  }

  TEST_CASE("worker count does not change results") {
    auto cfg = small_catalog_sweep();
    const auto serial = run_sweep(cfg);
    cfg.threads = 3;
    const auto parallel = run_sweep(cfg);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) CHECK(serial.cells[i].raw == parallel.cells[i].raw);
  }

  TEST_CASE("slate and samples sweeps vary the right parameter") {
    ExperimentConfig cfg;
    cfg.sweep = SweepKind::Slate;
    cfg.values = {2, 3};
    cfg.catalog_size = 5;
    cfg.samples_per_slate = 100;
    cfg.replications = 2;
    auto report = run_sweep(cfg);
    CHECK(report.cells.size() == 6);
    CHECK(report.cell(3, ModelKind::Full).raw.size() == 2);

    cfg.sweep = SweepKind::Samples;
    cfg.values = {20, 2000};
    report = run_sweep(cfg);
    for (auto m : kAll) CHECK(report.cell(2000, m).mean < report.cell(20, m).mean);
  }

  TEST_CASE("config validation") {
    ExperimentConfig cfg = small_catalog_sweep();
    cfg.values.clear();
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = small_catalog_sweep();
    cfg.replications = 0;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = small_catalog_sweep();
    cfg.sweep = SweepKind::NonClick;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);  // includes Rank
    cfg.models = {ModelKind::Full, ModelKind::Reward};
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.metric() == MetricKind::NonClick);
  }

  TEST_CASE("presets") {
    const auto catalog = preset(SweepKind::Catalog);
    CHECK(catalog.values.front() == 5);
    CHECK(catalog.values.back() == 80);
    CHECK(catalog.slate_size == 2);
    CHECK(catalog.samples_per_slate == 1000);
    CHECK(catalog.replications == 50);
    CHECK(preset(SweepKind::Slate).values == std::vector<std::uint64_t>{2, 3});
    CHECK(preset(SweepKind::Slate, true).values == std::vector<std::uint64_t>{2, 3, 4});
    CHECK(preset(SweepKind::Slate).catalog_size == 50);
    const auto samples = preset(SweepKind::Samples);
    CHECK(samples.catalog_size == 80);
    CHECK(samples.values.front() == 5);
    CHECK(samples.values.back() == 10000);
    CHECK(preset(SweepKind::NonClick).models == std::vector<ModelKind>{ModelKind::Full, ModelKind::Reward});
    CHECK(parse_sweep_kind("nonclick") == SweepKind::NonClick);
    CHECK_THROWS_AS(parse_sweep_kind("bogus"), std::invalid_argument);
  }
}

TEST_SUITE("violin") {
  TEST_CASE("sample counts and value ranges") {
    McmcConfig mcmc;
    mcmc.num_samples = 200;
    mcmc.burn_in = 500;
    mcmc.seed = 1;
    const auto v = run_violin(6, 2, 500, 3, PriorConfig{}, mcmc, kAll);
    REQUIRE(v.series.size() == 3);
    for (const auto& s : v.series) {
      CHECK(s.l1.size() == 200);
      for (double x : s.l1) {
        CHECK(std::isfinite(x));
        CHECK(x >= 0.0);
      }
      CHECK(s.acceptance_rate >= 0.0);
      CHECK(s.acceptance_rate <= 1.0);
    }
    const auto again = run_violin(6, 2, 500, 3, PriorConfig{}, mcmc, kAll, 3);
    CHECK(again.for_model(ModelKind::Rank).l1 == v.for_model(ModelKind::Rank).l1);
  }
}

TEST_CASE("summary helpers") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(mean_of(v) == 2.5);
  CHECK(sample_std(v) == Approx(std::sqrt(5.0 / 3.0)));
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
