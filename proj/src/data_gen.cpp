#include "slate/data_gen.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <thread>

#include "slate/rng.hpp"

namespace slate {

void GeneratorSpec::validate() const {
  if (slate_size < 2 || slate_size > catalog_size)
    throw std::invalid_argument("generator requires 2 <= slate size <= catalog size");
  if (samples_per_slate < 1) throw std::invalid_argument("samples per slate must be >= 1");
  if (true_params.theta.size() != catalog_size)
    throw std::invalid_argument("true parameters do not match catalog size");
  if (!true_params.phi) throw std::invalid_argument("true parameters need phi");
  true_params.validate();
}

std::uint64_t binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    if (c > std::numeric_limits<std::uint64_t>::max() / (n - k + i))
      throw std::overflow_error("binomial coefficient overflows 64 bits");
    c = c * (n - k + i) / i;
  }
  return c;
}

std::vector<Slate> enumerate_slates(std::size_t catalog_size, std::size_t slate_size) {
  if (slate_size < 2) throw std::invalid_argument("slate size must be >= 2");
  if (slate_size > catalog_size) throw std::invalid_argument("slate size exceeds catalog size");
  std::vector<Slate> out;
  out.reserve(binomial_coefficient(catalog_size, slate_size));
  std::vector<ItemIndex> combo(slate_size);
  for (std::size_t i = 0; i < slate_size; ++i) combo[i] = static_cast<ItemIndex>(i);
  while (true) {
    out.emplace_back(combo);
    // advance to the next combination in lexicographic order
    std::size_t i = slate_size;
    while (i > 0 && combo[i - 1] == catalog_size - slate_size + i - 1) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < slate_size; ++j) combo[j] = combo[j - 1] + 1;
  }
  return out;
}

ModelParams make_true_params(std::size_t catalog_size) {
  if (catalog_size < 2) throw std::invalid_argument("catalog size must be >= 2");
  ModelParams params;
  params.theta.resize(catalog_size);
  for (std::size_t i = 0; i < catalog_size; ++i)
    params.theta[i] = 1.0 + 5.0 * static_cast<double>(i) / static_cast<double>(catalog_size - 1);
  params.phi = 100.0;
  return params;
}

Dataset simulate(const GeneratorSpec& spec, unsigned threads) {
  spec.validate();
  auto slates = enumerate_slates(spec.catalog_size, spec.slate_size);
  std::vector<SlateRecord> records(slates.size());

  auto fill = [&](std::size_t i) {
    Rng rng(spec.seed ^ splitmix64(i));
    const auto p = full_probs(spec.true_params, slates[i]);
    std::vector<double> probs;
    probs.reserve(p.clicks.size() + 1);
    probs.push_back(p.non_click);
    probs.insert(probs.end(), p.clicks.begin(), p.clicks.end());
    auto draw = multinomial(rng, spec.samples_per_slate, probs);
    records[i].slate = std::move(slates[i]);
    records[i].non_clicks = draw.front();
    records[i].clicks.assign(draw.begin() + 1, draw.end());
  };

  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) fill(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < records.size(); i = next++) fill(i);
      });
    }
  }
  return Dataset(spec.catalog_size, spec.slate_size, DatasetView::Raw, std::move(records));
}

namespace {

void require_raw(const Dataset& dataset) {
  if (dataset.view() != DatasetView::Raw)
    throw std::invalid_argument("views are derived from raw datasets only");
}

}  // namespace

Dataset to_reward_view(const Dataset& dataset) {
  require_raw(dataset);
  std::vector<SlateRecord> records;
  records.reserve(dataset.size());
  for (const auto& rec : dataset.records())
    records.push_back({rec.slate, rec.non_clicks, {rec.total_clicks()}});
  return Dataset(dataset.catalog_size(), dataset.slate_size(), DatasetView::Reward,
                 std::move(records))
      .with_origin(dataset.origin_hash());
}

Dataset to_rank_view(const Dataset& dataset) {
  require_raw(dataset);
  std::vector<SlateRecord> records;
  records.reserve(dataset.size());
  for (const auto& rec : dataset.records()) records.push_back({rec.slate, 0, rec.clicks});
  return Dataset(dataset.catalog_size(), dataset.slate_size(), DatasetView::Rank,
                 std::move(records))
      .with_origin(dataset.origin_hash());
}

Dataset to_view(const Dataset& dataset, ModelKind kind) {
  switch (kind) {
    case ModelKind::Full: require_raw(dataset); return dataset;
    case ModelKind::Reward: return to_reward_view(dataset);
    case ModelKind::Rank: return to_rank_view(dataset);
  }
  return dataset;
}

}  // namespace slate
