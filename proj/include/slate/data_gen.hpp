#pragma once

#include <cstdint>
#include <vector>

#include "slate/model.hpp"

namespace slate {

struct GeneratorSpec {
  std::size_t catalog_size = 0;
  std::size_t slate_size = 2;
  Count samples_per_slate = 1000;
  ModelParams true_params;
  std::uint64_t seed = 0;

  void validate() const;
};

std::uint64_t binomial_coefficient(std::size_t n, std::size_t k);

// All C(N, K) slates in lexicographic order.
std::vector<Slate> enumerate_slates(std::size_t catalog_size, std::size_t slate_size);

// phi = 100, theta evenly spaced over [1, 6] in index order.
ModelParams make_true_params(std::size_t catalog_size);

// One Full-model multinomial draw of n impressions per enumerated slate.
// Slate i uses its own generator seeded with seed ^ splitmix64(i), so the
// result does not depend on `threads`.
Dataset simulate(const GeneratorSpec& spec, unsigned threads = 1);

Dataset to_reward_view(const Dataset& dataset);
Dataset to_rank_view(const Dataset& dataset);
Dataset to_view(const Dataset& dataset, ModelKind kind);

}  // namespace slate
