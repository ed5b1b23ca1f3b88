#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "slate/model.hpp"

namespace slate {

// Recorded verbatim in dataset metadata so a dataset can be regenerated bit
// for bit on any platform.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64; per-slate substream seed = seed XOR splitmix64(slate_index); "
    "uniform = (x >> 11) * 2^-53; binomial = inversion when n*min(p,1-p) < 10, else BTRS; "
    "multinomial = sequential conditional binomials";

std::uint64_t splitmix64(std::uint64_t x);

// std::mt19937_64 with hand-rolled transforms. The standard library's
// distributions are implementation-defined, the engine is not.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double standard_normal();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Count binomial(Rng& rng, Count trials, double p);

// One draw of `trials` outcomes over probs (must sum to ~1).
std::vector<Count> multinomial(Rng& rng, Count trials, std::span<const double> probs);

}  // namespace slate
