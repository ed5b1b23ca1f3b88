#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slate {

using ItemIndex = std::uint32_t;
using Count = std::uint64_t;

enum class ModelKind { Full, Reward, Rank };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// Which of the three per-model representations a dataset holds.
enum class DatasetView { Raw, Reward, Rank };

std::string_view to_string(DatasetView view);
DatasetView view_for(ModelKind kind);

// Unordered set of K >= 2 distinct items, stored strictly increasing.
class Slate {
public:
  Slate() = default;

  // Throws std::invalid_argument unless items are strictly increasing and K >= 2.
  explicit Slate(std::vector<ItemIndex> items);

  std::size_t size() const { return items_.size(); }
  ItemIndex operator[](std::size_t i) const { return items_[i]; }
  std::span<const ItemIndex> items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  // Throws std::invalid_argument if any item is >= catalog_size.
  void check_catalog(std::size_t catalog_size) const;

  friend bool operator==(const Slate&, const Slate&) = default;
  friend auto operator<=>(const Slate&, const Slate&) = default;

private:
  std::vector<ItemIndex> items_;
};

// Interaction counts for one slate. `clicks` has one entry per slate position,
// except in the Reward view where it holds the single slate-level click total.
struct SlateRecord {
  Slate slate;
  Count non_clicks = 0;
  std::vector<Count> clicks;

  Count total_clicks() const;
  Count impressions() const { return non_clicks + total_clicks(); }

  friend bool operator==(const SlateRecord&, const SlateRecord&) = default;
};

class Dataset {
public:
  Dataset() = default;

  // Validates every record against N and K and rejects duplicate slates.
  Dataset(std::size_t catalog_size, std::size_t slate_size, DatasetView view,
          std::vector<SlateRecord> records);

  std::size_t catalog_size() const { return catalog_size_; }
  std::size_t slate_size() const { return slate_size_; }
  DatasetView view() const { return view_; }
  std::span<const SlateRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // FNV-1a over the canonical byte layout; views keep the hash of the raw
  // dataset they were derived from in origin_hash().
  std::uint64_t content_hash() const;
  std::uint64_t origin_hash() const { return origin_hash_; }
  Dataset with_origin(std::uint64_t origin) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.catalog_size_ == b.catalog_size_ && a.slate_size_ == b.slate_size_ &&
           a.view_ == b.view_ && a.records_ == b.records_;
  }

private:
  std::size_t catalog_size_ = 0;
  std::size_t slate_size_ = 0;
  DatasetView view_ = DatasetView::Raw;
  std::vector<SlateRecord> records_;
  std::uint64_t origin_hash_ = 0;
};

struct ModelParams {
  std::vector<double> theta;
  std::optional<double> phi;

  // Throws std::invalid_argument if any component is non-finite or <= 0.
  void validate() const;
  std::size_t catalog_size() const { return theta.size(); }
};

// Gamma(shape, rate) priors on every theta_i and on phi.
struct PriorConfig {
  double theta_shape = 1.0;
  double theta_rate = 0.001;
  double phi_shape = 1.0;
  double phi_rate = 0.001;

  void validate() const;
};

struct FullProbs {
  double non_click = 0.0;
  std::vector<double> clicks;
};

struct RewardProbs {
  double non_click = 0.0;
  double click = 0.0;
};

FullProbs full_probs(const ModelParams& params, const Slate& slate);
RewardProbs reward_probs(const ModelParams& params, const Slate& slate);
std::vector<double> rank_probs(std::span<const double> theta, const Slate& slate);

// log(n! / prod c_i!) + sum c_i log p_i. A positive count on a zero
// probability yields -infinity.
double log_multinomial_pmf(std::span<const Count> counts, std::span<const double> probs);

double log_gamma_density(double x, double shape, double rate);

// Sum of Gamma log-densities over theta, plus phi unless kind is Rank.
double log_prior(const ModelParams& params, const PriorConfig& prior, ModelKind kind);

// Log-likelihood of the dataset (which must hold the view matching kind) plus
// log_prior. Rank records with zero clicks contribute nothing.
double log_posterior(ModelKind kind, const Dataset& dataset, const ModelParams& params,
                     const PriorConfig& prior);

// Number of free parameters: N for Rank, N + 1 otherwise (phi last).
std::size_t parameter_dim(ModelKind kind, std::size_t catalog_size);

// Maps between ModelParams and the unconstrained log-parameter vector
// [log theta_0 .. log theta_{N-1} (, log phi)].
std::vector<double> to_log_params(ModelKind kind, const ModelParams& params);
ModelParams from_log_params(ModelKind kind, std::span<const double> log_params);

std::vector<std::string> parameter_names(ModelKind kind, std::size_t catalog_size);

// Density of the log-parameters: log_posterior(exp(x)) + sum(x). This is the
// function the optimizer ascends and the sampler targets.
double log_posterior_log_space(ModelKind kind, const Dataset& dataset,
                               std::span<const double> log_params, const PriorConfig& prior);

// Gradient of log_posterior_log_space with respect to the log-parameters.
std::vector<double> grad_log_posterior(ModelKind kind, const Dataset& dataset,
                                       std::span<const double> log_params,
                                       const PriorConfig& prior);

}  // namespace slate
