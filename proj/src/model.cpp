#include "slate/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace slate {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Full: return "full";
    case ModelKind::Reward: return "reward";
    case ModelKind::Rank: return "rank";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "full" || name == "Full") return ModelKind::Full;
  if (name == "reward" || name == "Reward") return ModelKind::Reward;
  if (name == "rank" || name == "Rank") return ModelKind::Rank;
  throw std::invalid_argument("unknown model kind: " + std::string(name));
}

std::string_view to_string(DatasetView view) {
  switch (view) {
    case DatasetView::Raw: return "raw";
    case DatasetView::Reward: return "reward";
    case DatasetView::Rank: return "rank";
  }
  return "?";
}

DatasetView view_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::Full: return DatasetView::Raw;
    case ModelKind::Reward: return DatasetView::Reward;
    case ModelKind::Rank: return DatasetView::Rank;
  }
  return DatasetView::Raw;
}

Slate::Slate(std::vector<ItemIndex> items) : items_(std::move(items)) {
  if (items_.size() < 2) throw std::invalid_argument("slate must hold at least 2 items");
  for (std::size_t i = 1; i < items_.size(); ++i) {
    if (items_[i - 1] >= items_[i])
      throw std::invalid_argument("slate items must be distinct and strictly increasing");
  }
}

void Slate::check_catalog(std::size_t catalog_size) const {
  if (!items_.empty() && items_.back() >= catalog_size)
    throw std::invalid_argument("slate item " + std::to_string(items_.back()) +
                                " outside catalog of size " + std::to_string(catalog_size));
}

Count SlateRecord::total_clicks() const {
  return std::accumulate(clicks.begin(), clicks.end(), Count{0});
}

Dataset::Dataset(std::size_t catalog_size, std::size_t slate_size, DatasetView view,
                 std::vector<SlateRecord> records)
    : catalog_size_(catalog_size), slate_size_(slate_size), view_(view),
      records_(std::move(records)) {
  if (slate_size_ < 2 || slate_size_ > catalog_size_)
    throw std::invalid_argument("dataset requires 2 <= slate size <= catalog size");
  const std::size_t expected_clicks = view_ == DatasetView::Reward ? 1 : slate_size_;
  std::set<Slate> seen;
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const auto& rec = records_[r];
    if (rec.slate.size() != slate_size_)
      throw std::invalid_argument("record " + std::to_string(r) + ": slate size mismatch");
    rec.slate.check_catalog(catalog_size_);
    if (rec.clicks.size() != expected_clicks)
      throw std::invalid_argument("record " + std::to_string(r) + ": expected " +
                                  std::to_string(expected_clicks) + " click counts");
    if (view_ == DatasetView::Rank && rec.non_clicks != 0)
      throw std::invalid_argument("rank view records carry no non-clicks");
    if (!seen.insert(rec.slate).second)
      throw std::invalid_argument("record " + std::to_string(r) + ": duplicate slate");
  }
  origin_hash_ = content_hash();
}

std::uint64_t Dataset::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(catalog_size_);
  mix(slate_size_);
  mix(static_cast<std::uint64_t>(view_));
  for (const auto& rec : records_) {
    for (auto item : rec.slate) mix(item);
    mix(rec.non_clicks);
    for (auto c : rec.clicks) mix(c);
  }
  return h;
}

Dataset Dataset::with_origin(std::uint64_t origin) const {
  Dataset copy = *this;
  copy.origin_hash_ = origin;
  return copy;
}

void ModelParams::validate() const {
  if (theta.empty()) throw std::invalid_argument("theta must be nonempty");
  for (double t : theta) {
    if (!std::isfinite(t) || t <= 0.0)
      throw std::invalid_argument("theta components must be finite and positive");
  }
  if (phi && (!std::isfinite(*phi) || *phi <= 0.0))
    throw std::invalid_argument("phi must be finite and positive");
}

void PriorConfig::validate() const {
  for (double v : {theta_shape, theta_rate, phi_shape, phi_rate}) {
    if (!std::isfinite(v) || v <= 0.0)
      throw std::invalid_argument("prior hyperparameters must be positive");
  }
}

namespace {

void check_slate(std::span<const double> theta, const Slate& slate) {
  slate.check_catalog(theta.size());
}

double require_phi(const ModelParams& params) {
  if (!params.phi) throw std::invalid_argument("model requires phi");
  return *params.phi;
}

}  // namespace

FullProbs full_probs(const ModelParams& params, const Slate& slate) {
  const double phi = require_phi(params);
  check_slate(params.theta, slate);
  double denom = phi;
  for (auto a : slate) denom += params.theta[a];
  FullProbs out;
  out.non_click = phi / denom;
  out.clicks.reserve(slate.size());
  for (auto a : slate) out.clicks.push_back(params.theta[a] / denom);
  return out;
}

RewardProbs reward_probs(const ModelParams& params, const Slate& slate) {
  const double phi = require_phi(params);
  check_slate(params.theta, slate);
  double sum = 0.0;
  for (auto a : slate) sum += params.theta[a];
  return {phi / (phi + sum), sum / (phi + sum)};
}

std::vector<double> rank_probs(std::span<const double> theta, const Slate& slate) {
  check_slate(theta, slate);
  double sum = 0.0;
  for (auto a : slate) sum += theta[a];
  std::vector<double> out;
  out.reserve(slate.size());
  for (auto a : slate) out.push_back(theta[a] / sum);
  return out;
}

double log_multinomial_pmf(std::span<const Count> counts, std::span<const double> probs) {
  if (counts.size() != probs.size())
    throw std::invalid_argument("counts and probabilities differ in length");
  double n = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (probs[i] <= 0.0) return -std::numeric_limits<double>::infinity();
    const double c = static_cast<double>(counts[i]);
    n += c;
    value += c * std::log(probs[i]) - std::lgamma(c + 1.0);
  }
  return value + std::lgamma(n + 1.0);
}

double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_prior(const ModelParams& params, const PriorConfig& prior, ModelKind kind) {
  double value = 0.0;
  for (double t : params.theta) value += log_gamma_density(t, prior.theta_shape, prior.theta_rate);
  if (kind != ModelKind::Rank) value += log_gamma_density(require_phi(params), prior.phi_shape, prior.phi_rate);
  return value;
}

double log_posterior(ModelKind kind, const Dataset& dataset, const ModelParams& params,
                     const PriorConfig& prior) {
  if (dataset.view() != view_for(kind))
    throw std::invalid_argument("dataset view '" + std::string(to_string(dataset.view())) +
                                "' does not match model '" + std::string(to_string(kind)) + "'");
  if (params.theta.size() != dataset.catalog_size())
    throw std::invalid_argument("parameter dimension does not match catalog size");
  params.validate();

  double loglik = 0.0;
  std::vector<Count> counts;
  std::vector<double> probs;
  for (const auto& rec : dataset.records()) {
    counts.clear();
    probs.clear();
    switch (kind) {
      case ModelKind::Full: {
        const auto p = full_probs(params, rec.slate);
        counts.push_back(rec.non_clicks);
        counts.insert(counts.end(), rec.clicks.begin(), rec.clicks.end());
        probs.push_back(p.non_click);
        probs.insert(probs.end(), p.clicks.begin(), p.clicks.end());
        break;
      }
      case ModelKind::Reward: {
        const auto p = reward_probs(params, rec.slate);
        counts = {rec.non_clicks, rec.clicks.front()};
        probs = {p.non_click, p.click};
        break;
      }
      case ModelKind::Rank: {
        if (rec.total_clicks() == 0) continue;
        counts.assign(rec.clicks.begin(), rec.clicks.end());
        probs = rank_probs(params.theta, rec.slate);
        break;
      }
    }
    loglik += log_multinomial_pmf(counts, probs);
  }
  return loglik + log_prior(params, prior, kind);
}

std::size_t parameter_dim(ModelKind kind, std::size_t catalog_size) {
  return kind == ModelKind::Rank ? catalog_size : catalog_size + 1;
}

std::vector<double> to_log_params(ModelKind kind, const ModelParams& params) {
  params.validate();
  std::vector<double> x;
  x.reserve(parameter_dim(kind, params.theta.size()));
  for (double t : params.theta) x.push_back(std::log(t));
  if (kind != ModelKind::Rank) x.push_back(std::log(require_phi(params)));
  return x;
}

ModelParams from_log_params(ModelKind kind, std::span<const double> log_params) {
  const std::size_t n = kind == ModelKind::Rank ? log_params.size() : log_params.size() - 1;
  if (log_params.empty() || n == 0) throw std::invalid_argument("empty parameter vector");
  ModelParams params;
  params.theta.reserve(n);
  for (std::size_t i = 0; i < n; ++i) params.theta.push_back(std::exp(log_params[i]));
  if (kind != ModelKind::Rank) params.phi = std::exp(log_params[n]);
  return params;
}

std::vector<std::string> parameter_names(ModelKind kind, std::size_t catalog_size) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < catalog_size; ++i) names.push_back("theta_" + std::to_string(i));
  if (kind != ModelKind::Rank) names.emplace_back("phi");
  return names;
}

}  // namespace slate
