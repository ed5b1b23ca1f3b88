#include "slate/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slate {

namespace {

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_sum_exp(std::span<const double> x, const Slate& slate) {
  double m = -std::numeric_limits<double>::infinity();
  for (auto a : slate) m = std::max(m, x[a]);
  double s = 0.0;
  for (auto a : slate) s += std::exp(x[a] - m);
  return m + std::log(s);
}

double lfact(Count c) { return std::lgamma(static_cast<double>(c) + 1.0); }

}  // namespace

LogPosteriorObjective::LogPosteriorObjective(ModelKind kind, const Dataset& dataset,
                                             PriorConfig prior)
    : kind_(kind), dataset_(&dataset), prior_(prior),
      dim_(parameter_dim(kind, dataset.catalog_size())) {
  prior_.validate();
  if (dataset.view() != view_for(kind))
    throw std::invalid_argument("dataset view '" + std::string(to_string(dataset.view())) +
                                "' does not match model '" + std::string(to_string(kind)) + "'");
  // Sums run in slate order so results do not depend on record order.
  for (const auto& rec : dataset.records()) ordered_.push_back(&rec);
  std::sort(ordered_.begin(), ordered_.end(),
            [](const SlateRecord* a, const SlateRecord* b) { return a->slate < b->slate; });
  for (const SlateRecord* r : ordered_) {
    const auto& rec = *r;
    switch (kind_) {
      case ModelKind::Full:
        log_coefficients_ += lfact(rec.impressions()) - lfact(rec.non_clicks);
        for (auto c : rec.clicks) log_coefficients_ -= lfact(c);
        break;
      case ModelKind::Reward:
        log_coefficients_ +=
            lfact(rec.impressions()) - lfact(rec.non_clicks) - lfact(rec.clicks.front());
        break;
      case ModelKind::Rank:
        log_coefficients_ += lfact(rec.total_clicks());
        for (auto c : rec.clicks) log_coefficients_ -= lfact(c);
        break;
    }
  }
  for (std::size_t i = 0; i < dim_; ++i)
    prior_constant_ += shape(i) * std::log(rate(i)) - std::lgamma(shape(i));
}

double LogPosteriorObjective::shape(std::size_t i) const {
  return i < dataset_->catalog_size() ? prior_.theta_shape : prior_.phi_shape;
}

double LogPosteriorObjective::rate(std::size_t i) const {
  return i < dataset_->catalog_size() ? prior_.theta_rate : prior_.phi_rate;
}

void LogPosteriorObjective::check(std::span<const double> x, double offset) const {
  if (!std::isfinite(offset)) throw std::invalid_argument("non-finite offset");
  if (x.size() != dim_)
    throw std::invalid_argument("log-parameter vector has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dim_));
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("log-parameters must be finite");
  }
}

double LogPosteriorObjective::value(std::span<const double> x, double offset) const {
  check(x, offset);
  const std::size_t n = dataset_->catalog_size();
  const double psi = kind_ == ModelKind::Rank ? 0.0 : x[n];
  double loglik = 0.0;
  for (const SlateRecord* r : ordered_) {
    const auto& rec = *r;
    switch (kind_) {
      case ModelKind::Full: {
        const double log_den = log_sum_exp(psi, log_sum_exp(x, rec.slate));
        double t = static_cast<double>(rec.non_clicks) * (psi - log_den);
        for (std::size_t i = 0; i < rec.slate.size(); ++i)
          t += static_cast<double>(rec.clicks[i]) * (x[rec.slate[i]] - log_den);
        loglik += t;
        break;
      }
      case ModelKind::Reward: {
        const double log_sum = log_sum_exp(x, rec.slate);
        const double log_den = log_sum_exp(psi, log_sum);
        loglik += static_cast<double>(rec.non_clicks) * (psi - log_den) +
                  static_cast<double>(rec.clicks.front()) * (log_sum - log_den);
        break;
      }
      case ModelKind::Rank: {
        if (rec.total_clicks() == 0) break;
        const double log_sum = log_sum_exp(x, rec.slate);
        for (std::size_t i = 0; i < rec.slate.size(); ++i)
          loglik += static_cast<double>(rec.clicks[i]) * (x[rec.slate[i]] - log_sum);
        break;
      }
    }
  }
  double logprior = prior_constant_;
  for (std::size_t i = 0; i < dim_; ++i) logprior += shape(i) * (x[i] + offset) - rate(i) * std::exp(x[i] + offset);
  return log_coefficients_ + loglik + logprior;
}

double LogPosteriorObjective::value_and_gradient(std::span<const double> x, std::span<double> grad,
                                                 double offset) const {
  const double v = value(x, offset);
  if (grad.size() != dim_) throw std::invalid_argument("gradient buffer has wrong length");
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n = dataset_->catalog_size();
  const double psi = kind_ == ModelKind::Rank ? 0.0 : x[n];
  for (const SlateRecord* r : ordered_) {
    const auto& rec = *r;
    const double impressions = static_cast<double>(rec.impressions());
    switch (kind_) {
      case ModelKind::Full: {
        const double log_sum = log_sum_exp(x, rec.slate);
        const double log_den = log_sum_exp(psi, log_sum);
        for (std::size_t i = 0; i < rec.slate.size(); ++i) {
          const auto a = rec.slate[i];
          grad[a] += static_cast<double>(rec.clicks[i]) - impressions * std::exp(x[a] - log_den);
        }
        // nc - I*q rearranged as nc*(1-q) - C*q: no cancellation at large nc
        grad[n] += static_cast<double>(rec.non_clicks) * std::exp(log_sum - log_den) -
                   static_cast<double>(rec.total_clicks()) * std::exp(psi - log_den);
        break;
      }
      case ModelKind::Reward: {
        const double log_sum = log_sum_exp(x, rec.slate);
        const double log_den = log_sum_exp(psi, log_sum);
        const double clicks = static_cast<double>(rec.clicks.front());
        for (auto a : rec.slate)
          grad[a] += clicks * std::exp(x[a] - log_sum) - impressions * std::exp(x[a] - log_den);
        grad[n] += static_cast<double>(rec.non_clicks) * std::exp(log_sum - log_den) -
                   clicks * std::exp(psi - log_den);
        break;
      }
      case ModelKind::Rank: {
        const double total = static_cast<double>(rec.total_clicks());
        if (total == 0.0) break;
        const double log_sum = log_sum_exp(x, rec.slate);
        for (std::size_t i = 0; i < rec.slate.size(); ++i) {
          const auto a = rec.slate[i];
          grad[a] += static_cast<double>(rec.clicks[i]) - total * std::exp(x[a] - log_sum);
        }
        break;
      }
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) grad[i] += shape(i) - rate(i) * std::exp(x[i] + offset);
  return v;
}

std::vector<double> LogPosteriorObjective::fisher_diagonal(std::span<const double> x,
                                                           double offset) const {
  check(x, offset);
  std::vector<double> info(dim_, 0.0);
  const std::size_t n = dataset_->catalog_size();
  const double psi = kind_ == ModelKind::Rank ? 0.0 : x[n];
  for (const SlateRecord* r : ordered_) {
    const auto& rec = *r;
    switch (kind_) {
      case ModelKind::Full: {
        const double trials = static_cast<double>(rec.impressions());
        const double log_den = log_sum_exp(psi, log_sum_exp(x, rec.slate));
        for (auto a : rec.slate) {
          const double p = std::exp(x[a] - log_den);
          info[a] += trials * p * (1.0 - p);
        }
        const double q = std::exp(psi - log_den);
        info[n] += trials * q * (1.0 - q);
        break;
      }
      case ModelKind::Reward: {
        const double trials = static_cast<double>(rec.impressions());
        const double log_sum = log_sum_exp(x, rec.slate);
        const double log_den = log_sum_exp(psi, log_sum);
        const double pq = std::exp(log_sum - log_den) * std::exp(psi - log_den);
        for (auto a : rec.slate) {
          const double share = std::exp(x[a] - log_sum);
          info[a] += trials * share * share * pq;
        }
        info[n] += trials * pq;
        break;
      }
      case ModelKind::Rank: {
        const double trials = static_cast<double>(rec.total_clicks());
        if (trials == 0.0) break;
        const double log_sum = log_sum_exp(x, rec.slate);
        for (auto a : rec.slate) {
          const double p = std::exp(x[a] - log_sum);
          info[a] += trials * p * (1.0 - p);
        }
        break;
      }
    }
  }
  for (std::size_t i = 0; i < dim_; ++i)
    info[i] = std::max(info[i] + rate(i) * std::exp(x[i] + offset), 1e-12);
  return info;
}

double LogPosteriorObjective::optimal_scale_shift(std::span<const double> x,
                                                  double offset) const {
  check(x, offset);
  // d/dt sum_i [shape_i (x_i + t) - rate_i exp(x_i + t)] = 0
  double shape_sum = 0.0;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim_; ++i) {
    shape_sum += shape(i);
    m = std::max(m, std::log(rate(i)) + x[i] + offset);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += std::exp(std::log(rate(i)) + x[i] + offset - m);
  return std::log(shape_sum) - (m + std::log(s));
}

double log_posterior_log_space(ModelKind kind, const Dataset& dataset,
                               std::span<const double> log_params, const PriorConfig& prior) {
  return LogPosteriorObjective(kind, dataset, prior).value(log_params);
}

std::vector<double> grad_log_posterior(ModelKind kind, const Dataset& dataset,
                                       std::span<const double> log_params,
                                       const PriorConfig& prior) {
  LogPosteriorObjective objective(kind, dataset, prior);
  std::vector<double> grad(objective.dim());
  objective.value_and_gradient(log_params, grad);
  return grad;
}

}  // namespace slate
