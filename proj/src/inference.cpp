#include "slate/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slate/objective.hpp"
#include "slate/rng.hpp"

namespace slate {

void MapConfig::validate() const {
  if (max_iterations == 0 || !(gradient_tolerance > 0.0) || !(initial_step > 0.0) ||
      !(armijo > 0.0 && armijo < 0.5))
    throw std::invalid_argument("invalid MAP configuration");
  if (!(backtracking > 0.0 && backtracking < 1.0))
    throw std::invalid_argument("backtracking factor must lie in (0, 1)");
}

void McmcConfig::validate() const {
  if (num_samples == 0 || burn_in == 0 || thin == 0 || adaptation_window == 0)
    throw std::invalid_argument("MCMC counts must be >= 1");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
}

std::vector<double> initial_log_params(ModelKind kind, const Dataset& dataset) {
  const std::size_t n = dataset.catalog_size();
  std::vector<double> clicks(n, 0.0);
  std::vector<double> appearances(n, 0.0);
  double non_clicks = 0.0;
  for (const auto& rec : dataset.records()) {
    non_clicks += static_cast<double>(rec.non_clicks);
    const bool aggregated = rec.clicks.size() == 1;
    for (std::size_t i = 0; i < rec.slate.size(); ++i) {
      const auto a = rec.slate[i];
      appearances[a] += 1.0;
      clicks[a] += aggregated ? static_cast<double>(rec.clicks.front()) /
                                    static_cast<double>(rec.slate.size())
                              : static_cast<double>(rec.clicks[i]);
    }
  }
  std::vector<double> x(parameter_dim(kind, n));
  for (std::size_t i = 0; i < n; ++i) x[i] = std::log1p(clicks[i]) - std::log1p(appearances[i]);
  if (kind != ModelKind::Rank)
    x[n] = std::log1p(non_clicks) - std::log1p(static_cast<double>(dataset.size()));
  return x;
}

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct AscentResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::vector<double> trace;
};

AscentResult ascend(const LogPosteriorObjective& objective, std::vector<double> x,
                    const MapConfig& config) {
  const std::size_t dim = objective.dim();
  // Iterate on y = x - offset with the stiffest coordinate starting at zero;
  // the joint scale lives in offset alone.
  const auto info0 = objective.fisher_diagonal(x);
  double offset = x[std::max_element(info0.begin(), info0.end()) - info0.begin()];
  for (double& v : x) v -= offset;
  offset += objective.optimal_scale_shift(x, offset);

  std::vector<double> grad(dim), next_x(dim), next_grad(dim), dir(dim);
  std::vector<double> prev_x, prev_grad;
  double value = objective.value_and_gradient(x, grad, offset);
  if (!std::isfinite(value)) throw NumericFailure("log-posterior is not finite at the initial point");

  AscentResult out;
  out.trace.push_back(value);
  std::size_t it = 0;
  for (; it < config.max_iterations; ++it) {
    if (inf_norm(grad) <= config.gradient_tolerance) {
      out.converged = true;
      break;
    }
    const auto info = objective.fisher_diagonal(x, offset);
    for (std::size_t i = 0; i < dim; ++i) dir[i] = grad[i] / info[i];
    const double slope = dot(grad, dir);

    double step = config.initial_step;
    if (!prev_x.empty()) {
      double metric = 0.0, curvature = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double s = x[i] - prev_x[i];
        metric += info[i] * s * s;
        curvature -= s * (grad[i] - prev_grad[i]);
      }
      step = curvature > 0.0 ? std::clamp(metric / curvature, 1e-4, 1e4) : 1.0;
    }

    bool accepted = false;
    double next_value = 0.0;
    for (int attempt = 0; attempt < 100; ++attempt, step *= config.backtracking) {
      bool finite = true;
      for (std::size_t i = 0; i < dim; ++i) {
        next_x[i] = x[i] + step * dir[i];
        finite = finite && std::isfinite(next_x[i]);
      }
      if (!finite) continue;
      next_value = objective.value_and_gradient(next_x, next_grad, offset);
      if (!std::isfinite(next_value)) continue;
      if (next_value >= value + config.armijo * step * slope) {
        accepted = true;
        break;
      }
      // Below double resolution of the objective, fall back to the
      // directional derivative (approximate Wolfe condition).
      if (std::abs(next_value - value) <= 1e-10 * std::abs(value) &&
          dot(next_grad, dir) >= -0.8 * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    offset += objective.optimal_scale_shift(next_x, offset);
    next_value = objective.value_and_gradient(next_x, next_grad, offset);

    prev_x = x;
    prev_grad = grad;
    std::swap(x, next_x);
    std::swap(grad, next_grad);
    value = next_value;
    out.trace.push_back(value);
  }
  out.iterations = it;
  out.gradient_norm = inf_norm(grad);
  out.converged = out.converged || out.gradient_norm <= config.gradient_tolerance;
  for (double& v : x) v += offset;
  out.x = std::move(x);
  return out;
}

}  // namespace

MapResult map_estimate(ModelKind kind, const Dataset& dataset, const PriorConfig& prior,
                       const MapConfig& config) {
  config.validate();
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  LogPosteriorObjective objective(kind, dataset, prior);
  auto ascent = ascend(objective, initial_log_params(kind, dataset), config);

  MapResult result;
  result.kind = kind;
  result.params = from_log_params(kind, ascent.x);
  result.log_posterior_value = log_posterior(kind, dataset, result.params, prior);
  result.iterations = ascent.iterations;
  result.converged = ascent.converged;
  result.final_gradient_norm = ascent.gradient_norm;
  result.objective_trace = std::move(ascent.trace);
  return result;
}

PosteriorSamples mcmc_sample(ModelKind kind, const Dataset& dataset, const PriorConfig& prior,
                             const McmcConfig& config, const MapConfig& map_config) {
  config.validate();
  map_config.validate();
  LogPosteriorObjective objective(kind, dataset, prior);
  const std::size_t dim = objective.dim();

  std::vector<double> x = ascend(objective, initial_log_params(kind, dataset), map_config).x;
  double value = objective.value(x);

  // Isotropic proposal sized for the tightest coordinate at the mode.
  const auto info = objective.fisher_diagonal(x);
  const double tightest = 1.0 / std::sqrt(*std::max_element(info.begin(), info.end()));
  double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(dim)) * tightest);

  Rng rng(config.seed);
  std::vector<double> proposal(dim);
  auto step = [&]() {
    const double scale = std::exp(log_scale);
    for (std::size_t i = 0; i < dim; ++i) proposal[i] = x[i] + scale * rng.standard_normal();
    for (double v : proposal) {
      if (!std::isfinite(v)) return false;
    }
    const double proposed = objective.value(proposal);
    if (!std::isfinite(proposed)) return false;
    const double u = rng.uniform();
    if (u > 0.0 && std::log(u) < proposed - value) {
      std::swap(x, proposal);
      value = proposed;
      return true;
    }
    return false;
  };

  std::size_t window_accepts = 0, window_count = 0, windows = 0;
  for (std::size_t it = 0; it < config.burn_in; ++it) {
    window_accepts += step() ? 1 : 0;
    if (++window_count == config.adaptation_window) {
      ++windows;
      const double rate = static_cast<double>(window_accepts) / static_cast<double>(window_count);
      log_scale += (rate - config.target_acceptance) / std::sqrt(static_cast<double>(windows));
      window_accepts = window_count = 0;
    }
  }

  PosteriorSamples out;
  out.kind = kind;
  out.parameter_names = parameter_names(kind, dataset.catalog_size());
  out.dim = dim;
  out.num_samples = config.num_samples;
  out.log_samples.reserve(config.num_samples * dim);
  std::size_t accepts = 0;
  const std::size_t total = config.num_samples * config.thin;
  for (std::size_t it = 1; it <= total; ++it) {
    accepts += step() ? 1 : 0;
    if (it % config.thin == 0) out.log_samples.insert(out.log_samples.end(), x.begin(), x.end());
  }
  out.acceptance_rate = static_cast<double>(accepts) / static_cast<double>(total);
  out.proposal_scale = std::exp(log_scale);
  out.acceptance_warning = out.acceptance_rate < 0.05 || out.acceptance_rate > 0.7;
  return out;
}

}  // namespace slate
