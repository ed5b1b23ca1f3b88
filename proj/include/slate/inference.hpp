#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "slate/model.hpp"

namespace slate {

// Raised when the posterior cannot be evaluated at the starting point.
class NumericFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct MapConfig {
  std::size_t max_iterations = 5000;
  double gradient_tolerance = 1e-8;
  double initial_step = 0.1;
  double backtracking = 0.5;
  double armijo = 1e-4;

  void validate() const;
};

struct MapResult {
  ModelKind kind = ModelKind::Full;
  ModelParams params;
  // log_posterior() at params (theta space).
  double log_posterior_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // Infinity norm of the log-space gradient at params.
  double final_gradient_norm = 0.0;
  // Log-space objective after each accepted step, starting at the initial point.
  std::vector<double> objective_trace;
};

struct McmcConfig {
  std::size_t num_samples = 2000;
  std::size_t burn_in = 2000;
  std::size_t thin = 5;
  double target_acceptance = 0.234;
  std::size_t adaptation_window = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PosteriorSamples {
  ModelKind kind = ModelKind::Full;
  std::vector<std::string> parameter_names;
  // num_samples rows of log-space parameters, row-major.
  std::vector<double> log_samples;
  std::size_t num_samples = 0;
  std::size_t dim = 0;
  double acceptance_rate = 0.0;
  double proposal_scale = 0.0;
  // Post burn-in acceptance outside [0.05, 0.7].
  bool acceptance_warning = false;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(log_samples).subspan(i * dim, dim);
  }
  ModelParams params(std::size_t i) const { return from_log_params(kind, row(i)); }
};

// Data-scaled warm start in log space; also defined for empty datasets.
std::vector<double> initial_log_params(ModelKind kind, const Dataset& dataset);

// Fisher-preconditioned gradient ascent with Barzilai-Borwein trial steps,
// Armijo backtracking and an exact maximisation along the (likelihood-flat)
// joint scale direction after every step. The dataset must be in the view
// matching `kind` and nonempty.
MapResult map_estimate(ModelKind kind, const Dataset& dataset, const PriorConfig& prior,
                       const MapConfig& config = {});

// Random-walk Metropolis in log space with an isotropic Gaussian proposal
// whose scale is adapted during burn-in only. Starts at the MAP point (the
// prior mode when the dataset is empty).
PosteriorSamples mcmc_sample(ModelKind kind, const Dataset& dataset, const PriorConfig& prior,
                             const McmcConfig& config, const MapConfig& map_config = {});

}  // namespace slate
