#pragma once

#include <span>
#include <vector>

#include "slate/model.hpp"

namespace slate {

// Log-space posterior density of one model on one dataset view, evaluated
// with log-sum-exp so that no intermediate score is ever exponentiated on
// its own. The dataset must outlive the objective.
class LogPosteriorObjective {
public:
  LogPosteriorObjective(ModelKind kind, const Dataset& dataset, PriorConfig prior);

  ModelKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const Dataset& dataset() const { return *dataset_; }
  const PriorConfig& prior() const { return prior_; }

  // Every evaluation below is at log_params + offset * 1. The likelihood is
  // shift invariant and only sees log_params, so a large common offset costs
  // no resolution in the coordinates the optimizer moves.
  double value(std::span<const double> log_params, double offset = 0.0) const;

  // Writes the gradient into `grad` (size dim()) and returns the value.
  double value_and_gradient(std::span<const double> log_params, std::span<double> grad,
                            double offset = 0.0) const;

  // Expected Fisher information of the likelihood plus the prior curvature,
  // diagonal only. Strictly positive.
  std::vector<double> fisher_diagonal(std::span<const double> log_params, double offset = 0.0) const;

  // Shift t maximising value(x + t * 1). The likelihood is invariant along the
  // all-ones direction, so t only depends on the prior and has a closed form.
  double optimal_scale_shift(std::span<const double> log_params, double offset = 0.0) const;

private:
  void check(std::span<const double> log_params, double offset) const;
  double shape(std::size_t i) const;
  double rate(std::size_t i) const;

  ModelKind kind_;
  const Dataset* dataset_;
  std::vector<const SlateRecord*> ordered_;
  PriorConfig prior_;
  std::size_t dim_;
  double log_coefficients_ = 0.0;  // sum of log multinomial coefficients
  double prior_constant_ = 0.0;
};

}  // namespace slate
