#include "slate/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace slate {

std::string_view to_string(MetricKind kind) {
  return kind == MetricKind::ClickRank ? "click_rank" : "non_click";
}

L1Report l1_click_rank_error(std::span<const double> theta_hat, std::span<const double> theta_true,
                             std::span<const Slate> slates, bool all_positions) {
  if (theta_hat.size() != theta_true.size())
    throw std::invalid_argument("estimated and true theta differ in length");
  L1Report report{0.0, slates.size(), MetricKind::ClickRank};
  for (const auto& slate : slates) {
    slate.check_catalog(theta_true.size());
    double sum_hat = 0.0, sum_true = 0.0;
    for (auto a : slate) {
      sum_hat += theta_hat[a];
      sum_true += theta_true[a];
    }
    const std::size_t positions = all_positions ? slate.size() : 1;
    for (std::size_t i = 0; i < positions; ++i)
      report.value += std::abs(theta_hat[slate[i]] / sum_hat - theta_true[slate[i]] / sum_true);
  }
  return report;
}

L1Report l1_nonclick_error(const ModelParams& params_hat, const ModelParams& params_true,
                           std::span<const Slate> slates) {
  if (!params_hat.phi || !params_true.phi)
    throw std::invalid_argument("non-click error needs phi on both parameter sets");
  if (params_hat.theta.size() != params_true.theta.size())
    throw std::invalid_argument("estimated and true theta differ in length");
  L1Report report{0.0, slates.size(), MetricKind::NonClick};
  for (const auto& slate : slates) {
    slate.check_catalog(params_true.theta.size());
    double sum_hat = *params_hat.phi, sum_true = *params_true.phi;
    for (auto a : slate) {
      sum_hat += params_hat.theta[a];
      sum_true += params_true.theta[a];
    }
    report.value += std::abs(*params_hat.phi / sum_hat - *params_true.phi / sum_true);
  }
  return report;
}

}  // namespace slate
