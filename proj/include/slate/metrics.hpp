#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "slate/model.hpp"

namespace slate {

enum class MetricKind { ClickRank, NonClick };

std::string_view to_string(MetricKind kind);

struct L1Report {
  double value = 0.0;
  std::size_t num_slates = 0;
  MetricKind kind = MetricKind::ClickRank;
};

// Sum over slates of |P_hat(first item | click) - P(first item | click)|.
// With all_positions the absolute differences of every position are summed
// instead (sensitivity option, not the default metric).
L1Report l1_click_rank_error(std::span<const double> theta_hat, std::span<const double> theta_true,
                             std::span<const Slate> slates, bool all_positions = false);

// Sum over slates of |q_hat - q| where q is the non-click probability.
L1Report l1_nonclick_error(const ModelParams& params_hat, const ModelParams& params_true,
                           std::span<const Slate> slates);

}  // namespace slate
