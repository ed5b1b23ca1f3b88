#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "slate/data_gen.hpp"
#include "slate/objective.hpp"

using namespace slate;
using doctest::Approx;

namespace {

DatasetView random_view(std::mt19937_64& gen) {
  switch (gen() % 3) {
    case 0: return DatasetView::Raw;
    case 1: return DatasetView::Reward;
    default: return DatasetView::Rank;
  }
}

ModelKind kind_for(DatasetView view) {
  switch (view) {
    case DatasetView::Raw: return ModelKind::Full;
    case DatasetView::Reward: return ModelKind::Reward;
    case DatasetView::Rank: return ModelKind::Rank;
  }
  return ModelKind::Full;
}

void check_gradient(const LogPosteriorObjective& obj, const std::vector<double>& x) {
  std::vector<double> grad(obj.dim());
  obj.value_and_gradient(x, grad);
  const auto fd = oracle::central_difference([&](const std::vector<double>& y) { return obj.value(y); }, x, 1e-6);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(grad[i] - fd[i]) <= 1e-5 * std::max(std::abs(fd[i]), 1.0));
  }
}

}  // namespace

TEST_CASE("objective value matches the direct log-space density") {
  std::mt19937_64 gen(21);
  const PriorConfig prior{1.5, 0.01, 2.0, 0.002};
  for (int trial = 0; trial < 150; ++trial) {
    const auto view = random_view(gen);
    const auto kind = kind_for(view);
    const auto data = oracle::random_dataset(gen, view);
    const LogPosteriorObjective obj(kind, data, prior);
    const auto x = oracle::random_log_params(gen, obj.dim());
    const double expected = oracle::log_space_posterior(kind, data, x, prior);
    CHECK(obj.value(x) == Approx(expected).epsilon(1e-11));
    std::vector<double> grad(obj.dim());
    CHECK(obj.value_and_gradient(x, grad) == Approx(expected).epsilon(1e-11));
    CHECK(log_posterior_log_space(kind, data, x, prior) == Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("log-space value equals theta-space posterior plus the log Jacobian") {
  const auto data = oracle::table1();
  const PriorConfig prior;
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_log_params(gen, 4);
    const auto p = from_log_params(ModelKind::Full, x);
    const double jac = x[0] + x[1] + x[2] + x[3];
    CHECK(log_posterior_log_space(ModelKind::Full, data, x, prior) ==
          Approx(log_posterior(ModelKind::Full, data, p, prior) + jac).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradient agrees with central differences on random triples") {
  std::mt19937_64 gen(99);
  const PriorConfig prior{1.0, 0.001, 1.0, 0.001};
  for (int trial = 0; trial < 150; ++trial) {
    const auto view = random_view(gen);
    const auto data = oracle::random_dataset(gen, view);
    const LogPosteriorObjective obj(kind_for(view), data, prior);
    check_gradient(obj, oracle::random_log_params(gen, obj.dim()));
  }
}

TEST_CASE("gradient on Table 1 at random parameters") {
  const auto raw = oracle::table1();
  std::mt19937_64 gen(8);
  for (auto kind : {ModelKind::Full, ModelKind::Reward, ModelKind::Rank}) {
    const auto data = to_view(raw, kind);
    const LogPosteriorObjective obj(kind, data, PriorConfig{});
    for (int trial = 0; trial < 10; ++trial) {
      auto x = oracle::random_log_params(gen, obj.dim());
      if (kind != ModelKind::Rank) x.back() += 3.0;
      check_gradient(obj, x);
      std::vector<double> grad(obj.dim());
      obj.value_and_gradient(x, grad);
      const auto free_grad = grad_log_posterior(kind, data, x, PriorConfig{});
      for (std::size_t i = 0; i < grad.size(); ++i) CHECK(free_grad[i] == grad[i]);
    }
  }
}

TEST_CASE("non-click-only data pushes phi up and theta down") {
  const Dataset data(2, 2, DatasetView::Raw, {{Slate({0, 1}), 1000, {0, 0}}});
  const LogPosteriorObjective obj(ModelKind::Full, data, PriorConfig{});
  const std::vector<double> x{0.0, 0.0, 0.0};
  std::vector<double> grad(3);
  obj.value_and_gradient(x, grad);
  CHECK(grad[2] > 0.0);
  CHECK(grad[0] < 0.0);
  CHECK(grad[1] < 0.0);
}

TEST_CASE("scale shift maximizes along the all-ones direction") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto view = random_view(gen);
    const auto data = oracle::random_dataset(gen, view);
    const LogPosteriorObjective obj(kind_for(view), data, PriorConfig{2.0, 0.01, 3.0, 0.005});
    auto x = oracle::random_log_params(gen, obj.dim());
    const double before = obj.value(x);
    const double t = obj.optimal_scale_shift(x);
    for (auto& v : x) v += t;
    std::vector<double> grad(obj.dim());
    const double after = obj.value_and_gradient(x, grad);
    CHECK(after >= before - 1e-9 * std::abs(before));
    double directional = 0.0, scale = 0.0;
    for (double g : grad) {
      directional += g;
      scale += std::abs(g);
    }
    CHECK(std::abs(directional) <= 1e-8 * std::max(scale, 1.0));
  }
}

TEST_CASE("bad inputs are rejected") {
  const auto data = oracle::table1();
  const LogPosteriorObjective obj(ModelKind::Full, data, PriorConfig{});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(obj.value(std::vector<double>{0.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(obj.value(std::vector<double>{0.0, nan, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(obj.value(std::vector<double>{0.0, 0.0, inf, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(LogPosteriorObjective(ModelKind::Rank, data, PriorConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(LogPosteriorObjective(ModelKind::Full, data, PriorConfig{-1.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK(obj.dim() == 4);
}

TEST_CASE("fisher diagonal is positive") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto view = random_view(gen);
    const auto data = oracle::random_dataset(gen, view);
    const LogPosteriorObjective obj(kind_for(view), data, PriorConfig{});
    for (double f : obj.fisher_diagonal(oracle::random_log_params(gen, obj.dim()))) CHECK(f > 0.0);
  }
}

TEST_CASE("evaluation with a common offset matches the shifted point") {
  std::mt19937_64 gen(23);
  const PriorConfig prior{1.5, 0.01, 2.0, 0.002};
  for (int trial = 0; trial < 50; ++trial) {
    const auto view = random_view(gen);
    const auto data = oracle::random_dataset(gen, view);
    const LogPosteriorObjective obj(kind_for(view), data, prior);
    const auto y = oracle::random_log_params(gen, obj.dim());
    const double offset = std::uniform_real_distribution<double>(-4.0, 4.0)(gen);
    auto x = y;
    for (auto& v : x) v += offset;
    std::vector<double> gy(obj.dim()), gx(obj.dim());
    CHECK(obj.value_and_gradient(y, gy, offset) == Approx(obj.value_and_gradient(x, gx)).epsilon(1e-12));
    for (std::size_t i = 0; i < gy.size(); ++i) CHECK(gy[i] == Approx(gx[i]).epsilon(1e-9).scale(1.0));
    const auto fy = obj.fisher_diagonal(y, offset), fx = obj.fisher_diagonal(x);
    for (std::size_t i = 0; i < fy.size(); ++i) CHECK(fy[i] == Approx(fx[i]).epsilon(1e-9));
    CHECK(obj.optimal_scale_shift(y, offset) == Approx(obj.optimal_scale_shift(x)).epsilon(1e-12).scale(1.0));
  }
}
