#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "slate/data_gen.hpp"
#include "slate/metrics.hpp"

using namespace slate;
using doctest::Approx;

namespace {

std::vector<double> random_theta(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> t(n);
  for (auto& v : t) v = std::exp(u(gen));
  return t;
}

std::vector<double> scaled(std::vector<double> v, double c) {
  for (auto& x : v) x *= c;
  return v;
}

// first-position share, written out directly
double direct_click_rank(const std::vector<double>& a, const std::vector<double>& b, const std::vector<Slate>& slates) {
  double total = 0.0;
  for (const auto& s : slates) {
    double sa = 0.0, sb = 0.0;
    for (auto i : s) {
      sa += a[i];
      sb += b[i];
    }
    total += std::abs(a[s[0]] / sa - b[s[0]] / sb);
  }
  return total;
}

}  // namespace

TEST_SUITE("click rank error") {
  TEST_CASE("examples") {
    const std::vector<Slate> one{Slate({0, 1})};
    const std::vector<double> truth{1, 1}, est{1, 3};
    CHECK(l1_click_rank_error(est, truth, one).value == Approx(0.25).epsilon(1e-15));
    CHECK(l1_click_rank_error(truth, truth, one).value == 0.0);
    const auto slates = enumerate_slates(6, 3);
    const auto theta = make_true_params(6).theta;
    CHECK(l1_click_rank_error(scaled(theta, 2.0), theta, slates).value == Approx(0.0).epsilon(1e-14));
    const auto r = l1_click_rank_error(est, truth, one);
    CHECK(r.num_slates == 1);
    CHECK(r.kind == MetricKind::ClickRank);
  }

  TEST_CASE("all-position variant sums every position") {
    const std::vector<Slate> one{Slate({0, 1})};
    const std::vector<double> truth{1, 1}, est{1, 3};
    CHECK(l1_click_rank_error(est, truth, one, true).value == Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("properties on random inputs") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 3 + gen() % 8;
      const std::size_t k = 2 + gen() % (n - 2);
      auto slates = enumerate_slates(n, k);
      const auto a = random_theta(gen, n), b = random_theta(gen, n), c = random_theta(gen, n);
      const double ab = l1_click_rank_error(a, b, slates).value;
      CHECK(ab == Approx(direct_click_rank(a, b, slates)).epsilon(1e-12));
      CHECK(ab >= 0.0);
      CHECK(ab <= static_cast<double>(slates.size()));
      CHECK(ab == Approx(l1_click_rank_error(b, a, slates).value).epsilon(1e-12));
      const double ac = l1_click_rank_error(a, c, slates).value;
      const double cb = l1_click_rank_error(c, b, slates).value;
      CHECK(ab <= ac + cb + 1e-12);
      CHECK(l1_click_rank_error(scaled(a, 7.5), b, slates).value == Approx(ab).epsilon(1e-12));
      CHECK(l1_click_rank_error(a, scaled(b, 0.01), slates).value == Approx(ab).epsilon(1e-12));
      std::shuffle(slates.begin(), slates.end(), gen);
      CHECK(l1_click_rank_error(a, b, slates).value == Approx(ab).epsilon(1e-12));
    }
  }

  TEST_CASE("dimension mismatch") {
    const std::vector<Slate> one{Slate({0, 1})};
    const std::vector<double> a{1, 2}, b{1, 2, 3};
    CHECK_THROWS_AS(l1_click_rank_error(a, b, one), std::invalid_argument);
    const std::vector<Slate> outside{Slate({0, 3})};
    CHECK_THROWS_AS(l1_click_rank_error(b, b, outside), std::invalid_argument);
  }
}

TEST_SUITE("non-click error") {
  TEST_CASE("examples") {
    const std::vector<Slate> one{Slate({0, 1})};
    const ModelParams truth{{1, 6}, 100.0};
    CHECK(l1_nonclick_error(truth, truth, one).value == 0.0);
    CHECK(l1_nonclick_error(ModelParams{{2, 12}, 200.0}, truth, one).value == Approx(0.0).epsilon(1e-15));
    CHECK(l1_nonclick_error(ModelParams{{6, 1}, 100.0}, truth, one).value == Approx(0.0).epsilon(1e-15));
    CHECK(l1_nonclick_error(ModelParams{{1, 6}, 7.0}, truth, one).value ==
          Approx(100.0 / 107 - 0.5).epsilon(1e-14));
    CHECK(l1_nonclick_error(truth, truth, one).kind == MetricKind::NonClick);
  }

  TEST_CASE("properties on random inputs") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(1.0, 6.0);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 3 + gen() % 8;
      auto slates = enumerate_slates(n, 2);
      const ModelParams a{random_theta(gen, n), std::exp(u(gen))};
      const ModelParams b{random_theta(gen, n), std::exp(u(gen))};
      const ModelParams c{random_theta(gen, n), std::exp(u(gen))};
      const double ab = l1_nonclick_error(a, b, slates).value;
      CHECK(ab >= 0.0);
      CHECK(ab <= static_cast<double>(slates.size()));
      CHECK(ab <= l1_nonclick_error(a, c, slates).value + l1_nonclick_error(c, b, slates).value + 1e-12);
      const ModelParams a2{scaled(a.theta, 3.0), *a.phi * 3.0};
      CHECK(l1_nonclick_error(a2, b, slates).value == Approx(ab).epsilon(1e-12));
      std::reverse(slates.begin(), slates.end());
      CHECK(l1_nonclick_error(a, b, slates).value == Approx(ab).epsilon(1e-12));
    }
  }

  TEST_CASE("missing phi") {
    const std::vector<Slate> one{Slate({0, 1})};
    CHECK_THROWS_AS(l1_nonclick_error(ModelParams{{1, 2}, std::nullopt}, ModelParams{{1, 2}, 3.0}, one),
                    std::invalid_argument);
  }
}
