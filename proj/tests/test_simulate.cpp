#include "discdyn/simulate.hpp"

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "discdyn/errors.hpp"

using namespace discdyn;

namespace {

SimulationConfig fopdt_config(double k, double t, double l, double horizon,
                              std::uint64_t seed) {
  SimulationConfig config;
  config.model = FopdtModel{k, t, l, TimeUnit::hour};
  config.horizon = horizon;
  config.seed = seed;
  return config;
}

double elapsed_hours(const DiscussionThread& thread, std::size_t i) {
  return static_cast<double>(thread.posts[i].timestamp -
                             thread.posts.front().timestamp) /
         3600.0;
}

}  // namespace

TEST_CASE("identical seeds reproduce the thread byte for byte") {
  const auto config = fopdt_config(27, 5, 1, 50, 12345);
  const auto a = simulate_thread(config);
  const auto b = simulate_thread(config);
  std::ostringstream csv_a, csv_b;
  write_posts_csv(csv_a, a);
  write_posts_csv(csv_b, b);
  CHECK(csv_a.str() == csv_b.str());

  const auto c = simulate_thread(fopdt_config(27, 5, 1, 50, 54321));
  std::ostringstream csv_c;
  write_posts_csv(csv_c, c);
  CHECK(csv_a.str() != csv_c.str());
}

TEST_CASE("zero gain simulates to the initial post alone") {
  const auto thread = simulate_thread(fopdt_config(0, 5, 1, 50, 9));
  CHECK(thread.posts.size() == 1);
  CHECK(thread.reply_count() == 0);
}

TEST_CASE("no arrival ever lands inside the gap") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto config = fopdt_config(27, 5, 1, 50, seed);
    config.gap = GapInterval{5.0, 10.0};
    const auto thread = simulate_thread(config);
    for (std::size_t i = 1; i < thread.posts.size(); ++i) {
      const double t = elapsed_hours(thread, i);
      const bool inside = t > 5.0 + 1e-3 && t < 10.0 - 1e-3;
      CHECK(!inside);
    }
  }
}

TEST_CASE("mean reply count matches the dead-time-shifted exponential") {
  // CLT check at the characteristic time and the horizon: the mean of N(t)
  // over seeds should approach y(t) within sqrt(var/n) standard errors.
  const double want_mid = 27.0 * (1.0 - std::exp(-1.0));      // t = L + T
  const double want_end = 27.0 * (1.0 - std::exp(-49.0 / 5.0));
  double sum_mid = 0.0, sq_mid = 0.0;
  double sum_end = 0.0, sq_end = 0.0;
  const int n = 600;
  for (int seed = 0; seed < n; ++seed) {
    const auto thread = simulate_thread(fopdt_config(27, 5, 1, 50, seed));
    double mid = 0.0;
    for (std::size_t i = 1; i < thread.posts.size(); ++i) {
      if (elapsed_hours(thread, i) <= 6.0) mid += 1.0;
    }
    const double end = static_cast<double>(thread.reply_count());
    sum_mid += mid;
    sq_mid += mid * mid;
    sum_end += end;
    sq_end += end * end;
  }
  const double mean_mid = sum_mid / n;
  const double se_mid =
      std::sqrt((sq_mid - n * mean_mid * mean_mid) / (n - 1) / n);
  CHECK(std::abs(mean_mid - want_mid) < 3.0 * se_mid);

  const double mean_end = sum_end / n;
  const double se_end =
      std::sqrt((sq_end - n * mean_end * mean_end) / (n - 1) / n);
  CHECK(std::abs(mean_end - want_end) < 3.0 * se_end);
  CHECK(mean_end > 26.0);
  CHECK(mean_end < 28.0);
}

TEST_CASE("logistic intensity produces roughly scale-many replies") {
  SimulationConfig config;
  config.model = LogisticModel{40.0, 0.8, 0.02, TimeUnit::hour};
  config.horizon = 30.0;
  double sum = 0.0;
  const int n = 400;
  for (int seed = 0; seed < n; ++seed) {
    config.seed = static_cast<std::uint64_t>(seed);
    sum += static_cast<double>(simulate_thread(config).reply_count());
  }
  // Expected arrivals = K*(n(horizon) - n(0)) ~ 40*(1 - 0.02).
  const double want = 40.0 * (1.0 - 0.02);
  CHECK(std::abs(sum / n - want) < 1.0);
}

TEST_CASE("timestamps are nondecreasing and second-resolved") {
  const auto thread = simulate_thread(fopdt_config(30, 4, 0.5, 60, 77));
  for (std::size_t i = 1; i < thread.posts.size(); ++i) {
    CHECK(thread.posts[i].timestamp >= thread.posts[i - 1].timestamp);
  }
  CHECK(thread.posts.front().timestamp == 1311355380);
}

TEST_CASE("sampled response grids hit the documented point count") {
  const FopdtModel m{27, 5, 1, TimeUnit::hour};
  const auto series = sample_response(m, 0.01, 60.0);
  CHECK(series.points.size() == 6001);
  CHECK(series.points.back().t == doctest::Approx(60.0));
  CHECK(series.points.back().y == doctest::Approx(27.0).epsilon(1e-3));
  CHECK(series.final_count == doctest::Approx(27.0).epsilon(1e-3));
  CHECK(series.complete);

  // Horizon shorter than the dead time: nothing ever arrives.
  const auto silent = sample_response(FopdtModel{27, 5, 10, TimeUnit::hour},
                                      0.5, 5.0);
  for (const auto& p : silent.points) CHECK(p.y == 0.0);

  const auto logistic = sample_response(
      LogisticModel{1.0, 1.0, 0.1, TimeUnit::hour}, 0.1, 20.0);
  CHECK(logistic.points.back().y == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("simulated CSV round-trips through the parser") {
  const auto thread = simulate_thread(fopdt_config(25, 3, 1, 40, 31));
  std::ostringstream csv;
  write_posts_csv(csv, thread);
  std::istringstream in(csv.str());
  const auto parsed = parse_posts(in, PostFormat::csv);
  CHECK(parsed.skipped == 0);
  REQUIRE(parsed.records.size() == thread.posts.size());
  for (std::size_t i = 0; i < parsed.records.size(); ++i) {
    CHECK(parsed.records[i].timestamp == thread.posts[i].timestamp);
    CHECK(parsed.records[i].thread_id == thread.thread_id);
  }
}

TEST_CASE("configuration validation") {
  auto config = fopdt_config(27, 5, 1, 0, 1);
  CHECK_THROWS_AS(validate(config), Error);
  config.horizon = 50;
  config.gap = GapInterval{10, 5};
  CHECK_THROWS_AS(validate(config), Error);
  config.gap = GapInterval{5, 60};
  CHECK_THROWS_AS(validate(config), Error);
  config.gap = GapInterval{5, 10};
  CHECK_NOTHROW(validate(config));
}
