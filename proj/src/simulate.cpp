#include "discdyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "discdyn/errors.hpp"
#include "discdyn/random.hpp"

namespace discdyn {

namespace {

double intensity_at(const SimulationConfig& config, double t) {
  if (const auto* fopdt = std::get_if<FopdtModel>(&config.model)) {
    return fopdt_rate(*fopdt, t);
  }
  return std::max(0.0, logistic_rate(std::get<LogisticModel>(config.model), t));
}

double majorant_rate(const SimulationConfig& config) {
  if (const auto* fopdt = std::get_if<FopdtModel>(&config.model)) {
    return fopdt->gain / fopdt->time_constant;
  }
  const auto& logistic = std::get<LogisticModel>(config.model);
  return std::max(0.0, logistic.scale * logistic.rate / 4.0);
}

bool inside_gap(const SimulationConfig& config, double t) {
  return config.gap && t > config.gap->start && t < config.gap->end;
}

double seconds_per_unit(const SimulationConfig& config) {
  if (const auto* fopdt = std::get_if<FopdtModel>(&config.model)) {
    return seconds_per(fopdt->time_unit);
  }
  return seconds_per(std::get<LogisticModel>(config.model).time_unit);
}

StepResponseSeries sample_grid(double grid_step, double horizon,
                               TimeUnit unit,
                               const std::function<double(double)>& response) {
  if (!(grid_step > 0.0) || !(grid_step <= horizon)) {
    raise(Errc::invalid_argument, "grid step must lie in (0, horizon]");
  }

  StepResponseSeries series;
  series.time_unit = unit;
  const double slack = 1e-9 * horizon;
  for (std::int64_t i = 0;; ++i) {
    const double t = grid_step * static_cast<double>(i);
    if (t >= horizon - slack) break;
    series.points.push_back({t, response(t)});
  }
  series.points.push_back({horizon, response(horizon)});
  series.final_count = response(horizon);
  series.observed_until = horizon;
  series.complete = true;
  return series;
}

}  // namespace

void validate(const SimulationConfig& config) {
  if (const auto* fopdt = std::get_if<FopdtModel>(&config.model)) {
    validate(*fopdt);
  } else {
    validate(std::get<LogisticModel>(config.model));
  }
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    raise(Errc::invalid_argument, "simulation horizon must be > 0");
  }
  if (config.gap) {
    if (!(config.gap->start < config.gap->end) || config.gap->start < 0.0 ||
        config.gap->end > config.horizon) {
      raise(Errc::invalid_argument,
            "gap must be a nonempty interval inside [0, horizon]");
    }
  }
  if (config.thread_id.empty()) {
    raise(Errc::invalid_argument, "thread_id must be non-empty");
  }
}

DiscussionThread simulate_thread(const SimulationConfig& config) {
  validate(config);

  DiscussionThread thread;
  thread.thread_id = config.thread_id;
  thread.posts.push_back({config.thread_id, config.start_epoch, std::nullopt});

  const double lambda_max = majorant_rate(config);
  if (lambda_max <= 0.0) return thread;

  const double sec_per_unit = seconds_per_unit(config);
  SeededRng rng(config.seed);
  double t = 0.0;
  while (true) {
    t += rng.next_exponential(lambda_max);
    if (t > config.horizon) break;
    const double accept = rng.next_uniform() * lambda_max;
    if (inside_gap(config, t)) continue;
    if (accept < intensity_at(config, t)) {
      const std::int64_t ts =
          config.start_epoch + std::llround(t * sec_per_unit);
      thread.posts.push_back({config.thread_id, ts, std::nullopt});
    }
  }
  return thread;
}

StepResponseSeries sample_response(const FopdtModel& model, double grid_step,
                                   double horizon) {
  validate(model);
  return sample_grid(grid_step, horizon, model.time_unit,
                     [&](double t) { return fopdt_step_response(model, t); });
}

StepResponseSeries sample_response(const LogisticModel& model,
                                   double grid_step, double horizon) {
  validate(model);
  return sample_grid(grid_step, horizon, model.time_unit,
                     [&](double t) { return logistic_value(model, t); });
}

void write_posts_csv(std::ostream& out, const DiscussionThread& thread) {
  out << "thread_id,timestamp\n";
  for (const auto& post : thread.posts) {
    out << post.thread_id << ',' << format_timestamp_utc(post.timestamp)
        << '\n';
  }
}

}  // namespace discdyn
