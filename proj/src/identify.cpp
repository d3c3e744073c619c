#include "discdyn/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "discdyn/errors.hpp"
#include "discdyn/golden_section.hpp"

namespace discdyn {

namespace {

// Crossing fractions for the two-point method. The upper one is exactly
// 1 - 1/e so that t2 = L + T on the ideal response.
constexpr double kLowerFraction = 0.283;
const double kUpperFraction = 1.0 - std::exp(-1.0);

void require_enough_replies(const StepResponseSeries& series) {
  if (series.final_count < 3.0) {
    raise(Errc::insufficient_data,
          "identification needs at least 3 replies");
  }
}

/// First time the linearly interpolated staircase reaches `level`.
/// Vertically stacked points (duplicate timestamps) cross at their shared
/// instant. Returns NaN when the series never reaches the level.
double crossing_time(const StepResponseSeries& series, double level) {
  if (level <= 0.0) return 0.0;
  const auto& pts = series.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].y >= level) {
      if (i == 0) return pts[0].t;
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      if (b.t <= a.t || b.y <= a.y) return b.t;
      return a.t + (level - a.y) * (b.t - a.t) / (b.y - a.y);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Rectangle-sum integral of the staircase over [0, upto]: each point holds
/// its y until the next point (or the end of the range).
double staircase_integral(const StepResponseSeries& series, double upto) {
  const auto& pts = series.points;
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double seg_start = std::min(pts[i].t, upto);
    const double seg_end =
        i + 1 < pts.size() ? std::min(pts[i + 1].t, upto) : upto;
    if (seg_end > seg_start) total += pts[i].y * (seg_end - seg_start);
  }
  return total;
}

/// The points a fit is scored on: every observation plus the terminal
/// (observed_until, final_count) anchor when the window extends past the
/// last reply.
std::vector<SeriesPoint> fit_points(const StepResponseSeries& series) {
  std::vector<SeriesPoint> pts = series.points;
  if (!pts.empty() && series.observed_until > pts.back().t) {
    pts.push_back({series.observed_until, series.final_count});
  }
  return pts;
}

template <class Response>
void finish_report(FitReport& report, const std::vector<SeriesPoint>& pts,
                   Response&& fitted) {
  report.residuals.clear();
  report.residuals.reserve(pts.size());
  double sum_sq = 0.0;
  for (const auto& p : pts) {
    const double r = p.y - fitted(p.t);
    report.residuals.push_back({p.t, r});
    sum_sq += r * r;
  }
  report.rmse = pts.empty() ? 0.0 : std::sqrt(sum_sq / pts.size());
}

void finish_fopdt_report(FitReport& report, const StepResponseSeries& series,
                         const FopdtModel& model) {
  report.model = model;
  finish_report(report, fit_points(series),
                [&](double t) { return fopdt_step_response(model, t); });
}

}  // namespace

const char* fit_method_name(FitMethod method) {
  switch (method) {
    case FitMethod::two_point: return "two_point";
    case FitMethod::area: return "area";
    case FitMethod::least_squares: return "least_squares";
    case FitMethod::logistic: return "logistic";
  }
  return "unknown";
}

double estimate_gain(const StepResponseSeries& series) {
  if (!series.complete) {
    raise(Errc::requires_steady_state,
          "gain reading needs a series that reached steady state; "
          "use least_squares_fit with fitted gain instead");
  }
  return series.final_count;
}

FitReport two_point_fit(const StepResponseSeries& series) {
  const double gain = estimate_gain(series);
  require_enough_replies(series);

  const double t1 = crossing_time(series, kLowerFraction * gain);
  const double t2 = crossing_time(series, kUpperFraction * gain);
  if (!std::isfinite(t1) || !std::isfinite(t2)) {
    raise(Errc::numerical_failure, "response never reaches a crossing level");
  }
  if (t2 <= t1) {
    raise(Errc::degenerate_crossing,
          "the 28.3% and 63.2% crossings collapse onto one instant");
  }

  FopdtModel model;
  model.time_unit = series.time_unit;
  model.gain = gain;
  model.time_constant =
      (t2 - t1) / std::log((1.0 - kLowerFraction) / (1.0 - kUpperFraction));
  model.dead_time = std::max(0.0, t2 - model.time_constant);
  validate(model);

  FitReport report;
  report.method = FitMethod::two_point;
  report.gain_source = GainSource::steady_state_reading;
  finish_fopdt_report(report, series, model);
  return report;
}

FitReport area_fit(const StepResponseSeries& series) {
  const double gain = estimate_gain(series);
  require_enough_replies(series);

  const double t_end = series.observed_until;
  // Area above the response: K*t_end minus the area under the staircase.
  // Beyond steady state the integrand is zero, so truncation at t_end is
  // exact for complete series.
  const double area_above = gain * t_end - staircase_integral(series, t_end);
  const double residence_time = area_above / gain;
  const double area_below = staircase_integral(series, residence_time);

  FopdtModel model;
  model.time_unit = series.time_unit;
  model.gain = gain;
  model.time_constant = std::exp(1.0) * area_below / gain;
  if (!(model.time_constant > 0.0) || !std::isfinite(model.time_constant)) {
    raise(Errc::numerical_failure, "area method produced a degenerate T");
  }
  model.dead_time = std::max(0.0, residence_time - model.time_constant);
  validate(model);

  FitReport report;
  report.method = FitMethod::area;
  report.gain_source = GainSource::steady_state_reading;
  finish_fopdt_report(report, series, model);
  return report;
}

namespace {

/// Sufficient statistics of the FOPDT least-squares objective at one (T, L).
/// With g(t) = 1 - exp(-(t-L)/T) on t > L, the residual sum for gain K is
///   SSE = sum(y^2) - 2K*sum(y*g) + K^2*sum(g^2),
/// and the best closed-form gain is sum(y*g)/sum(g^2).
struct LsObjective {
  const std::vector<SeriesPoint>& pts;
  double sum_y_sq;
  bool fit_gain;
  double fixed_gain;

  struct Eval {
    double sse;
    double gain;
  };

  Eval operator()(double time_constant, double dead_time) const {
    double sum_gg = 0.0;
    double sum_gy = 0.0;
    for (const auto& p : pts) {
      if (p.t <= dead_time) continue;
      const double g = -std::expm1(-(p.t - dead_time) / time_constant);
      sum_gg += g * g;
      sum_gy += g * p.y;
    }
    double gain = fixed_gain;
    if (fit_gain) gain = sum_gg > 0.0 ? sum_gy / sum_gg : 0.0;
    const double sse = sum_y_sq - 2.0 * gain * sum_gy + gain * gain * sum_gg;
    return {std::max(sse, 0.0), gain};
  }
};

}  // namespace

FitReport least_squares_fit(const StepResponseSeries& series, bool fit_gain) {
  require_enough_replies(series);
  if (!fit_gain && !series.complete) {
    raise(Errc::requires_steady_state,
          "fixed-gain least squares needs a complete series");
  }

  const std::vector<SeriesPoint> pts = fit_points(series);
  const double t_end = pts.back().t;
  if (!(t_end > 0.0)) {
    raise(Errc::insufficient_data, "series spans no time");
  }

  double sum_y_sq = 0.0;
  for (const auto& p : pts) sum_y_sq += p.y * p.y;
  const LsObjective objective{pts, sum_y_sq, fit_gain, series.final_count};

  const double t_lo = 1e-3;
  const double t_hi = 10.0 * t_end;
  const double t_tol = 1e-10 * t_hi;

  // Best T (inner golden-section) for a candidate dead time.
  auto best_for_dead_time = [&](double dead_time) {
    auto result = golden_section_minimize(
        [&](double T) { return objective(T, dead_time).sse; }, t_lo, t_hi,
        t_tol);
    return result;  // argmin = T, value = sse
  };

  const double grid_step = t_end / 1000.0;
  double best_l = 0.0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000; ++i) {
    const double l = grid_step * i;
    const double sse = best_for_dead_time(l).value;
    if (sse < best_sse) {
      best_sse = sse;
      best_l = l;
    }
  }

  const double refine_lo = std::max(0.0, best_l - grid_step);
  const double refine_hi = std::min(t_end, best_l + grid_step);
  auto refined = golden_section_minimize(
      [&](double l) { return best_for_dead_time(l).value; }, refine_lo,
      refine_hi, 1e-10 * t_end);
  if (refined.value > best_sse) refined = {best_l, best_sse};

  const double dead_time = refined.argmin;
  const auto inner = best_for_dead_time(dead_time);
  const auto eval = objective(inner.argmin, dead_time);
  if (!std::isfinite(eval.sse) || !std::isfinite(eval.gain)) {
    raise(Errc::numerical_failure, "least-squares objective is not finite");
  }

  FopdtModel model;
  model.time_unit = series.time_unit;
  model.gain = std::max(0.0, eval.gain);
  model.time_constant = inner.argmin;
  model.dead_time = dead_time;
  validate(model);

  FitReport report;
  report.method = FitMethod::least_squares;
  report.gain_source =
      fit_gain ? GainSource::fitted : GainSource::steady_state_reading;
  finish_fopdt_report(report, series, model);
  return report;
}

FitReport logistic_fit(const StepResponseSeries& series) {
  const double gain = estimate_gain(series);
  require_enough_replies(series);

  const std::vector<SeriesPoint> pts = fit_points(series);
  const double eps = 1.0 / (2.0 * gain);

  std::size_t clamped = 0;
  std::vector<SeriesPoint> logits;
  logits.reserve(pts.size());
  for (const auto& p : pts) {
    double n = p.y / gain;
    if (n <= eps) {
      n = eps;
      ++clamped;
    } else if (n >= 1.0 - eps) {
      n = 1.0 - eps;
      ++clamped;
    }
    logits.push_back({p.t, logit(n)});
  }
  if (clamped == logits.size()) {
    raise(Errc::degenerate_normalization,
          "every normalized point hit the clamp bounds");
  }

  // Ordinary least squares of logit(n) on t.
  double mean_t = 0.0;
  double mean_z = 0.0;
  for (const auto& p : logits) {
    mean_t += p.t;
    mean_z += p.y;
  }
  mean_t /= logits.size();
  mean_z /= logits.size();
  double s_tt = 0.0;
  double s_tz = 0.0;
  for (const auto& p : logits) {
    s_tt += (p.t - mean_t) * (p.t - mean_t);
    s_tz += (p.t - mean_t) * (p.y - mean_z);
  }
  const double slope = s_tt > 0.0 ? s_tz / s_tt : 0.0;
  const double intercept = mean_z - slope * mean_t;
  if (!std::isfinite(slope) || !std::isfinite(intercept)) {
    raise(Errc::numerical_failure, "logit regression is not finite");
  }

  LogisticModel model;
  model.time_unit = series.time_unit;
  model.scale = gain;
  model.rate = slope;
  model.initial_fraction = sigmoid(intercept);
  validate(model);

  FitReport report;
  report.method = FitMethod::logistic;
  report.gain_source = GainSource::steady_state_reading;
  report.model = model;
  finish_report(report, pts,
                [&](double t) { return logistic_value(model, t); });
  return report;
}

double characteristic_time(const FopdtModel& model) {
  validate(model);
  return model.dead_time + model.time_constant;
}

Prediction predict_count_at(const FopdtModel& model, double t) {
  validate(model);
  const double expected = fopdt_step_response(model, t);
  return {expected, std::llround(expected)};
}

nlohmann::json to_json(const FitReport& report, int decimals) {
  nlohmann::json out;
  out["method"] = fit_method_name(report.method);
  out["rmse"] = report.rmse;
  if (const auto* fopdt = std::get_if<FopdtModel>(&report.model)) {
    out["K"] = fopdt->gain;
    out["T"] = fopdt->time_constant;
    out["L"] = fopdt->dead_time;
    out["time_unit"] = time_unit_name(fopdt->time_unit);
    out["transfer_function"] = format_transfer_function(*fopdt, decimals).text;
  } else {
    const auto& logistic = std::get<LogisticModel>(report.model);
    out["K"] = logistic.scale;
    out["b"] = logistic.rate;
    out["n0"] = logistic.initial_fraction;
    out["time_unit"] = time_unit_name(logistic.time_unit);
  }
  return out;
}

}  // namespace discdyn
