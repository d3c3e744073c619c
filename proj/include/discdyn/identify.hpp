#pragma once

#include <variant>
#include <vector>

#include <json.hpp>

#include "discdyn/ingest.hpp"
#include "discdyn/response_models.hpp"

namespace discdyn {

enum class FitMethod { two_point, area, least_squares, logistic };
enum class GainSource { steady_state_reading, fitted };

const char* fit_method_name(FitMethod method);

/// Outcome of one identification run: the model, how its gain was obtained,
/// and residual diagnostics over the points the fit saw.
struct FitReport {
  FitMethod method = FitMethod::two_point;
  std::variant<FopdtModel, LogisticModel> model;
  GainSource gain_source = GainSource::steady_state_reading;
  double rmse = 0.0;
  std::vector<SeriesPoint> residuals;  ///< (t, observed - fitted)
};

/// Steady-state gain reading: the final reply count. Requires a complete
/// series (Errc::requires_steady_state otherwise).
double estimate_gain(const StepResponseSeries& series);

/// Two-point identification. Finds the first crossings of 28.3% and 63.2%
/// of the gain on the linearly interpolated staircase and inverts the
/// exponential response through them. The upper level is exactly 1 - 1/e,
/// which makes L = t2 - T an identity on noiseless data.
FitReport two_point_fit(const StepResponseSeries& series);

/// Area identification. A0 = integral of (K - y) over the observation
/// window gives the average residence time A0/K = L + T; the area under y
/// up to that instant recovers T = e*A1/K. Staircase integrals are exact
/// rectangle sums.
FitReport area_fit(const StepResponseSeries& series);

/// Least-squares identification against K(1 - exp(-(t-L)/T)).
///
/// L is searched on a 1000-step grid over [0, t_end] refined by
/// golden-section; for each L, T by golden-section on [1e-3, 10*t_end];
/// K is the final count when fit_gain is false, otherwise the closed-form
/// linear least-squares gain given (T, L). Works on incomplete series when
/// fit_gain is true. Deterministic for fixed inputs.
FitReport least_squares_fit(const StepResponseSeries& series, bool fit_gain);

/// Logistic identification by logit linearization: normalizes counts by the
/// gain, clamps to [eps, 1-eps] with eps = 1/(2K), and regresses
/// logit(n) on t. Exact on noiseless logistic data that avoids the clamps.
FitReport logistic_fit(const StepResponseSeries& series);

/// L + T: the instant the response reaches 63.2% of the gain.
double characteristic_time(const FopdtModel& model);

struct Prediction {
  double expected = 0.0;
  long long rounded = 0;
};

/// Prediction-facing wrapper over the step response, reporting the real
/// value and its nearest integer.
Prediction predict_count_at(const FopdtModel& model, double t);

/// Serializes per the wire schema: {"method", "K", "T", "L", "time_unit",
/// "rmse", "transfer_function"}; the logistic variant carries "b" and "n0"
/// instead of "T", "L", "transfer_function".
nlohmann::json to_json(const FitReport& report, int decimals = 1);

}  // namespace discdyn
