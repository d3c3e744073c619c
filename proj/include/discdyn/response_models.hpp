#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "discdyn/time_unit.hpp"

namespace discdyn {

/// First-order-plus-dead-time model of a discussion.
///
/// The initial post acts as a unit step; the cumulative reply count follows
///   y(t) = gain * (1 - exp(-(t - dead_time) / time_constant))   for t >= dead_time
///   y(t) = 0                                                    for t <  dead_time
/// so the steady-state reply total equals `gain` and the response reaches
/// 63.2% of it at t = dead_time + time_constant.
struct FopdtModel {
  double gain = 0.0;           ///< K: replies accumulated at steady state
  double time_constant = 1.0;  ///< T: timescale of the exponential rise, > 0
  double dead_time = 0.0;      ///< L: delay before the first reply, >= 0
  TimeUnit time_unit = TimeUnit::hour;
};

/// Throws Errc::invalid_argument when the model violates its domain
/// (gain < 0, time_constant <= 0, dead_time < 0, or non-finite fields).
void validate(const FopdtModel& model);

/// Expected cumulative reply count at elapsed time t >= 0.
double fopdt_step_response(const FopdtModel& model, double t);

/// Expected posting rate (replies per time unit) at elapsed time t.
/// Zero before the dead time, gain/time_constant at its start, and the
/// integral over [0, inf) equals the gain.
double fopdt_rate(const FopdtModel& model, double t);

/// Logistic growth model of a discussion.
///
/// The normalized population follows dn/dt = rate * n * (1 - n) with
/// n(0) = initial_fraction; the expected cumulative count is scale * n(t).
struct LogisticModel {
  double scale = 0.0;             ///< K: reply count the curve saturates at
  double rate = 0.0;              ///< b: growth coefficient per time unit
  double initial_fraction = 0.5;  ///< n(0), strictly inside (0, 1)
  TimeUnit time_unit = TimeUnit::hour;
};

void validate(const LogisticModel& model);

/// Normalized population n(t) in (0, 1), evaluated in overflow-safe
/// sigmoid form: n(t) = sigmoid(rate * t + logit(n0)).
double logistic_fraction(const LogisticModel& model, double t);

/// Expected cumulative count scale * n(t).
double logistic_value(const LogisticModel& model, double t);

/// Time derivative of logistic_value: scale * rate * n * (1 - n).
double logistic_rate(const LogisticModel& model, double t);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// Canonical one-line rendering of the Laplace transfer function
/// K·e^{-Ls}/(Ts+1); `s` appears only symbolically.
struct TransferFunctionDisplay {
  std::string text;
};

/// Formats the model as `<K>·e^{-<L>s}/(<T>s+1)` with fixed-point decimals.
/// `decimals` must lie in [0, 6]. Deterministic; round-trips through
/// parse_transfer_function at the printed precision.
TransferFunctionDisplay format_transfer_function(const FopdtModel& model,
                                                 int decimals);

/// Inverse of format_transfer_function. Accepts optional whitespace between
/// tokens. Throws Errc::invalid_argument when the text does not match the
/// grammar.
FopdtModel parse_transfer_function(std::string_view text,
                                   TimeUnit unit = TimeUnit::hour);

}  // namespace discdyn
