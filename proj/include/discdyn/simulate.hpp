#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "discdyn/ingest.hpp"
#include "discdyn/response_models.hpp"

namespace discdyn {

/// Interval of suppressed posting (work absence and the like). Open at both
/// ends: the intensity is zero strictly inside it.
struct GapInterval {
  double start = 0.0;
  double end = 0.0;
};

struct SimulationConfig {
  std::variant<FopdtModel, LogisticModel> model;
  std::uint64_t seed = 0;
  double horizon = 0.0;  ///< length of the simulated window, in model units
  std::optional<GapInterval> gap;
  std::string thread_id = "sim";
  std::int64_t start_epoch = 1311355380;  ///< timestamp of the initial post
};

/// Throws Errc::invalid_argument when horizon <= 0 or the gap falls outside
/// [0, horizon].
void validate(const SimulationConfig& config);

/// Draws one synthetic discussion whose reply arrivals form a
/// nonhomogeneous Poisson process with intensity equal to the model's
/// posting rate, zeroed inside the gap. Thinning uses the constant majorant
/// K/T (FOPDT) or K*b/4 (logistic). Deterministic for a fixed seed.
DiscussionThread simulate_thread(const SimulationConfig& config);

/// Noiseless sampling of the expected response on a regular grid, for
/// round-trip tests. y values are real; final_count = response(horizon);
/// the series is marked complete with the window ending at the horizon.
StepResponseSeries sample_response(const FopdtModel& model, double grid_step,
                                   double horizon);
StepResponseSeries sample_response(const LogisticModel& model,
                                   double grid_step, double horizon);

/// Writes the thread in the same CSV format parse_posts consumes.
void write_posts_csv(std::ostream& out, const DiscussionThread& thread);

}  // namespace discdyn
