#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>

#include <json.hpp>

#include "discdyn/ingest.hpp"

namespace discdyn {

/// Frequency of discussions by size: counts[k] discussions contain k posts.
struct SizeHistogram {
  std::map<std::uint64_t, std::uint64_t> counts;  // keys >= 1
  std::uint64_t total = 0;                        // sum of frequencies
};

/// What a discussion's size counts: all posts (matching a posts-per-thread
/// axis) or replies only (matching the gain convention).
enum class CountMode { all_posts, replies };

/// Exact size tally over threads. In replies mode, threads with no replies
/// fall outside the k >= 1 support and are dropped from the tally.
SizeHistogram histogram_from_threads(std::span<const DiscussionThread> threads,
                                     CountMode mode = CountMode::all_posts);

struct PowerLawFit {
  double exponent = 0.0;       ///< slope of ln(frequency) on ln(k)
  double log_intercept = 0.0;  ///< fitted ln(frequency) at k = 1
  double r_squared = 0.0;      ///< in [0, 1]
};

/// Log-log ordinary least squares over bins with k >= k_min and nonzero
/// frequency. Needs at least 3 support points (Errc::insufficient_support).
PowerLawFit fit_power_law(const SizeHistogram& hist, std::uint64_t k_min = 1);

/// Empirical tail probability P(size >= k). Nonincreasing in k and exactly
/// 1 at k = 1. Throws Errc::empty_input on an empty histogram.
double gain_prior(const SizeHistogram& hist, std::uint64_t k);

nlohmann::json to_json(const SizeHistogram& hist);
nlohmann::json to_json(const PowerLawFit& fit);

/// Two-column TSV (k, frequency), plus a fitted column when a fit is given.
void write_histogram_tsv(std::ostream& out, const SizeHistogram& hist,
                         const PowerLawFit* fit = nullptr);

}  // namespace discdyn
