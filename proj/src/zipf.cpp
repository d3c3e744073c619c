#include "discdyn/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>
#include <vector>

#include "discdyn/errors.hpp"

namespace discdyn {

SizeHistogram histogram_from_threads(std::span<const DiscussionThread> threads,
                                     CountMode mode) {
  SizeHistogram hist;
  for (const auto& thread : threads) {
    const std::uint64_t size = mode == CountMode::all_posts
                                   ? thread.posts.size()
                                   : thread.reply_count();
    if (size == 0) continue;
    ++hist.counts[size];
    ++hist.total;
  }
  return hist;
}

PowerLawFit fit_power_law(const SizeHistogram& hist, std::uint64_t k_min) {
  if (k_min < 1) {
    raise(Errc::invalid_argument, "k_min must be >= 1");
  }

  // Collect (ln k, ln f) support; zero-frequency bins have no log value.
  std::vector<std::pair<double, double>> pts;
  for (const auto& [k, f] : hist.counts) {
    if (k >= k_min && f > 0) {
      pts.emplace_back(std::log(static_cast<double>(k)),
                       std::log(static_cast<double>(f)));
    }
  }
  if (pts.size() < 3) {
    raise(Errc::insufficient_support,
          "power-law fit needs at least 3 nonzero bins at k >= k_min");
  }

  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : pts) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= pts.size();
  mean_y /= pts.size();

  double s_xx = 0.0;
  double s_xy = 0.0;
  double s_yy = 0.0;
  for (const auto& [x, y] : pts) {
    s_xx += (x - mean_x) * (x - mean_x);
    s_xy += (x - mean_x) * (y - mean_y);
    s_yy += (y - mean_y) * (y - mean_y);
  }
  if (!(s_xx > 0.0)) {
    raise(Errc::numerical_failure, "all support bins share one k");
  }

  PowerLawFit fit;
  fit.exponent = s_xy / s_xx;
  fit.log_intercept = mean_y - fit.exponent * mean_x;
  fit.r_squared = s_yy > 0.0 ? (s_xy * s_xy) / (s_xx * s_yy) : 1.0;
  fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
  return fit;
}

double gain_prior(const SizeHistogram& hist, std::uint64_t k) {
  if (hist.total == 0) {
    raise(Errc::empty_input, "gain prior needs a non-empty histogram");
  }
  std::uint64_t tail = 0;
  for (const auto& [size, f] : hist.counts) {
    if (size >= k) tail += f;
  }
  return static_cast<double>(tail) / static_cast<double>(hist.total);
}

nlohmann::json to_json(const SizeHistogram& hist) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [k, f] : hist.counts) {
    counts[std::to_string(k)] = f;
  }
  return {{"counts", counts}, {"total", hist.total}};
}

nlohmann::json to_json(const PowerLawFit& fit) {
  return {{"exponent", fit.exponent},
          {"log_intercept", fit.log_intercept},
          {"r_squared", fit.r_squared}};
}

void write_histogram_tsv(std::ostream& out, const SizeHistogram& hist,
                         const PowerLawFit* fit) {
  out << "k\tfrequency";
  if (fit) out << "\tfitted";
  out << '\n';
  for (const auto& [k, f] : hist.counts) {
    out << k << '\t' << f;
    if (fit) {
      out << '\t'
          << std::exp(fit->log_intercept +
                      fit->exponent * std::log(static_cast<double>(k)));
    }
    out << '\n';
  }
}

}  // namespace discdyn
