#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "discdyn/time_unit.hpp"

namespace discdyn {

/// One timestamped post belonging to a discussion thread.
struct PostRecord {
  std::string thread_id;        ///< non-empty opaque key
  std::int64_t timestamp = 0;   ///< epoch seconds, UTC
  std::optional<std::string> author;
};

/// A reconstructed thread: posts sorted ascending by timestamp, ties kept
/// in input order. The first post is the step input the replies respond to.
struct DiscussionThread {
  std::string thread_id;
  std::vector<PostRecord> posts;  // never empty

  const PostRecord& initial_post() const { return posts.front(); }
  std::size_t reply_count() const { return posts.size() - 1; }
};

struct SeriesPoint {
  double t = 0.0;  ///< elapsed time since the initial post, in time_unit
  double y = 0.0;  ///< cumulative reply count at t
};

/// Cumulative reply count versus elapsed time, anchored at the initial post.
///
/// The initial post is the input step, not output: y counts replies only,
/// starts at (0, 0) and ends at final_count. Real archives yield whole-valued
/// y; series sampled from a model in test mode may carry real values.
struct StepResponseSeries {
  TimeUnit time_unit = TimeUnit::hour;
  std::vector<SeriesPoint> points;  // sorted by t, y nondecreasing
  double final_count = 0.0;
  bool complete = false;        ///< steady state reached vs archive truncated
  double observed_until = 0.0;  ///< elapsed end of the observation window
};

enum class PostFormat { csv, json_lines };

struct ParsedPosts {
  std::vector<PostRecord> records;
  std::size_t skipped = 0;  ///< malformed lines dropped, never fatal
};

/// Parses a UTF-8 post archive.
///
/// CSV needs the header `thread_id,timestamp[,author]`; JSON-lines carries
/// one object per line with the same keys. Timestamps are ISO-8601 with
/// offset (`2011-07-22T17:23:00Z`, `...+02:00`) or integer epoch seconds.
/// Malformed lines are skipped and counted. Throws Errc::input_error on an
/// unreadable stream and Errc::empty_input when nothing parses.
ParsedPosts parse_posts(std::istream& source, PostFormat format);

/// Groups records into one thread per distinct thread_id, posts sorted by
/// timestamp with stable ties. Threads come back sorted by thread_id.
std::vector<DiscussionThread> group_threads(std::vector<PostRecord> records);

/// Converts a thread into its step-response series. t = 0 at the initial
/// post; every reply contributes one point. When `archive_end` is given
/// (absolute epoch seconds) the observation window extends to it, otherwise
/// it stops at the last post.
StepResponseSeries build_step_response(
    const DiscussionThread& thread, TimeUnit unit,
    std::optional<std::int64_t> archive_end = std::nullopt);

/// True iff the observation window extends at least `quiet_window` past the
/// last reply (past t = 0 for reply-less threads). Stores the verdict in
/// series.complete. quiet_window is in series time units and must be > 0.
bool detect_steady_state(StepResponseSeries& series, double quiet_window);

/// Parses ISO-8601 (`YYYY-MM-DDThh:mm:ss` plus `Z` or `±hh:mm`) or integer
/// epoch seconds. Returns nullopt on malformed text.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

/// Renders epoch seconds as `YYYY-MM-DDThh:mm:ssZ`.
std::string format_timestamp_utc(std::int64_t epoch_seconds);

}  // namespace discdyn
