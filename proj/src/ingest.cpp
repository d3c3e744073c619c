#include "discdyn/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <utility>

#include <json.hpp>

#include "discdyn/errors.hpp"

namespace discdyn {

namespace {

// Civil-calendar conversions on the proleptic Gregorian calendar
// (Howard Hinnant's shift-the-epoch-to-March formulation).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                     unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t year = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = year + (m <= 2);
}

bool parse_fixed_uint(std::string_view text, std::size_t& pos, int digits,
                      int& out) {
  if (pos + digits > text.size()) return false;
  int value = 0;
  for (int i = 0; i < digits; ++i) {
    char c = text[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += digits;
  out = value;
  return true;
}

bool is_integer_literal(std::string_view text) {
  if (text.empty()) return false;
  std::size_t i = text[0] == '-' ? 1 : 0;
  if (i == text.size()) return false;
  for (; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<PostRecord> record_from_csv(std::string_view line,
                                          bool has_author_column) {
  auto fields = split_csv(line);
  if (fields.size() < 2) return std::nullopt;
  if (fields[0].empty()) return std::nullopt;
  auto ts = parse_timestamp(fields[1]);
  if (!ts) return std::nullopt;
  PostRecord record{std::string(fields[0]), *ts, std::nullopt};
  if (has_author_column && fields.size() >= 3 && !fields[2].empty()) {
    record.author = std::string(fields[2]);
  }
  return record;
}

std::optional<PostRecord> record_from_json_line(std::string_view line) {
  nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
  if (!obj.is_object()) return std::nullopt;
  auto id_it = obj.find("thread_id");
  auto ts_it = obj.find("timestamp");
  if (id_it == obj.end() || ts_it == obj.end()) return std::nullopt;
  if (!id_it->is_string() || id_it->get<std::string>().empty()) {
    return std::nullopt;
  }
  std::optional<std::int64_t> ts;
  if (ts_it->is_number_integer()) {
    ts = ts_it->get<std::int64_t>();
  } else if (ts_it->is_string()) {
    ts = parse_timestamp(ts_it->get<std::string>());
  }
  if (!ts) return std::nullopt;
  PostRecord record{id_it->get<std::string>(), *ts, std::nullopt};
  auto author_it = obj.find("author");
  if (author_it != obj.end() && author_it->is_string()) {
    record.author = author_it->get<std::string>();
  }
  return record;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;

  if (is_integer_literal(text)) {
    std::int64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      return std::nullopt;
    }
    return value;
  }

  // ISO-8601 with an explicit offset: YYYY-MM-DDThh:mm[:ss[.frac]](Z|±hh:mm)
  std::size_t pos = 0;
  int year, month, day, hour, minute, second = 0;
  if (!parse_fixed_uint(text, pos, 4, year)) return std::nullopt;
  if (pos >= text.size() || text[pos++] != '-') return std::nullopt;
  if (!parse_fixed_uint(text, pos, 2, month)) return std::nullopt;
  if (pos >= text.size() || text[pos++] != '-') return std::nullopt;
  if (!parse_fixed_uint(text, pos, 2, day)) return std::nullopt;
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't')) {
    return std::nullopt;
  }
  ++pos;
  if (!parse_fixed_uint(text, pos, 2, hour)) return std::nullopt;
  if (pos >= text.size() || text[pos++] != ':') return std::nullopt;
  if (!parse_fixed_uint(text, pos, 2, minute)) return std::nullopt;
  if (pos < text.size() && text[pos] == ':') {
    ++pos;
    if (!parse_fixed_uint(text, pos, 2, second)) return std::nullopt;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;  // sub-second digits are truncated to second precision
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60) {
    return std::nullopt;
  }

  // The offset is mandatory; a bare local time is ambiguous.
  if (pos >= text.size()) return std::nullopt;
  std::int64_t offset_seconds = 0;
  char c = text[pos];
  if (c == 'Z' || c == 'z') {
    ++pos;
  } else if (c == '+' || c == '-') {
    ++pos;
    int oh, om = 0;
    if (!parse_fixed_uint(text, pos, 2, oh)) return std::nullopt;
    if (pos < text.size() && text[pos] == ':') ++pos;
    if (pos < text.size() && !parse_fixed_uint(text, pos, 2, om)) {
      return std::nullopt;
    }
    if (oh > 23 || om > 59) return std::nullopt;
    offset_seconds = (c == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  return days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
}

std::string format_timestamp_utc(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(year), month, day,
                static_cast<long long>(rem / 3600),
                static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

ParsedPosts parse_posts(std::istream& source, PostFormat format) {
  if (!source) {
    raise(Errc::input_error, "post source stream is not readable");
  }

  ParsedPosts out;
  std::string line;
  bool saw_header = false;
  bool has_author_column = false;

  while (std::getline(source, line)) {
    std::string_view view = trim(line);
    if (view.empty()) continue;

    if (format == PostFormat::csv && !saw_header) {
      auto fields = split_csv(view);
      if (fields.size() < 2 || fields[0] != "thread_id" ||
          fields[1] != "timestamp" ||
          (fields.size() == 3 && fields[2] != "author") || fields.size() > 3) {
        raise(Errc::input_error,
              "CSV header must be thread_id,timestamp[,author]");
      }
      has_author_column = fields.size() == 3;
      saw_header = true;
      continue;
    }

    std::optional<PostRecord> record =
        format == PostFormat::csv ? record_from_csv(view, has_author_column)
                                  : record_from_json_line(view);
    if (record) {
      out.records.push_back(std::move(*record));
    } else {
      ++out.skipped;
    }
  }

  if (source.bad()) {
    raise(Errc::input_error, "error while reading post source");
  }
  if (out.records.empty()) {
    raise(Errc::empty_input, "no parseable post records in input");
  }
  return out;
}

std::vector<DiscussionThread> group_threads(std::vector<PostRecord> records) {
  std::map<std::string, std::vector<PostRecord>> by_id;
  for (auto& record : records) {
    by_id[record.thread_id].push_back(std::move(record));
  }

  std::vector<DiscussionThread> threads;
  threads.reserve(by_id.size());
  for (auto& [id, posts] : by_id) {
    std::stable_sort(posts.begin(), posts.end(),
                     [](const PostRecord& a, const PostRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
    threads.push_back({id, std::move(posts)});
  }
  return threads;
}

StepResponseSeries build_step_response(
    const DiscussionThread& thread, TimeUnit unit,
    std::optional<std::int64_t> archive_end) {
  if (thread.posts.empty()) {
    raise(Errc::invalid_argument, "thread has no posts");
  }

  const std::int64_t origin = thread.posts.front().timestamp;
  // Elapsed time is computed in hours first so that the day-unit value is
  // exactly the hour-unit value divided by 24.
  auto elapsed = [&](std::int64_t ts) {
    const double hours = static_cast<double>(ts - origin) / 3600.0;
    return unit == TimeUnit::hour ? hours : hours / 24.0;
  };

  StepResponseSeries series;
  series.time_unit = unit;
  series.points.push_back({0.0, 0.0});
  for (std::size_t i = 1; i < thread.posts.size(); ++i) {
    series.points.push_back(
        {elapsed(thread.posts[i].timestamp), static_cast<double>(i)});
  }
  series.final_count = static_cast<double>(thread.reply_count());
  series.observed_until = series.points.back().t;
  if (archive_end) {
    series.observed_until =
        std::max(series.observed_until, elapsed(*archive_end));
  }
  return series;
}

bool detect_steady_state(StepResponseSeries& series, double quiet_window) {
  if (!(quiet_window > 0.0)) {
    raise(Errc::invalid_argument, "quiet window must be > 0");
  }
  const double last_reply_t =
      series.points.empty() ? 0.0 : series.points.back().t;
  series.complete = series.observed_until - last_reply_t >= quiet_window;
  return series.complete;
}

}  // namespace discdyn
