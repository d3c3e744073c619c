// discdyn: fit, predict, and simulate discussion dynamics from post archives.
//
// Subcommands: fit, predict, zipf, simulate, response. Exit codes: 0 on
// success, 1 on data-level failure, 2 on usage errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "discdyn/errors.hpp"
#include "discdyn/identify.hpp"
#include "discdyn/ingest.hpp"
#include "discdyn/response_models.hpp"
#include "discdyn/simulate.hpp"
#include "discdyn/zipf.hpp"

namespace {

using discdyn::Errc;
using discdyn::Error;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

discdyn::TimeUnit unit_from_flag(const std::string& flag) {
  const auto unit = discdyn::parse_time_unit(flag);
  if (!unit) throw UsageError("unknown time unit: " + flag);
  return *unit;
}

discdyn::PostFormat detect_format(const std::string& path,
                                  const std::string& flag) {
  if (flag == "csv") return discdyn::PostFormat::csv;
  if (flag == "jsonl") return discdyn::PostFormat::json_lines;
  if (path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl") {
    return discdyn::PostFormat::json_lines;
  }
  return discdyn::PostFormat::csv;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw UsageError("cannot open output file: " + path);
  return file;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::input_error, "cannot open input file: " + path);
  }
  return in;
}

struct ModelFlags {
  double gain = -1.0;
  double time_constant = -1.0;
  double dead_time = 0.0;
  double logistic_rate = 0.0;
  double initial_fraction = 0.0;
  bool logistic = false;
  std::string time_unit = "hour";
  std::string model_path;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags, bool with_file) {
  cmd->add_option("-K,--gain", flags.gain, "steady-state reply count K");
  cmd->add_option("-T,--time-constant", flags.time_constant,
                  "time constant T in time units");
  cmd->add_option("-L,--dead-time", flags.dead_time,
                  "dead time L in time units");
  cmd->add_flag("--logistic", flags.logistic,
                "interpret the model as logistic (K, b, n0)");
  cmd->add_option("-b,--rate", flags.logistic_rate,
                  "logistic growth rate b per time unit");
  cmd->add_option("--n0", flags.initial_fraction,
                  "logistic initial fraction in (0, 1)");
  cmd->add_option("-u,--time-unit", flags.time_unit, "hour or day")
      ->check(CLI::IsMember({"hour", "day"}));
  if (with_file) {
    cmd->add_option("-m,--model", flags.model_path,
                    "fit-report JSON file to read the model from");
  }
}

discdyn::FopdtModel fopdt_from_flags(const ModelFlags& flags) {
  if (!flags.model_path.empty()) {
    auto in = open_input(flags.model_path);
    json report = json::parse(in, nullptr, false);
    if (report.is_discarded() || !report.contains("K") ||
        !report.contains("T")) {
      throw UsageError("model file is not a FOPDT fit report: " +
                       flags.model_path);
    }
    discdyn::FopdtModel model;
    model.gain = report.at("K").get<double>();
    model.time_constant = report.at("T").get<double>();
    model.dead_time = report.value("L", 0.0);
    model.time_unit = unit_from_flag(report.value("time_unit", "hour"));
    discdyn::validate(model);
    return model;
  }
  discdyn::FopdtModel model{flags.gain, flags.time_constant, flags.dead_time,
                            unit_from_flag(flags.time_unit)};
  discdyn::validate(model);
  return model;
}

std::variant<discdyn::FopdtModel, discdyn::LogisticModel> model_from_flags(
    const ModelFlags& flags) {
  if (flags.logistic) {
    discdyn::LogisticModel model{flags.gain, flags.logistic_rate,
                                 flags.initial_fraction,
                                 unit_from_flag(flags.time_unit)};
    discdyn::validate(model);
    return model;
  }
  return fopdt_from_flags(flags);
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string input;
  std::string input_format = "auto";
  std::string method = "least_squares";
  std::string time_unit = "hour";
  std::string out;
  std::string plot;
  std::string gain_mode = "auto";  // auto | fixed | fitted
  std::string archive_end = "auto";
  double quiet_window = 72.0;
  int decimals = 1;
};

discdyn::FitReport run_one_fit(const discdyn::StepResponseSeries& series,
                               const std::string& method,
                               const std::string& gain_mode) {
  if (method == "two_point") return discdyn::two_point_fit(series);
  if (method == "area") return discdyn::area_fit(series);
  if (method == "logistic") return discdyn::logistic_fit(series);
  const bool fit_gain =
      gain_mode == "fitted" || (gain_mode == "auto" && !series.complete);
  return discdyn::least_squares_fit(series, fit_gain);
}

int run_fit(const FitOptions& opt) {
  auto in = open_input(opt.input);
  const auto parsed =
      discdyn::parse_posts(in, detect_format(opt.input, opt.input_format));
  auto threads = discdyn::group_threads(parsed.records);

  // The observation window ends at the newest record unless the caller
  // knows better (single-thread archives otherwise never look complete).
  std::int64_t archive_end = 0;
  if (opt.archive_end == "auto") {
    for (const auto& record : parsed.records) {
      archive_end = std::max(archive_end, record.timestamp);
    }
  } else {
    const auto parsed_end = discdyn::parse_timestamp(opt.archive_end);
    if (!parsed_end) {
      throw UsageError("--archive-end must be ISO-8601, epoch seconds, "
                       "or auto");
    }
    archive_end = *parsed_end;
  }

  std::ofstream out_file;
  auto& out = open_output(out_file, opt.out);
  std::ofstream plot_file;
  const bool want_plot = !opt.plot.empty();
  if (want_plot) {
    plot_file.open(opt.plot);
    if (!plot_file) throw UsageError("cannot open plot file: " + opt.plot);
    plot_file << "thread_id\tt\tobserved\tfitted\n";
  }

  const auto unit = unit_from_flag(opt.time_unit);
  std::size_t fitted_count = 0;
  for (const auto& thread : threads) {
    auto series = discdyn::build_step_response(thread, unit, archive_end);
    discdyn::detect_steady_state(series, opt.quiet_window);
    json line;
    try {
      const auto report = run_one_fit(series, opt.method, opt.gain_mode);
      line = discdyn::to_json(report, opt.decimals);
      line["thread_id"] = thread.thread_id;
      ++fitted_count;
      if (want_plot) {
        for (std::size_t i = 0; i < report.residuals.size(); ++i) {
          const double t = report.residuals[i].t;
          const double observed =
              i < series.points.size() ? series.points[i].y
                                       : series.final_count;
          plot_file << thread.thread_id << '\t' << t << '\t' << observed
                    << '\t' << observed - report.residuals[i].y << '\n';
        }
      }
    } catch (const Error& e) {
      line["thread_id"] = thread.thread_id;
      line["error"] = discdyn::errc_name(e.code());
      line["message"] = e.what();
    }
    out << line.dump() << '\n';
  }
  if (parsed.skipped > 0) {
    std::cerr << "skipped " << parsed.skipped << " malformed line(s)\n";
  }
  return fitted_count > 0 ? kExitOk : kExitDataError;
}

// ---------------------------------------------------------------------------
// predict

int run_predict(const ModelFlags& flags, double at, int decimals) {
  discdyn::FopdtModel model;
  try {
    model = fopdt_from_flags(flags);
  } catch (const Error&) {
    throw UsageError("predict needs a valid FOPDT model (flags or --model)");
  }
  const auto prediction = discdyn::predict_count_at(model, at);
  json out;
  out["t"] = at;
  out["expected"] = prediction.expected;
  out["rounded"] = prediction.rounded;
  out["characteristic_time"] = discdyn::characteristic_time(model);
  out["transfer_function"] =
      discdyn::format_transfer_function(model, decimals).text;
  std::cout << out.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// zipf

struct ZipfOptions {
  std::string input;
  std::string input_format = "auto";
  std::string count_mode = "all_posts";
  std::string format = "json";
  std::string out;
  std::uint64_t k_min = 1;
  std::uint64_t prior_k = 0;  // 0: no tail-probability request
};

int run_zipf(const ZipfOptions& opt) {
  auto in = open_input(opt.input);
  const auto parsed =
      discdyn::parse_posts(in, detect_format(opt.input, opt.input_format));
  const auto threads = discdyn::group_threads(parsed.records);
  const auto mode = opt.count_mode == "replies" ? discdyn::CountMode::replies
                                                : discdyn::CountMode::all_posts;
  const auto hist = discdyn::histogram_from_threads(threads, mode);
  const auto fit = discdyn::fit_power_law(hist, opt.k_min);

  std::ofstream out_file;
  auto& out = open_output(out_file, opt.out);
  if (opt.format == "tsv") {
    discdyn::write_histogram_tsv(out, hist, &fit);
  } else {
    json doc;
    doc["histogram"] = discdyn::to_json(hist);
    doc["power_law"] = discdyn::to_json(fit);
    doc["k_min"] = opt.k_min;
    if (opt.prior_k >= 1) {
      doc["gain_prior"] = {{"k", opt.prior_k},
                           {"p", discdyn::gain_prior(hist, opt.prior_k)}};
    }
    out << doc.dump() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  ModelFlags model;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  double gap_start = -1.0;
  double gap_end = -1.0;
  std::string thread_id = "sim";
  std::int64_t start_epoch = 1311355380;
  std::string out;
};

int run_simulate(const SimulateOptions& opt) {
  discdyn::SimulationConfig config;
  config.model = model_from_flags(opt.model);
  config.seed = opt.seed;
  config.horizon = opt.horizon;
  config.thread_id = opt.thread_id;
  config.start_epoch = opt.start_epoch;
  if (opt.gap_start >= 0.0 || opt.gap_end >= 0.0) {
    config.gap = discdyn::GapInterval{opt.gap_start, opt.gap_end};
  }
  discdyn::validate(config);
  const auto thread = discdyn::simulate_thread(config);
  std::ofstream out_file;
  auto& out = open_output(out_file, opt.out);
  discdyn::write_posts_csv(out, thread);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// response

struct ResponseOptions {
  ModelFlags model;
  double grid_step = 0.1;
  double horizon = 0.0;
  std::string format = "tsv";
  std::string out;
};

int run_response(const ResponseOptions& opt) {
  const auto model = model_from_flags(opt.model);
  discdyn::StepResponseSeries series;
  if (const auto* fopdt = std::get_if<discdyn::FopdtModel>(&model)) {
    series = discdyn::sample_response(*fopdt, opt.grid_step, opt.horizon);
  } else {
    series = discdyn::sample_response(std::get<discdyn::LogisticModel>(model),
                                      opt.grid_step, opt.horizon);
  }
  std::ofstream out_file;
  auto& out = open_output(out_file, opt.out);
  if (opt.format == "json") {
    json points = json::array();
    for (const auto& p : series.points) points.push_back({p.t, p.y});
    json doc;
    doc["time_unit"] = discdyn::time_unit_name(series.time_unit);
    doc["points"] = points;
    doc["final_count"] = series.final_count;
    out << doc.dump() << '\n';
  } else {
    out << "t\texpected\n";
    for (const auto& p : series.points) {
      out << p.t << '\t' << p.y << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FOPDT and logistic identification of discussion dynamics"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit_cmd =
      app.add_subcommand("fit", "fit models to every thread in an archive");
  fit_cmd->add_option("-i,--input", fit_opt.input, "posts file (CSV or JSONL)")
      ->required();
  fit_cmd->add_option("--input-format", fit_opt.input_format, "csv|jsonl|auto")
      ->check(CLI::IsMember({"csv", "jsonl", "auto"}));
  fit_cmd
      ->add_option("--method", fit_opt.method,
                   "two_point|area|least_squares|logistic")
      ->check(CLI::IsMember({"two_point", "area", "least_squares", "logistic"}));
  fit_cmd->add_option("-u,--time-unit", fit_opt.time_unit, "hour or day")
      ->check(CLI::IsMember({"hour", "day"}));
  fit_cmd->add_option("--quiet-window", fit_opt.quiet_window,
                      "steady-state quiet window in time units (default 72h)");
  fit_cmd->add_option("--archive-end", fit_opt.archive_end,
                      "end of the observation window (ISO-8601, epoch "
                      "seconds, or auto = newest record)");
  fit_cmd->add_option("--gain", fit_opt.gain_mode,
                      "gain handling for least squares: auto|fixed|fitted")
      ->check(CLI::IsMember({"auto", "fixed", "fitted"}));
  fit_cmd->add_option("--decimals", fit_opt.decimals,
                      "transfer-function print precision")
      ->check(CLI::Range(0, 6));
  fit_cmd->add_option("-o,--out", fit_opt.out, "output path (default stdout)");
  fit_cmd->add_option("--plot", fit_opt.plot,
                      "write observed-vs-fitted TSV plot data here");

  ModelFlags predict_flags;
  double predict_at = 0.0;
  int predict_decimals = 1;
  auto* predict_cmd =
      app.add_subcommand("predict", "predict the count at a given time");
  add_model_flags(predict_cmd, predict_flags, true);
  predict_cmd->add_option("-t,--at", predict_at, "elapsed time in time units")
      ->required();
  predict_cmd->add_option("--decimals", predict_decimals, "print precision")
      ->check(CLI::Range(0, 6));

  ZipfOptions zipf_opt;
  auto* zipf_cmd = app.add_subcommand(
      "zipf", "size histogram and power-law fit over an archive");
  zipf_cmd->add_option("-i,--input", zipf_opt.input, "posts file")->required();
  zipf_cmd->add_option("--input-format", zipf_opt.input_format,
                       "csv|jsonl|auto")
      ->check(CLI::IsMember({"csv", "jsonl", "auto"}));
  zipf_cmd->add_option("--k-min", zipf_opt.k_min, "smallest size in the fit");
  zipf_cmd->add_option("--prior-k", zipf_opt.prior_k,
                       "also report the tail probability P(size >= k)");
  zipf_cmd->add_option("--count-mode", zipf_opt.count_mode,
                       "all_posts or replies")
      ->check(CLI::IsMember({"all_posts", "replies"}));
  zipf_cmd->add_option("--format", zipf_opt.format, "json or tsv")
      ->check(CLI::IsMember({"json", "tsv"}));
  zipf_cmd->add_option("-o,--out", zipf_opt.out, "output path");

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "draw a synthetic discussion from a model");
  add_model_flags(sim_cmd, sim_opt.model, false);
  sim_cmd->add_option("--seed", sim_opt.seed, "random seed")->required();
  sim_cmd->add_option("--horizon", sim_opt.horizon,
                      "simulated window length in time units")
      ->required();
  sim_cmd->add_option("--gap-start", sim_opt.gap_start,
                      "start of a zero-activity interval");
  sim_cmd->add_option("--gap-end", sim_opt.gap_end,
                      "end of a zero-activity interval");
  sim_cmd->add_option("--thread-id", sim_opt.thread_id, "id for the thread");
  sim_cmd->add_option("--start-epoch", sim_opt.start_epoch,
                      "epoch seconds of the initial post");
  sim_cmd->add_option("-o,--out", sim_opt.out, "output path");

  ResponseOptions resp_opt;
  auto* resp_cmd = app.add_subcommand(
      "response", "sample the expected response on a grid");
  add_model_flags(resp_cmd, resp_opt.model, false);
  resp_cmd->add_option("--grid-step", resp_opt.grid_step, "grid step")
      ->required();
  resp_cmd->add_option("--horizon", resp_opt.horizon, "grid end")->required();
  resp_cmd->add_option("--format", resp_opt.format, "tsv or json")
      ->check(CLI::IsMember({"json", "tsv"}));
  resp_cmd->add_option("-o,--out", resp_opt.out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_opt);
    if (predict_cmd->parsed()) {
      return run_predict(predict_flags, predict_at, predict_decimals);
    }
    if (zipf_cmd->parsed()) return run_zipf(zipf_opt);
    if (sim_cmd->parsed()) return run_simulate(sim_opt);
    if (resp_cmd->parsed()) return run_response(resp_opt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const Error& e) {
    std::cerr << "error (" << discdyn::errc_name(e.code()) << "): " << e.what()
              << '\n';
    // Domain violations reaching this point came from flag values.
    return e.code() == Errc::invalid_argument ? kExitUsageError
                                              : kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsageError;
}
