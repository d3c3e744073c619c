// Exercises the discdyn binary end to end through files and exit codes.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include "discdyn/ingest.hpp"

using nlohmann::json;

namespace {

const std::string kCli = DISCDYN_CLI_PATH;

int run(const std::string& args) {
  const int status = std::system(("\"" + kCli + "\" " + args).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(json::parse(line));
  }
  return lines;
}

}  // namespace

TEST_CASE("simulate is deterministic for a fixed seed") {
  REQUIRE(run("simulate -K 27 -T 5 -L 1 --seed 7 --horizon 50 "
              "-o cli_sim_a.csv") == 0);
  REQUIRE(run("simulate -K 27 -T 5 -L 1 --seed 7 --horizon 50 "
              "-o cli_sim_b.csv") == 0);
  const auto a = slurp("cli_sim_a.csv");
  CHECK(a == slurp("cli_sim_b.csv"));
  CHECK(a.rfind("thread_id,timestamp\n", 0) == 0);

  REQUIRE(run("simulate -K 27 -T 5 -L 1 --seed 8 --horizon 50 "
              "-o cli_sim_c.csv") == 0);
  CHECK(a != slurp("cli_sim_c.csv"));
}

TEST_CASE("simulate rejects bad flags with a usage exit") {
  CHECK(run("simulate -K 27 -T 5 -L 1 --seed 1 --horizon -4 "
            "-o cli_sim_bad.csv 2>/dev/null") == 2);
  CHECK(run("simulate --seed 1 --horizon 10 -o cli_sim_bad.csv "
            "2>/dev/null") == 2);  // no model given
  CHECK(run("frobnicate 2>/dev/null") == 2);
}

TEST_CASE("fit emits one schema-shaped JSON object per thread") {
  REQUIRE(run("simulate -K 23 -T 5.5 -L 0.5 --seed 11 --horizon 60 "
              "--thread-id chem1 -o cli_fit_in.csv") == 0);
  REQUIRE(run("fit -i cli_fit_in.csv --method least_squares "
              "-o cli_fit_out.jsonl") == 0);
  const auto lines = json_lines(slurp("cli_fit_out.jsonl"));
  REQUIRE(lines.size() == 1);
  const auto& rep = lines[0];
  CHECK(rep.at("thread_id") == "chem1");
  CHECK(rep.at("method") == "least_squares");
  CHECK(rep.at("time_unit") == "hour");
  CHECK(rep.at("K").is_number());
  CHECK(rep.at("T").is_number());
  CHECK(rep.at("L").is_number());
  CHECK(rep.at("rmse").is_number());
  CHECK(rep.at("transfer_function").is_string());
  CHECK(rep.at("K").get<double>() > 10.0);
}

TEST_CASE("fit reports unfittable threads inline without failing the run") {
  std::ofstream csv("cli_fit_mixed.csv");
  csv << "thread_id,timestamp\n";
  csv << "solo,2011-07-22T17:23:00Z\n";  // single post: nothing to fit
  for (int i = 0; i <= 20; ++i) {
    csv << "busy," << 1311355380 + i * 1800 << "\n";
  }
  // Let the archive reach past the busy thread's quiet window.
  csv << "late," << 1311355380 + 400 * 3600 << "\n";
  csv.close();

  REQUIRE(run("fit -i cli_fit_mixed.csv --method two_point "
              "-o cli_fit_mixed.jsonl 2>/dev/null") == 0);
  const auto lines = json_lines(slurp("cli_fit_mixed.jsonl"));
  REQUIRE(lines.size() == 3);
  int errors = 0;
  int fits = 0;
  for (const auto& line : lines) {
    if (line.contains("error")) {
      ++errors;
    } else {
      ++fits;
      CHECK(line.contains("transfer_function"));
    }
  }
  CHECK(fits >= 1);
  CHECK(errors >= 1);
}

TEST_CASE("fit exits 1 when no thread can be fitted") {
  std::ofstream csv("cli_fit_empty.csv");
  csv << "thread_id,timestamp\n";
  csv.close();
  CHECK(run("fit -i cli_fit_empty.csv 2>/dev/null") == 1);
  CHECK(run("fit -i cli_no_such_file.csv 2>/dev/null") == 1);
}

TEST_CASE("fit writes plot data alongside the reports") {
  REQUIRE(run("simulate -K 20 -T 3 -L 1 --seed 3 --horizon 40 "
              "-o cli_plot_in.csv") == 0);
  // Area fitting needs steady state: declare how far the window ran
  // (simulation start 1311355380 plus the 40 h horizon) and shrink the
  // quiet window below the ~27 h tail the horizon leaves.
  REQUIRE(run("fit -i cli_plot_in.csv --method area --archive-end 1311499380 "
              "--quiet-window 20 -o cli_plot_out.jsonl "
              "--plot cli_plot.tsv") == 0);
  std::istringstream tsv(slurp("cli_plot.tsv"));
  std::string header;
  std::getline(tsv, header);
  CHECK(header == "thread_id\tt\tobserved\tfitted");
  std::string id;
  double t, observed, fitted;
  REQUIRE(static_cast<bool>(tsv >> id >> t >> observed >> fitted));
  CHECK(id == "sim");
  CHECK(t == 0.0);
  CHECK(observed == 0.0);
}

TEST_CASE("predict prints the expected and rounded counts") {
  REQUIRE(run("predict -K 27 -T 5 -L 1 -t 6 > cli_predict.json") == 0);
  const auto out = json_lines(slurp("cli_predict.json")).at(0);
  CHECK(out.at("expected").get<double>() ==
        doctest::Approx(17.0673).epsilon(1e-4));
  CHECK(out.at("rounded").get<int>() == 17);
  CHECK(out.at("characteristic_time").get<double>() == doctest::Approx(6.0));

  REQUIRE(run("predict -K 27 -T 5 -L 1 -t 0 > cli_predict0.json") == 0);
  CHECK(json_lines(slurp("cli_predict0.json")).at(0).at("expected") == 0.0);

  REQUIRE(run("predict -K 27 -T 5 -L 1 -t 1000 > cli_predict_inf.json") == 0);
  CHECK(json_lines(slurp("cli_predict_inf.json"))
            .at(0)
            .at("expected")
            .get<double>() == doctest::Approx(27.0));
}

TEST_CASE("predict accepts a fit-report JSON as its model") {
  std::ofstream model("cli_model.json");
  model << R"({"method":"area","K":16.0,"T":1.5,"L":0.3,"time_unit":"hour",)"
        << R"("rmse":0.4,"transfer_function":"x"})";
  model.close();
  REQUIRE(run("predict -m cli_model.json -t 1.8 > cli_predict_m.json") == 0);
  const auto out = json_lines(slurp("cli_predict_m.json")).at(0);
  // 63.2% of 16 at L + T.
  CHECK(out.at("expected").get<double>() ==
        doctest::Approx(10.11).epsilon(1e-3));
}

TEST_CASE("predict exits 2 on an invalid model") {
  CHECK(run("predict -K -5 -T 5 -L 1 -t 6 2>/dev/null") == 2);
  CHECK(run("predict -K 27 -T 0 -L 1 -t 6 2>/dev/null") == 2);
}

TEST_CASE("zipf fits a synthetic corpus near exponent -1") {
  std::ofstream csv("cli_zipf.csv");
  csv << "thread_id,timestamp\n";
  // 2520/k threads of size k: an integer-exact 1/k histogram.
  for (int k = 1; k <= 10; ++k) {
    for (int i = 0; i < 2520 / k; ++i) {
      for (int p = 0; p < k; ++p) {
        csv << "z" << k << "_" << i << "," << 1311355380 + p * 60 << "\n";
      }
    }
  }
  csv.close();
  REQUIRE(run("zipf -i cli_zipf.csv -o cli_zipf.json") == 0);
  const auto doc = json_lines(slurp("cli_zipf.json")).at(0);
  CHECK(doc.at("power_law").at("exponent").get<double>() ==
        doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(doc.at("histogram").at("total").get<int>() > 0);

  REQUIRE(run("zipf -i cli_zipf.csv --format tsv -o cli_zipf.tsv") == 0);
  CHECK(slurp("cli_zipf.tsv").rfind("k\tfrequency\tfitted\n", 0) == 0);

  REQUIRE(run("zipf -i cli_zipf.csv --count-mode replies --k-min 1 "
              "--prior-k 5 -o cli_zipf_r.json") == 0);
  const auto with_prior = json_lines(slurp("cli_zipf_r.json")).at(0);
  const double p = with_prior.at("gain_prior").at("p").get<double>();
  CHECK(p > 0.0);
  CHECK(p <= 1.0);
}

TEST_CASE("fit reports day-unit parameters in days") {
  // A day-scale discussion: T = 2 days, L = 0.5 day.
  REQUIRE(run("simulate -K 30 -T 2 -L 0.5 -u day --seed 6 --horizon 30 "
              "-o cli_day.csv") == 0);
  REQUIRE(run("fit -i cli_day.csv -u day --quiet-window 3 "
              "--gain fitted -o cli_day.jsonl") == 0);
  const auto rep = json_lines(slurp("cli_day.jsonl")).at(0);
  CHECK(rep.at("time_unit") == "day");
  // Reported in days, so T sits near 2 rather than near 48.
  CHECK(rep.at("T").get<double>() > 0.5);
  CHECK(rep.at("T").get<double>() < 8.0);
}

TEST_CASE("fit handles logistic models and JSONL input") {
  REQUIRE(run("simulate --logistic -K 40 -b 0.8 --n0 0.02 --seed 2 "
              "--horizon 40 -o cli_logi.csv") == 0);
  // Re-encode the archive as JSON lines to exercise that parser path.
  std::ifstream in("cli_logi.csv");
  std::ofstream out("cli_logi.jsonl");
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out << R"({"thread_id": ")" << line.substr(0, comma)
        << R"(", "timestamp": ")" << line.substr(comma + 1) << "\"}\n";
  }
  out.close();

  REQUIRE(run("fit -i cli_logi.jsonl --method logistic --quiet-window 10 "
              "--archive-end 1311499380 -o cli_logi_fit.jsonl") == 0);
  const auto rep = json_lines(slurp("cli_logi_fit.jsonl")).at(0);
  CHECK(rep.at("method") == "logistic");
  CHECK(rep.at("b").get<double>() > 0.0);
  CHECK(rep.at("n0").get<double>() > 0.0);
  CHECK(rep.at("n0").get<double>() < 1.0);
  CHECK(!rep.contains("transfer_function"));
}

TEST_CASE("response tabulates the expected curve") {
  REQUIRE(run("response -K 16 -T 1.5 -L 0.3 --grid-step 0.1 --horizon 10 "
              "-o cli_resp.tsv") == 0);
  std::istringstream tsv(slurp("cli_resp.tsv"));
  std::string header;
  std::getline(tsv, header);
  CHECK(header == "t\texpected");
  double t = 0.0, y = 0.0;
  bool found = false;
  while (tsv >> t >> y) {
    if (std::abs(t - 1.8) < 1e-9) {
      // The 63.2% level of K = 16.
      CHECK(y == doctest::Approx(16.0 * 0.6321206).epsilon(1e-4));
      found = true;
    }
  }
  CHECK(found);

  REQUIRE(run("response -K 16 -T 1.5 -L 0.3 --grid-step 0.1 --horizon 10 "
              "--format json -o cli_resp.json") == 0);
  const auto doc = json_lines(slurp("cli_resp.json")).at(0);
  CHECK(doc.at("time_unit") == "hour");
  CHECK(doc.at("points").size() == 101);
}

TEST_CASE("simulate respects the gap through the CLI") {
  REQUIRE(run("simulate -K 40 -T 5 -L 0 --seed 5 --horizon 50 "
              "--gap-start 5 --gap-end 10 -o cli_gap.csv") == 0);
  std::ifstream in("cli_gap.csv");
  const auto parsed = discdyn::parse_posts(in, discdyn::PostFormat::csv);
  REQUIRE(parsed.records.size() > 5);  // still grows outside the gap
  const auto origin = parsed.records.front().timestamp;
  for (const auto& record : parsed.records) {
    const double t = static_cast<double>(record.timestamp - origin) / 3600.0;
    CHECK(!(t > 5.001 && t < 9.999));
  }
}
