#include "partition_lab/cli.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

using namespace partition_lab;
using namespace partition_lab::cli;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_config(const RunConfig& c) {
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = run(c, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  return v;
}

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << body;
  return path;
}

// Runs the built executable; stdout is captured, stderr folded into it when asked.
Outcome shell(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(PARTITION_LAB_BIN) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

const std::regex kScientific(R"(-?\d\.\d{11}e-?\d+|inf|-inf)");

}  // namespace

TEST(Render, CanonicalScientific) {
  EXPECT_EQ(report::render(ExtReal::from_string("2.2795853023360672674", 128)), "2.27958530234e0");
  EXPECT_EQ(report::render(ExtReal::from_string("-0.00125", 128)), "-1.25000000000e-3");
  EXPECT_EQ(report::render(ExtReal::from_long(0, 64)), "0.00000000000e0");
  EXPECT_EQ(report::render(1e6), "1.00000000000e6");
  EXPECT_EQ(report::render(BigInt("123456789012345678901234567890")), "123456789012345678901234567890");
  EXPECT_EQ(report::render(Rational(4, 7)), "4/7");
  EXPECT_EQ(report::param(0.5), "0.5");
  EXPECT_EQ(report::param(10.0), "10");
}

TEST(Render, CsvQuoting) {
  EXPECT_EQ(report::csv_field("plain"), "plain");
  EXPECT_EQ(report::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(report::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Report, VerdictRowsSortedByLabelThenN) {
  bounds::BoundsEngine engine;
  std::vector<bounds::BoundVerdict> v = {engine.verify_pn_trivial(10), engine.verify_goal1(10),
                                         engine.verify_goal1(9), engine.verify_pn_trivial(2),
                                         engine.verify_goal1(100)};
  const report::Table t = report::verdict_table(v);
  std::vector<std::pair<std::string, std::uint64_t>> keys;
  for (const auto& r : t.rows) keys.emplace_back(r["label"], r["N"]);
  const std::vector<std::pair<std::string, std::uint64_t>> want = {
      {"goal1", 9}, {"goal1", 10}, {"goal1", 100}, {"pn_trivial", 2}, {"pn_trivial", 10}};
  EXPECT_EQ(keys, want);
}

TEST(Report, OneSidedVerdictLeavesLowerEmpty) {
  bounds::BoundsEngine engine;
  std::ostringstream out;
  report::write_csv(out, report::verdict_table({engine.verify_pn_improved_upper(100)}));
  const auto row = lines(out.str()).at(1);
  EXPECT_EQ(row.rfind("pn_improved_upper,100,190569292,,", 0), 0u) << row;
  EXPECT_EQ(row.substr(row.size() - 5), ",true");
}

TEST(Verify, PlainCsvSchemaAndRows) {
  RunConfig c;
  c.n_max = 200;
  c.format = Format::csv;
  const Outcome o = run_config(c);
  EXPECT_EQ(o.code, kExitPass) << o.err;
  const auto ls = lines(o.out);
  ASSERT_FALSE(ls.empty());
  EXPECT_EQ(ls[0], "label,N,exact,lower,upper,log_lower_margin,log_upper_margin,pass");

  bounds::BoundsEngine engine;
  std::size_t improved = 0;
  for (std::uint64_t n = 1; n <= 200; ++n) improved += engine.improved_m(n) >= 1;
  EXPECT_EQ(ls.size(), 1 + 200 + 200 + 199 + improved);

  std::string prev_label;
  std::uint64_t prev_n = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    ASSERT_EQ(f.size(), 8u) << ls[i];
    const std::uint64_t n = std::stoull(f[1]);
    EXPECT_TRUE(f[0] > prev_label || (f[0] == prev_label && n > prev_n)) << ls[i];
    prev_label = f[0];
    prev_n = n;
    EXPECT_TRUE(std::regex_match(f[2], std::regex(R"(\d+)"))) << f[2];
    for (int k : {3, 4, 5, 6}) {
      if (f[0] == "pn_improved_upper" && (k == 3 || k == 5)) {
        EXPECT_EQ(f[k], "");
      } else {
        EXPECT_TRUE(std::regex_match(f[k], kScientific)) << f[k];
      }
    }
    EXPECT_EQ(f[7], "true");
  }
  // sum_{n<=200} p(n), frozen from an independent Hardy-Ramanujan-Rademacher evaluation
  EXPECT_NE(o.out.find("\ngoal1,200,47060797174489,"), std::string::npos);
  BigInt prefix = 0;
  for (long n = 0; n <= 20; ++n) prefix += oracle::partitions(n);
  EXPECT_NE(o.out.find("\ngoal1,20," + prefix.get_str() + ","), std::string::npos);
}

TEST(Verify, JsonMirrorsCsv) {
  RunConfig c;
  c.n_max = 12;
  c.format = Format::csv;
  const auto csv = lines(run_config(c).out);
  c.format = Format::json;
  const Json doc = Json::parse(run_config(c).out);
  ASSERT_TRUE(doc.contains("config"));
  ASSERT_TRUE(doc.contains("summary"));
  EXPECT_EQ(doc["config"]["command"], "verify");
  EXPECT_EQ(doc["config"]["n_max"], 12);
  EXPECT_EQ(doc["summary"]["pass"], true);
  ASSERT_EQ(doc["rows"].size() + 1, csv.size());
  for (std::size_t i = 0; i < doc["rows"].size(); ++i) {
    std::string line;
    const auto& cols = report::verdict_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) line += (k ? "," : "") + report::cell(doc["rows"][i][cols[k]]);
    EXPECT_EQ(line, csv[i + 1]);
  }
}

TEST(Verify, OtherFamilies) {
  RunConfig c;
  c.format = Format::csv;
  c.family = Family::qpower;
  c.q = 3;
  c.n_max = 40;
  EXPECT_EQ(run_config(c).code, kExitPass);
  c.family = Family::plane;
  const Outcome o = run_config(c);
  EXPECT_EQ(o.code, kExitPass);
  EXPECT_NE(o.out.find("\nplane,3,11,"), std::string::npos);  // 1 + 1 + 3 + 6
}

TEST(Verify, TheoremAFromHFile) {
  RunConfig c;
  c.format = Format::csv;
  c.family = Family::theoremA;
  c.h_file = write_temp("staircase.txt", "# h through (1,1), (2,3), (3,6)\n0 0\n\n1 1\n2 3\n3 6  # last\n");
  c.n_max = 3;
  const Outcome o = run_config(c);
  EXPECT_EQ(o.code, kExitPass) << o.err;
  const auto ls = lines(o.out);
  ASSERT_EQ(ls.size(), 4u);
  // parts 1, 3, 6, 9, ...: prefix sums 2, 3, 5 for N = 1, 2, 3
  EXPECT_EQ(fields(ls[1])[2], "2");
  EXPECT_EQ(fields(ls[2])[2], "3");
  EXPECT_EQ(fields(ls[3])[2], "5");
}

TEST(Verify, BadHFileNamesTheRow) {
  RunConfig c;
  c.family = Family::theoremA;
  c.n_max = 3;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"0 0\n1 1\n2 1\n", "line 3"},           // not increasing
      {"0 1\n1 2\n", "line 1"},                // h(0) != 0
      {"# c\n0 0\n1 1\n2 5/2\n", "line 4"},    // h(2) not an integer
      {"0 0\n1 1\n2 x\n", "line 3"},           // not a number
      {"0 0\n1 1 1\n", "line 2"},              // three columns
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    c.h_file = write_temp("bad" + std::to_string(i) + ".txt", cases[i].first);
    const Outcome o = run_config(c);
    EXPECT_EQ(o.code, kExitValidation) << i;
    EXPECT_TRUE(o.out.empty());
    const Json rec = Json::parse(o.err);
    EXPECT_EQ(rec["error"], "validation");
    EXPECT_EQ(rec["exit"], kExitValidation);
    EXPECT_NE(rec["message"].get<std::string>().find(cases[i].second), std::string::npos) << rec["message"];
  }
  c.h_file = ::testing::TempDir() + "does_not_exist.txt";
  EXPECT_EQ(run_config(c).code, kExitValidation);
}

TEST(Verify, CorruptedBoundFlipsExit) {
  RunConfig c;
  c.format = Format::json;
  c.n_max = 30;
  c.corrupt_upper = 1e-3;
  const Outcome o = run_config(c);
  EXPECT_EQ(o.code, kExitVerdict);
  const Json doc = Json::parse(o.out);
  EXPECT_EQ(doc["summary"]["pass"], false);
  EXPECT_GT(doc["summary"]["failures"].size(), 0u);
  EXPECT_EQ(doc["summary"]["failures"][0], "goal1@1");
}

TEST(Verify, Deterministic) {
  RunConfig c;
  c.n_max = 60;
  c.format = Format::json;
  EXPECT_EQ(run_config(c).out, run_config(c).out);
  c.family = Family::plane;
  c.format = Format::pretty;
  EXPECT_EQ(run_config(c).out, run_config(c).out);
}

TEST(Table, CountsAndPrefixes) {
  RunConfig c;
  c.command = Command::table;
  c.format = Format::csv;
  c.n_max = 10;
  const auto ls = lines(run_config(c).out);
  ASSERT_EQ(ls.size(), 12u);
  EXPECT_EQ(ls[0], "family,N,count,prefix");
  EXPECT_EQ(ls[11], "plain,10,42,139");
}

TEST(Oracle, ExhaustiveAndRandomChecksPass) {
  RunConfig c;
  c.command = Command::oracle;
  c.rho_max = 3;
  c.n_max = 12;
  c.format = Format::json;
  const Outcome o = run_config(c);
  EXPECT_EQ(o.code, kExitPass);
  const Json doc = Json::parse(o.out);
  EXPECT_EQ(doc["summary"]["pass"], true);
  // 34 vectors r with 1 <= sum r_k <= 3 over four weights, times 12 bounds, plus the random sandwiches
  EXPECT_EQ(doc["rows"].size(), 34u * 12u + static_cast<std::size_t>(kRandomSandwichInstances));
  for (const auto& r : doc["rows"]) {
    EXPECT_EQ(r["pass"], true);
    if (r["check"] == "monomial") {
      EXPECT_EQ(r["series_one"], r["lattice_one"]);
    }
  }
}

TEST(Oracle, SeedControlsRandomInstances) {
  RunConfig c;
  c.command = Command::oracle;
  c.rho_max = 1;
  c.n_max = 2;
  c.format = Format::csv;
  const std::string a = run_config(c).out;
  EXPECT_EQ(a, run_config(c).out);
  c.seed = 7;
  const std::string b = run_config(c).out;
  EXPECT_NE(a, b);
  EXPECT_EQ(lines(a).size(), lines(b).size());
}

TEST(BromwichCheck, DefaultGridWithinTolerance) {
  RunConfig c;
  c.command = Command::bromwich_check;
  c.format = Format::json;
  const Outcome o = run_config(c);
  EXPECT_EQ(o.code, kExitPass) << o.err;
  const Json doc = Json::parse(o.out);
  std::size_t power = 0;
  for (const auto& r : doc["rows"]) {
    EXPECT_EQ(r["pass"], true) << r.dump();
    if (r["check"] == "power_symbol") {
      ++power;
      EXPECT_LE(std::stod(r["rel_error"].get<std::string>()), 1e-6);
    }
  }
  EXPECT_EQ(power, 128u);  // 4 a x 4 u x 2 v x 4 t
  c.grid = "coarse";
  EXPECT_EQ(run_config(c).code, kExitValidation);
}

TEST(BromwichCheck, QuadratureFailureExitCode) {
  RunConfig c;
  c.command = Command::bromwich_check;
  c.contour.tol = 1e-30;
  c.contour.max_nodes = 16;
  const Outcome o = run_config(c);
  EXPECT_EQ(o.code, kExitQuadrature);
  EXPECT_EQ(Json::parse(o.err)["error"], "quadrature");
}

TEST(Slope, ExitStatusFollowsTolerance) {
  RunConfig c;
  c.command = Command::slope;
  c.format = Format::csv;
  c.window = {200, 2000};
  const Outcome q1 = run_config(c);
  EXPECT_EQ(q1.code, kExitPass);
  EXPECT_EQ(lines(q1.out).size(), 3u);
  EXPECT_EQ(fields(lines(q1.out)[2])[3], "1/4");

  c.family = Family::qpower;
  c.q = 2;
  c.window = {200, 1500};
  EXPECT_EQ(run_config(c).code, kExitVerdict);  // see Slope.QTwoConvergesAtTheSixthRootRate
  c.tolerance = 0.12;
  EXPECT_EQ(run_config(c).code, kExitPass);
}

TEST(Config, ValidationErrors) {
  auto code = [](auto mutate) {
    RunConfig c;
    mutate(c);
    return run_config(c).code;
  };
  EXPECT_EQ(code([](RunConfig& c) { c.n_max = 0; }), kExitValidation);
  EXPECT_EQ(code([](RunConfig& c) { c.precision = 16; }), kExitValidation);
  EXPECT_EQ(code([](RunConfig& c) { c.family = Family::theoremA; }), kExitValidation);
  EXPECT_EQ(code([](RunConfig& c) { c.command = Command::slope; }), kExitValidation);
  EXPECT_EQ(code([](RunConfig& c) {
              c.command = Command::slope;
              c.window = {50, 400};
            }),
            kExitValidation);
  EXPECT_EQ(code([](RunConfig& c) {
              c.command = Command::oracle;
              c.rho_max = 0;
            }),
            kExitValidation);
  EXPECT_THROW(parse_window("200"), std::invalid_argument);
  EXPECT_THROW(parse_window("-1,5"), std::invalid_argument);
  const auto w = parse_window("200:1500");
  EXPECT_EQ(w.first, 200u);
  EXPECT_EQ(w.second, 1500u);
  EXPECT_THROW(parse_family("planar"), std::invalid_argument);
  EXPECT_THROW(report::parse_format("xml"), std::invalid_argument);
}

TEST(Executable, DocumentedExamples) {
  const Outcome v = shell("verify --family plain --n-max 200 --format csv");
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(lines(v.out).at(0), "label,N,exact,lower,upper,log_lower_margin,log_upper_margin,pass");
  const Outcome o = shell("oracle --rho-max 3 --n-max 12 --format json");
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(Json::parse(o.out)["summary"]["pass"], true);
  EXPECT_EQ(shell("bromwich-check --grid default").code, 0);
}

TEST(Executable, ExitCodes) {
  EXPECT_EQ(shell("verify --n-max 20 --corrupt-bound 0.001").code, 1);
  EXPECT_EQ(shell("verify --n-max 0").code, 3);
  EXPECT_EQ(shell("verify --family planar").code, 3);
  EXPECT_EQ(shell("verify --format xml").code, 3);
  EXPECT_EQ(shell("verify --n-max ten").code, 3);
  EXPECT_EQ(shell("slope --window 200").code, 3);
  EXPECT_EQ(shell("").code, 3);
  const std::string bad = write_temp("exe_bad.txt", "0 0\n1 2\n2 2\n");
  const Outcome o = shell("verify --family theoremA --h-file " + bad, true);
  EXPECT_EQ(o.code, 3);
  EXPECT_NE(o.out.find("line 3"), std::string::npos) << o.out;
}

TEST(Executable, OutputFileAndDeterminism) {
  const std::string a = ::testing::TempDir() + "run_a.json";
  const std::string b = ::testing::TempDir() + "run_b.json";
  ASSERT_EQ(shell("verify --family qpower --q 2 --n-max 80 --format json --output " + a).code, 0);
  ASSERT_EQ(shell("verify --family qpower --q 2 --n-max 80 --format json -o " + b).code, 0);
  std::ifstream fa(a);
  std::ifstream fb(b);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, sb);
  EXPECT_EQ(Json::parse(sa)["config"]["q"], 2);
}

TEST(Executable, PrecisionEnvironmentVariable) {
  const Outcome low = shell("verify --n-max 40 --format json --precision 64");
  const Json lj = Json::parse(low.out);
  EXPECT_EQ(lj["config"]["precision"], 64);

  const std::string cmd = "env PARTITION_LAB_PRECISION=64 " + std::string(PARTITION_LAB_BIN) +
                          " verify --n-max 40 --format json 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string text;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) text.append(buf, n);
  pclose(pipe);
  const Json ej = Json::parse(text);
  EXPECT_EQ(ej["config"]["precision"], 64);
  EXPECT_EQ(ej["rows"], lj["rows"]);

  const Json hj = Json::parse(shell("verify --n-max 40 --format json").out);
  EXPECT_EQ(hj["config"]["precision"], 128);
  ASSERT_EQ(hj["rows"].size(), lj["rows"].size());
  for (std::size_t i = 0; i < hj["rows"].size(); ++i) {
    EXPECT_EQ(hj["rows"][i]["pass_lower"], lj["rows"][i]["pass_lower"]);
    EXPECT_EQ(hj["rows"][i]["pass_upper"], lj["rows"][i]["pass_upper"]);
  }
}
