#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "l1lab/cli.hpp"
#include "l1lab/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace l1lab;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "l1lab_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const char* kTable1Scenario = R"({
  "name": "table1",
  "space": {"weights": ["1"]},
  "set": {"lower": "0", "upper": "1"},
  "pipeline": {"kind": "composite", "stages": [
    {"kind": "translation", "d": "0.6"},
    {"kind": "grid_quantizer", "step": "1/10"}
  ]},
  "initial": ["0"],
  "metric": "line",
  "max_steps": 64,
  "seed": 1,
  "expected": {"preperiod": 0, "period": 5}
})";

const char* kCircleScenario = R"({
  "name": "circle-bounds",
  "space": {"weights": ["1"]},
  "set": {"lower": "0", "upper": "1"},
  "pipeline": {"kind": "composite", "stages": [
    {"kind": "translation", "d": "0.6"},
    {"kind": "grid_quantizer", "step": "1/10"}
  ]},
  "initial": ["0"],
  "metric": "circle",
  "max_steps": 64,
  "seed": 1,
  "profile_grid": {"kind": "uniform", "denominator": 100}
})";

} // namespace

TEST_CASE("run: missing scenario file exits 2") {
    CHECK(cli::dispatch({"run", "/nonexistent/missing.json"}) == 2);
}

TEST_CASE("run: orbit scenario passes and writes exact trace CSV") {
    const fs::path scenario = temp_file("table1.json");
    const fs::path trace = temp_file("table1.csv");
    write_file(scenario, kTable1Scenario);

    CHECK(cli::dispatch({"run", scenario.string(), "--trace", trace.string()}) == 0);

    const std::string csv = read_file(trace);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "step,displacement,value_0");
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "0,,0");
    CHECK(rows[1] == "1,0.6,0.6");
    CHECK(rows[2] == "2,0.4,0.2");
    CHECK(rows[3] == "3,0.6,0.8");
    CHECK(rows[4] == "4,0.4,0.4");
    CHECK(rows[5] == "5,0.4,0");
}

TEST_CASE("run: four-atom trace has two metadata columns plus one per atom") {
    const fs::path scenario = temp_file("four_atom.json");
    write_file(scenario, R"({
      "name": "four-atom",
      "space": {"weights": ["1", "1", "1", "1"]},
      "set": {"lower": "0", "upper": "1", "mass": "2"},
      "pipeline": {"kind": "composite", "stages": [
        {"kind": "averaging"},
        {"kind": "clip", "lower": "0", "upper": "1"},
        {"kind": "grid_quantizer", "step": "1/10"}
      ]},
      "initial": "random",
      "metric": "L1",
      "max_steps": 16,
      "seed": 11
    })");
    const fs::path trace = temp_file("four_atom.csv");
    CHECK(cli::dispatch({"run", scenario.string(), "--trace", trace.string()}) == 0);
    std::istringstream lines(read_file(trace));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "step,displacement,value_0,value_1,value_2,value_3");
}

TEST_CASE("run: report artifact is byte-identical across runs") {
    const fs::path scenario = temp_file("table1_report.json");
    write_file(scenario, kTable1Scenario);
    const fs::path report_a = temp_file("report_a.json");
    const fs::path report_b = temp_file("report_b.json");
    CHECK(cli::dispatch({"run", scenario.string(), "--report", report_a.string()}) == 0);
    CHECK(cli::dispatch({"run", scenario.string(), "--report", report_b.string()}) == 0);
    CHECK(read_file(report_a) == read_file(report_b));
}

TEST_CASE("run: failing expected block exits 1") {
    const fs::path scenario = temp_file("wrong.json");
    std::string text = kTable1Scenario;
    const auto pos = text.find("\"period\": 5");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 11, "\"period\": 4");
    write_file(scenario, text);
    CHECK(cli::dispatch({"run", scenario.string()}) == 1);
}

TEST_CASE("verify-paper single case and unknown case") {
    CHECK(cli::dispatch({"verify-paper", "--case", "table1-orbit"}) == 0);
    CHECK(cli::dispatch({"verify-paper", "--case", "translation-thresholds"}) == 0);
    CHECK(cli::dispatch({"verify-paper", "--case", "bogus-case"}) == 2);
}

TEST_CASE("verify-paper full registry") {
    CHECK(cli::dispatch({"verify-paper"}) == 0);
}

TEST_CASE("sweep over d reports the pigeonhole periods") {
    const fs::path scenario = temp_file("sweep_base.json");
    const fs::path out = temp_file("sweep_d.csv");
    write_file(scenario, kTable1Scenario);

    CHECK(cli::dispatch({"sweep", scenario.string(), "--param", "d", "--values",
                         "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "--out", out.string()}) == 0);

    std::istringstream lines(read_file(out));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "param,value,preperiod,period,displacement_min,displacement_max");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        // param,value,preperiod,period,...: period sits in field 3
        std::istringstream fields(line);
        std::string field;
        std::getline(fields, field, ',');
        std::getline(fields, field, ',');
        std::getline(fields, field, ',');
        std::getline(fields, field, ',');
        CHECK(std::stoul(field) <= 11);
    }
    CHECK(rows == 9);
}

TEST_CASE("sweep over eps emits found/none column") {
    const fs::path scenario = temp_file("sweep_eps.json");
    const fs::path out = temp_file("sweep_eps.csv");
    write_file(scenario, kCircleScenario);

    CHECK(cli::dispatch({"sweep", scenario.string(), "--param", "eps", "--values", "0.3,0.4",
                         "--out", out.string()}) == 0);
    std::istringstream lines(read_file(out));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "param,value,result,witness");
    std::getline(lines, line);
    CHECK(line.rfind("eps,0.3,none", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("eps,0.4,found", 0) == 0);
}

TEST_CASE("sweep misuse exits 2") {
    const fs::path scenario = temp_file("sweep_base2.json");
    const fs::path out = temp_file("sweep_misuse.csv");
    write_file(scenario, kTable1Scenario);
    // delta does not occur in this pipeline
    CHECK(cli::dispatch({"sweep", scenario.string(), "--param", "delta", "--values", "0.1",
                         "--out", out.string()}) == 2);
    // unknown parameter name rejected by the flag validator
    CHECK(cli::dispatch({"sweep", scenario.string(), "--param", "gamma", "--values", "0.1",
                         "--out", out.string()}) == 2);
}

TEST_CASE("sweep with empty value list writes only the header") {
    const fs::path scenario = temp_file("sweep_base3.json");
    const fs::path out = temp_file("sweep_empty.csv");
    write_file(scenario, kTable1Scenario);
    CHECK(cli::dispatch({"sweep", scenario.string(), "--param", "d", "--values", "", "--out",
                         out.string()}) == 0);
    std::istringstream lines(read_file(out));
    std::string line;
    CHECK(std::getline(lines, line).good());
    CHECK_FALSE(std::getline(lines, line).good());
}

TEST_CASE("check-op properties and exit codes") {
    const fs::path scenario = temp_file("checkop.json");
    write_file(scenario, kTable1Scenario);

    // The quantized translation is idempotence-free and not nonexpansive in
    // the line metric; deviation against a generous bound passes.
    CHECK(cli::dispatch({"check-op", scenario.string(), "--property", "nonexpansive",
                         "--samples", "50", "--witness", "0.54;0.56"}) == 1);
    CHECK(cli::dispatch({"check-op", scenario.string(), "--property", "idempotent",
                         "--samples", "50"}) == 1);
    CHECK(cli::dispatch({"check-op", scenario.string(), "--property", "deviation", "--samples",
                         "50", "--bound", "0.65"}) == 0);

    const fs::path circle = temp_file("checkop_circle.json");
    write_file(circle, kCircleScenario);
    // The circle-metric 2*delta estimate holds for the quantized translation.
    CHECK(cli::dispatch({"check-op", circle.string(), "--property", "perturbation", "--samples",
                         "200", "--delta", "0.05"}) == 0);

    CHECK(cli::dispatch({"check-op", scenario.string(), "--property", "sideways"}) == 2);
    CHECK(cli::dispatch({"check-op", scenario.string()}) == 2); // property required
}

TEST_CASE("unknown flags and commands are rejected") {
    CHECK(cli::dispatch({"frobnicate"}) == 2);
    CHECK(cli::dispatch({"verify-paper", "--nonsense"}) == 2);
    CHECK(cli::dispatch({}) == 2); // a subcommand is required
}

TEST_CASE("shipped scenario files verify end to end") {
    const std::string base = std::string(L1LAB_SOURCE_DIR) + "/scenarios/";
    CHECK(cli::dispatch({"run", base + "quantized_translation.json"}) == 0);
    CHECK(cli::dispatch({"run", base + "consensus_two_point.json"}) == 0);
    CHECK(cli::dispatch({"run", base + "block_average_consensus.json"}) == 0);
}

TEST_CASE("trace CSV renders non-terminating rationals as p/q") {
    const fs::path scenario = temp_file("thirds.json");
    write_file(scenario, R"({
      "name": "thirds",
      "space": {"weights": ["1"]},
      "set": {"lower": "0", "upper": "1"},
      "pipeline": {"kind": "translation", "d": "1/3"},
      "initial": ["0"],
      "metric": "line",
      "max_steps": 8,
      "seed": 1
    })");
    const fs::path trace = temp_file("thirds.csv");
    CHECK(cli::dispatch({"run", scenario.string(), "--trace", trace.string()}) == 0);
    const std::string csv = read_file(trace);
    CHECK(csv.find("1,1/3,1/3") != std::string::npos);
    CHECK(csv.find("2,1/3,2/3") != std::string::npos);
}

TEST_CASE("write_trace_csv rejects unwritable paths") {
    OrbitTrace trace;
    trace.points.push_back({Rational(0)});
    CHECK_THROWS_AS(cli::write_trace_csv(trace, "/nonexistent_dir/trace.csv"), IoError);
    trace.points.clear();
    CHECK_THROWS_AS(cli::write_trace_csv(trace, temp_file("x.csv")), DomainError);
}
