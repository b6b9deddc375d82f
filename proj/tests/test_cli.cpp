#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "arrayobs/cli.hpp"
#include "arrayobs/io.hpp"
#include "support.hpp"

using namespace arrayobs;
using namespace testsupport;

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        (env.empty() ? "" : "env " + env + " ") + std::string(ARRAYOBS_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "arrayobs_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

}  // namespace

TEST_CASE("analyze runs on the fixtures and writes a report") {
    const fs::path out = temp_dir() / "ring_report.json";
    const auto run = run_cli("analyze " + fixture_path("ring4_n6.json") + " --cross-check --json " +
                             out.string());
    CAPTURE(run.output);
    REQUIRE(run.exit_code == 0);
    CHECK(run.output.find("observable: yes") != std::string::npos);
    CHECK(run.output.find("detectable: yes") != std::string::npos);

    const auto report = nlohmann::json::parse(slurp(out));
    CHECK(report["observable"] == true);
    CHECK(report["eigengraphs"].size() == 5);
}

TEST_CASE("analyze reports pairwise verdicts as data, exit code zero") {
    const auto run = run_cli("analyze " + fixture_path("triangle3_n4.json") + " --pair 2 3");
    CAPTURE(run.output);
    REQUIRE(run.exit_code == 0);
    CHECK(run.output.find("observable: no") != std::string::npos);
    CHECK(run.output.find("pair (2, 3): observable=no detectable=no conductance_rank=3/4") !=
          std::string::npos);
}

TEST_CASE("analyze accepts repeated pairs") {
    const auto run = run_cli("analyze " + fixture_path("ring4_n6.json") + " --pair 1 2 --pair 2 4");
    CAPTURE(run.output);
    REQUIRE(run.exit_code == 0);
    CHECK(run.output.find("pair (1, 2)") != std::string::npos);
    CHECK(run.output.find("pair (2, 4)") != std::string::npos);

    CHECK(run_cli("analyze " + fixture_path("ring4_n6.json") + " --pair 1 1").exit_code == 2);
    CHECK(run_cli("analyze " + fixture_path("ring4_n6.json") + " --pair 1 9").exit_code == 2);
}

TEST_CASE("tolerance overrides come from the environment") {
    // an unparsable override is a validation failure
    const auto bad = run_cli("analyze " + fixture_path("ring4_n6.json"), "ARRAYOBS_RANK_RTOL=oops");
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("ARRAYOBS_RANK_RTOL") != std::string::npos);

    // a sane override is picked up and lands in the report
    const fs::path out = temp_dir() / "env_report.json";
    const auto run = run_cli("analyze " + fixture_path("ring4_n6.json") + " --json " + out.string(),
                             "ARRAYOBS_RANK_RTOL=1e-9");
    REQUIRE(run.exit_code == 0);
    const auto report = nlohmann::json::parse(slurp(out));
    CHECK(report["tolerance"]["rank_rtol"] == 1e-9);
}

TEST_CASE("simulate on an oscillator document emits a non-increasing energy column") {
    const fs::path init = temp_dir() / "osc_init.json";
    std::ofstream(init) << R"({"states": [[[1,0],[0,0],[0,0],[0,0]],
                                          [[0,0],[0,0],[0,0],[0,0]],
                                          [[0,0],[0.5,0],[0,0],[0,0]]]})";
    const fs::path csv = temp_dir() / "osc.csv";
    const auto run = run_cli("simulate " + fixture_path("lc_p2_q3.json") + " --init " +
                             init.string() + " --t-final 30 --samples 61 --csv " + csv.string());
    REQUIRE(run.exit_code == 0);

    std::istringstream is(slurp(csv));
    std::string header;
    std::getline(is, header);
    REQUIRE(header.rfind(",V") == header.size() - 2);
    double prev = std::numeric_limits<double>::infinity();
    double first = -1.0;
    for (std::string line; std::getline(is, line);) {
        if (line.empty()) continue;
        const double v = std::stod(line.substr(line.rfind(',') + 1));
        if (first < 0) first = v;
        CHECK(v <= prev + 1e-8 * std::max(1.0, first));
        prev = v;
    }
    CHECK(first > 0.0);
    CHECK(prev < first);  // energy actually dissipated over the horizon

    // open-loop propagation of the same document has no energy column
    const auto open_loop = run_cli("simulate " + fixture_path("lc_p2_q3.json") + " --init " +
                                   init.string() + " --samples 5 --open-loop --csv " + csv.string());
    REQUIRE(open_loop.exit_code == 0);
    std::istringstream is2(slurp(csv));
    std::getline(is2, header);
    CHECK(header.rfind(",V") == std::string::npos);
}

TEST_CASE("analyze emits DOT files for scalar eigengraphs") {
    const fs::path dir = temp_dir() / "dot";
    fs::remove_all(dir);
    const auto run = run_cli("analyze " + fixture_path("ring4_n6.json") + " --dot " + dir.string());
    REQUIRE(run.exit_code == 0);
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        ++count;
        const std::string dot = slurp(entry.path());
        CHECK(dot.find("graph eigengraph_") != std::string::npos);
    }
    CHECK(count == 5);
}

TEST_CASE("malformed input exits with code 2 and names the offending field") {
    const fs::path bad = temp_dir() / "bad.json";
    std::ofstream(bad) << R"({"n": 1, "q": 2, "A": [[[0, 0]]], "couplings": [{"i": 1, "j": 9, "C": [[[1, 0]]]}]})";
    const auto run = run_cli("analyze " + bad.string());
    CHECK(run.exit_code == 2);
    CHECK(run.output.find("couplings[0].j") != std::string::npos);

    const fs::path garbage = temp_dir() / "garbage.json";
    std::ofstream(garbage) << "not json";
    CHECK(run_cli("analyze " + garbage.string()).exit_code == 2);

    CHECK(run_cli("analyze /no/such/file.json").exit_code == 2);
}

TEST_CASE("effcond matches the library and rejects equal vertices") {
    const auto path_run = run_cli("effcond " + fixture_path("path3_n1.json") + " 1 3");
    REQUIRE(path_run.exit_code == 0);
    CHECK(path_run.output.find("0.5") != std::string::npos);

    const fs::path out = temp_dir() / "effcond.json";
    const auto twin = run_cli("effcond " + fixture_path("twin_n2.json") + " 1 2 --json " +
                              out.string());
    REQUIRE(twin.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["rank"] == 2);
    CHECK(doc["residual"].get<double>() < 1e-10);

    CHECK(run_cli("effcond " + fixture_path("path3_n1.json") + " 2 2").exit_code == 2);
    CHECK(run_cli("effcond " + fixture_path("path3_n1.json") + " 1 9").exit_code == 2);
}

TEST_CASE("simulate produces the expected CSV for the triangle fixture") {
    const fs::path init = temp_dir() / "init.json";
    std::ofstream(init) << R"({"states": [[[0,0],[1,0],[0,0],[0,0]],
                                          [[0,0],[0,0],[0,0],[0,0]],
                                          [[0,0],[0,0],[1,0],[0,0]]]})";
    const fs::path csv = temp_dir() / "traj.csv";
    const auto run = run_cli("simulate " + fixture_path("triangle3_n4.json") + " --init " +
                             init.string() + " --t-final 10 --samples 21 --csv " + csv.string());
    REQUIRE(run.exit_code == 0);

    std::istringstream is(slurp(csv));
    std::string header;
    std::getline(is, header);
    // locate the pair (2,3) disagreement column and the output-norm columns
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        for (std::string col; std::getline(hs, col, ',');) cols.push_back(col);
    }
    int d23 = -1;
    std::vector<int> ycols;
    for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
        if (cols[i] == "d_2_3") d23 = i;
        if (cols[i].rfind("y_", 0) == 0) ycols.push_back(i);
    }
    REQUIRE(d23 >= 0);
    REQUIRE(ycols.size() == 3);
    for (std::string line; std::getline(is, line);) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) vals.push_back(std::stod(cell));
        CHECK(vals[d23] == doctest::Approx(1.0).epsilon(1e-9));
        for (int y : ycols) CHECK(std::abs(vals[y]) <= 1e-10);
    }

    // dimension mismatch in the initial state is a validation failure
    const fs::path short_init = temp_dir() / "short_init.json";
    std::ofstream(short_init) << R"({"states": [[[0,0],[1,0]]]})";
    CHECK(run_cli("simulate " + fixture_path("triangle3_n4.json") + " --init " +
                  short_init.string())
              .exit_code == 2);
    CHECK(run_cli("simulate " + fixture_path("triangle3_n4.json")).exit_code == 2);
}

TEST_CASE("simulate picks stored witnesses from a report") {
    const fs::path report = temp_dir() / "tri_report.json";
    REQUIRE(run_cli("analyze " + fixture_path("triangle3_n4.json") + " --pair 2 3 --json " +
                    report.string())
                .exit_code == 0);
    const fs::path csv = temp_dir() / "witness_traj.csv";
    const auto run = run_cli("simulate " + fixture_path("triangle3_n4.json") + " --init-witness " +
                             report.string() + " --witness-label pair_2_3_observable --samples 11" +
                             " --csv " + csv.string());
    REQUIRE(run.exit_code == 0);
    // every output-norm column stays at zero while systems 2 and 3 differ
    std::istringstream is(slurp(csv));
    std::string header;
    std::getline(is, header);
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        for (std::string col; std::getline(hs, col, ',');) cols.push_back(col);
    }
    int d23 = -1;
    std::vector<int> ycols;
    for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
        if (cols[i] == "d_2_3") d23 = i;
        if (cols[i].rfind("y_", 0) == 0) ycols.push_back(i);
    }
    for (std::string line; std::getline(is, line);) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) vals.push_back(std::stod(cell));
        for (int y : ycols) CHECK(std::abs(vals[y]) <= 1e-8);
        CHECK(vals[d23] > 1e-4);
    }
}

TEST_CASE("gen is deterministic and its documents round-trip") {
    const fs::path a = temp_dir() / "gen_a.json";
    const fs::path b = temp_dir() / "gen_b.json";
    REQUIRE(run_cli("gen lc --p 2 --q 3 --seed 7 --out " + a.string()).exit_code == 0);
    REQUIRE(run_cli("gen lc --p 2 --q 3 --seed 7 --out " + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    REQUIRE(run_cli("gen random --q 4 --n 3 --density 0.5 --seed 1 --out " + a.string())
                .exit_code == 0);
    const auto doc = parse_array_document(slurp(a));
    CHECK(doc.system.q == 4);
    CHECK(doc.system.n == 3);
    const std::string again = serialize_array_document(doc);
    CHECK(again == slurp(a));

    // spring single-node chain: drift block carries -M^{-1}K = -2
    REQUIRE(run_cli("gen spring --p 1 --q 2 --b 1 --out " + a.string()).exit_code == 0);
    const auto spring = parse_array_document(slurp(a));
    CHECK(std::abs(spring.system.A(1, 0) - Complex(-2, 0)) < 1e-14);

    CHECK(run_cli("gen lc --p 0 --q 3").exit_code == 2);
    CHECK(run_cli("gen nonsense").exit_code == 2);
}

TEST_CASE("exception mapping covers the documented exit codes") {
    auto code_for = [](auto&& thrower) {
        try {
            thrower();
        } catch (...) {
            return exit_code_for_current_exception();
        }
        return 0;
    };
    CHECK(code_for([] { throw validation_error("bad input"); }) == 2);
    CHECK(code_for([] { throw disagreement_error("routes disagree"); }) == 3);
    CHECK(code_for([] { throw std::runtime_error("anything else"); }) == 2);
}
