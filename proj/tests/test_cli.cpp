#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperbound/cli.hpp"
#include "hyperbound/errors.hpp"

using namespace hyperbound;
using namespace hyperbound::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json results(const Outcome& o) { return nlohmann::json::parse(o.out)["results"]; }

}  // namespace

TEST_CASE("grid syntax") {
    const auto g = parse_grid("0:1:5");
    REQUIRE(g.size() == 5);
    CHECK(g[0] == 0.0);
    CHECK(g[2] == 0.5);
    CHECK(g[4] == 1.0);
    const auto l = parse_grid("log:0.01:100:5");
    CHECK(l[0] == 0.01);
    CHECK(l[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l[4] == 100.0);
    CHECK(parse_grid("-1:2:2").size() == 2);
    for (const char* bad : {"1:0:5", "0:1:1", "0:1:2.5", "log:0:1:3", "0:1", "a:b:c", "0:1:3:4"}) {
        INFO(bad);
        CHECK_THROWS_AS((void)parse_grid(bad), UsageError);
    }
}

TEST_CASE("parameter lists") {
    CHECK(parse_params("1,2.5,-3") == ParamVec{1.0, 2.5, -3.0});
    CHECK(parse_params("").empty());
    CHECK_THROWS_AS((void)parse_params("1,,2"), UsageError);
    CHECK_THROWS_AS((void)parse_params("1,inf"), UsageError);
    CHECK_THROWS_AS((void)parse_params("nan"), UsageError);
    CHECK_THROWS_AS((void)parse_params("1e999"), UsageError);
}

TEST_CASE("number formatting keeps 15 significant digits") {
    CHECK(format_number(1.0 / 3.0) == "0.333333333333333");
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1e-300) == "1e-300");
    CHECK(parse_format("csv") == OutputFormat::csv);
    CHECK_THROWS_AS((void)parse_format("xml"), UsageError);
}

TEST_CASE("documented invocations") {
    const auto e = invoke({"eval", "--A", "1", "--B", "2", "--x", "1"});
    CHECK(e.code == exit_ok);
    CHECK(results(e)[0]["value"].get<double>() == doctest::Approx(1.7182818284590452).epsilon(1e-14));

    const auto b = invoke({"bounds", "--family", "luke", "--A", "1", "--B", "2", "--x", "0"});
    CHECK(b.code == exit_ok);
    CHECK(results(b)[0]["lower"].get<double>() == 1.0);
    CHECK(results(b)[0]["upper"].get<double>() == 1.0);

    const auto c = invoke({"check", "--A", "2,2", "--B", "1,3"});
    CHECK(c.code == exit_hypothesis);
    CHECK(results(c)[0]["conditions"]["weak_supermajorized"]["verdict"] == "fails");
    CHECK(results(c)[0]["conditions"]["weak_supermajorized"]["witness"] == 1);
}

TEST_CASE("output is byte-deterministic") {
    const std::vector<std::string> args{"eval", "--A", "0.5,1.5", "--B", "2.5,3", "--grid", "log:0.1:30:7"};
    CHECK(invoke(args).out == invoke(args).out);
    const std::vector<std::string> camp{"campaign", "--scan", "cm", "--count", "6", "--seed", "3", "--dominated",
                                        "--threads", "3"};
    const auto one = invoke(camp);
    CHECK(one.code == exit_ok);
    CHECK(one.out == invoke(camp).out);
    auto single = camp;
    single.back() = "1";
    CHECK(invoke(single).out == one.out);
}

TEST_CASE("json keys are sorted") {
    const auto e = invoke({"eval", "--A", "1", "--B", "2", "--x", "0.5"});
    const auto pos_err = e.out.find("\"error_estimate\"");
    const auto pos_in = e.out.find("\"inputs\"");
    const auto pos_val = e.out.find("\"value\"");
    CHECK(pos_err < pos_in);
    CHECK(pos_in < pos_val);
}

TEST_CASE("csv and text formats") {
    const auto c = invoke({"eval", "--A", "1", "--B", "2", "--grid", "0:1:3", "--format", "csv"});
    CHECK(c.code == exit_ok);
    std::istringstream lines(c.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "error_estimate,inputs.x,method,status,value");
    int rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == 3);

    const auto t = invoke({"eval", "--A", "1", "--B", "2", "--x", "1", "--format", "text"});
    CHECK(t.out.find("value: 1.718281828459") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    CHECK(invoke({}).code == exit_usage);
    CHECK(invoke({"frobnicate"}).code == exit_usage);
    CHECK(invoke({"eval", "--A", "1"}).code == exit_usage);
    CHECK(invoke({"eval", "--A", "1", "--B", "2"}).code == exit_usage);
    CHECK(invoke({"eval", "--A", "1", "--B", "2", "--x", "1", "--grid", "0:1:3"}).code == exit_usage);
    CHECK(invoke({"eval", "--A", "x", "--B", "2", "--x", "1"}).code == exit_usage);
    CHECK(invoke({"eval", "--A", "1", "--B", "2", "--x", "1", "--format", "xml"}).code == exit_usage);
    CHECK(invoke({"bounds", "--family", "nope", "--x", "1"}).code == exit_usage);
    CHECK(invoke({"eval", "--A", "1", "--B", "-1", "--x", "1"}).code == exit_usage);
    const auto h = invoke({"--help"});
    CHECK(h.code == exit_ok);
    CHECK(h.out.find("campaign") != std::string::npos);
}

TEST_CASE("tolerance from the environment") {
    const std::vector<std::string> args{"eval", "--A", "1", "--B", "2", "--x", "1"};
    ::setenv("HYPERBOUND_TOL", "1e-6", 1);
    const auto env = nlohmann::json::parse(invoke(args).out);
    CHECK(env["request"]["tolerance"].get<double>() == 1e-6);
    auto flagged = args;
    flagged.insert(flagged.end(), {"--tol", "1e-8"});
    CHECK(nlohmann::json::parse(invoke(flagged).out)["request"]["tolerance"].get<double>() == 1e-8);
    ::setenv("HYPERBOUND_TOL", "abc", 1);
    CHECK(invoke(args).code == exit_usage);
    ::unsetenv("HYPERBOUND_TOL");
    CHECK(nlohmann::json::parse(invoke(args).out)["request"]["tolerance"].get<double>() == 1e-14);
}

TEST_CASE("status and exit codes of the other commands") {
    CHECK(invoke({"cm-scan", "--A", "1", "--B", "2"}).code == exit_ok);
    CHECK(invoke({"cm-scan", "--A", "2", "--B", "1", "--n-max", "2"}).code == exit_hypothesis);
    CHECK(invoke({"cm-scan", "--A", "1", "--B", "2", "--sigma", "1", "--method", "fd", "--n-max", "4"}).code ==
          exit_ok);
    CHECK(invoke({"cm-scan", "--A", "1", "--B", "2", "--log-cm"}).code == exit_usage);
    CHECK(invoke({"ratio-scan", "--A2", "1", "--B2", "2", "--mu", "1", "--grid", "-0.9:5:20"}).code == exit_ok);
    CHECK(invoke({"convexity-scan", "--A2", "1", "--B2", "2", "--x", "1"}).code == exit_ok);
    // A genuine counterexample with every hypothesis holding.
    CHECK(invoke({"convexity-scan", "--A2", "1", "--B2", "2", "--x", "-2"}).code == exit_property);
    CHECK(invoke({"convexity-scan", "--A2", "2", "--B2", "1", "--x", "1"}).code == exit_hypothesis);
    CHECK(invoke({"kernel", "--A", "1,1", "--B", "2,2", "--t", "0.5"}).code == exit_ok);
    CHECK(invoke({"kernel", "--A", "2", "--B", "1.5", "--scan", "64"}).code == exit_hypothesis);
    CHECK(invoke({"verify-rep", "--rep", "stieltjes", "--sigma", "1", "--A", "1", "--B", "2", "--grid",
                  "0:0.9:4"})
              .code == exit_ok);
    CHECK(invoke({"bounds", "--family", "f01", "--c", "2", "--grid", "0:5:6"}).code == exit_ok);
    CHECK(invoke({"bounds", "--family", "stieltjes", "--sigma", "1", "--A", "1", "--B", "2", "--x", "0.5"})
              .code == exit_ok);
    CHECK(invoke({"bounds", "--family", "luke", "--A", "3", "--B", "1", "--x", "1"}).code == exit_hypothesis);
    const auto camp = invoke({"campaign", "--scan", "ratio", "--count", "4", "--dominated"});
    CHECK(camp.code == exit_ok);
    for (const auto& row : results(camp)) CHECK(row["report"].contains("hypotheses_hold"));
}
