#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <trace_lab/cli.hpp>

using namespace trace_lab;
using cli::CommandRequest;
using cli::run;

namespace {

cli::RunResult call(std::string command, std::map<std::string, std::string> params = {}) {
    return run(CommandRequest{std::move(command), std::move(params)});
}

const Json& row(const Json& report, const std::string& name) {
    for (const auto& r : report.at("results"))
        if (r.at("name") == name) return r;
    throw std::runtime_error("no row " + name);
}

} // namespace

TEST(Cli, ThetaReport) {
    const auto r = call("theta", {{"t", "0.25"}});
    EXPECT_EQ(r.exit_code, cli::ok);
    EXPECT_EQ(r.report["command"], "theta");
    EXPECT_EQ(r.report["params"]["t"], "0.25");
    EXPECT_EQ(r.report["params"]["tail-tol"], "1e-12");
    const auto& v = row(r.report, "theta");
    EXPECT_NEAR(v["value"].get<double>(), 2.0000139, 5e-8);
    EXPECT_TRUE(v["error_bound"].is_number());
}

TEST(Cli, EveryCommandRunsWithDefaults) {
    for (const auto& c : cli::commands()) {
        if (c.name == "reproduce-paper" || c.name == "replay" || c.name == "cauchy-report" || c.name == "idele-norm")
            continue;
        std::map<std::string, std::string> params;
        if (c.name == "mc-haar") params["samples"] = "20000";
        const auto r = call(c.name, params);
        EXPECT_EQ(r.exit_code, cli::ok) << c.name << "\n" << r.report.dump(2);
        EXPECT_TRUE(r.report.contains("results")) << c.name;
    }
}

TEST(Cli, PreconditionErrors) {
    auto expect_code = [](const cli::RunResult& r, int code, const std::string& fragment) {
        EXPECT_EQ(r.exit_code, code) << r.report.dump();
        ASSERT_TRUE(r.report.contains("error"));
        EXPECT_EQ(r.report["error"]["code"], code);
        EXPECT_NE(r.report["error"]["message"].get<std::string>().find(fragment), std::string::npos)
            << r.report["error"]["message"];
    };
    expect_code(call("no-such-command"), cli::precondition, "no-such-command");
    expect_code(call("theta", {{"bogus", "1"}}), cli::precondition, "bogus");
    expect_code(call("theta", {{"t", "-1"}}), cli::precondition, "t");
    expect_code(call("theta", {{"t", "abc"}}), cli::precondition, "t");
    expect_code(call("padic-gamma", {{"p", "4"}}), cli::precondition, "prime");
    expect_code(call("padic-gamma", {{"s", "0"}, {"mode", "closed"}}), cli::precondition, "pole");
    expect_code(call("padic-density", {{"x", "0"}, {"method", "series"}}), cli::precondition, "x != 0");
    expect_code(call("cauchy-report"), cli::precondition, "convention");
    expect_code(call("cauchy-report", {{"convention", "other"}}), cli::precondition, "convention");
    expect_code(call("idele-norm", {{"idele", "{not json"}}), cli::precondition, "JSON");
    expect_code(call("idele-norm", {{"idele", R"({"inf": "0"})"}}), cli::precondition, "nonzero");
    expect_code(call("trace-check", {{"law", "stable"}, {"d", "2"}}), cli::precondition, "density");
    expect_code(call("replay", {{"from-report", "/nonexistent/report.json"}}), cli::precondition, "cannot open");
}

TEST(Cli, IdentityFailureExitCode) {
    const auto r = call("padic-integral", {{"reading", "as-displayed"}});
    EXPECT_EQ(r.exit_code, cli::identity_failure);
    EXPECT_FALSE(row(r.report, "full")["pass"].get<bool>());
    EXPECT_TRUE(row(r.report, "unit_ball")["pass"].get<bool>());
}

TEST(Cli, NonConvergenceExitCode) {
    const auto r = call("padic-integral", {{"gamma", "1e-5"}});
    EXPECT_EQ(r.exit_code, cli::non_convergence) << r.report.dump(2);
    EXPECT_FALSE(row(r.report, "full")["converged"].get<bool>());
}

TEST(Cli, SpecExamples) {
    auto r = call("padic-density", {{"p", "2"}, {"gamma", "1"}, {"C", "1"}, {"x", "5"}});
    EXPECT_EQ(r.exit_code, cli::ok);
    EXPECT_NEAR(row(r.report, "shell")["value"].get<double>(), 0.41271, 5e-6);
    EXPECT_TRUE(row(r.report, "series_vs_shell")["pass"].get<bool>());

    r = call("potential-identity", {{"alpha", "0.8"}});
    EXPECT_EQ(r.exit_code, cli::ok);
    EXPECT_TRUE(row(r.report, "diverged")["value"].get<bool>());

    r = call("potential-identity", {{"alpha", "1.5"}});
    EXPECT_EQ(r.exit_code, cli::ok);
    EXPECT_NEAR(row(r.report, "sum_inverse_symbol")["value"].get<double>(), 5.22475, 1e-3);

    r = call("cauchy-report", {{"convention", "consistent"}});
    EXPECT_EQ(r.exit_code, cli::ok);
    EXPECT_LE(std::abs(row(r.report, "difference")["value"].get<double>()), 1e-9);

    r = call("idele-norm", {{"q", "-45/14"}});
    EXPECT_EQ(row(r.report, "norm")["value"], "1");
    r = call("idele-norm", {{"idele", R"({"inf": "2", "2": "2"})"}});
    EXPECT_EQ(row(r.report, "norm")["value"], "1");

    r = call("adele-eval", {{"point", R"({"inf": "1/2"})"}});
    EXPECT_NEAR(row(r.report, "density")["value"].get<double>(), 0.455938, 1e-6);
    r = call("adele-eval", {{"point", R"({"inf": "0", "3": "1/3"})"}});
    EXPECT_EQ(row(r.report, "density")["value"].get<double>(), 0.0);
    r = call("adele-eval", {{"point", R"({"inf": "0", "2": "1/2"})"}, {"char-y", R"({"inf": "1", "fill": "1"})"}});
    EXPECT_NEAR(row(r.report, "char_re")["value"].get<double>(), -1.0, 1e-15);

    r = call("char-sum", {{"mode", "paper-bound"}});
    EXPECT_NEAR(row(r.report, "second_series")["value"].get<double>(), 0.153987, 1e-6);
    EXPECT_GE(row(r.report, "first_series")["value"].get<double>(), 90.0);

    r = call("adelic-theta", {{"lambda", "2"}});
    EXPECT_EQ(r.exit_code, cli::ok);
    EXPECT_NEAR(row(r.report, "left")["value"].get<double>(), 1.0000070, 5e-8);
}

TEST(Cli, CsvRendering) {
    const auto r = call("padic-gamma", {{"p", "3"}, {"s", "0.7"}});
    const std::string csv = cli::render(r, cli::Format::csv);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "name,value,error_bound,reference,defect,pass");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5) << line;
        ++rows;
    }
    EXPECT_EQ(rows, r.report["results"].size());

    const std::string err = cli::render(call("theta", {{"t", "0"}}), cli::Format::csv);
    EXPECT_EQ(err.rfind("code,message\n2,", 0), 0u) << err;
    EXPECT_EQ(cli::to_csv(Json{{"results", Json::array({Json{{"name", "a,\"b\""}, {"value", 1}}})}}),
              "name,value,error_bound,reference,defect,pass\n\"a,\"\"b\"\"\",1,,,,\n");
}

TEST(Cli, ReplayReproducesReport) {
    const auto dir = std::filesystem::temp_directory_path() / "trace_lab_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "report.json";
    const auto first = call("padic-density", {{"p", "3"}, {"gamma", "0.5"}, {"C", "2"}, {"x", "1/9"}});
    std::ofstream(path) << cli::render(first, cli::Format::json);
    const auto again = call("replay", {{"from-report", path.string()}});
    EXPECT_EQ(again.exit_code, cli::ok) << again.report.dump(2);
    EXPECT_TRUE(row(again.report, "identical_results")["value"].get<bool>());
    EXPECT_EQ(again.report["replayed"]["results"], first.report["results"]);
    std::filesystem::remove_all(dir);
}

TEST(Json, NumbersAndRationals) {
    EXPECT_EQ(number_json(std::nan("")), "nan");
    EXPECT_EQ(number_json(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_FALSE(std::signbit(number_json(-0.0).get<double>()));
    EXPECT_TRUE(std::isinf(number_from_json(Json("inf"))));
    EXPECT_EQ(number_from_json(Json(1.5)), 1.5);

    const Rational r(BigInt(-7), BigInt(12));
    EXPECT_EQ(Json(r), "-7/12");
    EXPECT_EQ(Json(r).get<Rational>(), r);
    EXPECT_EQ(Json(3).get<Rational>(), Rational(3));
    EXPECT_EQ(Json(0.25).get<Rational>(), Rational(BigInt(1), BigInt(4)));

    const EvalResult e{1.25, 1e-13, 17, false};
    const EvalResult back = Json(e).get<EvalResult>();
    EXPECT_EQ(back.value, e.value);
    EXPECT_EQ(back.error_bound, e.error_bound);
    EXPECT_EQ(back.terms_used, e.terms_used);
    EXPECT_EQ(back.converged, e.converged);
}

TEST(Json, AdelesAndIdelesRoundTrip) {
    const AdelePoint x(Rational(BigInt(1), BigInt(3)), {{2, Rational(BigInt(5), BigInt(4))}, {3, Rational(7)}});
    const Json jx = x;
    EXPECT_EQ(jx["inf"], "1/3");
    EXPECT_EQ(jx["2"], "5/4");
    EXPECT_FALSE(jx.contains("fill"));
    const AdelePoint xb = jx.get<AdelePoint>();
    EXPECT_EQ(xb.real, x.real);
    EXPECT_EQ(xb.finite, x.finite);

    const Idele a = Idele::diagonal(Rational(BigInt(6), BigInt(5)));
    const Json ja = a;
    EXPECT_EQ(ja["fill"], "6/5");
    const Idele ab = ja.get<Idele>();
    EXPECT_EQ(ab.real, a.real);
    EXPECT_EQ(ab.finite, a.finite);
    EXPECT_EQ(ab.fill, a.fill);

    EXPECT_THROW(Json::parse(R"({"inf": "1", "x": "2"})").get<AdelePoint>(), ParameterError);
    EXPECT_THROW(Json::parse(R"([1, 2])").get<Idele>(), ParameterError);
}

TEST(Json, TraceReportShape) {
    const auto rep = trace_defect(LatticeLawSpec::gaussian(1), 1.0);
    const Json j = rep;
    for (const char* key : {"t", "lattice", "spectral", "defect", "tolerances"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_TRUE(j["tolerances"].contains("combined"));
    EXPECT_EQ(j["lattice"]["converged"], true);
}
