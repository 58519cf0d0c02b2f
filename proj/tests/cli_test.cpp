#include "cli.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "cartometry/json_io.hpp"
#include "support/fixtures.hpp"

using namespace carto;
using carto::testing::golden;
using carto::testing::slurp;
using carto::testing::spit;
using carto::testing::TempDir;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// "key   value [unit]" rows of the text report.
std::map<std::string, std::vector<std::string>> rows(const std::string& text) {
    std::map<std::string, std::vector<std::string>> r;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key, tok;
        ls >> key;
        while (ls >> tok) r[key].push_back(tok);
    }
    return r;
}

}  // namespace

TEST(Cli, FormatNumberSixSignificantDigits) {
    EXPECT_EQ(cli::format_number(0.0), "0.00000");
    EXPECT_EQ(cli::format_number(13.02), "13.0200");
    EXPECT_EQ(cli::format_number(5.0), "5.00000");
    EXPECT_EQ(cli::format_number(13'020'000.0), "13020000");
    EXPECT_EQ(cli::format_number(-0.25), "-0.250000");
    EXPECT_EQ(cli::format_number(2.718281828), "2.71828");
    EXPECT_EQ(cli::format_number(1.5e-7), "1.50000e-07");
}

TEST(Cli, InitTraceMeasure) {
    TempDir tmp;
    const std::string s = (tmp / "s.json").string();
    ASSERT_EQ(run_cli({"init", s, "--image", "m.png", "--width", "400", "--height", "300",
                   "--projection", "planar_unknown"}).code, cli::kSuccess);
    EXPECT_EQ(run_cli({"init", s, "--image", "m.png", "--width", "4", "--height", "3"}).code,
              cli::kSchemaOrIo);
    ASSERT_EQ(run_cli({"calibrate", s, "--pair", "0,0=0,0", "--pair", "100,0=5,0"}).code,
              cli::kSuccess);
    ASSERT_EQ(run_cli({"trace", s, "r", "--kind", "route", "-p", "10,10", "-p", "110,10"}).code,
              cli::kSuccess);
    const auto m = run_cli({"measure", s, "r"});
    ASSERT_EQ(m.code, cli::kSuccess) << m.err;
    EXPECT_EQ(rows(m.out)["planar"], (std::vector<std::string>{"5.00000", "km"}));
    EXPECT_EQ(rows(run_cli({"measure", s, "r", "--unit", "m"}).out)["display_value"],
              (std::vector<std::string>{"5000.00", "m"}));
    EXPECT_EQ(rows(run_cli({"measure", s, "r", "--unit", "mi"}).out)["display_value"],
              (std::vector<std::string>{"3.10685", "mi"}));
}

TEST(Cli, TraceWarnsOutsideImage) {
    TempDir tmp;
    const auto s = tmp.copy("rectangle.json").string();
    const auto r = run_cli({"trace", s, "far", "--kind", "route", "-p", "5000,5"});
    EXPECT_EQ(r.code, cli::kSuccess);
    EXPECT_NE(r.err.find("outside"), std::string::npos) << r.err;
}

TEST(Cli, CalibrateGoldenIsByteIdentical) {
    TempDir tmp;
    const auto s = tmp.copy("uncalibrated.json").string();
    const auto r = run_cli({"calibrate", s, "--pairs-file", golden("pairs.csv").string()});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    EXPECT_EQ(slurp(s), slurp(golden("calibrated_expected.json")));
    EXPECT_EQ(rows(r.out)["rms_residual"], (std::vector<std::string>{"0.00000", "km"}));
    EXPECT_EQ(rows(r.out)["coefficients"],
              (std::vector<std::string>{"0.0500000", "0.00000", "0.00000", "0.00000"}));
}

TEST(Cli, TwoExactPairsPrintZeroResidual) {
    TempDir tmp;
    const auto s = tmp.copy("uncalibrated.json").string();
    for (const char* kind : {"similarity"}) {
        const auto r = run_cli({"calibrate", s, "--kind", kind, "--pair", "0,0=3,7", "--pair",
                            "200,0=13,7"});
        ASSERT_EQ(r.code, cli::kSuccess) << r.err;
        EXPECT_EQ(rows(r.out)["rms_residual"][0], "0.00000");
    }
    const auto aff = run_cli({"calibrate", s, "--kind", "affine", "--pair", "0,0=3,7", "--pair",
                          "200,0=13,7", "--pair", "0,100=3,2"});
    ASSERT_EQ(aff.code, cli::kSuccess) << aff.err;
    EXPECT_EQ(rows(aff.out)["rms_residual"][0], "0.00000");
    EXPECT_EQ(rows(aff.out)["coefficients"].size(), 6u);
}

TEST(Cli, CalibrateGeographicPairs) {
    TempDir tmp;
    const std::string s = (tmp / "g.json").string();
    ASSERT_EQ(run_cli({"init", s, "--image", "m.png", "--width", "1000", "--height", "1000"}).code, 0);
    const auto r = run_cli({"calibrate", s, "--geo", "--pair", "0,0=60.05,9.9", "--pair",
                        "1000,0=60.05,10.1", "--json"});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    const Session cal = load_session(s);
    const Session ref = load_session(golden("georef.json"));
    const auto a = cal.calibration->transform.coefficients();
    const auto b = ref.calibration->transform.coefficients();
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], 1e-9 * std::max(1.0, std::abs(b[i])));
}

TEST(Cli, SinglePairIsInsufficient) {
    TempDir tmp;
    const auto s = tmp.copy("uncalibrated.json").string();
    const std::string before = slurp(s);
    const auto r = run_cli({"calibrate", s, "--pair", "0,0=0,0"});
    EXPECT_EQ(r.code, cli::kDomain);
    EXPECT_NE(r.err.find("insufficient control points"), std::string::npos) << r.err;
    EXPECT_EQ(slurp(s), before);
}

TEST(Cli, RectangleAnchor) {
    const auto r = run_cli({"measure", golden("rectangle.json").string(), "isacov"});
    ASSERT_EQ(r.code, cli::kSuccess);
    EXPECT_EQ(rows(r.out)["bbox_area"], (std::vector<std::string>{"13.0200", "km²"}));
    const Json j = Json::parse(run_cli({"measure", golden("rectangle.json").string(), "isacov",
                                    "--json"}).out);
    EXPECT_NEAR(j["bbox_area"].get<double>(), 13.02, 1e-9);
}

// Every complete feature of every calibrated golden session: JSON parses
// with the fixed field set and agrees with the text report digit for digit.
TEST(Cli, JsonMatchesText) {
    const std::vector<std::string> fields = {"feature_id", "kind", "planar", "geodesic",
                                             "anomaly_ratio", "bbox_w", "bbox_h", "bbox_area",
                                             "simple", "display_value", "display_unit"};
    int checked = 0;
    for (const char* name : {"rectangle.json", "circle.json", "square.json", "georef.json",
                             "calibrated_expected.json"}) {
        const Session s = load_session(golden(name));
        for (const auto& f : s.features) {
            if (!f.complete()) continue;
            SCOPED_TRACE(std::string(name) + " " + f.id);
            const auto text = run_cli({"measure", golden(name).string(), f.id});
            const auto js = run_cli({"measure", golden(name).string(), f.id, "--json"});
            ASSERT_EQ(text.code, 0);
            ASSERT_EQ(js.code, 0);
            ASSERT_EQ(std::count(js.out.begin(), js.out.end(), '\n'), 1);
            const Json j = Json::parse(js.out);
            std::vector<std::string> keys;
            for (const auto& [k, v] : j.items()) keys.push_back(k);
            EXPECT_EQ(keys, fields);
            auto r = rows(text.out);
            for (const auto& [k, v] : j.items()) {
                if (v.is_number()) EXPECT_EQ(r[k].at(0), cli::format_number(v.get<double>())) << k;
                else if (v.is_null()) EXPECT_EQ(r[k].at(0), "null") << k;
                else if (v.is_boolean()) EXPECT_EQ(r[k].at(0), v.get<bool>() ? "true" : "false");
                else if (k != "display_unit") EXPECT_EQ(r[k].at(0), v.get<std::string>()) << k;
            }
            ++checked;
        }
    }
    EXPECT_GE(checked, 9);
}

TEST(Cli, FitCircleIsExactAtOneHarmonic) {
    const auto r = run_cli({"fit", golden("circle.json").string(), "pond", "--n", "1"});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    EXPECT_LT(std::stod(rows(r.out)["rms_error"].at(0)), 1e-6);
    EXPECT_EQ(rows(r.out)["area"].at(0), "12.5664");
    const Json j = Json::parse(run_cli({"fit", golden("circle.json").string(), "pond", "--n", "1",
                                    "--json"}).out);
    EXPECT_EQ(j["n"], 1);
    EXPECT_NEAR(j["area"].get<double>(), 4 * M_PI, 1e-9);
}

TEST(Cli, ErrorCurveOnSquareTrace) {
    const auto r = run_cli({"fit", golden("square.json").string(), "polder", "--error-curve", "8"});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "n,rms,area");
    std::vector<double> rms;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.rfind(',');
        EXPECT_EQ(std::stoi(line.substr(0, c1)), static_cast<int>(rms.size()) + 1);
        rms.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    ASSERT_EQ(rms.size(), 8u);
    for (std::size_t i = 0; i < rms.size(); ++i) {
        EXPECT_GT(rms[i], 0.0);
        if (i > 0) EXPECT_LT(rms[i], rms[i - 1]);
    }
}

TEST(Cli, EmitSamplesAddsRegion) {
    TempDir tmp;
    const auto s = tmp.copy("circle.json").string();
    const auto r = run_cli({"fit", s, "pond", "--n", "1", "--emit-samples", "256"});
    ASSERT_EQ(r.code, cli::kSuccess) << r.err;
    const Session after = load_session(s);
    const Feature& f = after.feature("pond-fourier-n1");
    EXPECT_EQ(f.kind, FeatureKind::region);
    EXPECT_EQ(f.pixel_points.size(), 256u);
    // Inscribed 256-gon of the r = 2 km circle.
    EXPECT_NEAR(measure_feature(after, f.id).planar_value, 128 * 4 * std::sin(2 * M_PI / 256), 1e-9);
}

TEST(Cli, DomainFailuresLeaveSessionUntouched) {
    TempDir tmp;
    const auto s = tmp.copy("square.json").string();
    const auto u = tmp.copy("uncalibrated.json").string();
    const std::string before = slurp(s), ubefore = slurp(u);
    struct Case {
        std::vector<std::string> args;
        int code;
        std::string message;
    };
    const Case cases[] = {
        {{"fit", s, "dyke"}, cli::kDomain, "fit requires a region"},
        {{"fit", s, "nope"}, cli::kDomain, "feature not found"},
        {{"measure", s, "nope"}, cli::kDomain, "feature not found"},
        {{"measure", s, "stub"}, cli::kDomain, ""},
        {{"fit", s, "polder", "--n", "12"}, cli::kDomain, ""},
        {{"fit", s, "polder", "--n", "12", "--emit-samples", "50"}, cli::kDomain, ""},
        {{"trace", s, "dyke", "-p", "200,200"}, cli::kDomain, "repeats"},
        {{"trace", s, "dyke", "-p", "1,1", "-p", "1,1"}, cli::kDomain, "repeats"},
        {{"measure", u, "isacov"}, cli::kDomain, "not calibrated"},
        {{"calibrate", s, "--kind", "affine", "--pair", "0,0=0,0", "--pair", "1,1=1,1", "--pair",
          "2,2=2,0"},
         cli::kDomain, ""},
        {{"measure", s, "polder", "--unit", "parsec"}, cli::kUsage, ""},
        {{"calibrate", s, "--pair", "0,0=zero,0", "--pair", "1,0=1,0"}, cli::kUsage, ""},
        {{"calibrate", s, "--pairs-file", (tmp / "missing.csv").string()}, cli::kSchemaOrIo, ""},
        {{"bogus"}, cli::kUsage, ""},
        {{}, cli::kUsage, ""},
    };
    for (const auto& c : cases) {
        SCOPED_TRACE(::testing::PrintToString(c.args));
        const auto r = run_cli(c.args);
        EXPECT_EQ(r.code, c.code) << r.err;
        if (!c.message.empty()) EXPECT_NE(r.err.find(c.message), std::string::npos) << r.err;
        EXPECT_EQ(slurp(s), before);
        EXPECT_EQ(slurp(u), ubefore);
    }
}

TEST(Cli, SchemaAndIoErrorsExitTwo) {
    TempDir tmp;
    spit(tmp / "broken.json", "{\"schema_version\": \"1\",");
    spit(tmp / "future.json", "{\"schema_version\": \"9\"}");
    EXPECT_EQ(run_cli({"measure", (tmp / "broken.json").string(), "x"}).code, cli::kSchemaOrIo);
    EXPECT_EQ(run_cli({"measure", (tmp / "future.json").string(), "x"}).code, cli::kSchemaOrIo);
    EXPECT_EQ(run_cli({"measure", (tmp / "absent.json").string(), "x"}).code, cli::kSchemaOrIo);
    const auto r = run_cli({"serve", (tmp / "no-such-dir").string()});
    EXPECT_EQ(r.code, cli::kSchemaOrIo);
    spit(tmp / "file", "x");
    EXPECT_EQ(run_cli({"serve", (tmp / "file").string()}).code, cli::kSchemaOrIo);
}

TEST(Cli, HelpExitsZero) {
    EXPECT_EQ(run_cli({"--help"}).code, cli::kSuccess);
    EXPECT_EQ(run_cli({"fit", "--help"}).code, cli::kSuccess);
}
