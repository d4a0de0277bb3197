#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cloudecode/raster.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// CLOUDECODE_BIN is injected by the build.
const char* cli_path() { return CLOUDECODE_BIN; }

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "cloudecode_cli_tests";
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args) {
    fs::path out = work_dir() / "stdout.txt";
    std::string cmd = std::string(cli_path()) + " " + args + " > " + out.string() + " 2> " +
                      (work_dir() / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    result.stdout_text = ss.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("decode of a blank image returns an empty word list") {
    fs::path blank = work_dir() / "blank.png";
    cloudecode::write_image(blank,
                            cloudecode::RasterImage::filled(80, 60, cloudecode::Color{240, 240, 240}));
    RunResult r = run_cli("decode " + blank.string());
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["words"].empty());
    CHECK(doc["meta"].contains("config_hash"));
}

TEST_CASE("decode exit codes partition failures") {
    CHECK(run_cli("decode /nonexistent/missing.png").exit_code == 1);

    fs::path bad_config = work_dir() / "bad_config.json";
    std::ofstream(bad_config) << "{\"no_such_key\": 1}";
    fs::path blank = work_dir() / "blank2.png";
    cloudecode::write_image(blank,
                            cloudecode::RasterImage::filled(20, 20, cloudecode::Color{255, 255, 255}));
    CHECK(run_cli("decode " + blank.string() + " --config " + bad_config.string()).exit_code == 2);

    fs::path not_png = work_dir() / "not_a_png.png";
    std::ofstream(not_png) << "plain text";
    CHECK(run_cli("decode " + not_png.string()).exit_code == 3);
}

TEST_CASE("synth produces files and honors the seed") {
    fs::path prefix = work_dir() / "synth_one";
    RunResult r = run_cli("synth --inline \"token:24\" --seed 5 --out " + prefix.string());
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(prefix.string() + ".png"));
    REQUIRE(fs::exists(prefix.string() + ".json"));
    json gt = json::parse(slurp(prefix.string() + ".json"));
    CHECK(gt["entries"].size() == 1);
    CHECK(gt["entries"][0]["text"] == "token");

    fs::path again = work_dir() / "synth_two";
    run_cli("synth --inline \"token:24\" --seed 5 --out " + again.string());
    CHECK(slurp(prefix.string() + ".png") == slurp(again.string() + ".png"));
    CHECK(slurp(prefix.string() + ".json") == slurp(again.string() + ".json"));

    CHECK(run_cli("synth --inline \"word:500\" --seed 1 --out " + prefix.string()).exit_code == 2);
    CHECK(run_cli("synth --seed 1 --out " + prefix.string()).exit_code == 2);

    // A word that is legal but cannot be placed inside the canvas is a
    // processing failure naming the word.
    fs::path err_out = work_dir() / "placement_stderr.txt";
    std::string cmd = std::string(cli_path()) +
                      " synth --inline \"unplaceable:96\" --width 120 --height 90 --seed 1 --out " +
                      (work_dir() / "tiny").string() + " 2> " + err_out.string();
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
    CHECK(slurp(err_out).find("unplaceable") != std::string::npos);
}

TEST_CASE("decode is byte-deterministic and eval scores ground truth as itself") {
    fs::path prefix = work_dir() / "pipeline";
    REQUIRE(run_cli("synth --inline \"data:40,cloud:28,word:18\" --seed 9 --out " +
                    prefix.string())
                .exit_code == 0);

    fs::path out1 = work_dir() / "decoded1.json";
    fs::path out2 = work_dir() / "decoded2.json";
    REQUIRE(run_cli("decode " + prefix.string() + ".png --out " + out1.string()).exit_code == 0);
    REQUIRE(run_cli("decode " + prefix.string() + ".png --out " + out2.string()).exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));

    // Ground truth evaluated against itself (sizes as estimates) is perfect.
    json gt = json::parse(slurp(prefix.string() + ".json"));
    json self;
    self["meta"] = {{"image", "gt"}, {"config_hash", "gt"}};
    self["words"] = json::array();
    for (const auto& e : gt["entries"])
        self["words"].push_back({{"text", e["text"]},
                                 {"weight", e["font_size"]},
                                 {"raw_size", 1.0},
                                 {"bbox", e["bbox"]},
                                 {"orientation", e["orientation"]}});
    fs::path self_path = work_dir() / "self.json";
    std::ofstream(self_path) << self.dump();
    RunResult r =
        run_cli("eval --decoded " + self_path.string() + " --truth " + prefix.string() + ".json");
    CHECK(r.exit_code == 0);
    json report = json::parse(r.stdout_text);
    CHECK(report["rmse"] == 0.0);
    CHECK(report["recovery_rate"] == 1.0);

    // Real decode still evaluates cleanly (exit 0 regardless of score).
    RunResult r2 = run_cli("eval --decoded " + out1.string() + " --truth " + prefix.string() +
                           ".json");
    CHECK(r2.exit_code == 0);

    // Schema mismatch is a config error.
    CHECK(run_cli("eval --decoded " + prefix.string() + ".json --truth " + prefix.string() +
                  ".json")
              .exit_code == 2);
}

TEST_CASE("effective config round-trips through --dump-config") {
    fs::path prefix = work_dir() / "roundtrip";
    REQUIRE(run_cli("synth --inline \"glyph:36,atlas:20\" --seed 12 --out " + prefix.string())
                .exit_code == 0);
    fs::path out1 = work_dir() / "rt1.json";
    fs::path out2 = work_dir() / "rt2.json";
    fs::path dumped = work_dir() / "effective.json";
    REQUIRE(run_cli("decode " + prefix.string() + ".png --out " + out1.string() +
                    " --dump-config " + dumped.string())
                .exit_code == 0);
    REQUIRE(run_cli("decode " + prefix.string() + ".png --out " + out2.string() + " --config " +
                    dumped.string())
                .exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));

    // The dumped config has every auto value resolved.
    json doc = json::parse(slurp(dumped));
    CHECK(doc["weights"]["x_scale"].get<double>() > 0);
    CHECK(doc["weights_vertical"]["x_scale"].get<double>() > 0);
    CHECK(doc["sweep"]["k"].get<double>() > 0);
    CHECK(doc["diacritic_max_gap"].get<int>() >= 0);
}

TEST_CASE("CLOUDECODE_CONFIG provides config defaults") {
    fs::path blank = work_dir() / "envblank.png";
    cloudecode::write_image(blank,
                            cloudecode::RasterImage::filled(32, 32, cloudecode::Color{255, 255, 255}));
    fs::path config = work_dir() / "env_config.json";
    std::ofstream(config) << "{\"format\": \"csv\"}";

    fs::path out = work_dir() / "envout.txt";
    std::string cmd = "CLOUDECODE_CONFIG=" + config.string() + " " + cli_path() + " decode " +
                      blank.string() + " > " + out.string() + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(slurp(out) == "text,weight\n");

    std::string bad = "CLOUDECODE_CONFIG=/nonexistent/conf.json " + std::string(cli_path()) +
                      " decode " + blank.string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(bad.c_str())) == 1);
}

TEST_CASE("redesign emits a linear bar chart") {
    json decoded;
    decoded["meta"] = {{"image", "x"}, {"config_hash", "x"}};
    decoded["words"] = json::array();
    for (auto [text, weight] : std::vector<std::pair<std::string, double>>{
             {"alpha", 30.0}, {"beta", 20.0}, {"gamma", 10.0}}) {
        decoded["words"].push_back({{"text", text},
                                    {"weight", weight},
                                    {"raw_size", weight},
                                    {"bbox", {0, 0, 1, 1}},
                                    {"orientation", "horizontal"}});
    }
    fs::path in = work_dir() / "bars.json";
    std::ofstream(in) << decoded.dump();
    fs::path svg = work_dir() / "bars.svg";
    REQUIRE(run_cli("redesign --decoded " + in.string() + " --out " + svg.string()).exit_code == 0);
    std::string text = slurp(svg);

    // Bar lengths are linear in weight: 600, 400, 200 for 30:20:10.
    CHECK(text.find("width=\"600\"") != std::string::npos);
    CHECK(text.find("width=\"400\"") != std::string::npos);
    CHECK(text.find("width=\"200\"") != std::string::npos);
    // Labels appear in descending weight order.
    CHECK(text.find("alpha") < text.find("beta"));
    CHECK(text.find("beta") < text.find("gamma"));

    // Empty word list still succeeds with an empty chart.
    json empty = decoded;
    empty["words"] = json::array();
    fs::path empty_in = work_dir() / "empty.json";
    std::ofstream(empty_in) << empty.dump();
    fs::path empty_svg = work_dir() / "empty.svg";
    CHECK(run_cli("redesign --decoded " + empty_in.string() + " --out " + empty_svg.string())
              .exit_code == 0);
    CHECK(slurp(empty_svg).find("<svg") != std::string::npos);
}

TEST_CASE("csv format and multi-file decode") {
    fs::path prefix = work_dir() / "multi";
    REQUIRE(run_cli("synth --inline \"one:30\" --seed 2 --out " + prefix.string() + "_a")
                .exit_code == 0);
    REQUIRE(run_cli("synth --inline \"two:26\" --seed 3 --out " + prefix.string() + "_b")
                .exit_code == 0);

    fs::path outdir = work_dir() / "multi_out";
    fs::create_directories(outdir);
    RunResult r = run_cli("decode " + prefix.string() + "_a.png " + prefix.string() +
                          "_b.png --format csv --jobs 2 --out " + outdir.string());
    CHECK(r.exit_code == 0);
    std::string a = slurp(outdir / "multi_a.csv");
    std::string b = slurp(outdir / "multi_b.csv");
    CHECK(a.rfind("text,weight\none,", 0) == 0);
    CHECK(b.rfind("text,weight\ntwo,", 0) == 0);
}
