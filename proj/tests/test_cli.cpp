#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string cli = SDTGCN_CLI_PATH;
const std::string data_dir = SDTGCN_DATA_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sdtgcn_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    return lines;
}

const std::string fixture_build_flags =
    " --top-k 8 --sample-n 8 --w 2 --years 2010:2015 --seed 7";

}  // namespace

TEST_CASE("build on the fixture matches the golden bundle byte for byte") {
    TempDir tmp;
    const std::string out = tmp.file("bundle.json");
    REQUIRE(run("build --input " + data_dir + "/fixture_corpus.jsonl --out " + out +
                fixture_build_flags) == 0);
    CHECK(slurp(out) == slurp(data_dir + "/fixture_bundle_golden.json"));
}

TEST_CASE("build twice with the same flags gives identical bundles") {
    TempDir tmp;
    const std::string a = tmp.file("a.json"), b = tmp.file("b.json");
    REQUIRE(run("build --input " + data_dir + "/fixture_corpus.jsonl --out " + a +
                fixture_build_flags) == 0);
    REQUIRE(run("build --input " + data_dir + "/fixture_corpus.jsonl --out " + b +
                fixture_build_flags) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("empty input exits with the dataset-too-small code") {
    TempDir tmp;
    const std::string empty = tmp.file("empty.jsonl");
    std::ofstream(empty).close();
    CHECK(run("build --input " + empty + " --out " + tmp.file("x.json") +
              " --top-k 8 --sample-n 8 --w 2 --years 2010:2015 --seed 7") == 3);
}

TEST_CASE("malformed record exits with the input-error code") {
    TempDir tmp;
    const std::string bad = tmp.file("bad.jsonl");
    {
        std::ofstream out(bad);
        out << R"({"id": "p1", "year": 2010, "topics": ["a"], "references": []})" << "\n";
        out << "this is not json\n";
    }
    CHECK(run("build --input " + bad + " --out " + tmp.file("x.json") +
              " --top-k 1 --sample-n 1 --w 1 --years 2010:2010 --seed 0") == 2);
}

TEST_CASE("synth is deterministic per seed") {
    TempDir tmp;
    const std::string a = tmp.file("a.json"), b = tmp.file("b.json"), c = tmp.file("c.json");
    REQUIRE(run("synth --topics 8 --years 16 --spatial 0.5 --noise 0.1 --seed 3 --w 2 "
                "--out " + a) == 0);
    REQUIRE(run("synth --topics 8 --years 16 --spatial 0.5 --noise 0.1 --seed 3 --w 2 "
                "--out " + b) == 0);
    REQUIRE(run("synth --topics 8 --years 16 --spatial 0.5 --noise 0.1 --seed 4 --w 2 "
                "--out " + c) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("train/eval/predict/plot-data pipeline on a synthetic bundle") {
    TempDir tmp;
    const std::string bundle = tmp.file("bundle.json");
    REQUIRE(run("synth --topics 60 --years 18 --spatial 0.6 --noise 0.1 --seed 5 --w 2 "
                "--start-year 1990 --out " + bundle) == 0);

    const std::string ckpt = tmp.file("ckpt.json");
    const std::string hist = tmp.file("history.csv");
    REQUIRE(run("train --data " + bundle + " --model sdtgcn --T 6 --seed 2 --hidden 8 "
                "--max-epochs 4 --out " + ckpt + " --history " + hist) == 0);

    SUBCASE("history file has the documented header and rows") {
        const std::string text = slurp(hist);
        CHECK(text.rfind("epoch,train_loss,val_loss,lr,elapsed_ms\n", 0) == 0);
        CHECK(line_count(text) == 5);  // header + 4 epochs
    }

    SUBCASE("training is byte-deterministic given the seed") {
        const std::string ckpt2 = tmp.file("ckpt2.json");
        const std::string hist2 = tmp.file("history2.csv");
        REQUIRE(run("train --data " + bundle + " --model sdtgcn --T 6 --seed 2 --hidden 8 "
                    "--max-epochs 4 --out " + ckpt2 + " --history " + hist2) == 0);
        CHECK(slurp(ckpt) == slurp(ckpt2));
        CHECK(slurp(hist) == slurp(hist2));
    }

    SUBCASE("eval appends header plus one row per run plus the average") {
        const std::string results = tmp.file("results.csv");
        REQUIRE(run("eval --data " + bundle + " --ckpt " + ckpt + " --split test "
                    "--runs 3 --out " + results) == 0);
        const std::string text = slurp(results);
        CHECK(text.rfind("model,T,seed,space,mae,mse,var\n", 0) == 0);
        CHECK(line_count(text) == 5);  // header + 3 runs + 1 average
        CHECK(text.find(",avg,") != std::string::npos);
    }

    SUBCASE("predict writes one row per topic with actuals when present") {
        const std::string preds = tmp.file("preds.csv");
        REQUIRE(run("predict --data " + bundle + " --ckpt " + ckpt +
                    " --window-end 2005 --out " + preds) == 0);
        const std::string text = slurp(preds);
        CHECK(text.rfind("topic,predicted,actual\n", 0) == 0);
        CHECK(line_count(text) == 61);
    }

    SUBCASE("plot-data samples the requested topics with the exact header") {
        const std::string fig = tmp.file("fig3.csv");
        REQUIRE(run("plot-data --data " + bundle + " --ckpt " + ckpt +
                    " --topics 50 --seed 1 --out " + fig) == 0);
        const std::string text = slurp(fig);
        CHECK(text.rfind("topic_id,topic_name,predicted,actual\n", 0) == 0);
        CHECK(line_count(text) == 51);
    }

    SUBCASE("missing checkpoint exits with the input-error code") {
        CHECK(run("eval --data " + bundle + " --ckpt " + tmp.file("nope.json") +
                  " --split test --out " + tmp.file("r.csv")) == 2);
    }
}

TEST_CASE("ha training is instant and writes a marker checkpoint") {
    TempDir tmp;
    const std::string bundle = tmp.file("bundle.json");
    REQUIRE(run("synth --topics 8 --years 22 --spatial 0.5 --noise 0.1 --seed 6 --w 2 "
                "--out " + bundle) == 0);
    const std::string ckpt = tmp.file("ha.json");
    REQUIRE(run("train --data " + bundle + " --model ha --T 6 --seed 0 --out " + ckpt) == 0);
    const std::string text = slurp(ckpt);
    CHECK(text.find("\"model\":\"ha\"") != std::string::npos);
    CHECK(text.find("\"params\":[]") != std::string::npos);

    // ten identical result rows plus one average for the deterministic baseline
    const std::string results = tmp.file("results.csv");
    REQUIRE(run("eval --data " + bundle + " --ckpt " + ckpt + " --split test --runs 10 "
                "--out " + results) == 0);
    std::ifstream in(results);
    std::string header, first, line;
    std::getline(in, header);
    std::getline(in, first);
    std::size_t rows = 1;
    bool identical = true;
    std::string last;
    while (std::getline(in, line)) {
        ++rows;
        if (rows <= 10 && line != first) identical = false;
        last = line;
    }
    CHECK(rows == 11);
    CHECK(identical);
    CHECK(last.find(",avg,") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags win") {
    TempDir tmp;
    const std::string cfg = tmp.file("exp.cfg");
    {
        std::ofstream out(cfg);
        out << "topics=9\n";
        out << "years=14\n";
        out << "seed=3\n";
        out << "w=2\n";
    }
    const std::string a = tmp.file("a.json");
    REQUIRE(run("synth --config " + cfg + " --out " + a) == 0);
    const std::string text = slurp(a);
    // 9 topics from the config file
    CHECK(text.find("topic_08") != std::string::npos);
    CHECK(text.find("topic_09") == std::string::npos);

    // flag overrides the config value
    const std::string b = tmp.file("b.json");
    REQUIRE(run("synth --config " + cfg + " --topics 5 --out " + b) == 0);
    CHECK(slurp(b).find("topic_05") == std::string::npos);
}

TEST_CASE("gradcheck subcommand passes on a small instance") {
    CHECK(run("gradcheck --n 4 --T 4 --w 2 --seed 1") == 0);
}
