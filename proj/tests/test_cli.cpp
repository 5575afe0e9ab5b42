#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = RIDGE_CLI_PATH;
const fs::path kTmp = RIDGE_TEST_TMP;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TmpDir {
    fs::path path;
    explicit TmpDir(const std::string& name) : path(kTmp / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TmpDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("synth: row count, reproducibility, invalid specs") {
    TmpDir dir("synth");
    const fs::path out = dir.path / "cloud.csv";
    REQUIRE(run("synth --shape circle --n 200 --seed 7 --out " + out.string()) == 0);
    {
        std::ifstream in(out);
        int lines = 0;
        std::string line;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 201);  // header + 200 rows
    }
    CHECK(fs::exists(dir.path / "cloud_truth.csv"));
    CHECK(fs::exists(dir.path / "cloud_manifest.json"));

    const std::string first = slurp(out);
    REQUIRE(run("synth --shape circle --n 200 --seed 7 --out " + out.string()) == 0);
    CHECK(slurp(out) == first);  // identical bytes

    CHECK(run("synth --shape circle --n 0 --out " + out.string()) == 3);
    CHECK(run("synth --shape blob --n 10 --out " + out.string()) == 3);
    CHECK(run("synth --shape circle --n 10 --noise -1 --out " + out.string()) == 3);
}

TEST_CASE("extract: outputs, manifest, error exit codes") {
    TmpDir dir("extract");
    const fs::path cloud = dir.path / "cloud.csv";
    REQUIRE(run("synth --shape xcross --n 200 --seed 3 --out " + cloud.string()) == 0);

    const fs::path config = dir.path / "run.conf";
    {
        std::ofstream out(config);
        out << "algorithm = alg2\n"
               "tau = 0.1\n"
               "a = 0.005\n"
               "eta_threshold = auto\n";
    }
    const fs::path out_dir = dir.path / "out";
    REQUIRE(run("extract --input " + cloud.string() + " --config " + config.string() +
                " --out-dir " + out_dir.string()) == 0);
    CHECK(fs::exists(out_dir / "ridge_points.csv"));
    CHECK(fs::exists(out_dir / "per_start.csv"));

    const auto summary = nlohmann::json::parse(slurp(out_dir / "summary.json"));
    CHECK(summary.contains("eps_eta_used"));
    CHECK(summary["n_starts"] == 200);
    int total = 0;
    for (const auto& [key, count] : summary["stage_counts"].items())
        total += count.get<int>();
    CHECK(total == 200);

    // manifest materializes every config default
    const auto manifest = nlohmann::json::parse(slurp(out_dir / "manifest.json"));
    for (const char* key : {"k", "h", "algorithm", "tau", "rho", "kernel", "a",
                            "eps_tol", "max_iters", "alpha", "eta_threshold",
                            "jump_factor", "seed"})
        CHECK(manifest["config"].contains(key));
    CHECK(manifest["config"]["h"].is_number());  // bandwidth resolved, not "auto"

    // missing input file -> exit 2
    CHECK(run("extract --input " + (dir.path / "nope.csv").string() + " --out-dir " +
              out_dir.string()) == 2);

    // invalid config value -> exit 3
    {
        std::ofstream out(config);
        out << "k = 5\n";  // k >= d
    }
    CHECK(run("extract --input " + cloud.string() + " --config " + config.string() +
              " --out-dir " + out_dir.string()) == 3);

    // unknown key -> exit 3
    {
        std::ofstream out(config);
        out << "bandwidth = 0.2\n";
    }
    CHECK(run("extract --input " + cloud.string() + " --config " + config.string() +
              " --out-dir " + out_dir.string()) == 3);

    // malformed config line -> exit 2 (parse error)
    {
        std::ofstream out(config);
        out << "this is not a key value line\n";
    }
    CHECK(run("extract --input " + cloud.string() + " --config " + config.string() +
              " --out-dir " + out_dir.string()) == 2);
}

TEST_CASE("extract: manifest replays to identical outputs") {
    TmpDir dir("replay");
    const fs::path cloud = dir.path / "cloud.csv";
    REQUIRE(run("synth --shape circle --n 120 --seed 9 --out " + cloud.string()) == 0);
    const fs::path config = dir.path / "run.conf";
    {
        std::ofstream out(config);
        out << "algorithm = alg2\ntau = 0.1\n";
    }
    const fs::path out1 = dir.path / "out1";
    const fs::path out2 = dir.path / "out2";
    REQUIRE(run("extract --input " + cloud.string() + " --config " + config.string() +
                " --out-dir " + out1.string()) == 0);

    // rebuild an equivalent config from the materialized manifest
    const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
    const fs::path config2 = dir.path / "replay.conf";
    {
        std::ofstream out(config2);
        for (const auto& [key, value] : manifest["config"].items()) {
            if (value.is_string())
                out << key << " = " << value.get<std::string>() << "\n";
            else {
                out.precision(17);
                out << key << " = " << value << "\n";
            }
        }
    }
    REQUIRE(run("extract --input " + cloud.string() + " --config " + config2.string() +
                " --out-dir " + out2.string()) == 0);
    CHECK(slurp(out1 / "ridge_points.csv") == slurp(out2 / "ridge_points.csv"));
    CHECK(slurp(out1 / "per_start.csv") == slurp(out2 / "per_start.csv"));
}

TEST_CASE("bench: presets and invalid names") {
    TmpDir dir("bench");
    CHECK(run("bench --preset nonsense --out-dir " + dir.path.string()) == 3);
    // the valid presets are exercised by the acceptance suite (they are slow);
    // here only the dispatch and error path are checked
}

TEST_CASE("validate: passes clean, fails under fault injection") {
    CHECK(run("validate") == 0);

    TmpDir dir("validate");
    const fs::path report = dir.path / "report.json";
    const std::string cmd =
        kCli + " validate --json > " + report.string() + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const auto j = nlohmann::json::parse(slurp(report));
    CHECK(j["pass"] == true);
    bool saw_gradient_group = false;
    for (const auto& g : j["groups"]) {
        CHECK(g["pass"] == true);
        if (g["name"] == "ridgeness_gradient") saw_gradient_group = true;
    }
    CHECK(saw_gradient_group);

    // hidden negative control: flipping the grad_eta sign must break exactly
    // the gradient group and exit 1
    const std::string fault_cmd =
        kCli + " validate --json --inject-grad-eta-fault > " + report.string() +
        " 2>/dev/null";
    CHECK(WEXITSTATUS(std::system(fault_cmd.c_str())) == 1);
    const auto jf = nlohmann::json::parse(slurp(report));
    CHECK(jf["pass"] == false);
    for (const auto& g : jf["groups"]) {
        if (g["name"] == "ridgeness_gradient") CHECK(g["pass"] == false);
        if (g["name"] == "kde_derivatives") CHECK(g["pass"] == true);
    }
}

TEST_CASE("CLI rejects unknown subcommands and missing required flags") {
    CHECK(run("frobnicate") != 0);
    CHECK(run("extract") != 0);  // --input required
}
