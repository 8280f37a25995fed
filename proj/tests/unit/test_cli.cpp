#include "rqrc/cli.hpp"
#include "rqrc/datasets.hpp"

#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path root()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "rqrc_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Small enough for second-scale runs.
json small_config()
{
    return {
      {"dataset", {{"n_train", 40}, {"n_test", 20}}},
      {"encoding", {{"a0", 1.0}, {"T", 1.0}, {"m", 1}}},
      {"modes", {{"n_modes", 3}}},
      {"reservoir", {{"steps_per_period", 100}}},
      {"sweep", {{"a0", {1.0, 2.0, 3.0}}, {"T", {1.0}}, {"m", {1}}}},
      {"cache", false},
    };
}

fs::path write_config(const std::string& name, const json& j)
{
    const auto p = root() / (name + ".json");
    std::ofstream(p) << j.dump(2);
    return p;
}

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = rqrc::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

std::vector<std::string> lines(const fs::path& p)
{
    std::ifstream is(p);
    std::vector<std::string> v;
    for (std::string l; std::getline(is, l);) {
        v.push_back(l);
    }
    return v;
}

}  // namespace

TEST_CASE("unknown config keys are rejected with exit code 2")
{
    auto j = small_config();
    j["encoding"]["foo"] = 1;
    const auto r = run({"--config", write_config("unknown", j).string(), "--out",
                        (root() / "unknown").string(), "dataset"});
    CHECK(r.code == 2);
    CHECK(r.err.find("error=config_error") != std::string::npos);
    CHECK(r.err.find("unknown key 'foo'") != std::string::npos);
}

TEST_CASE("usage and validation errors")
{
    CHECK(run({"--config", (root() / "nope.json").string(), "dataset"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);

    auto j = small_config();
    j["dataset"]["n_train"] = 41;
    CHECK(run({"--config", write_config("odd", j).string(), "--out", (root() / "odd").string(), "dataset"}).code == 2);
    j = small_config();
    j["learning"] = {{"l", 0.0}};
    CHECK(run({"--config", write_config("l0", j).string(), "--out", (root() / "l0").string(), "train"}).code == 2);
    CHECK(run({"--workers", "0", "--out", (root() / "w0").string(), "dataset"}).code == 2);
}

TEST_CASE("dataset outputs carry the config stamp")
{
    const auto out = root() / "dataset";
    const auto r = run({"--config", write_config("base", small_config()).string(), "--out",
                        out.string(), "dataset"});
    REQUIRE(r.code == 0);
    const auto resolved = json::parse(slurp(out / "resolved_config.json"));
    const std::string hash = resolved["meta"]["config_hash"];
    CHECK(hash.size() == 16);
    CHECK(resolved["meta"]["artifact_version"] == "rqrc-1.0.0");
    const auto train = lines(out / "train.csv");
    CHECK(train.front() == "# rqrc-1.0.0 config=" + hash);
    CHECK(rqrc::load_csv(out / "train.csv").size() == 40);
    CHECK(rqrc::load_csv(out / "test.csv").size() == 20);

    // The resolved config is itself a valid config with the same hash.
    const auto again = root() / "dataset_again";
    REQUIRE(run({"--config", (out / "resolved_config.json").string(), "--out", again.string(), "dataset"}).code == 0);
    CHECK(json::parse(slurp(again / "resolved_config.json"))["meta"]["config_hash"] == hash);
    CHECK(slurp(again / "train.csv") == slurp(out / "train.csv"));

    // A different seed changes the data and the hash.
    const auto seeded = root() / "dataset_seed";
    REQUIRE(run({"--config", write_config("base", small_config()).string(), "--out", seeded.string(),
                 "--seed", "5", "dataset"}).code == 0);
    const auto rs = json::parse(slurp(seeded / "resolved_config.json"));
    CHECK(rs["seeds"]["dataset"] == 5);
    CHECK(rs["seeds"]["split"] == 6);
    CHECK(rs["meta"]["config_hash"] != hash);
}

TEST_CASE("train is reproducible byte for byte")
{
    const auto cfg = write_config("base", small_config()).string();
    const auto a = root() / "train_a";
    const auto b = root() / "train_b";
    REQUIRE(run({"--config", cfg, "--out", a.string(), "train"}).code == 0);
    REQUIRE(run({"--config", cfg, "--out", b.string(), "--workers", "2", "train"}).code == 0);
    CHECK(slurp(a / "metrics.json") == slurp(b / "metrics.json"));
    CHECK(slurp(a / "model.json") == slurp(b / "model.json"));
    CHECK(slurp(a / "scores.csv") == slurp(b / "scores.csv"));
    const auto metrics = json::parse(slurp(a / "metrics.json"));
    CHECK(metrics["n_train"] == 40);
    CHECK(metrics["A_test"].get<double>() >= 0.0);
    CHECK(metrics["A_test"].get<double>() <= 1.0);
    CHECK(lines(a / "scores.csv").size() == 1 + 1 + 60);
    CHECK(fs::exists(a / "timing.json"));
}

TEST_CASE("cached features give identical results")
{
    auto j = small_config();
    j["cache"] = true;
    const auto cfg = write_config("cached", j).string();
    const auto out = root() / "cached";
    REQUIRE(run({"--config", cfg, "--out", out.string(), "train"}).code == 0);
    const auto first = slurp(out / "metrics.json");
    CHECK_FALSE(fs::is_empty(out / "cache"));
    REQUIRE(run({"--config", cfg, "--out", out.string(), "train"}).code == 0);
    CHECK(slurp(out / "metrics.json") == first);
}

TEST_CASE("environment overrides sit between flags and the config")
{
    auto j = small_config();
    j["output_dir"] = (root() / "from_config").string();
    const auto cfg = write_config("env", j).string();

    REQUIRE(run({"--config", cfg, "dataset"}).code == 0);
    CHECK(fs::exists(root() / "from_config" / "train.csv"));

    ::setenv("RQRC_OUT", (root() / "from_env").string().c_str(), 1);
    ::setenv("RQRC_WORKERS", "3", 1);
    REQUIRE(run({"--config", cfg, "dataset"}).code == 0);
    CHECK(fs::exists(root() / "from_env" / "train.csv"));
    CHECK(json::parse(slurp(root() / "from_env" / "resolved_config.json"))["workers"] == 3);

    REQUIRE(run({"--config", cfg, "--out", (root() / "from_flag").string(), "--workers", "2", "dataset"}).code == 0);
    CHECK(fs::exists(root() / "from_flag" / "train.csv"));
    CHECK(json::parse(slurp(root() / "from_flag" / "resolved_config.json"))["workers"] == 2);

    ::setenv("RQRC_WORKERS", "many", 1);
    CHECK(run({"--config", cfg, "dataset"}).code == 2);
    ::unsetenv("RQRC_OUT");
    ::unsetenv("RQRC_WORKERS");
}

TEST_CASE("sweep writes one row per grid point")
{
    const auto out = root() / "sweep";
    REQUIRE(run({"--config", write_config("base", small_config()).string(), "--out", out.string(), "sweep"}).code == 0);
    const auto rows = lines(out / "sweep.csv");
    REQUIRE(rows.size() == 2 + 6);
    CHECK(rows[1] == "kinematics,a0,T,m,A_train,A_test,effective_rank");
    CHECK(lines(out / "sweep_timing.csv").size() == 2 + 6);
}

TEST_CASE("a decoupled reservoir scores the majority rate")
{
    auto j = small_config();
    j["modes"]["lambda"] = 0.0;
    const auto out = root() / "decoupled";
    const auto cfg = write_config("decoupled", j).string();
    REQUIRE(run({"--config", cfg, "--out", out.string(), "dataset"}).code == 0);
    REQUIRE(run({"--config", cfg, "--out", out.string(), "train"}).code == 0);
    const auto train = rqrc::load_csv(out / "train.csv");
    const auto test = rqrc::load_csv(out / "test.csv");
    int sum = 0;
    for (int l : train.labels) {
        sum += l;
    }
    // Bias-only model: predicts the training majority, +1 on a tie.
    const int majority = sum >= 0 ? 1 : -1;
    double hits = 0.0;
    for (int l : test.labels) {
        hits += l == majority;
    }
    const auto metrics = json::parse(slurp(out / "metrics.json"));
    CHECK(metrics["A_test"].get<double>() == doctest::Approx(hits / test.size()));
    CHECK(metrics["effective_rank"] == 1);
}

TEST_CASE("features, kernel, modes and drive commands")
{
    const auto cfg = write_config("base", small_config()).string();
    const auto out = root() / "misc";
    REQUIRE(run({"--config", cfg, "--out", out.string(), "features"}).code == 0);
    const auto feat = lines(out / "features_train.csv");
    CHECK(feat.size() == 2 + 40);
    CHECK(feat[1].starts_with("n_1,q_1,p_1,"));
    CHECK(feat[1].ends_with(",bias"));

    REQUIRE(run({"--config", cfg, "--out", out.string(), "kernel"}).code == 0);
    const auto kernel = json::parse(slurp(out / "kernel.json"));
    CHECK(kernel["samples"] == 40);
    CHECK(lines(out / "spectrum.csv").size() >= 3);

    REQUIRE(run({"--config", cfg, "--out", out.string(), "modes", "--inputs", "2"}).code == 0);
    CHECK(lines(out / "mode_convergence.csv").size() == 2 + 5);

    const auto r = run({"--config", cfg, "--out", out.string(), "drive"});
    REQUIRE(r.code == 0);
    const auto report = json::parse(slurp(out / "drive_report.json"));
    CHECK(report["omega_plus"].get<double>() == doctest::Approx(2099.0));
    CHECK(report["omega_minus"].get<double>() == doctest::Approx(99.0));
    CHECK(report["max_phase_rate_over_Omega"].get<double>() <= 10.0);
    CHECK(lines(out / "drive.csv").size() > 100);
}
