#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "ifslab/runner.hpp"

using namespace ifslab;
namespace fs = std::filesystem;

namespace {

const char* kDemoText = R"({
  "maps": [
    {"type": "arnold", "theta": 0.05, "eps": 0.8},
    {"type": "arnold", "theta": 0.37, "eps": 0.5}
  ],
  "probs": [0.5, 0.5],
  "observables": [{"type": "harmonic", "cos": [1.0], "sin": []}]
})";

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("parse_config accepts the demo shape and fills defaults") {
    auto spec = parse_config(kDemoText);
    CHECK(spec.maps.size() == 2);
    CHECK(spec.maps[0].kind == Homeo::Kind::Arnold);
    CHECK(spec.probs[0] == 0.5);
    CHECK(spec.observables.size() == 1);
    CHECK(spec.normalized["mw"]["x_count"].get<int>() == 64);
    CHECK(spec.normalized["budgets"]["node_budget"].get<std::uint64_t>() == kDefaultNodeBudget);
    CHECK(!spec.config_hash.empty());
}

TEST_CASE("parse_config rejects bad probabilities and bad maps") {
    CHECK_THROWS_AS((void)parse_config(R"({"maps":[{"type":"rotation","theta":0.1},
        {"type":"rotation","theta":0.2}],"probs":[0.5,0.6]})"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_config(R"({"maps":[{"type":"arnold","theta":0.1,"eps":1.2}],
        "probs":[1.0]})"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_config("not json"), ParseError);
    CHECK_THROWS_AS((void)parse_config(R"({"probs":[1.0]})"), ValidationError);
}

TEST_CASE("config round trip: load(emit(spec)) is identical") {
    auto spec = parse_config(kDemoText);
    auto emitted = emit(spec).dump(2);
    auto spec2 = parse_config(emitted);
    CHECK(emit(spec2).dump(2) == emitted);
}

TEST_CASE("runner writes reports and reruns are byte identical across workers") {
    auto spec = parse_config(kDemoText);
    auto tmp = fs::temp_directory_path() / "ifslab_runner_test";
    fs::remove_all(tmp);

    RunOptions opt;
    opt.subcommand = "validate";
    opt.out_dir = tmp / "a";
    opt.master_seed = 7;
    opt.workers = 1;
    CHECK(run_subcommand(spec, opt) == 0);
    CHECK(fs::exists(tmp / "a" / "validate.json"));

    // A seeded subcommand with real parallel work, rerun with more workers.
    spec.normalized["stability"] = {{"x", 0.1}, {"y", 0.6}, {"n_list", {1, 10, 40}}, {"samples", 400}};
    RunOptions s1;
    s1.subcommand = "stability";
    s1.out_dir = tmp / "w1";
    s1.master_seed = 11;
    s1.workers = 1;
    s1.format = "csv";
    RunOptions s2 = s1;
    s2.out_dir = tmp / "w2";
    s2.workers = 4;
    CHECK(run_subcommand(spec, s1) == 0);
    CHECK(run_subcommand(spec, s2) == 0);
    CHECK(read_bytes(tmp / "w1" / "stability.json") == read_bytes(tmp / "w2" / "stability.json"));
    CHECK(read_bytes(tmp / "w1" / "stability.csv") == read_bytes(tmp / "w2" / "stability.csv"));

    fs::remove_all(tmp);
}

TEST_CASE("sync exits 2 on an all-rotation system") {
    auto spec = parse_config(R"({
      "maps": [{"type":"rotation","theta":0.41421356237309515},
               {"type":"rotation","theta":0.73205080756887729}],
      "probs": [0.5, 0.5],
      "sync": {"arc_count": 8, "arc_length": 0.1, "depth": 16, "trials": 200,
               "m_max": 6, "x_grid": 8}
    })");
    auto tmp = fs::temp_directory_path() / "ifslab_sync_test";
    fs::remove_all(tmp);
    RunOptions opt;
    opt.subcommand = "sync";
    opt.out_dir = tmp;
    opt.master_seed = 3;
    CHECK(run_subcommand(spec, opt) == 2);
    CHECK(fs::exists(tmp / "sync.json"));
    fs::remove_all(tmp);
}
