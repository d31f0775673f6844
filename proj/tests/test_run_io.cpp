#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "v2x/run_io.hpp"

using namespace v2x;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("v2x_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_SUITE("run_io") {

TEST_CASE("training log round-trip") {
    const fs::path dir = scratch("log");
    const std::vector<TrainingLogRow> rows{{0, 12.5, 1.0}, {1, 510.0, 0.9993875}, {2, 0.0, 0.02}};
    write_training_log((dir / "training_log.csv").string(), rows);
    CHECK(first_line(dir / "training_log.csv") == "episode,cumulative_reward,epsilon");
    const auto back = read_training_log((dir / "training_log.csv").string());
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].episode == rows[i].episode);
        CHECK(back[i].cumulative_reward == doctest::Approx(rows[i].cumulative_reward).epsilon(1e-9));
        CHECK(back[i].epsilon == doctest::Approx(rows[i].epsilon).epsilon(1e-9));
    }
    fs::remove_all(dir);
}

TEST_CASE("metrics round-trip and append") {
    const fs::path dir = scratch("metrics");
    const auto path = (dir / "metrics.csv").string();
    write_metrics(path, {{"marl", 4, 1200, 0.875, 1.0, 100, 1}});
    write_metrics(path, {{"greedy", 6, 2800, 0.25, 0.5, 100, 18446744073709551615ull}}, true);
    CHECK(first_line(path) == "method,M,B_v2v_bytes,v2v_delivery_prob,v2i_delivery_prob,episodes,seed");
    const auto rows = read_metrics(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == "marl");
    CHECK(rows[0].v2v_delivery_prob == 0.875);
    CHECK(rows[1].num_platoons == 6);
    CHECK(rows[1].b_v2v_bytes == 2800);
    CHECK(rows[1].seed == 18446744073709551615ull);

    write_metrics(path, {{"hill", 4, 2000, 0.5, 0.5, 10, 3}});
    CHECK(read_metrics(path).size() == 1);
    fs::remove_all(dir);
}

TEST_CASE("readers reject foreign files") {
    const fs::path dir = scratch("bad");
    {
        std::ofstream out(dir / "x.csv");
        out << "a,b,c\n1,2,3\n";
    }
    CHECK_THROWS_AS(read_training_log((dir / "x.csv").string()), OutputError);
    CHECK_THROWS_AS(read_metrics((dir / "x.csv").string()), OutputError);
    CHECK_THROWS_AS(read_metrics((dir / "absent.csv").string()), OutputError);
    {
        std::ofstream out(dir / "short.csv");
        out << kTrainingLogHeader << "\n1,2\n";
    }
    CHECK_THROWS_AS(read_training_log((dir / "short.csv").string()), OutputError);
    fs::remove_all(dir);
}

TEST_CASE("manifest records hash, seed and extras") {
    const fs::path dir = scratch("manifest");
    RunConfig c;
    c.train_episodes = 77;
    write_manifest(dir.string(), c, 42, {{"method", "marl"}});
    const std::string m = slurp(dir / "manifest.txt");
    CHECK(m.find("config_hash=" + config_hash(c) + "\n") != std::string::npos);
    CHECK(m.find("seed=42\n") != std::string::npos);
    CHECK(m.find("code_version=") != std::string::npos);
    CHECK(m.find("method=marl\n") != std::string::npos);
    CHECK(config_hash(parse_config_file((dir / "config.ini").string())) == config_hash(c));
    fs::remove_all(dir);
}

TEST_CASE("output directory preparation") {
    const fs::path dir = scratch("prep") / "a" / "b";
    prepare_output_dir(dir.string());
    CHECK(fs::is_directory(dir));
    CHECK(fs::is_empty(dir));
    const fs::path file = dir / "plain";
    std::ofstream(file) << "x";
    CHECK_THROWS_AS(prepare_output_dir(file.string()), OutputError);
    fs::remove_all(dir.parent_path().parent_path());
}

}
