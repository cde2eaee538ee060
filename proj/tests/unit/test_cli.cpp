// Config parsing, command entry points, and the CLI driver: exit codes,
// output files, cache warm-start, and run-to-run determinism.
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <hsiselect/cli_main.hpp>
#include <hsiselect/commands.hpp>
#include <hsiselect/config.hpp>

#include "helpers.hpp"

using namespace hsi;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

// argv plumbing for cli_main without real process spawning
int run_cli(std::vector<std::string> args, std::string* out = nullptr,
            std::string* err_text = nullptr) {
    args.insert(args.begin(), "hsiselect");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream log, err;
    int rc = cli_main(int(argv.size()), argv.data(), log, err);
    if (out) *out = log.str();
    if (err_text) *err_text = err.str();
    return rc;
}

// small but non-trivial fixture: 3 classes, 2 relevant bands with one copy
// each, 2 noise bands -> 6 bands total
SyntheticSpec small_spec() {
    SyntheticSpec spec;
    spec.width = 16;
    spec.height = 16;
    spec.n_classes = 3;
    spec.relevant_bands = 2;
    spec.redundant_copies_per_relevant = 1;
    spec.noise_bands = 2;
    return spec;
}

RunConfig synth_fixture(const std::filesystem::path& dir, std::uint64_t seed = 3) {
    RunConfig cfg;
    cfg.out = dir.string();
    std::ostringstream sink;
    auto res = cmd_synth(small_spec(), seed, cfg, sink);
    cfg.cube_path = res.cube_path;
    cfg.gt_path = res.gt_path;
    cfg.levels = 16;
    return cfg;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("run config defaults") {
    RunConfig cfg;
    CHECK(cfg.cube_format == "binary-cube");
    CHECK(cfg.levels == 256);
    CHECK(cfg.split_fraction == 0.5);
    CHECK(cfg.split_seed == 1);
    CHECK_FALSE(cfg.stratified);
    CHECK(cfg.classifier == "knn");
    CHECK(cfg.knn_k == 1);
    CHECK(cfg.normalize);
    CHECK(cfg.redundancy_axis.size() == 23);
    CHECK(cfg.redundancy_axis.front() == 0.10);
    CHECK(cfg.redundancy_axis.back() == 1.00);
    CHECK(cfg.relevance_axis.size() == 8);
    CHECK(cfg.relevance_axis.front() == 0.0);
    CHECK(cfg.relevance_axis.back() == 0.93);
    CHECK(cfg.out == ".");
    CHECK(cfg.restarts == 3);
    CHECK(cfg.labeled_only);

    auto spec = cfg.classifier_spec();
    CHECK(spec.kind == ClassifierSpec::Kind::knn);
    CHECK(spec.k == 1);
    CHECK(spec.normalize);

    auto grid = cfg.grid(); // must already be valid
    CHECK(grid.redundancy_axis.size() == 23);
    CHECK(grid.relevance_axis.size() == 8);

    CHECK(cfg.membership_mode() == MembershipMode::pristine);
    cfg.literal_d_matrix = true;
    CHECK(cfg.membership_mode() == MembershipMode::working);
}

TEST_CASE("apply_config_entry sets each key") {
    RunConfig cfg;
    apply_config_entry(cfg, "cube_path", "a.bin");
    apply_config_entry(cfg, "cube_format", "pixel-csv");
    apply_config_entry(cfg, "gt_path", "g.txt");
    apply_config_entry(cfg, "levels", "64");
    apply_config_entry(cfg, "split_fraction", "0.25");
    apply_config_entry(cfg, "split_seed", "42");
    apply_config_entry(cfg, "stratified", "yes");
    apply_config_entry(cfg, "classifier", "nearest-centroid");
    apply_config_entry(cfg, "knn_k", "5");
    apply_config_entry(cfg, "classifier_command", "python cls.py");
    apply_config_entry(cfg, "normalize", "off");
    apply_config_entry(cfg, "redundancy_axis", "0.2, 0.5,0.9");
    apply_config_entry(cfg, "relevance_axis", "0.0,0.4");
    apply_config_entry(cfg, "cache", "c.csv");
    apply_config_entry(cfg, "out", "results");
    apply_config_entry(cfg, "restarts", "7");
    apply_config_entry(cfg, "seed", "99");
    apply_config_entry(cfg, "literal_d_matrix", "true");
    apply_config_entry(cfg, "labeled_only", "0");

    CHECK(cfg.cube_path == "a.bin");
    CHECK(cfg.cube_format == "pixel-csv");
    CHECK(cfg.gt_path == "g.txt");
    CHECK(cfg.levels == 64);
    CHECK(cfg.split_fraction == 0.25);
    CHECK(cfg.split_seed == 42);
    CHECK(cfg.stratified);
    CHECK(cfg.classifier == "nearest-centroid");
    CHECK(cfg.knn_k == 5);
    CHECK(cfg.classifier_command == "python cls.py");
    CHECK_FALSE(cfg.normalize);
    CHECK(cfg.redundancy_axis == std::vector<double>{0.2, 0.5, 0.9});
    CHECK(cfg.relevance_axis == std::vector<double>{0.0, 0.4});
    CHECK(cfg.cache == "c.csv");
    CHECK(cfg.out == "results");
    CHECK(cfg.restarts == 7);
    CHECK(cfg.seed == 99);
    CHECK(cfg.literal_d_matrix);
    CHECK_FALSE(cfg.labeled_only);
}

TEST_CASE("apply_config_entry rejects bad input") {
    RunConfig cfg;
    REQUIRE_THROWS_MATCHES(apply_config_entry(cfg, "bogus", "1"), io_error,
                           MessageMatches(ContainsSubstring("unknown key 'bogus'")));
    REQUIRE_THROWS_MATCHES(apply_config_entry(cfg, "stratified", "maybe"), io_error,
                           MessageMatches(ContainsSubstring("boolean")));
    REQUIRE_THROWS_AS(apply_config_entry(cfg, "levels", "abc"), io_error);
    REQUIRE_THROWS_AS(apply_config_entry(cfg, "redundancy_axis", "0.1,x"), io_error);
}

TEST_CASE("load_config_file parses comments and blanks, reports line numbers") {
    auto dir = testutil::fresh_dir("config");
    auto path = (dir / "run.cfg").string();
    testutil::write_text(path, "# run settings\n"
                               "\n"
                               "levels = 32\n"
                               "  classifier=nearest-centroid  \n"
                               "relevance_axis = 0.0, 0.5\n"
                               "stratified = on\n");
    RunConfig cfg;
    load_config_file(cfg, path);
    CHECK(cfg.levels == 32);
    CHECK(cfg.classifier == "nearest-centroid");
    CHECK(cfg.relevance_axis == std::vector<double>{0.0, 0.5});
    CHECK(cfg.stratified);

    auto bad = (dir / "bad.cfg").string();
    testutil::write_text(bad, "levels = 32\nnot a key value line\n");
    REQUIRE_THROWS_MATCHES(load_config_file(cfg, bad), io_error,
                           MessageMatches(ContainsSubstring("line 2")));

    auto unknown = (dir / "unknown.cfg").string();
    testutil::write_text(unknown, "\n\nwht = 3\n");
    REQUIRE_THROWS_MATCHES(load_config_file(cfg, unknown), io_error,
                           MessageMatches(ContainsSubstring("line 3") &&
                                          ContainsSubstring("unknown key")));

    REQUIRE_THROWS_MATCHES(load_config_file(cfg, (dir / "missing.cfg").string()), io_error,
                           MessageMatches(ContainsSubstring("cannot open")));
}

TEST_CASE("cmd_synth writes cube, ground truth and provenance") {
    auto dir = testutil::fresh_dir("cmd-synth");
    RunConfig cfg;
    cfg.out = dir.string();
    std::ostringstream log;
    auto res = cmd_synth(small_spec(), 3, cfg, log);

    REQUIRE(std::filesystem::exists(res.cube_path));
    REQUIRE(std::filesystem::exists(res.gt_path));
    REQUIRE(std::filesystem::exists(res.provenance_path));

    auto cube = load_cube(res.cube_path, CubeFormat::binary_cube);
    CHECK(cube.width == 16);
    CHECK(cube.height == 16);
    CHECK(cube.n_bands == 6);
    auto gt = load_ground_truth(res.gt_path);
    CHECK(gt.num_classes == 3);
    CHECK(log.str().find("3 classes") != std::string::npos);
}

TEST_CASE("cmd_synth validates the spec before touching the disk") {
    auto dir = testutil::fresh_dir("cmd-synth-bad");
    RunConfig cfg;
    cfg.out = dir.string();
    SyntheticSpec spec = small_spec();
    spec.n_classes = 0;
    std::ostringstream log;
    REQUIRE_THROWS_AS(cmd_synth(spec, 3, cfg, log), domain_error);
    CHECK(std::filesystem::is_empty(dir));
}

TEST_CASE("cmd_mi_profile writes one row per band") {
    auto dir = testutil::fresh_dir("cmd-profile");
    RunConfig cfg = synth_fixture(dir);
    std::ostringstream log;
    auto res = cmd_mi_profile(cfg, log);

    REQUIRE(res.profile.size() == 6);
    auto text = testutil::read_text(res.csv_path);
    CHECK(text.rfind("band_index,mi_bits\n", 0) == 0);
    CHECK(count_lines(text) == 7); // header + 6 bands
    // relevant parent bands carry more label information than pure noise
    CHECK(res.profile[0] > res.profile[4]);
    CHECK(log.str().find("bands: 6") != std::string::npos);
}

TEST_CASE("cmd_select matches the library call and records the couple") {
    auto dir = testutil::fresh_dir("cmd-select");
    RunConfig cfg = synth_fixture(dir);
    std::ostringstream log;
    auto res = cmd_select(cfg, 0.05, 0.8, log);

    auto cube = load_cube(cfg.cube_path, CubeFormat::binary_cube);
    auto gt = load_ground_truth(cfg.gt_path);
    auto direct = select_bands(cube, gt, {0.05, 0.8}, cfg.levels, MembershipMode::pristine);
    CHECK(res.subset.bands == direct.bands);

    auto text = testutil::read_text(res.csv_path);
    CHECK(text.rfind("th_relevance,th_redundancy,n_bands,band_list\n", 0) == 0);
    CHECK(count_lines(text) == 2);
    CHECK(text.find("0.05,0.8," + std::to_string(res.subset.size())) != std::string::npos);
}

TEST_CASE("cmd_grid writes the long table and the pivot, and reuses the cache") {
    auto dir = testutil::fresh_dir("cmd-grid");
    RunConfig cfg = synth_fixture(dir);
    cfg.redundancy_axis = {0.5, 0.95};
    cfg.relevance_axis = {0.0, 0.2};
    cfg.cache = (dir / "cache.csv").string();

    std::ostringstream log1;
    auto cold = cmd_grid(cfg, log1);
    REQUIRE(cold.records.size() == 4);
    CHECK(cold.classifier_invocations > 0);
    REQUIRE(std::filesystem::exists(cfg.cache));

    auto long_text = testutil::read_text(cold.long_csv_path);
    CHECK(long_text.rfind("th_redundancy,th_relevance,n_bands,accuracy,defined\n", 0) == 0);
    CHECK(count_lines(long_text) == 5);
    // redundancy-major order: first data row is the first redundancy value
    CHECK(long_text.find("\n0.5,0,") != std::string::npos);

    auto table_text = testutil::read_text(cold.table_path);
    CHECK(table_text.find("TH \\ MI") != std::string::npos);
    CHECK(table_text.find("MI > 0.2") != std::string::npos);
    CHECK(count_lines(table_text) == 3); // header + 2 redundancy rows

    // warm run: every couple answered from the persistent cache
    std::ostringstream log2;
    auto warm = cmd_grid(cfg, log2);
    CHECK(warm.classifier_invocations == 0);
    CHECK(testutil::read_text(warm.long_csv_path) == long_text);
}

TEST_CASE("cmd_search writes one trajectory per restart plus a summary") {
    auto dir_a = testutil::fresh_dir("cmd-search-a");
    RunConfig cfg = synth_fixture(dir_a, 5);
    cfg.redundancy_axis = {0.3, 0.6, 0.95};
    cfg.relevance_axis = {0.0, 0.1, 0.3};
    cfg.restarts = 2;
    cfg.seed = 5;

    std::ostringstream log1;
    auto res = cmd_search(cfg, log1);
    REQUIRE(res.trajectory_paths.size() == 2);
    for (const auto& p : res.trajectory_paths) REQUIRE(std::filesystem::exists(p));
    REQUIRE(std::filesystem::exists(res.summary_path));
    CHECK(count_lines(testutil::read_text(res.summary_path)) == 3); // header + 2 restarts
    CHECK(res.search.all.size() == 2);
    CHECK(res.search.best.final_record.defined);
    CHECK(log1.str().find("best couple") != std::string::npos);

    // same seed, fresh directory: byte-identical outputs
    auto dir_b = testutil::fresh_dir("cmd-search-b");
    RunConfig cfg2 = synth_fixture(dir_b, 5);
    cfg2.redundancy_axis = cfg.redundancy_axis;
    cfg2.relevance_axis = cfg.relevance_axis;
    cfg2.restarts = 2;
    cfg2.seed = 5;
    std::ostringstream log2;
    auto res2 = cmd_search(cfg2, log2);
    CHECK(testutil::read_text(res2.summary_path) == testutil::read_text(res.summary_path));
    for (std::size_t i = 0; i < res.trajectory_paths.size(); ++i)
        CHECK(testutil::read_text(res2.trajectory_paths[i]) ==
              testutil::read_text(res.trajectory_paths[i]));
}

TEST_CASE("cli_main drives synth then mi-profile") {
    auto dir = testutil::fresh_dir("cli-ok");
    std::string out;
    int rc = run_cli({"--out", dir.string(), "--seed", "3", "synth", "--width", "16", "--height",
                      "16", "--classes", "3", "--relevant", "2", "--copies", "1", "--noise", "2"},
                     &out);
    REQUIRE(rc == 0);
    CHECK(out.find("wrote") != std::string::npos);
    REQUIRE(std::filesystem::exists(dir / "synthetic_cube.bin"));

    rc = run_cli({"--cube_path", (dir / "synthetic_cube.bin").string(), "--gt_path",
                  (dir / "synthetic_gt.txt").string(), "--levels", "16", "--out", dir.string(),
                  "mi-profile"},
                 &out);
    REQUIRE(rc == 0);
    CHECK(std::filesystem::exists(dir / "mi_profile.csv"));
}

TEST_CASE("cli_main exit codes distinguish failure families") {
    auto dir = testutil::fresh_dir("cli-rc");
    RunConfig fixture = synth_fixture(dir);
    std::string err;

    SECTION("missing cube file is a configuration error") {
        int rc = run_cli({"--cube_path", (dir / "nope.bin").string(), "--gt_path",
                          fixture.gt_path, "mi-profile"},
                         nullptr, &err);
        CHECK(rc == 2);
        CHECK(err.find("error:") != std::string::npos);
    }
    SECTION("cube path never configured") {
        int rc = run_cli({"mi-profile"}, nullptr, &err);
        CHECK(rc == 2);
        CHECK(err.find("cube path") != std::string::npos);
    }
    SECTION("unknown flag") {
        int rc = run_cli({"--wat", "1", "mi-profile"}, nullptr, &err);
        CHECK(rc == 2);
    }
    SECTION("missing subcommand") {
        int rc = run_cli({"--levels", "16"}, nullptr, &err);
        CHECK(rc == 2);
    }
    SECTION("select without its required thresholds") {
        int rc = run_cli({"--cube_path", fixture.cube_path, "--gt_path", fixture.gt_path,
                          "select"},
                         nullptr, &err);
        CHECK(rc == 2);
    }
    SECTION("out-of-range threshold is a domain error") {
        int rc = run_cli({"--cube_path", fixture.cube_path, "--gt_path", fixture.gt_path,
                          "--levels", "16", "--out", dir.string(), "select", "--th_relevance",
                          "0.0", "--th_redundancy", "1.5"},
                         nullptr, &err);
        CHECK(rc == 1);
        CHECK(err.find("th_redundancy") != std::string::npos);
    }
    SECTION("broken external classifier") {
        int rc = run_cli({"--cube_path", fixture.cube_path, "--gt_path", fixture.gt_path,
                          "--levels", "16", "--out", dir.string(), "--classifier", "external",
                          "--classifier_command", "false", "--redundancy_axis", "0.95",
                          "--relevance_axis", "0.0", "grid"},
                         nullptr, &err);
        CHECK(rc == 3);
        CHECK(err.find("status") != std::string::npos);
    }
    SECTION("unreadable config file") {
        int rc = run_cli({"--config", (dir / "absent.cfg").string(), "mi-profile"}, nullptr,
                         &err);
        CHECK(rc == 2);
        CHECK(err.find("config") != std::string::npos);
    }
}

TEST_CASE("cli_main config file seeds defaults and flags override it") {
    auto dir = testutil::fresh_dir("cli-config");
    RunConfig fixture = synth_fixture(dir);
    auto cfg_dir = dir / "from_config";
    auto flag_dir = dir / "from_flag";

    auto cfg_path = (dir / "run.cfg").string();
    testutil::write_text(cfg_path, "cube_path = " + fixture.cube_path + "\n" +
                                       "gt_path = " + fixture.gt_path + "\n" +
                                       "levels = 16\n" +
                                       "out = " + cfg_dir.string() + "\n");

    int rc = run_cli({"--config", cfg_path, "mi-profile"});
    REQUIRE(rc == 0);
    CHECK(std::filesystem::exists(cfg_dir / "mi_profile.csv"));

    rc = run_cli({"--config", cfg_path, "--out", flag_dir.string(), "mi-profile"});
    REQUIRE(rc == 0);
    CHECK(std::filesystem::exists(flag_dir / "mi_profile.csv"));
}
