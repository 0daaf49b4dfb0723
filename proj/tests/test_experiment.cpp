#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "polymatch/experiment.hpp"

using namespace polymatch;

namespace {
ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.instance.generator = "er";
    cfg.instance.n = 10;
    cfg.instance.p = 0.5;
    cfg.algorithm = "psmwm";
    cfg.k = 2;
    cfg.seed = 3;
    return cfg;
}
} // namespace

TEST_CASE("config validation rejects bad combinations") {
    ExperimentConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.algorithm = "psmwm-ld";
    cfg.k = 8;
    cfg.r = 3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.r = 2;
    CHECK_NOTHROW(cfg.validate());
    cfg.algorithm = "psmwm";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument); // r>1 needs psmwm-ld
    cfg.r = 1;
    cfg.algorithm = "no-such-algo";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("repeated runs with audits certify the approximation") {
    ExperimentConfig cfg = small_config();
    cfg.repeats = 5;
    cfg.audits = all_dual_rules(cfg.seed);
    const auto records = run_experiment(cfg);
    REQUIRE(records.size() == 5);
    for (const auto& rec : records) {
        CHECK(rec.y_by_rule.size() == 5);
        REQUIRE(rec.min_opt.has_value());
        CHECK(*rec.min_opt >= 100.0 / (2.0 * (1.0 + cfg.epsilon)) - 1e-6);
        REQUIRE(rec.w_star.has_value());
        CHECK(rec.weight <= *rec.w_star + 1e-9);
        CHECK(rec.status == "ok");
    }
}

TEST_CASE("sequential algorithm on an edgeless instance records weight zero") {
    ExperimentConfig cfg = small_config();
    cfg.algorithm = "seq";
    cfg.k = 1;
    cfg.instance.p = 0.0;
    const auto records = run_experiment(cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].weight == 0.0);
    CHECK(records[0].m == 0);
}

TEST_CASE("all algorithm selections produce consistent records") {
    for (const std::string algo :
         {"psmwm", "psmwm-ds", "psmwm-ld", "psmwm-pr", "seq", "feigenbaum", "greedy",
          "exact"}) {
        ExperimentConfig cfg = small_config();
        cfg.algorithm = algo;
        cfg.epsilon = 0.25;
        const bool engine_family = algo.rfind("psmwm", 0) == 0;
        if (!engine_family) cfg.k = 1;
        const auto records = run_experiment(cfg);
        REQUIRE(records.size() == 1);
        INFO("algo " << algo);
        CHECK(records[0].algorithm == algo);
        CHECK(records[0].weight >= 0.0);
        REQUIRE(records[0].w_star.has_value());
        CHECK(records[0].weight <= *records[0].w_star + 1e-9);
    }
}

TEST_CASE("identical config and seed reproduce the record at k=1") {
    ExperimentConfig cfg = small_config();
    cfg.k = 1;
    cfg.audits = all_dual_rules(cfg.seed);
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(equal_ignoring_timing(a[i], b[i]));
}

TEST_CASE("report emission") {
    ExperimentConfig cfg = small_config();
    cfg.repeats = 3;
    const auto records = run_experiment(cfg);

    std::ostringstream jsonl;
    emit_report(records, ReportFormat::JsonLines, jsonl);
    std::istringstream in(jsonl.str());
    std::string line;
    std::vector<RunRecord> parsed;
    while (std::getline(in, line))
        parsed.push_back(nlohmann::json::parse(line).get<RunRecord>());
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) CHECK(parsed[i] == records[i]);

    std::ostringstream csv;
    emit_report(records, ReportFormat::Csv, csv);
    std::istringstream cin(csv.str());
    std::size_t lines = 0;
    while (std::getline(cin, line)) ++lines;
    CHECK(lines == records.size() + 1); // header + one row per record
}

TEST_CASE("config files parse with flag-style overrides") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "psmwm_cfg.txt").string();
    {
        std::ofstream f(path);
        f << "# sample experiment\n"
          << "algo = psmwm-ld\n"
          << "k = 8\n"
          << "r = 4\n"
          << "epsilon = 0.5\n"
          << "generator = er\n"
          << "n = 50\n"
          << "p = 0.2\n"
          << "audit = uni-tight,arg-max\n"
          << "format = csv\n";
    }
    ExperimentConfig cfg;
    load_config_file(cfg, path);
    CHECK(cfg.algorithm == "psmwm-ld");
    CHECK(cfg.k == 8);
    CHECK(cfg.r == 4);
    CHECK(cfg.epsilon == 0.5);
    CHECK(cfg.instance.n == 50);
    CHECK(cfg.audits.size() == 2);
    CHECK(cfg.format == ReportFormat::Csv);
    CHECK_NOTHROW(cfg.validate());
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_config_file(cfg, "/nonexistent/cfg.txt"), std::runtime_error);
    ExperimentConfig bad;
    CHECK_THROWS_AS(apply_config_entry(bad, "wibble", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_entry(bad, "strategy", "speedy"), std::invalid_argument);
}

TEST_CASE("file-backed instances feed the experiment") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "psmwm_inst.bin").string();
    const auto edges = gen_er(10, 0.5, 5);
    write_stream(path, 10, edges);
    ExperimentConfig cfg = small_config();
    cfg.instance.generator = "files";
    cfg.instance.files = {path};
    const auto records = run_experiment(cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].m == edges.size());
    CHECK(records[0].n == 10);
    std::remove(path.c_str());
}
