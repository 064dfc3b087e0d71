#include <doctest.h>

#include "expwalk/error.hpp"
#include "expwalk/report.hpp"
#include "expwalk/runner.hpp"

#include <cmath>
#include <cstdlib>

using namespace expwalk;
using nlohmann::json;

namespace {

RunArtifacts run_text(const std::string& text) { return run_in_memory(ExperimentConfig::parse(text)); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("csv numbers") {
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(csv_number(1.0) == "1");
    CHECK(csv_number(std::nan("")) == "nan");
    CHECK(csv_number(-HUGE_VAL) == "-inf");
    CHECK(std::stod(csv_number(M_PI)) == M_PI);
}

TEST_CASE("emit_plotdata on an empty record is a header") {
    const auto t = emit_plotdata(TrajectoryRecord{});
    CHECK(t.str() == "step,observable_name,value,running_avg\n");
    CHECK(emit_plotdata(TrajectoryRecord{}, {"step", "value"}).str() == "step,value\n");
    try {
        (void)emit_plotdata(TrajectoryRecord{}, {"step", "x"});
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("missing column 'x'") != std::string::npos);
    }
}

TEST_CASE("emit_plotdata long format") {
    TrajectoryRecord r;
    r.names = {"a", "b"};
    r.steps = {1, 2};
    r.values = {{1.0, 3.0}, {0.5, 0.5}};
    r.running = {{1.0, 2.0}, {0.5, 0.5}};
    CHECK(emit_plotdata(r).str() ==
          "step,observable_name,value,running_avg\n"
          "1,a,1,1\n1,b,0.5,0.5\n2,a,3,2\n2,b,0.5,0.5\n");
}

TEST_CASE("csv rows must match the header") {
    CsvTable t;
    t.header = {"a", "b"};
    CHECK_THROWS_AS(t.add_row({"1"}), DomainError);
}

TEST_CASE("config parsing") {
    const auto a = ExperimentConfig::parse(R"({"kind": "cone", "params": {"blocks": [2, 2]}, "seed": 4})");
    CHECK(a.kind == "cone");
    CHECK(a.seed == 4);
    CHECK(a.params["blocks"] == json::array({2, 2}));
    const auto b = ExperimentConfig::parse("# comment\nkind = cone\nseed = 9\nblocks = [2, 2]\nlogs = [1, 1, -1, -1]\n");
    CHECK(b.kind == "cone");
    CHECK(b.seed == 9);
    CHECK(b.params["logs"].size() == 4);
    CHECK(ExperimentConfig::from_json(b.to_json()).to_json() == b.to_json());
    CHECK_THROWS_AS(ExperimentConfig::parse(R"({"kind": "cone", "extra": 1})"), DomainError);
    CHECK_THROWS_AS(resolve_params("cone", {{"blocks", {2, 2}}, {"logs", {1, 1, -1, -1}}, {"bogus", 1}}), DomainError);
    CHECK_THROWS_AS(resolve_params("cone", {{"blocks", {2, 2}}}), DomainError);
    CHECK(experiment_kinds().size() == 10);
}

TEST_CASE("cone run") {
    const auto art = run_text(R"({"kind": "cone", "params": {"blocks": [2, 1, 1],
        "logs": [0.34657359027997264, 0.34657359027997264, 0.69314718055994531, -1.3862943611198906]}})");
    REQUIRE(art.status == 0);
    CHECK(art.summary["inside"] == true);
    CHECK(art.summary["status"] == "ok");
    CHECK(art.data.header == std::vector<std::string>{"i", "j", "coefficient"});
}

TEST_CASE("walk with the identity measure is constant") {
    const auto art = run_text(R"({"kind": "walk", "params": {"measure": "identity2", "steps": 50,
        "observables": ["height", "shortest_sup"], "x0": [[2, 0.3], [0, 0.5]]}})");
    REQUIRE(art.status == 0);
    REQUIRE(art.data.rows.size() == 100);
    std::string h0, s0;
    for (const auto& row : art.data.rows) {
        std::string& ref = row[1] == "height" ? h0 : s0;
        if (ref.empty()) ref = row[2];
        CHECK(row[2] == ref);
        CHECK(std::stod(row[3]) == doctest::Approx(std::stod(ref)).epsilon(1e-14));
    }
}

TEST_CASE("exit status classification") {
    const auto missing = run_text(R"({"kind": "cone", "params": {"blocks": [2, 2]}})");
    CHECK(missing.status == 2);
    CHECK(missing.summary["error"]["kind"] == "validation");
    CHECK(run_text(R"({"kind": "nope"})").status == 2);
    CHECK(run_text(R"({"kind": "sponge", "params": {"bases": [2, 5], "pattern": [[0, 0]]}})").status == 2);
    const auto bad_type = run_text(R"({"kind": "dioph-brute", "params": {"M": "golden", "T_max": "big"}})");
    CHECK(bad_type.status == 2);
    // a non-contracting input to the recurrence fit is a numerical failure
    const auto recur = run_text(R"({"kind": "recur", "params": {"measure": "identity2", "mc_trials": 10,
        "n_grid": [5, 10], "n_points": 20}})");
    CHECK(recur.status == 3);
    CHECK(recur.summary["error"]["kind"] == "numerical");
}

TEST_CASE("output is independent of the worker count") {
    const std::string cfg = R"({"kind": "dioph-fractal", "seed": 5, "params": {"ifs": "cantor",
        "n_points": 6, "t_max": 3, "brute_T": 100}})";
    setenv("EXPWALK_WORKERS", "1", 1);
    const auto one = run_text(cfg);
    setenv("EXPWALK_WORKERS", "3", 1);
    const auto three = run_text(cfg);
    unsetenv("EXPWALK_WORKERS");
    REQUIRE(one.status == 0);
    CHECK(one.data.str() == three.data.str());
    CHECK(one.summary.dump() == three.summary.dump());
}

}  // TEST_SUITE
