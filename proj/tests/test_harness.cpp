#include "doctest.h"

#include "wgstab/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace wgstab;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.grid.n_cross = 16;
    cfg.grid.n_axial = 48;
    cfg.grid.n_time = 16;
    cfg.grid.half_length = 6.0;
    cfg.factory.collar_width = 0.3;
    cfg.factory.transition_width = 0.15;
    return cfg;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "wgstab-harness" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string parse_error(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_config(in);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& message, const std::string& needle) {
    return message.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("defaults, an empty stream, and the round trip agree") {
    const RunConfig defaults;
    std::istringstream empty("");
    CHECK(serialize_config(parse_config(empty)) == serialize_config(defaults));

    const std::string canon = serialize_config(defaults);
    std::istringstream again(canon);
    const RunConfig reparsed = parse_config(again);
    CHECK(serialize_config(reparsed) == canon);
    CHECK(config_hash(reparsed) == config_hash(defaults));
}

TEST_CASE("hash tracks values, not formatting") {
    const std::string noisy =
        "# comment\n"
        "[geometry]\n"
        "  n_cross =   32   ; trailing remark\n"
        "\n"
        "[run]\n"
        "seed = 7\n";
    const std::string tight = "[geometry]\nn_cross=32\n[run]\nseed=7\n";
    std::istringstream a(noisy), b(tight);
    CHECK(config_hash(parse_config(a)) == config_hash(parse_config(b)));

    std::istringstream c("[run]\nseed = 8\n");
    std::istringstream d("[run]\nseed = 7\n");
    CHECK(config_hash(parse_config(c)) != config_hash(parse_config(d)));
}

TEST_CASE("rejections name the offending key and line") {
    CHECK(mentions(parse_error("[geometry]\nfrobnicate = 1\n"), "geometry.frobnicate"));
    CHECK(mentions(parse_error("[nonsense]\nx = 1\n"), "nonsense"));
    CHECK(mentions(parse_error("[geometry]\nn_cross = fish\n"), "geometry.n_cross"));
    CHECK(mentions(parse_error("[geometry]\nn_cross = fish\n"), "line 2"));
    CHECK(mentions(parse_error("[geometry]\nobserved = up\n"), "geometry.observed"));
    CHECK(mentions(parse_error("[inverse]\ntwo_sided = maybe\n"), "inverse.two_sided"));
    CHECK(mentions(parse_error("[run]\nseed = -3\n"), "run.seed"));
    CHECK(mentions(parse_error("no equals sign here\n"), "line 1"));
    CHECK(mentions(parse_error("orphan = 1\n[geometry]\n"), "line 1"));
    CHECK(mentions(parse_error("[geometry\nn_cross = 8\n"), "line 1"));
    CHECK_THROWS_AS(load_config("/nonexistent/wgstab.ini"), ConfigError);
}

TEST_CASE("value lists accept commas and whitespace alike") {
    std::istringstream in(
        "[perturbation]\n"
        "amplitudes = 1e-3, 2e-3 5e-3\n"
        "[carleman]\n"
        "s = 2,4, 8\n"
        "[geometry]\n"
        "observed = left right\n");
    const RunConfig cfg = parse_config(in);
    REQUIRE(cfg.amplitudes.size() == 3);
    CHECK(cfg.amplitudes[1] == 2e-3);
    REQUIRE(cfg.s_values.size() == 3);
    CHECK(cfg.s_values[2] == 8.0);
    CHECK(cfg.grid.gamma_star.size() == 2);

    std::istringstream none("[geometry]\nobserved = none\n");
    CHECK(parse_config(none).grid.gamma_star.empty());
}

TEST_CASE("factory run writes a manifest and its profile table") {
    RunConfig cfg = small_config();
    cfg.out_dir = fresh_dir("factory").string();
    const RunResult res = run_subcommand("factory", cfg);
    CHECK(res.status == 0);
    CHECK(res.failure.empty());

    const fs::path dir(cfg.out_dir);
    REQUIRE(fs::exists(dir / "run_manifest.txt"));
    REQUIRE(fs::exists(dir / "factory_profile.csv"));
    const std::string manifest = slurp(dir / "run_manifest.txt");
    CHECK(mentions(manifest, "subcommand = factory"));
    CHECK(mentions(manifest, "status = ok"));
    CHECK(mentions(manifest, "x_independent = yes"));
    CHECK(mentions(slurp(dir / "factory_profile.csv"), "axial,u0,q0,floor_envelope"));

    bool manifest_listed = false;
    for (const std::string& a : res.artifacts) manifest_listed |= a == "run_manifest.txt";
    CHECK(manifest_listed);
}

TEST_CASE("direct runs repeat byte for byte") {
    RunConfig cfg = small_config();
    cfg.amplitudes = {1e-2};
    cfg.out_dir = fresh_dir("direct-a").string();
    REQUIRE(run_subcommand("direct", cfg).status == 0);
    RunConfig again = cfg;
    again.out_dir = fresh_dir("direct-b").string();
    REQUIRE(run_subcommand("direct", again).status == 0);

    CHECK(slurp(fs::path(cfg.out_dir) / "direct_diagnostics.csv") ==
          slurp(fs::path(again.out_dir) / "direct_diagnostics.csv"));
}

TEST_CASE("unknown subcommand is rejected without touching the disk") {
    RunConfig cfg = small_config();
    cfg.out_dir = fresh_dir("unknown").string();
    const RunResult res = run_subcommand("bogus", cfg);
    CHECK(res.status == 2);
    CHECK(mentions(res.failure, "bogus"));
    CHECK(!fs::exists(cfg.out_dir));
}

TEST_CASE("candidate vertex inside the section is a configuration error") {
    RunConfig cfg = small_config();
    cfg.carleman_x0 = 0.5;
    cfg.out_dir = fresh_dir("carleman-bad-x0").string();
    const RunResult res = run_subcommand("carleman", cfg);
    CHECK(res.status == 2);
    CHECK(mentions(res.failure, "configuration"));
}

TEST_CASE("failed sign rule is a numeric failure with a written manifest") {
    RunConfig cfg = small_config();
    cfg.grid.gamma_star = {Side::left};  // x0 = -1 pushes outflow through the right wall
    cfg.out_dir = fresh_dir("carleman-left").string();
    const RunResult res = run_subcommand("carleman", cfg);
    CHECK(res.status == 3);
    CHECK(mentions(res.failure, "assumption"));

    const fs::path dir(cfg.out_dir);
    const std::string manifest = slurp(dir / "run_manifest.txt");
    CHECK(mentions(manifest, "status = failed"));
    CHECK(mentions(manifest, "failure = assumption check"));
    CHECK(fs::exists(dir / "carleman_assumptions.csv"));
}

TEST_CASE("stability manifest records the recipe constants") {
    RunConfig cfg = small_config();
    cfg.out_dir = fresh_dir("stability").string();
    const RunResult res = run_subcommand("stability", cfg);
    REQUIRE(res.status == 0);
    const std::string manifest = slurp(fs::path(cfg.out_dir) / "run_manifest.txt");
    CHECK(mentions(manifest, "theta = 0.33333333333333331"));
    CHECK(mentions(manifest, "mu_monotone = yes"));
    CHECK(mentions(manifest, "pass = yes"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "stability_rows.csv"));
}
