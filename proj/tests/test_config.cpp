#include <string>

#include "doctest.h"
#include "pir/config.hpp"

using namespace pir;

namespace {

std::map<std::string, std::string> base_map() {
    return {
        {"phantom", "sparse"},     {"image.height", "32"}, {"image.width", "32"},
        {"phantom.density", "0.02"}, {"snr", "17"},        {"solver", "pis"},
        {"solver.beta", "4.5"},
    };
}

}  // namespace

TEST_CASE("parse_config_text") {
    std::string text =
        "# experiment\n"
        "phantom = sparse   \n"
        "\n"
        "image.height=64\n"
        "  solver.gamma =  0.02  # inline values keep trailing comments out\n";
    auto kv = parse_config_text(text);
    CHECK(kv.size() == 3);
    CHECK(kv.at("phantom") == "sparse");
    CHECK(kv.at("image.height") == "64");
    CHECK(kv.at("solver.gamma") == "0.02");

    CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
    try {
        parse_config_text("a = 1\nnonsense\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
}

TEST_CASE("from_map rejects unknown keys") {
    auto kv = base_map();
    kv["densty"] = "0.01";
    try {
        ExperimentConfig::from_map(kv);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("unknown config key 'densty'") != std::string::npos);
    }
}

TEST_CASE("from_map reports the offending key for bad numbers") {
    auto kv = base_map();
    kv["phantom.density"] = "lots";
    try {
        ExperimentConfig::from_map(kv);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("phantom.density") != std::string::npos);
        CHECK(msg.find("lots") != std::string::npos);
    }

    kv = base_map();
    kv["trials"] = "2.5";
    CHECK_THROWS_AS(ExperimentConfig::from_map(kv), ConfigError);
    kv = base_map();
    kv["solver.report_best"] = "maybe";
    CHECK_THROWS_AS(ExperimentConfig::from_map(kv), ConfigError);
}

TEST_CASE("defaults survive a minimal map") {
    ExperimentConfig c = ExperimentConfig::from_map(base_map());
    CHECK(c.height == 32);
    CHECK(c.peak == 255.0);
    CHECK(c.kernel_type == "none");
    CHECK(c.frame_type == "ti_haar");
    CHECK(c.levels == 4);
    CHECK(c.alpha == 0.8);
    CHECK(c.nu_init == 1.0);
    CHECK(c.max_doublings == 400);
    CHECK(c.rel_tol == 1e-6);
    CHECK(c.max_iter == 500);
    CHECK(c.trials == 20);
    CHECK(c.seed == 1);
    CHECK(c.out_dir == "out");
    CHECK(!c.fixed_mu.has_value());
    CHECK(c.atom_scale == "auto");
}

TEST_CASE("exactly one of f0 and snr") {
    auto kv = base_map();
    kv["background.f0"] = "15";  // both present
    CHECK_THROWS_AS(ExperimentConfig::from_map(kv), ConfigError);
    kv = base_map();
    kv.erase("snr");  // neither
    CHECK_THROWS_AS(ExperimentConfig::from_map(kv), ConfigError);
}

TEST_CASE("background_level resolves either form") {
    ExperimentConfig c = ExperimentConfig::from_map(base_map());
    CHECK(c.background_level() == doctest::Approx(255.0 / 17.0).epsilon(1e-15));

    auto kv = base_map();
    kv.erase("snr");
    kv["background.f0"] = "8.25";
    ExperimentConfig c2 = ExperimentConfig::from_map(kv);
    CHECK(c2.background_level() == 8.25);
}

TEST_CASE("validate catches inconsistent settings") {
    auto bad = [](auto mutate) {
        auto kv = base_map();
        mutate(kv);
        CHECK_THROWS_AS(ExperimentConfig::from_map(kv), ConfigError);
    };
    bad([](auto& kv) { kv["image.height"] = "0"; });
    bad([](auto& kv) { kv["kernel.type"] = "boxcar"; });
    bad([](auto& kv) { kv["kernel.type"] = "gaussian"; });  // no cutoff
    bad([](auto& kv) { kv["kernel.type"] = "rational"; });  // no D
    bad([](auto& kv) { kv["frame.type"] = "db4"; });
    bad([](auto& kv) { kv["solver"] = "admm"; });
    bad([](auto& kv) { kv.erase("solver.beta"); });  // pis needs a prior weight
    bad([](auto& kv) {
        kv["solver.gamma"] = "0.5";  // 0.5 * 4.5 != 1
    });
    bad([](auto& kv) { kv["solver.alpha"] = "1.0"; });
    bad([](auto& kv) { kv["phantom.density"] = "1.0"; });
    bad([](auto& kv) { kv["trials"] = "0"; });
    bad([](auto& kv) { kv["solver.max_iter"] = "0"; });
    bad([](auto& kv) { kv["background.atom_scale"] = "wide"; });
    bad([](auto& kv) {
        kv["solver"] = "gis";
        kv.erase("solver.beta");  // and no gamma/sigma_sq either
    });

    // consistent gamma/beta pair is accepted
    auto kv = base_map();
    kv["solver.gamma"] = "0.22222222222222221";  // 1/4.5 to full precision
    CHECK_NOTHROW(ExperimentConfig::from_map(kv));
}
