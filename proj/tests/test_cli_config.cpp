#include <catch_amalgamated.hpp>

#include <filesystem>

#include "fuzhash/harness.hpp"

using namespace fuzhash;
namespace fs = std::filesystem;

TEST_CASE("every shipped config parses and round-trips through JSON") {
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        ++seen;
        INFO(entry.path().string());
        ExperimentConfig cfg = load_config(entry.path().string());
        CHECK(cfg.name == entry.path().stem().string());
        ExperimentConfig back = config_from_json(to_json(cfg));
        CHECK(to_json(back).dump() == to_json(cfg).dump());
    }
    CHECK(seen == 18);
}

TEST_CASE("unknown fields are rejected at every level") {
    nlohmann::json base{{"name", "x"},
                        {"spec", {{"algorithm", "add-toy"}}},
                        {"train", {{"epochs", 1}}}};
    CHECK_NOTHROW(config_from_json(base));
    auto j = base;
    j["typo"] = 1;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base;
    j["train"]["typo"] = 1;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base;
    j["spec"]["typo"] = 1;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base;
    j["mlp"] = {{"typo", 1}};
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
}

TEST_CASE("mask JSON accepts full, range, and index forms") {
    nlohmann::json base{{"name", "x"}, {"spec", {{"algorithm", "add-toy"}}}};
    auto with_mask = [&](nlohmann::json m) {
        auto j = base;
        j["mask"] = std::move(m);
        return config_from_json(j).effective_mask();
    };
    CHECK(with_mask("full").size() == 32);
    CHECK(with_mask({{"range", {0, 7}}}).indices == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(with_mask({{"indices", {1, 5, 9}}}).indices == std::vector<int>{1, 5, 9});
    CHECK(with_mask(nlohmann::json::array({2, 4})).indices == std::vector<int>{2, 4});
    CHECK_THROWS_AS(with_mask({{"indices", {40}}}), std::invalid_argument);
    CHECK_THROWS_AS(with_mask("half"), std::invalid_argument);
}

TEST_CASE("message length constraints are enforced") {
    nlohmann::json j{{"name", "x"}, {"spec", {{"algorithm", "sha1"}}}};
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);  // length required
    j["message_bits"] = 64;
    CHECK_NOTHROW(config_from_json(j));
    nlohmann::json k{{"name", "x"},
                     {"spec", {{"algorithm", "add-toy"}}},
                     {"message_bits", 63}};
    CHECK_THROWS_AS(config_from_json(k), std::invalid_argument);  // fixed at 64
}
