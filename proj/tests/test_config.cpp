#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "treeblend/config.hpp"

using namespace treeblend;

TEST_SUITE("config parsing") {
    TEST_CASE("sections, scalars, and comments") {
        const Config cfg = parse_config(
            "# run settings\n"
            "[run]\n"
            "seed = 17   # master seed\n"
            "out_dir = \"out\"\n"
            "\n"
            "[blend]\n"
            "min_fraction = 0.3\n"
            "two_sided = true\n"
            "verbose = false\n"
            "rate = 1e-3\n");
        CHECK(cfg.get_int("run", "seed") == 17);
        CHECK(cfg.get_string("run", "out_dir") == "out");
        CHECK(cfg.get_real_or("blend", "min_fraction", 0.0) == doctest::Approx(0.3));
        CHECK(cfg.get_bool_or("blend", "two_sided", false));
        CHECK_FALSE(cfg.get_bool_or("blend", "verbose", true));
        CHECK(cfg.get_real_or("blend", "rate", 0.0) == doctest::Approx(0.001));
    }

    TEST_CASE("string escapes") {
        const Config cfg = parse_config(
            "[s]\n"
            "a = \"tab\\there\"\n"
            "b = \"line\\nbreak\"\n"
            "c = \"quote \\\" and slash \\\\\"\n");
        CHECK(cfg.get_string("s", "a") == "tab\there");
        CHECK(cfg.get_string("s", "b") == "line\nbreak");
        CHECK(cfg.get_string("s", "c") == "quote \" and slash \\");
    }

    TEST_CASE("quoted keys") {
        const Config cfg = parse_config("[d]\n\"chocolate pie\" = 4\n");
        CHECK(cfg.get_int("d", "chocolate pie") == 4);
    }

    TEST_CASE("string arrays and pair arrays") {
        const Config cfg = parse_config(
            "[pairs]\n"
            "names = [\"a\", \"b\", \"c\"]\n"
            "dishes = [[\"lasagna\", \"chocolate pie\"], [\"soup\", \"cake\"]]\n"
            "empty = []\n");
        CHECK(cfg.get_string_array("pairs", "names") ==
              std::vector<std::string>{"a", "b", "c"});
        const auto dishes = cfg.get_pair_array("pairs", "dishes");
        REQUIRE(dishes.size() == 2);
        CHECK(dishes[0].first == "lasagna");
        CHECK(dishes[0].second == "chocolate pie");
        CHECK(dishes[1].first == "soup");
        CHECK(dishes[1].second == "cake");
        CHECK(cfg.get_string_array("pairs", "empty").empty());
    }

    TEST_CASE("integers stay integers, reals stay reals") {
        const Config cfg = parse_config("[n]\ni = 42\nr = 42.0\nneg = -5\n");
        CHECK(cfg.at("n", "i").kind == ConfigValue::Kind::integer);
        CHECK(cfg.at("n", "r").kind == ConfigValue::Kind::real);
        CHECK(cfg.get_int("n", "neg") == -5);
        // integer settings satisfy real lookups
        CHECK(cfg.get_real_or("n", "i", 0.0) == doctest::Approx(42.0));
        // but not the other way around
        CHECK_THROWS_AS(cfg.at("n", "r").as_integer(), ConfigError);
    }

    TEST_CASE("missing keys") {
        const Config cfg = parse_config("[a]\nx = 1\n");
        CHECK_FALSE(cfg.has("a", "y"));
        CHECK_FALSE(cfg.has("b", "x"));
        CHECK_THROWS_WITH_AS(cfg.at("a", "y"), doctest::Contains("missing setting"),
                             ConfigError);
        CHECK(cfg.get_int_or("a", "y", 9) == 9);
        CHECK(cfg.get_string_or("b", "x", "fb") == "fb");
    }

    TEST_CASE("errors carry line numbers") {
        CHECK_THROWS_WITH_AS(parse_config("[a]\nx = 1\ny 2\n"),
                             doctest::Contains("line 3"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("[a]\nx = \"unterminated\n"),
                             doctest::Contains("line 2"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("x = 1\n"), doctest::Contains("line 1"),
                             ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("[a]\nx = 12monkeys\n"),
                             doctest::Contains("malformed number"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("[a]\nx = 1 trailing\n"),
                             doctest::Contains("line 2"), ConfigError);
    }

    TEST_CASE("duplicate keys rejected") {
        CHECK_THROWS_WITH_AS(parse_config("[a]\nx = 1\nx = 2\n"),
                             doctest::Contains("duplicate"), ConfigError);
    }

    TEST_CASE("set overrides and inserts") {
        Config cfg = parse_config("[a]\nx = 1\n");
        ConfigValue v;
        v.kind = ConfigValue::Kind::integer;
        v.integer = 7;
        cfg.set("a", "x", v);
        cfg.set("new", "y", v);
        CHECK(cfg.get_int("a", "x") == 7);
        CHECK(cfg.get_int("new", "y") == 7);
    }
}

TEST_SUITE("config files") {
    TEST_CASE("load_config resolves paths against the file's directory") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "treeblend_config_test";
        fs::create_directories(dir);
        {
            std::ofstream out(dir / "cfg.toml");
            out << "[corpus]\nfile = \"corpus.jsonl\"\nabs = \"/tmp/x\"\n";
        }
        const Config cfg = load_config((dir / "cfg.toml").string());
        CHECK(cfg.base_dir == dir.string());
        CHECK(cfg.resolve_path(cfg.get_string("corpus", "file")) ==
              (dir / "corpus.jsonl").string());
        CHECK(cfg.resolve_path(cfg.get_string("corpus", "abs")) == "/tmp/x");
        fs::remove_all(dir);
    }

    TEST_CASE("missing file") {
        CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), ConfigError);
    }
}
