#include <doctest.h>

#include <random>

#include "linkalign/common.hpp"

using namespace linkalign;

TEST_CASE("normalize_identifier folds case, trims, strips quoting") {
    CHECK(normalize_identifier("  Student ") == "student");
    CHECK(normalize_identifier("`Pet_ID`") == "pet_id");
    CHECK(normalize_identifier("\"F_name\"") == "f_name");
    CHECK(normalize_identifier("") == "");
}

TEST_CASE("normalize_identifier is idempotent") {
    std::mt19937 rng(7);
    std::string alphabet = "aZ_ `\"09.-";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        std::uniform_int_distribution<std::size_t> len(0, 24);
        std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
        for (std::size_t j = len(rng); j > 0; --j) s.push_back(alphabet[pick(rng)]);
        std::string once = normalize_identifier(s);
        CHECK(normalize_identifier(once) == once);
    }
}

TEST_CASE("tokenize_words lowercases and keeps underscores inside tokens") {
    auto tokens = tokenize_words("Which Pet_Type, if any?");
    REQUIRE(tokens.size() == 4);
    CHECK(tokens[0] == "which");
    CHECK(tokens[1] == "pet_type");
    CHECK(tokens[2] == "if");
    CHECK(tokens[3] == "any");
    CHECK(tokenize_words("").empty());
}

TEST_CASE("digests are stable and short") {
    CHECK(content_digest("abc") == content_digest("abc"));
    CHECK(content_digest("abc") != content_digest("abd"));
    CHECK(content_digest("abc").size() == 16);
    CHECK(fnv1a("abc") == fnv1a("abc"));
    CHECK(fnv1a("") != fnv1a("a"));
}

TEST_CASE("trim and to_lower") {
    CHECK(trim("  a b \t") == "a b");
    CHECK(trim("") == "");
    CHECK(to_lower("MiXeD_09") == "mixed_09");
}
