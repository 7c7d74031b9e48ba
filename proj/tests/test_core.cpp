#include <doctest.h>

#include "newslens/core.hpp"

using namespace newslens;

TEST_CASE("date parse and arithmetic") {
    auto d = Date::parse("2023-10-07");
    REQUIRE(d.has_value());
    CHECK(d->year == 2023);
    CHECK(d->month == 10);
    CHECK(d->day == 7);
    CHECK(d->to_string() == "2023-10-07");

    CHECK(d->plus_days(7).to_string() == "2023-10-14");
    CHECK(d->plus_days(366).to_string() == "2024-10-07");  // 2024 is a leap year
    CHECK((*Date::parse("2024-10-07") - *d) == 366);
    CHECK((*Date::parse("2024-02-29")).to_string() == "2024-02-29");

    CHECK_FALSE(Date::parse("2023-02-29").has_value());
    CHECK_FALSE(Date::parse("2023-13-01").has_value());
    CHECK_FALSE(Date::parse("20231001").has_value());
    CHECK(*Date::parse("2023-12-31") < *Date::parse("2024-01-01"));
}

TEST_CASE("datetime parse accepts date-only and full timestamps") {
    auto a = DateTime::parse("2023-10-07");
    REQUIRE(a.has_value());
    CHECK_FALSE(a->second_of_day.has_value());

    auto b = DateTime::parse("2023-10-07T08:30:15Z");
    REQUIRE(b.has_value());
    CHECK(b->second_of_day == 8 * 3600 + 30 * 60 + 15);
    CHECK(b->to_string() == "2023-10-07T08:30:15Z");

    CHECK_FALSE(DateTime::parse("2023-10-07T99:00:00").has_value());
}

TEST_CASE("string helpers") {
    CHECK(str::trim("  a b  ") == "a b");
    CHECK(str::lower("WeSt BANK") == "west bank");
    CHECK(str::collapse_whitespace("a \t b\n\nc") == "a b c");
    CHECK(str::normalize_key("  Steve   BRISLEY ") == "steve brisley");
    CHECK(str::icontains("IDF strikes continue", "idf"));
    CHECK_FALSE(str::icontains("strikes continue", "IDF"));
    auto toks = str::word_tokens("Israel-Gaza war");
    REQUIRE(toks.size() == 3);
    CHECK(toks[0] == "Israel");
    CHECK(toks[1] == "Gaza");
}

TEST_CASE("sha256 known vector") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("round-half-up formatting") {
    CHECK(format_fixed(0.086649, 2) == "0.09");
    CHECK(format_fixed(36.468, 0) == "36");
    CHECK(format_fixed(50.580, 1) == "50.6");
    CHECK(format_fixed(0.5, 0) == "1");        // half rounds up
    CHECK(format_fixed(-0.5, 0) == "-1");      // away from zero
    CHECK(format_fixed(2.25, 1) == "2.3");
    CHECK(format_fixed(-0.0001, 2) == "0.00");  // no negative zero
}
