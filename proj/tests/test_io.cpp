#include <sstream>

#include <doctest.h>

#include "tiergrade/io.hpp"

using namespace tiergrade;

TEST_CASE("fmt12 is stable and 12-significant-digit") {
    CHECK(io::fmt12(0.25) == "0.25");
    CHECK(io::fmt12(1.0 / 3.0) == "0.333333333333");
    CHECK(io::fmt12(1e-9) == "1e-09");
    CHECK(io::fmt12(io::fmt12(0.1) == "0.1" ? 0.1 : 0.0) == "0.1");
}

TEST_CASE("population parsing: happy path with CRLF tolerance") {
    std::istringstream in("id,theta\r\nalice,0.12\nbob,0.34\r\n\n");
    const auto pop = io::read_population(in);
    REQUIRE(pop.size() == 2);
    CHECK(pop[0].id == "alice");
    CHECK(pop[0].theta == doctest::Approx(0.12));
    CHECK(pop[1].id == "bob");
}

TEST_CASE("population parsing: malformed inputs throw") {
    std::istringstream no_header("alice,0.12\n");
    CHECK_THROWS_AS(io::read_population(no_header), std::invalid_argument);
    std::istringstream bad_theta("id,theta\nalice,zero\n");
    CHECK_THROWS_AS(io::read_population(bad_theta), std::invalid_argument);
    std::istringstream no_comma("id,theta\nalice 0.12\n");
    CHECK_THROWS_AS(io::read_population(no_comma), std::invalid_argument);
    std::istringstream trailing("id,theta\nalice,0.12x\n");
    CHECK_THROWS_AS(io::read_population(trailing), std::invalid_argument);
    std::istringstream empty("id,theta\n");
    CHECK_THROWS_AS(io::read_population(empty), std::invalid_argument);
}
