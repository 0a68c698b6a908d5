#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dxnesici/integer_domain.hpp"

using namespace dxnesici;

namespace
{
    IntegerDomain single(std::vector<double> values)
    {
        return IntegerDomain(std::vector<std::vector<double>>{std::move(values)});
    }

    IntegerDomain ten_domain()
    {
        return uniform_domain(1, integer_range(-10, 10));
    }

    // Nearest value, ties to the lower one: an encoding oracle that never looks at thresholds.
    double nearest_value(std::span<const double> values, double x)
    {
        double best = values[0];
        for (const double v : values)
            if (std::abs(x - v) < std::abs(x - best))
                best = v;
        return best;
    }
}

TEST_CASE("thresholds are midpoints of adjacent values")
{
    const auto d = ten_domain();
    const auto t = d.thresholds(0);
    REQUIRE(t.size() == 20);
    for (std::size_t k = 0; k < t.size(); ++k)
        CHECK(t[k] == -9.5 + static_cast<double>(k));

    const IntegerDomain binary = single({0.0, 1.0});
    REQUIRE(binary.thresholds(0).size() == 1);
    CHECK(binary.thresholds(0)[0] == 0.5);

    const IntegerDomain uneven = single({1.0, 2.0, 4.0});
    CHECK(uneven.thresholds(0)[0] == 1.5);
    CHECK(uneven.thresholds(0)[1] == 3.0);
}

TEST_CASE("malformed value lists are rejected")
{
    CHECK_THROWS_AS(single({0.0}), std::invalid_argument);
    CHECK_THROWS_AS(single({}), std::invalid_argument);
    CHECK_THROWS_AS(single({0.0, 2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(single({0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(single({0.0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_NOTHROW(IntegerDomain(std::vector<std::vector<double>>{}));
}

TEST_CASE("encode snaps integer coordinates and copies continuous ones")
{
    const auto d = ten_domain();
    CHECK(d.encode_value(0, 0.3) == 0.0);
    CHECK(d.encode_value(0, 99.0) == 10.0);
    CHECK(d.encode_value(0, -99.0) == -10.0);
    // Right endpoints belong to the lower plateau.
    CHECK(d.encode_value(0, 0.5) == 0.0);
    CHECK(d.encode_value(0, -0.5) == -1.0);

    Vector x(3);
    x << 0.123, -4.56, 3.49;
    const IntegerDomain two = uniform_domain(1, integer_range(-10, 10));
    const Vector e = encode(x, two, 2);
    CHECK(e[0] == 0.123);
    CHECK(e[1] == -4.56);
    CHECK(e[2] == 3.0);

    const IntegerDomain uneven = single({1.0, 2.0, 4.0});
    CHECK(uneven.encode_value(0, 2.9) == 2.0);
    CHECK(uneven.encode_value(0, 3.0) == 2.0);
    CHECK(uneven.encode_value(0, 3.1) == 4.0);
}

TEST_CASE("encode rejects bad input")
{
    const auto d = ten_domain();
    Vector x(2);
    x << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(encode(x, d, 1), std::invalid_argument);
    x << std::numeric_limits<double>::infinity(), 0.0;
    CHECK_THROWS_AS(encode(x, d, 1), std::invalid_argument);
    CHECK_THROWS_AS(encode(Vector::Zero(3), d, 1), std::invalid_argument);
}

TEST_CASE("encode agrees with the nearest-value oracle and is monotone")
{
    std::mt19937_64 rng(7);
    const IntegerDomain d = single({-3.0, -1.0, 0.0, 0.25, 2.0, 7.5});
    std::uniform_real_distribution<double> u(-12.0, 12.0);
    std::vector<double> xs(100000);
    for (auto& v : xs)
        v = u(rng);
    std::sort(xs.begin(), xs.end());
    double prev = -1e300;
    int mismatches = 0, inversions = 0;
    for (const double x : xs)
    {
        const double e = d.encode_value(0, x);
        mismatches += e != nearest_value(d.values(0), x);
        inversions += e < prev;
        prev = e;
    }
    CHECK(mismatches == 0);
    CHECK(inversions == 0);
}

TEST_CASE("crossing an interior threshold changes the code by one step")
{
    const IntegerDomain d = single({-3.0, -1.0, 0.0, 0.25, 2.0, 7.5});
    const auto v = d.values(0);
    const auto t = d.thresholds(0);
    for (std::size_t k = 0; k < t.size(); ++k)
    {
        CHECK(d.encode_value(0, t[k] - 1e-9) == v[k]);
        CHECK(d.encode_value(0, t[k] + 1e-9) == v[k + 1]);
    }
}

TEST_CASE("nearest-threshold queries")
{
    const auto d = ten_domain();
    CHECK(*d.ell_low(0, 0.2) == -0.5);
    CHECK(*d.ell_up(0, 0.2) == 0.5);
    CHECK(d.ell_close(0, 0.2) == 0.5);

    CHECK(*d.ell_low(0, 0.5) == -0.5);
    CHECK(*d.ell_up(0, 0.5) == 0.5);
    CHECK(d.ell_close(0, 0.5) == 0.5);

    CHECK_FALSE(d.ell_up(0, 12.0).has_value());
    CHECK(*d.ell_low(0, 12.0) == 9.5);
    CHECK(d.ell_close(0, 12.0) == 9.5);

    CHECK_FALSE(d.ell_low(0, -9.5).has_value());
    CHECK(d.ell_close(0, -30.0) == -9.5);

    // Equidistant from 0.5 and 1.5: lower wins.
    const IntegerDomain three = single({0.0, 1.0, 2.0});
    CHECK(three.ell_close(0, 1.0) == 0.5);
}

TEST_CASE("threshold bracket property")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-12.0, 12.0);
    const auto d = ten_domain();
    for (int i = 0; i < 10000; ++i)
    {
        const double m = u(rng);
        const auto low = d.ell_low(0, m);
        const auto up = d.ell_up(0, m);
        const double close = d.ell_close(0, m);
        if (low)
            CHECK(*low < m);
        if (up)
            CHECK(m <= *up);
        const bool from_bracket = (low && close == *low) || (up && close == *up);
        CHECK(from_bracket);
    }
}

TEST_CASE("standard normal quantile matches tabulated values")
{
    CHECK(std::abs(upper_tail_quantile(0.5)) < 1e-15);
    CHECK(std::abs(upper_tail_quantile(0.025) - 1.9599639845400542355) < 1e-9);
    CHECK(std::abs(upper_tail_quantile(0.05) - 1.6448536269514727149) < 1e-9);
    CHECK(std::abs(upper_tail_quantile(0.001) - 3.0902323061678135415) < 1e-9);
    CHECK(std::abs(upper_tail_quantile(1e-9) - 5.9978070150076868716) < 1e-9);
    CHECK(std::abs(upper_tail_quantile(0.3) - 0.52440051270804078404) < 1e-9);
    CHECK(std::abs(upper_tail_probability(2.0) - 0.0227501319481792072) < 1e-15);
    CHECK_THROWS_AS(upper_tail_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(upper_tail_quantile(1.0), std::invalid_argument);
}

TEST_CASE("confidence half-width")
{
    CHECK(ci_halfwidth(4.0, 0.158655) == doctest::Approx(2.0).epsilon(5e-5));
    CHECK(std::abs(ci_halfwidth(1.0, 0.025) - 1.95996) < 1e-4);
    CHECK(ci_halfwidth(0.0, 0.025) == 0.0);
    CHECK_THROWS_AS(ci_halfwidth(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ci_halfwidth(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ci_halfwidth(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("resolution counts thresholds on the closed interval")
{
    const auto d = ten_domain();
    CHECK(d.count_thresholds_within(0, 0.0, 0.6) == 2);
    CHECK(d.count_thresholds_within(0, 0.5, 1e-12) == 1);
    CHECK(d.count_thresholds_within(0, 0.5, 0.0) == 1);
    CHECK(d.count_thresholds_within(0, 0.3, 0.05) == 0);
    CHECK(d.count_thresholds_within(0, 0.0, 0.5) == 2);
    CHECK(d.count_thresholds_within(0, 50.0, 1.0) == 0);

    // Through the variance/alpha route: sd 0.25, alpha 0.025 -> CI = 0.49 < 0.5.
    CHECK(resolution(d, 0, 0.0, 0.0625, 0.025) == 0);
    CHECK(resolution(d, 0, 0.0, 0.0625, 0.02) == 2);
}

TEST_CASE("tail probabilities")
{
    const auto d = ten_domain();
    const auto centered = tail_probabilities(d, 0, 0.0, 0.0625);
    REQUIRE(centered.lower);
    REQUIRE(centered.upper);
    CHECK(*centered.lower == doctest::Approx(0.02275013).epsilon(1e-6));
    CHECK(*centered.upper == doctest::Approx(*centered.lower));

    const auto at = tail_probabilities(d, 0, 0.5, 1.0);
    CHECK(*at.upper == doctest::Approx(0.5));

    const auto outside = tail_probabilities(d, 0, 12.0, 1.0);
    CHECK_FALSE(outside.upper.has_value());
    CHECK(outside.lower.has_value());

    CHECK_THROWS_AS(tail_probabilities(d, 0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("zero resolution iff both tails fall below alpha")
{
    std::mt19937_64 rng(3);
    const auto d = ten_domain();
    std::uniform_real_distribution<double> um(-9.49, 9.49), ulogsd(-3.0, 0.5), ulogalpha(-5.0, std::log10(0.49));
    for (int i = 0; i < 20000; ++i)
    {
        const double m = um(rng);
        const double sd = std::pow(10.0, ulogsd(rng));
        const double alpha = std::pow(10.0, ulogalpha(rng));
        const auto res = resolution(d, 0, m, sd * sd, alpha);
        const auto tails = tail_probabilities(d, 0, m, sd * sd);
        REQUIRE(tails.lower);
        REQUIRE(tails.upper);
        const bool both_small = *tails.lower < alpha && *tails.upper < alpha;
        CHECK((res == 0) == both_small);
    }
}
