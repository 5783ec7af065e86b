#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lvs/mobility.hpp"

using namespace lvs;

namespace {

// Closed-form CDF of the truncated power law, the independent check against
// the inverse-transform sampler.
double truncated_power_law_cdf(double x, double exponent, double lo, double hi) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double a = std::pow(lo, -exponent);
    const double b = std::pow(hi, -exponent);
    return (a - std::pow(x, -exponent)) / (a - b);
}

double ks_distance(std::vector<double> samples, double exponent, double lo, double hi) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = truncated_power_law_cdf(samples[i], exponent, lo, hi);
        d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
        d = std::max(d, std::abs(static_cast<double>(i) / n - f));
    }
    return d;
}

TlwParams defaults() { return TlwParams{}; }

}  // namespace

TEST_CASE("sample_leg: degenerate truncation pins the flight length") {
    TlwParams p = defaults();
    p.min_flight_m = 10.0;
    p.max_flight_m = 10.0;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_leg(p, rng).flight_m == 10.0);
    }
}

TEST_CASE("sample_leg: flight lengths match the closed-form CDF (KS < 0.01)") {
    const TlwParams p = defaults();
    Rng rng(42);
    std::vector<double> flights;
    flights.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
        const Leg leg = sample_leg(p, rng);
        CHECK(leg.flight_m >= p.min_flight_m);
        CHECK(leg.flight_m <= p.max_flight_m);
        flights.push_back(leg.flight_m);
    }
    CHECK(ks_distance(flights, p.flight_exponent, p.min_flight_m, p.max_flight_m) < 0.01);
}

TEST_CASE("sample_leg: pause times match the closed-form CDF (KS < 0.01)") {
    const TlwParams p = defaults();
    Rng rng(43);
    std::vector<double> pauses;
    pauses.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
        const Leg leg = sample_leg(p, rng);
        CHECK(leg.pause_s >= p.min_pause_s);
        CHECK(leg.pause_s <= p.max_pause_s);
        pauses.push_back(leg.pause_s);
    }
    CHECK(ks_distance(pauses, p.pause_exponent, p.min_pause_s, p.max_pause_s) < 0.01);
}

TEST_CASE("sample_leg: headings are circularly uniform (quadrants 25% +- 1%)") {
    const TlwParams p = defaults();
    Rng rng(44);
    int quadrant[4] = {0, 0, 0, 0};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double h = sample_leg(p, rng).heading_rad;
        CHECK(h >= 0.0);
        CHECK(h < 2.0 * 3.14159265358979324);
        quadrant[static_cast<int>(h / (3.14159265358979324 / 2.0)) % 4]++;
    }
    for (const int q : quadrant) {
        CHECK(std::abs(static_cast<double>(q) / n - 0.25) < 0.01);
    }
}

TEST_CASE("advance: dt = 0 leaves the state untouched") {
    const TlwParams p = defaults();
    const AreaGrid g{2000.0, 1, 1, {0.0, 0.0}};
    Rng rng(5);
    MobilityState s = init_mobility({1000.0, 1000.0}, p, rng);
    const MobilityState before = s;
    advance(s, 0.0, p, g, rng);
    CHECK(s.position == before.position);
    CHECK(s.remaining_flight_m == before.remaining_flight_m);
    CHECK(s.remaining_pause_s == before.remaining_pause_s);
}

TEST_CASE("advance: pausing consumes time, not distance") {
    const TlwParams p = defaults();
    const AreaGrid g{2000.0, 1, 1, {0.0, 0.0}};
    Rng rng(6);
    MobilityState s = init_mobility({500.0, 500.0}, p, rng);
    s.remaining_flight_m = 0.0;
    s.remaining_pause_s = 5.0;
    s.pending_pause_s = 0.0;
    const Position before = s.position;
    advance(s, 3.0, p, g, rng);
    CHECK(s.position == before);
    CHECK(s.remaining_pause_s == doctest::Approx(2.0));
}

TEST_CASE("advance: exactly one phase is active after every step") {
    const TlwParams p = defaults();
    const AreaGrid g{1000.0, 1, 1, {0.0, 0.0}};
    Rng rng(7);
    MobilityState s = init_mobility({100.0, 100.0}, p, rng);
    for (int i = 0; i < 5000; ++i) {
        advance(s, 1.7, p, g, rng);
        const bool flying = s.remaining_flight_m > 0.0;
        const bool pausing = s.remaining_pause_s > 0.0;
        CHECK(flying != pausing);
    }
}

TEST_CASE("advance: a long run never leaves the bounds") {
    const TlwParams p = defaults();
    const AreaGrid g{400.0, 2, 1, {-100.0, 50.0}};
    Rng rng(8);
    MobilityState s = init_mobility({0.0, 200.0}, p, rng);
    for (int i = 0; i < 10000; ++i) {
        advance(s, 1.0, p, g, rng);
        CHECK(g.contains(s.position));
    }
}

TEST_CASE("advance: same seed gives a bitwise-identical trajectory") {
    const TlwParams p = defaults();
    const AreaGrid g{2000.0, 1, 1, {0.0, 0.0}};
    Rng rng_a(99), rng_b(99);
    MobilityState a = init_mobility({700.0, 900.0}, p, rng_a);
    MobilityState b = init_mobility({700.0, 900.0}, p, rng_b);
    const double dts[] = {15.0, 1.0, 120.0, 0.25, 300.0, 15.0};
    for (int i = 0; i < 600; ++i) {
        const double dt = dts[i % 6];
        advance(a, dt, p, g, rng_a);
        advance(b, dt, p, g, rng_b);
        REQUIRE(a.position.x == b.position.x);
        REQUIRE(a.position.y == b.position.y);
        REQUIRE(a.remaining_flight_m == b.remaining_flight_m);
        REQUIRE(a.remaining_pause_s == b.remaining_pause_s);
    }
}

TEST_CASE("advance: displacement over one unobstructed flight equals its length") {
    TlwParams p = defaults();
    p.min_flight_m = 400.0;
    p.max_flight_m = 800.0;
    const AreaGrid g{100000.0, 1, 1, {0.0, 0.0}};  // walls far out of reach
    Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        MobilityState s = init_mobility({50000.0, 50000.0}, p, rng);
        const Position start = s.position;
        const double flight = s.remaining_flight_m;
        // Consume exactly the flight in many uneven slices.
        double left = flight / p.speed_mps;
        while (left > 0.0) {
            const double dt = std::min(left, 0.37);
            advance(s, dt, p, g, rng);
            left -= dt;
        }
        const double dx = s.position.x - start.x;
        const double dy = s.position.y - start.y;
        const double displacement = std::sqrt(dx * dx + dy * dy);
        CHECK(std::abs(displacement - flight) <= 1e-9 * flight);
    }
}
