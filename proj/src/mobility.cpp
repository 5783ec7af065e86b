#include "lvs/mobility.hpp"

#include <cmath>
#include <limits>

namespace lvs {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Walk `distance` meters from p along (dx, dy), reflecting at the box walls.
/// Direction components are flipped in place on each bounce.
void walk_reflecting(Position& p, double& dx, double& dy, double distance, const AreaGrid& g) {
    const double lo_x = g.origin.x, hi_x = g.origin.x + g.width();
    const double lo_y = g.origin.y, hi_y = g.origin.y + g.height();
    while (distance > 0.0) {
        double t_x = std::numeric_limits<double>::infinity();
        double t_y = std::numeric_limits<double>::infinity();
        if (dx > 0.0) t_x = (hi_x - p.x) / dx;
        if (dx < 0.0) t_x = (lo_x - p.x) / dx;
        if (dy > 0.0) t_y = (hi_y - p.y) / dy;
        if (dy < 0.0) t_y = (lo_y - p.y) / dy;
        const double t_hit = std::min(t_x, t_y);
        if (distance < t_hit) {
            p.x += distance * dx;
            p.y += distance * dy;
            break;
        }
        p.x += t_hit * dx;
        p.y += t_hit * dy;
        if (t_x <= t_y) {
            p.x = (dx > 0.0) ? hi_x : lo_x;
            dx = -dx;
        }
        if (t_y <= t_x) {
            p.y = (dy > 0.0) ? hi_y : lo_y;
            dy = -dy;
        }
        distance -= t_hit;
    }
    // Cells are half-open, so the far edges do not belong to the grid.
    p.x = std::clamp(p.x, lo_x, std::nextafter(hi_x, lo_x));
    p.y = std::clamp(p.y, lo_y, std::nextafter(hi_y, lo_y));
}

}  // namespace

double sample_truncated_power_law(double exponent, double lo, double hi, Rng& rng) {
    if (lo == hi) {
        return lo;
    }
    const double u = rng.uniform01();
    const double a = std::pow(lo, -exponent);
    const double b = std::pow(hi, -exponent);
    return std::pow(a - u * (a - b), -1.0 / exponent);
}

Leg sample_leg(const TlwParams& params, Rng& rng) {
    Leg leg;
    leg.flight_m =
        sample_truncated_power_law(params.flight_exponent, params.min_flight_m, params.max_flight_m, rng);
    leg.heading_rad = rng.uniform(0.0, kTwoPi);
    leg.pause_s =
        sample_truncated_power_law(params.pause_exponent, params.min_pause_s, params.max_pause_s, rng);
    return leg;
}

MobilityState init_mobility(Position start, const TlwParams& params, Rng& rng) {
    MobilityState state;
    state.position = start;
    const Leg leg = sample_leg(params, rng);
    state.remaining_flight_m = leg.flight_m;
    state.heading_rad = leg.heading_rad;
    state.pending_pause_s = leg.pause_s;
    return state;
}

void advance(MobilityState& state, double dt, const TlwParams& params, const AreaGrid& bounds,
             Rng& rng) {
    while (dt > 1e-12) {
        if (state.remaining_pause_s > 0.0) {
            const double consumed = std::min(state.remaining_pause_s, dt);
            state.remaining_pause_s -= consumed;
            dt -= consumed;
            if (state.remaining_pause_s <= 0.0) {
                state.remaining_pause_s = 0.0;
                const Leg leg = sample_leg(params, rng);
                state.remaining_flight_m = leg.flight_m;
                state.heading_rad = leg.heading_rad;
                state.pending_pause_s = leg.pause_s;
            }
            continue;
        }
        const double reachable = params.speed_mps * dt;
        const double dist = std::min(state.remaining_flight_m, reachable);
        if (dist <= 0.0) {
            break;
        }
        double dx = std::cos(state.heading_rad);
        double dy = std::sin(state.heading_rad);
        walk_reflecting(state.position, dx, dy, dist, bounds);
        double heading = std::atan2(dy, dx);
        if (heading < 0.0) heading += kTwoPi;
        state.heading_rad = heading;
        state.remaining_flight_m -= dist;
        dt -= dist / params.speed_mps;
        if (state.remaining_flight_m <= 1e-12) {
            state.remaining_flight_m = 0.0;
            state.remaining_pause_s = state.pending_pause_s;
            state.pending_pause_s = 0.0;
        }
    }
}

}  // namespace lvs
