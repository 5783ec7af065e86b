#ifndef LVS_MOBILITY_HPP
#define LVS_MOBILITY_HPP

#include "lvs/core.hpp"
#include "lvs/rng.hpp"

namespace lvs {

/// Truncated Levy walk parameters. Flight lengths and pause times are drawn
/// from power laws (density ~ x^(-1-exponent)) truncated to the given ranges.
struct TlwParams {
    double flight_exponent = 1.5;
    double pause_exponent = 1.38;
    double min_flight_m = 10.0;
    double max_flight_m = 1000.0;
    double min_pause_s = 10.0;
    double max_pause_s = 300.0;
    double speed_mps = 1.5;
    /// When set, users keep their position for the whole validation epoch and
    /// move only between epochs.
    bool freeze_per_epoch = true;

    bool operator==(const TlwParams&) const = default;
};

/// One walker. A leg is a straight flight followed by a pause; exactly one of
/// remaining_flight_m / remaining_pause_s is positive at any time. The pause
/// sampled with the current leg is stashed until the flight completes.
struct MobilityState {
    Position position{};
    double remaining_flight_m = 0.0;
    double heading_rad = 0.0;
    double remaining_pause_s = 0.0;
    double pending_pause_s = 0.0;
};

struct Leg {
    double flight_m = 0.0;
    double heading_rad = 0.0;
    double pause_s = 0.0;
};

/// Inverse-CDF draw of a truncated power law on [lo, hi].
double sample_truncated_power_law(double exponent, double lo, double hi, Rng& rng);

/// Draw one leg: flight length, uniform heading in [0, 2*pi), pause time.
Leg sample_leg(const TlwParams& params, Rng& rng);

/// Walker positioned at `start` about to begin its first leg.
MobilityState init_mobility(Position start, const TlwParams& params, Rng& rng);

/// Advance the walker by dt seconds, consuming flight then pause and sampling
/// new legs as needed. The position is kept inside the grid by reflecting at
/// the edges.
void advance(MobilityState& state, double dt, const TlwParams& params, const AreaGrid& bounds,
             Rng& rng);

}  // namespace lvs

#endif  // LVS_MOBILITY_HPP
