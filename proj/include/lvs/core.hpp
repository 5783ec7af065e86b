#ifndef LVS_CORE_HPP
#define LVS_CORE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lvs {

/// Error raised for malformed configuration or scenario setup.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Opaque, unspoofable user identity. Stands in for a fixed-width device
/// digest; assigned sequentially by the scenario and never reused.
struct UserId {
    std::uint32_t value = 0;

    auto operator<=>(const UserId&) const = default;
};

/// Cartesian position in meters.
struct Position {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;
};

using AreaId = std::int32_t;

/// Partition of the bounding box into columns x rows square cells of side
/// cell_size. Cells are half-open: [x, x+S) x [y, y+S), so every in-bounds
/// point belongs to exactly one cell.
struct AreaGrid {
    double cell_size = 2000.0;  // meters
    std::int32_t columns = 1;
    std::int32_t rows = 1;
    Position origin{};

    std::int32_t area_count() const { return columns * rows; }
    double width() const { return cell_size * columns; }
    double height() const { return cell_size * rows; }

    bool contains(Position p) const {
        return p.x >= origin.x && p.x < origin.x + width() && p.y >= origin.y &&
               p.y < origin.y + height();
    }

    /// Lower-left corner of a cell.
    Position cell_min(AreaId a) const {
        const std::int32_t col = a % columns;
        const std::int32_t row = a / columns;
        return {origin.x + col * cell_size, origin.y + row * cell_size};
    }

    bool operator==(const AreaGrid&) const = default;
};

/// Cell containing p, or nullopt when p is out of bounds.
std::optional<AreaId> maybe_area_of(Position p, const AreaGrid& g) noexcept;

/// Cell containing p. Out-of-bounds positions are an error; callers that can
/// see them must handle the failure, never clamp.
AreaId area_of(Position p, const AreaGrid& g);

/// 4-neighborhood of a cell, ascending area id. Empty only for a 1x1 grid.
std::vector<AreaId> adjacent_areas(AreaId a, const AreaGrid& g);

/// Timing of validation rounds and epoch termination.
struct RoundSchedule {
    double round_period_s = 15.0;       // one validation round every T_r seconds
    double setup_time_s = 7.0;          // hotspot activation overhead
    double validation_window_s = 8.0;   // time the hotspot accepts connections
    std::int32_t max_rounds_per_epoch = 40;
    double coverage_fraction = 0.9;     // epoch ends once this share is validated
    std::int32_t min_validators = 2;    // distinct validators needed per user

    bool operator==(const RoundSchedule&) const = default;
};

}  // namespace lvs

template <>
struct std::hash<lvs::UserId> {
    std::size_t operator()(const lvs::UserId& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};

#endif  // LVS_CORE_HPP
