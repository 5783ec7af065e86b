#include "lvs/core.hpp"

#include <algorithm>
#include <cmath>

namespace lvs {

std::optional<AreaId> maybe_area_of(Position p, const AreaGrid& g) noexcept {
    if (!g.contains(p)) {
        return std::nullopt;
    }
    auto col = static_cast<std::int32_t>(std::floor((p.x - g.origin.x) / g.cell_size));
    auto row = static_cast<std::int32_t>(std::floor((p.y - g.origin.y) / g.cell_size));
    // floor() of a value an ulp below a cell edge can land one past the last
    // cell even though contains() passed; clamp the index, not the position.
    col = std::clamp(col, 0, g.columns - 1);
    row = std::clamp(row, 0, g.rows - 1);
    return row * g.columns + col;
}

AreaId area_of(Position p, const AreaGrid& g) {
    const auto a = maybe_area_of(p, g);
    if (!a) {
        throw std::out_of_range("area_of: position (" + std::to_string(p.x) + ", " +
                                std::to_string(p.y) + ") outside grid bounds");
    }
    return *a;
}

std::vector<AreaId> adjacent_areas(AreaId a, const AreaGrid& g) {
    const std::int32_t col = a % g.columns;
    const std::int32_t row = a / g.columns;
    std::vector<AreaId> out;
    if (row > 0) out.push_back(a - g.columns);
    if (col > 0) out.push_back(a - 1);
    if (col + 1 < g.columns) out.push_back(a + 1);
    if (row + 1 < g.rows) out.push_back(a + g.columns);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace lvs
