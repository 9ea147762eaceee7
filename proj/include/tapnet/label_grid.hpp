#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tapnet/signal.hpp"

namespace tapnet {

constexpr std::int8_t kExcludedCell = -1;

// Scan-program label map: one class code per tap position, with excluded
// sentinel cells. Loaded from CSV of class short names ("X" = excluded).
struct LabelGrid {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<std::int8_t> cells;  // row-major; kExcludedCell or class code
    double stride_mm = 2.0;

    std::int8_t at(std::int64_t r, std::int64_t c) const { return cells[r * cols + c]; }
    std::int64_t included_count() const;
    void validate() const;
};

LabelGrid load_label_grid_csv(const std::string& path, double stride_mm = 2.0);
LabelGrid parse_label_grid_csv(const std::string& text, double stride_mm = 2.0);

// Marks every cell within Chebyshev radius `margin` of a class boundary as
// excluded. The removal radius around defects is a free parameter here.
LabelGrid exclude_boundary_margin(const LabelGrid& grid, std::int64_t margin);

// Signals must arrive in row-major scan order. If `signals_cover_all_cells`,
// one signal per grid cell is expected and signals at excluded cells are
// dropped; otherwise one signal per non-excluded cell.
std::vector<Signal> apply_label_grid(const std::vector<Signal>& signals, const LabelGrid& grid,
                                     bool signals_cover_all_cells = true);

} // namespace tapnet
