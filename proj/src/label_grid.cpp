#include "tapnet/label_grid.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tapnet {

std::int64_t LabelGrid::included_count() const {
    return static_cast<std::int64_t>(
        std::count_if(cells.begin(), cells.end(), [](std::int8_t c) { return c != kExcludedCell; }));
}

void LabelGrid::validate() const {
    if (rows < 1 || cols < 1) throw spec_error("label grid must be non-empty");
    if (static_cast<std::int64_t>(cells.size()) != rows * cols) {
        throw spec_error("label grid cell count does not match dimensions");
    }
    if (stride_mm <= 0.0) throw spec_error("label grid stride must be positive");
    for (std::int8_t c : cells) {
        if (c != kExcludedCell && (c < 0 || c >= kNumClasses)) {
            throw spec_error("label grid contains invalid class code");
        }
    }
}

LabelGrid parse_label_grid_csv(const std::string& text, double stride_mm) {
    LabelGrid grid;
    grid.stride_mm = stride_mm;
    std::istringstream in(text);
    std::string line;
    std::int64_t cols = -1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::int64_t this_cols = 0;
        while (std::getline(row, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            const std::string token =
                (b == std::string::npos) ? std::string() : cell.substr(b, e - b + 1);
            if (token == "X" || token == "x") {
                grid.cells.push_back(kExcludedCell);
            } else {
                grid.cells.push_back(static_cast<std::int8_t>(defect_class_from_string(token)));
            }
            ++this_cols;
        }
        if (cols < 0) {
            cols = this_cols;
        } else if (cols != this_cols) {
            throw format_error("label grid rows have inconsistent column counts");
        }
        grid.rows += 1;
    }
    grid.cols = std::max<std::int64_t>(cols, 0);
    grid.validate();
    return grid;
}

LabelGrid load_label_grid_csv(const std::string& path, double stride_mm) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open label grid: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_label_grid_csv(ss.str(), stride_mm);
}

LabelGrid exclude_boundary_margin(const LabelGrid& grid, std::int64_t margin) {
    grid.validate();
    if (margin <= 0) return grid;
    LabelGrid out = grid;
    for (std::int64_t r = 0; r < grid.rows; ++r) {
        for (std::int64_t c = 0; c < grid.cols; ++c) {
            const std::int8_t self = grid.at(r, c);
            if (self == kExcludedCell) continue;
            bool boundary = false;
            for (std::int64_t dr = -margin; dr <= margin && !boundary; ++dr) {
                for (std::int64_t dc = -margin; dc <= margin && !boundary; ++dc) {
                    const std::int64_t rr = r + dr;
                    const std::int64_t cc = c + dc;
                    if (rr < 0 || rr >= grid.rows || cc < 0 || cc >= grid.cols) continue;
                    const std::int8_t other = grid.at(rr, cc);
                    if (other != kExcludedCell && other != self) boundary = true;
                }
            }
            if (boundary) out.cells[r * grid.cols + c] = kExcludedCell;
        }
    }
    return out;
}

std::vector<Signal> apply_label_grid(const std::vector<Signal>& signals, const LabelGrid& grid,
                                     bool signals_cover_all_cells) {
    grid.validate();
    const std::int64_t expected =
        signals_cover_all_cells ? grid.rows * grid.cols : grid.included_count();
    if (static_cast<std::int64_t>(signals.size()) != expected) {
        throw alignment_error("expected " + std::to_string(expected) + " signals for the grid, found " +
                              std::to_string(signals.size()));
    }

    std::vector<Signal> out;
    out.reserve(static_cast<std::size_t>(grid.included_count()));
    std::size_t next = 0;
    for (std::int64_t r = 0; r < grid.rows; ++r) {
        for (std::int64_t c = 0; c < grid.cols; ++c) {
            const std::int8_t cell = grid.at(r, c);
            if (cell == kExcludedCell) {
                if (signals_cover_all_cells) ++next;  // drop the excluded position
                continue;
            }
            Signal s = signals[next++];
            s.label = defect_class_from_code(cell);
            s.truth = s.label;
            s.position = GridPos{static_cast<std::uint16_t>(r), static_cast<std::uint16_t>(c)};
            out.push_back(std::move(s));
        }
    }
    return out;
}

} // namespace tapnet
