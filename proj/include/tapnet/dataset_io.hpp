#pragma once

#include <string>

#include "tapnet/signal.hpp"

namespace tapnet {

// TAPD dataset file:
//   magic "TAPD" | version u32 | count u64 | signal length u32 (2048) |
//   domain table: u16 count, then u32 name_len + UTF-8 name each |
//   per record: float32 x 2048 samples | label u8 (255 = unlabeled) |
//               domain id u16 | fold id u8 (255 = unassigned) |
//               row u16 | col u16 (0xFFFF/0xFFFF = no grid position)
// All fields little-endian and fixed width; round-trips byte-exactly.
// Shadow truth labels are in-memory state and are not serialized.

constexpr std::uint32_t kDatasetVersion = 1;

void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

} // namespace tapnet
