#pragma once

#include <string>
#include <vector>

#include "tapnet/weights.hpp"

namespace tapnet {

// TAPW weight checkpoint:
//   magic "TAPW" | version u32 | record count u64 |
//   per record: name_len u32 + UTF-8 name | rank u64 | extents u64[rank] |
//               float32 little-endian data
// Records appear in registration order; buffers (running statistics) are
// stored alongside learnable parameters. Round-trips byte-exactly.

constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const ModelWeights<float>& weights, const std::string& path);

// Loads into an already-built model; every record must match an existing
// parameter by name and shape, and the counts must agree.
void load_checkpoint(ModelWeights<float>& weights, const std::string& path);

struct RawRecord {
    std::string name;
    std::vector<std::int64_t> shape;
    std::vector<float> data;
};

std::vector<RawRecord> read_checkpoint_records(const std::string& path);

} // namespace tapnet
