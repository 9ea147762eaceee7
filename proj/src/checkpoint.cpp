#include "tapnet/checkpoint.hpp"

#include <fstream>

#include "tapnet/serial.hpp"

namespace tapnet {

namespace {
constexpr char kMagic[4] = {'T', 'A', 'P', 'W'};
}

void save_checkpoint(const ModelWeights<float>& weights, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open checkpoint for writing: " + path);
    out.write(kMagic, 4);
    serial::write_le<std::uint32_t>(out, kCheckpointVersion);
    serial::write_le<std::uint64_t>(out, weights.count());
    for (const auto& p : weights) {
        serial::write_string(out, p.name);
        serial::write_le<std::uint64_t>(out, p.shape.size());
        for (std::int64_t e : p.shape) {
            serial::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(e));
        }
        serial::write_f32_array(out, p.value.data(), p.value.size());
    }
    if (!out) throw io_error("checkpoint write failed: " + path);
}

std::vector<RawRecord> read_checkpoint_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open checkpoint: " + path);
    serial::expect_magic(in, kMagic, "TAPW");
    const auto version = serial::read_le<std::uint32_t>(in, "version");
    if (version != kCheckpointVersion) {
        throw format_error("unsupported TAPW version " + std::to_string(version));
    }
    const auto count = serial::read_le<std::uint64_t>(in, "record count");
    std::vector<RawRecord> records;
    records.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r) {
        RawRecord rec;
        rec.name = serial::read_string(in, "record name");
        const auto rank = serial::read_le<std::uint64_t>(in, "rank");
        if (rank > 8) throw format_error("implausible tensor rank in " + rec.name);
        std::size_t n = 1;
        for (std::uint64_t i = 0; i < rank; ++i) {
            const auto e = serial::read_le<std::uint64_t>(in, "extent");
            rec.shape.push_back(static_cast<std::int64_t>(e));
            n *= static_cast<std::size_t>(e);
        }
        rec.data.resize(n);
        serial::read_f32_array(in, rec.data.data(), n, rec.name.c_str());
        records.push_back(std::move(rec));
    }
    return records;
}

void load_checkpoint(ModelWeights<float>& weights, const std::string& path) {
    const auto records = read_checkpoint_records(path);
    if (records.size() != weights.count()) {
        throw format_error("checkpoint has " + std::to_string(records.size()) +
                           " records, model expects " + std::to_string(weights.count()));
    }
    for (const auto& rec : records) {
        Parameter<float>* p = weights.find(rec.name);
        if (!p) throw format_error("checkpoint record '" + rec.name + "' not found in model");
        if (p->shape != rec.shape) {
            throw format_error("shape mismatch for '" + rec.name + "'");
        }
        p->value = rec.data;
    }
}

} // namespace tapnet
