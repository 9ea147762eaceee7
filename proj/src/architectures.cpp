#include "tapnet/architectures.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tapnet {

using nlohmann::json;

const char* to_string(Family f) {
    switch (f) {
        case Family::Plain: return "plain";
        case Family::Residual: return "residual";
        case Family::Dense: return "dense";
    }
    throw spec_error("invalid family");
}

Family family_from_string(const std::string& name) {
    if (name == "plain") return Family::Plain;
    if (name == "residual") return Family::Residual;
    if (name == "dense") return Family::Dense;
    throw spec_error("unknown architecture family: '" + name + "'");
}

void ArchitectureSpec::validate() const {
    if (num_classes < 2) throw spec_error("num_classes must be >= 2");
    if (input_length < 1) throw spec_error("input_length must be >= 1");
    if (stem.kernel < 1 || stem.stride < 1 || stem.channels < 1) {
        throw spec_error("invalid stem specification");
    }
    if (family == Family::Dense) {
        if (dense.growth < 1) throw spec_error("dense growth rate must be >= 1");
        if (dense.reduction <= 0.0 || dense.reduction > 1.0) {
            throw spec_error("dense reduction ratio must be in (0, 1]");
        }
        if (dense.blocks < 1) throw spec_error("dense block count must be >= 1");
        if (dense.layers_per_block < 1) throw spec_error("dense layers_per_block must be >= 1");
    } else {
        if (blocks.empty()) throw spec_error("plain/residual spec needs at least one block");
        for (const BlockSpec& b : blocks) {
            if (b.kernel < 1 || b.channels < 1) throw spec_error("invalid block specification");
            if (b.kernel % 2 == 0) throw spec_error("block kernels must be odd (same padding)");
        }
        if (family == Family::Residual && blocks.size() % 2 != 0) {
            throw spec_error("residual family needs an even number of blocks (shortcuts span two)");
        }
    }
}

std::string ArchitectureSpec::to_json() const {
    json j;
    j["family"] = to_string(family);
    j["num_classes"] = num_classes;
    j["input_length"] = input_length;
    j["stem"] = {{"kernel", stem.kernel},
                 {"stride", stem.stride},
                 {"channels", stem.channels},
                 {"pool", stem.pool}};
    if (family == Family::Dense) {
        j["dense"] = {{"blocks", dense.blocks},
                      {"layers_per_block", dense.layers_per_block},
                      {"growth", dense.growth},
                      {"reduction", dense.reduction},
                      {"kernel", dense.kernel},
                      {"transition_pools", dense.transition_pools}};
    } else {
        json arr = json::array();
        for (const BlockSpec& b : blocks) {
            arr.push_back({{"kernel", b.kernel}, {"channels", b.channels}, {"pool", b.pool}});
        }
        j["blocks"] = arr;
    }
    return j.dump(2) + "\n";
}

ArchitectureSpec ArchitectureSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw format_error(std::string("architecture spec is not valid JSON: ") + e.what());
    }
    try {
        ArchitectureSpec spec;
        spec.family = family_from_string(j.at("family").get<std::string>());
        spec.num_classes = j.value("num_classes", static_cast<std::int64_t>(kNumClasses));
        spec.input_length = j.value("input_length", kSignalLength);
        if (j.contains("stem")) {
            const json& s = j["stem"];
            spec.stem.kernel = s.value("kernel", spec.stem.kernel);
            spec.stem.stride = s.value("stride", spec.stem.stride);
            spec.stem.channels = s.value("channels", spec.stem.channels);
            spec.stem.pool = s.value("pool", spec.stem.pool);
        }
        if (spec.family == Family::Dense) {
            const json& d = j.at("dense");
            spec.dense.blocks = d.value("blocks", spec.dense.blocks);
            spec.dense.layers_per_block = d.value("layers_per_block", spec.dense.layers_per_block);
            spec.dense.growth = d.value("growth", spec.dense.growth);
            spec.dense.reduction = d.value("reduction", spec.dense.reduction);
            spec.dense.kernel = d.value("kernel", spec.dense.kernel);
            if (d.contains("transition_pools")) {
                spec.dense.transition_pools =
                    d["transition_pools"].get<std::vector<std::int64_t>>();
            }
        } else {
            for (const json& b : j.at("blocks")) {
                BlockSpec blk;
                blk.kernel = b.value("kernel", blk.kernel);
                blk.channels = b.at("channels").get<std::int64_t>();
                blk.pool = b.value("pool", blk.pool);
                spec.blocks.push_back(blk);
            }
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw format_error(std::string("architecture spec missing field: ") + e.what());
    }
}

ArchitectureSpec ArchitectureSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open architecture spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void ArchitectureSpec::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write architecture spec: " + path);
    out << to_json();
}

// Block layout shared by the plain and residual families; channel widths are
// sized so the learnable count lands on the published ~58.03k budget.
ArchitectureSpec default_plain_spec() {
    ArchitectureSpec spec;
    spec.family = Family::Plain;
    spec.stem = StemSpec{32, 4, 16, 4};
    spec.blocks = {
        BlockSpec{5, 32, 2}, BlockSpec{5, 32, 2}, BlockSpec{5, 48, 2},
        BlockSpec{5, 48, 2}, BlockSpec{5, 56, 0}, BlockSpec{5, 56, 0},
    };
    return spec;
}

ArchitectureSpec default_residual_spec() {
    ArchitectureSpec spec = default_plain_spec();
    spec.family = Family::Residual;
    return spec;
}

// Four dense blocks, growth 6, reduction 0.5; ~57.46k learnable parameters.
ArchitectureSpec default_dense_spec() {
    ArchitectureSpec spec;
    spec.family = Family::Dense;
    spec.stem = StemSpec{32, 4, 16, 4};
    spec.dense.blocks = 4;
    spec.dense.layers_per_block = 9;
    spec.dense.growth = 6;
    spec.dense.reduction = 0.5;
    spec.dense.kernel = 3;
    spec.dense.transition_pools = {4, 2, 2};
    return spec;
}

} // namespace tapnet
