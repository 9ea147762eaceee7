#include "tapnet/dataset_io.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include "tapnet/serial.hpp"

namespace tapnet {

namespace {
constexpr char kMagic[4] = {'T', 'A', 'P', 'D'};
constexpr std::uint8_t kNoLabel = 0xFF;
constexpr std::uint16_t kNoPos = 0xFFFF;
constexpr std::size_t kRecordBytes =
    static_cast<std::size_t>(kSignalLength) * 4 + 1 + 2 + 1 + 2 + 2;
} // namespace

void write_dataset(const Dataset& ds, const std::string& path) {
    ds.validate();

    // Domain table in first-appearance order.
    std::vector<std::string> domains;
    std::map<std::string, std::uint16_t> domain_ids;
    for (const Signal& s : ds.signals) {
        if (!domain_ids.count(s.domain.name)) {
            if (domains.size() >= 0xFFFF) throw io_error("too many distinct domains");
            domain_ids[s.domain.name] = static_cast<std::uint16_t>(domains.size());
            domains.push_back(s.domain.name);
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open dataset for writing: " + path);
    out.write(kMagic, 4);
    serial::write_le<std::uint32_t>(out, kDatasetVersion);
    serial::write_le<std::uint64_t>(out, ds.signals.size());
    serial::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(kSignalLength));
    serial::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(domains.size()));
    for (const std::string& d : domains) serial::write_string(out, d);

    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
        const Signal& s = ds.signals[i];
        serial::write_f32_array(out, s.samples.data(), s.samples.size());
        serial::write_le<std::uint8_t>(
            out, s.label ? static_cast<std::uint8_t>(*s.label) : kNoLabel);
        serial::write_le<std::uint16_t>(out, domain_ids.at(s.domain.name));
        serial::write_le<std::uint8_t>(out, ds.has_folds() ? ds.folds[i] : kNoFold);
        serial::write_le<std::uint16_t>(out, s.position ? s.position->row : kNoPos);
        serial::write_le<std::uint16_t>(out, s.position ? s.position->col : kNoPos);
    }
    if (!out) throw io_error("dataset write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open dataset: " + path);
    const auto file_size = std::filesystem::file_size(path);

    serial::expect_magic(in, kMagic, "TAPD");
    const auto version = serial::read_le<std::uint32_t>(in, "version");
    if (version != kDatasetVersion) {
        throw format_error("unsupported TAPD version " + std::to_string(version) +
                           " at offset 4");
    }
    const auto count = serial::read_le<std::uint64_t>(in, "signal count");
    const auto sig_len = serial::read_le<std::uint32_t>(in, "signal length");
    if (sig_len != static_cast<std::uint32_t>(kSignalLength)) {
        throw format_error("signal length field is " + std::to_string(sig_len) + " (expected " +
                           std::to_string(kSignalLength) + ") at offset 16");
    }
    const auto domain_count = serial::read_le<std::uint16_t>(in, "domain count");
    std::vector<DomainTag> domains;
    for (std::uint16_t d = 0; d < domain_count; ++d) {
        domains.emplace_back(serial::read_string(in, "domain name"));
    }

    // The fixed-width records make the remaining byte count checkable before
    // any record is parsed; a corrupted count never yields a partial dataset.
    const auto header_end = static_cast<std::uint64_t>(in.tellg());
    const std::uint64_t expected = header_end + count * kRecordBytes;
    if (expected != file_size) {
        throw format_error("record section is " + std::to_string(file_size - header_end) +
                           " bytes but count " + std::to_string(count) + " requires " +
                           std::to_string(count * kRecordBytes) + " (offset " +
                           std::to_string(header_end) + ")");
    }

    Dataset ds;
    ds.signals.resize(count);
    bool any_fold = false;
    std::vector<std::uint8_t> folds(count, kNoFold);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto record_offset = static_cast<std::uint64_t>(in.tellg());
        try {
            Signal& s = ds.signals[i];
            s.samples.resize(kSignalLength);
            serial::read_f32_array(in, s.samples.data(), s.samples.size(), "samples");
            const auto label = serial::read_le<std::uint8_t>(in, "label");
            if (label != kNoLabel) {
                s.label = defect_class_from_code(label);
                s.truth = s.label;
            }
            const auto domain_id = serial::read_le<std::uint16_t>(in, "domain id");
            if (domain_id >= domains.size()) {
                throw format_error("domain id " + std::to_string(domain_id) + " out of table");
            }
            s.domain = domains[domain_id];
            const auto fold = serial::read_le<std::uint8_t>(in, "fold id");
            folds[i] = fold;
            if (fold != kNoFold) any_fold = true;
            const auto row = serial::read_le<std::uint16_t>(in, "row");
            const auto col = serial::read_le<std::uint16_t>(in, "col");
            if (row != kNoPos || col != kNoPos) s.position = GridPos{row, col};
        } catch (const Error& e) {
            throw format_error(std::string(e.what()) + " (record " + std::to_string(i) +
                               ", offset " + std::to_string(record_offset) + ")");
        }
    }
    if (any_fold) ds.folds = std::move(folds);
    return ds;
}

} // namespace tapnet
